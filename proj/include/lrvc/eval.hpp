// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "lrvc/eval/convert.hpp"
#include "lrvc/eval/evaluate.hpp"
#include "lrvc/eval/metrics.hpp"
