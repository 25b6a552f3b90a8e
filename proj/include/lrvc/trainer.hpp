// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "lrvc/trainer/checkpoint.hpp"
#include "lrvc/trainer/config.hpp"
#include "lrvc/trainer/features.hpp"
#include "lrvc/trainer/trainer.hpp"
