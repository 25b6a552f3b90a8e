// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "lrvc/model/config.hpp"
#include "lrvc/model/decoder.hpp"
#include "lrvc/model/model.hpp"
#include "lrvc/model/speaker.hpp"
