// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "lrvc/synth/corpus.hpp"
#include "lrvc/synth/script.hpp"
#include "lrvc/synth/speaker.hpp"
#include "lrvc/synth/synthesize.hpp"
