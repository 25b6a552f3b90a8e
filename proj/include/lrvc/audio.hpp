// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "lrvc/audio/griffin_lim.hpp"
#include "lrvc/audio/mel.hpp"
#include "lrvc/audio/pitch.hpp"
#include "lrvc/audio/resample.hpp"
#include "lrvc/audio/rvf.hpp"
#include "lrvc/audio/segment.hpp"
#include "lrvc/audio/stft.hpp"
#include "lrvc/audio/wav.hpp"
