// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "lrvc/compute/adam.hpp"
#include "lrvc/compute/grad_check.hpp"
#include "lrvc/compute/init.hpp"
#include "lrvc/compute/kernels.hpp"
#include "lrvc/compute/ops.hpp"
#include "lrvc/compute/tape.hpp"
#include "lrvc/compute/tensor.hpp"
