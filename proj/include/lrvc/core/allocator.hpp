// Copyright 2026 The lrvc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace lrvc {

/// Keeps freed tape buffers inside the heap. Training allocates and frees
/// many multi-megabyte buffers per step; with glibc defaults each one is a
/// fresh mmap and the kernel spends more time zeroing pages than the step
/// spends computing. No-op on other C libraries.
inline void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 32 * 1024 * 1024);
  mallopt(M_TRIM_THRESHOLD, 1024 * 1024 * 1024);
  mallopt(M_TOP_PAD, 256 * 1024 * 1024);
#endif
}

}  // namespace lrvc
