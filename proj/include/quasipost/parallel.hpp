#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qp {

inline bool in_parallel_region() {
#ifdef _OPENMP
  return omp_in_parallel() != 0;
#else
  return false;
#endif
}

inline int hardware_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Fixed block size for the evaluation kernels. Block boundaries depend only
// on n and partial results are combined in block order, so results are
// bit-identical for any thread count (including a serial build).
inline constexpr Eigen::Index kBlock = 8192;

inline Eigen::Index num_blocks(Eigen::Index n) {
  return n <= 0 ? 0 : (n + kBlock - 1) / kBlock;
}

// Runs fn(block, lo, len) over the fixed blocks of [0, n). Exceptions thrown
// by a block are captured and the one from the lowest block index is
// rethrown after the loop.
template <class Fn>
void for_each_block(Eigen::Index n, Fn&& fn) {
  const Eigen::Index nblocks = num_blocks(n);
  if (nblocks == 0) return;
  if (nblocks == 1) {
    fn(Eigen::Index{0}, Eigen::Index{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(nblocks));
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (!in_parallel_region() && nblocks > 1)
#endif
  for (Eigen::Index b = 0; b < nblocks; ++b) {
    const Eigen::Index lo = b * kBlock;
    const Eigen::Index len = std::min(kBlock, n - lo);
    try {
      fn(b, lo, len);
    } catch (...) {
      errs[static_cast<std::size_t>(b)] = std::current_exception();
    }
  }
  for (const auto& e : errs) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace qp
