#pragma once

#include <omp.h>

#include <cstdint>
#include <exception>
#include <vector>

#include "benard/random.hpp"

namespace benard {

/// Monte-Carlo path map. Path p always draws from make_stream(seed, p), and results
/// are stored by path index, so the output does not depend on the thread count.
template <class Result, class Fn>
std::vector<Result> map_paths(int paths, std::uint64_t seed, int threads, Fn&& fn) {
  std::vector<Result> out(static_cast<std::size_t>(paths));
  std::exception_ptr failure;
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt)
  for (int p = 0; p < paths; ++p) {
    try {
      Rng rng = make_stream(seed, static_cast<std::uint64_t>(p));
      out[static_cast<std::size_t>(p)] = fn(p, rng);
    } catch (...) {
#pragma omp critical(benard_map_paths)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

/// Serial reference for map_paths; must agree bit for bit.
template <class Result, class Fn>
std::vector<Result> map_paths_serial(int paths, std::uint64_t seed, Fn&& fn) {
  std::vector<Result> out(static_cast<std::size_t>(paths));
  for (int p = 0; p < paths; ++p) {
    Rng rng = make_stream(seed, static_cast<std::uint64_t>(p));
    out[static_cast<std::size_t>(p)] = fn(p, rng);
  }
  return out;
}

/// Fixed-shape pairwise tree sum (result independent of scheduling).
double pairwise_sum(const std::vector<double>& x);
double pairwise_mean(const std::vector<double>& x);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int count = 0;
};
MeanEstimate estimate_mean(const std::vector<double>& x);

void set_thread_count(int threads);

}  // namespace benard
