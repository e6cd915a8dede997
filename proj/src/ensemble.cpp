#include "benard/ensemble.hpp"

#include <cmath>

namespace benard {

namespace {

double tree(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return tree(x, half) + tree(x + half, n - half);
}

}  // namespace

double pairwise_sum(const std::vector<double>& x) { return tree(x.data(), x.size()); }

double pairwise_mean(const std::vector<double>& x) {
  return x.empty() ? 0.0 : pairwise_sum(x) / static_cast<double>(x.size());
}

MeanEstimate estimate_mean(const std::vector<double>& x) {
  MeanEstimate e;
  e.count = static_cast<int>(x.size());
  if (x.empty()) return e;
  e.mean = pairwise_mean(x);
  if (x.size() > 1) {
    std::vector<double> dev(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) dev[i] = (x[i] - e.mean) * (x[i] - e.mean);
    e.std_error = std::sqrt(pairwise_sum(dev) / static_cast<double>(x.size() - 1) /
                            static_cast<double>(x.size()));
  }
  return e;
}

void set_thread_count(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

}  // namespace benard
