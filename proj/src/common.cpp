#include "holo/common.hpp"

#include <cstdio>

namespace holo {

namespace {

double pairwise_sum_range(std::span<const double> v, std::size_t lo, std::size_t hi) {
  if (hi - lo <= 8) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum_range(v, lo, mid) + pairwise_sum_range(v, mid, hi);
}

Matrix pairwise_sum_range(const std::vector<Matrix>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return v[lo];
  if (hi - lo <= 8) {
    Matrix s = v[lo];
    for (std::size_t i = lo + 1; i < hi; ++i) s += v[i];
    return s;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum_range(v, lo, mid) + pairwise_sum_range(v, mid, hi);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return pairwise_sum_range(values, 0, values.size());
}

Matrix pairwise_sum(const std::vector<Matrix>& values) {
  if (values.empty()) return Matrix();
  return pairwise_sum_range(values, 0, values.size());
}

std::string format_double(double x) {
  if (x == 0.0) x = 0.0;  // normalize -0
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

}  // namespace holo
