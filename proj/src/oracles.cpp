#include "holo/oracles.hpp"

#include <cmath>

namespace holo::oracle {

namespace {

Matrix rk4_solve(const std::function<Matrix(double)>& a, int dim, int steps) {
  Matrix H = Matrix::Identity(dim, dim);
  const double h = 1.0 / steps;
  for (int s = 0; s < steps; ++s) {
    const double t = s * h;
    const Matrix k1 = a(t) * H;
    const Matrix k2 = a(t + 0.5 * h) * (H + 0.5 * h * k1);
    const Matrix k3 = a(t + 0.5 * h) * (H + 0.5 * h * k2);
    const Matrix k4 = a(t + h) * (H + h * k3);
    H += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return H;
}

}  // namespace

Matrix time_ordered_exponential(const std::function<Matrix(double)>& a, int dim,
                                int steps, double* richardson_error) {
  const Matrix fine = rk4_solve(a, dim, 2 * steps);
  if (richardson_error != nullptr) {
    const Matrix coarse = rk4_solve(a, dim, steps);
    *richardson_error = (fine - coarse).cwiseAbs().maxCoeff() / 15.0;
  }
  return fine;
}

Matrix interval_holonomy(const std::function<Matrix(double)>& a, int dim,
                         int steps, double* richardson_error) {
  auto reversed = [&a](double t) { return a(1.0 - t); };
  return time_ordered_exponential(reversed, dim, steps, richardson_error);
}

double simplex_monomial_integral(const std::vector<int>& exponents) {
  // Integrate t_k, then t_{k-1}, ...; each step divides by the running
  // exponent sum plus the number of variables integrated so far.
  const int k = static_cast<int>(exponents.size());
  double value = 1.0;
  int suffix = 0;
  for (int j = k; j >= 1; --j) {
    suffix += exponents[static_cast<std::size_t>(j - 1)];
    value /= static_cast<double>(suffix + (k - j + 1));
  }
  return value;
}

double simplex_polynomial_integral(
    const std::vector<std::pair<std::vector<int>, double>>& terms) {
  std::vector<double> parts;
  parts.reserve(terms.size());
  for (const auto& [e, c] : terms) parts.push_back(c * simplex_monomial_integral(e));
  return pairwise_sum(parts);
}

}  // namespace holo::oracle
