#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "holo/common.hpp"

// Reference computations used to validate the integrator.  Everything here is
// deliberately self-contained: plain matrices, classical algorithms, no reuse
// of the production integration code.
namespace holo::oracle {

// Fundamental solution at time 1 of H'(t) = a(t) H(t), H(0) = I, via fixed-step
// RK4.  When richardson_error is supplied it receives the step-doubling
// estimate |H_h - H_{h/2}| / 15 and the returned value is the fine solution.
Matrix time_ordered_exponential(const std::function<Matrix(double)>& a, int dim,
                                int steps = 2000, double* richardson_error = nullptr);

// Holonomy of a matrix 1-form a(t) dt over the 1-simplex, oriented from the
// barycentric end vertex to the start vertex: solves H' = a(1 - t) H.
Matrix interval_holonomy(const std::function<Matrix(double)>& a, int dim,
                         int steps = 2000, double* richardson_error = nullptr);

// Exact integral of the monomial prod_j t_j^{e_j} over the ordered simplex
// 1 >= t_1 >= ... >= t_k >= 0  (k = exponents.size()).
double simplex_monomial_integral(const std::vector<int>& exponents);

// Exact integral of a polynomial given as (exponents, coefficient) pairs.
double simplex_polynomial_integral(
    const std::vector<std::pair<std::vector<int>, double>>& terms);

}  // namespace holo::oracle
