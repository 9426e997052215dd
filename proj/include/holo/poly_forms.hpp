#pragma once

#include <functional>
#include <map>
#include <vector>

#include "holo/common.hpp"
#include "holo/graded.hpp"
#include "holo/simplex_geometry.hpp"

namespace holo {

// Monomial exponents, one entry per simplex coordinate.
using Exponents = std::vector<int>;
// Strictly increasing list of 1-based coordinate indices naming dt_{i1} ^ ... ^ dt_{ip}.
using FormIndex = std::vector<int>;

// Merges two strictly increasing index lists; returns the permutation sign
// (+1/-1) or 0 when they overlap.  `merged` receives the sorted union.
int form_index_merge_sign(const FormIndex& a, const FormIndex& b, FormIndex& merged);

// Polynomial differential form on a simplex with graded-endomorphism
// coefficients: sum of terms  C * t^e * dt_I  with C : V -> V homogeneous.
class PolyForm {
 public:
  PolyForm(int coord_dim, GradedVectorSpace space);

  int coord_dim() const { return coord_dim_; }
  const GradedVectorSpace& space() const { return space_; }

  void add_term(const FormIndex& I, const Exponents& e, const GradedMap& coeff);
  void for_each_term(
      const std::function<void(const FormIndex&, const Exponents&, const GradedMap&)>& fn) const;

  bool empty() const { return terms_.empty(); }
  std::size_t term_count() const;

  // True when every nonzero term satisfies |I| + deg(coeff) == total.
  bool is_homogeneous_total_degree(int total) const;
  // True when the form has no dt factors at all.
  bool is_zero_form() const;

  PolyForm operator+(const PolyForm& other) const;
  PolyForm operator-(const PolyForm& other) const;
  PolyForm operator*(double scalar) const;

  // Evaluates the dt_I component at a point of the simplex.
  GradedMap evaluate_component(const FormIndex& I, const SimplexPoint& t) const;
  std::map<FormIndex, GradedMap> evaluate(const SimplexPoint& t) const;

  // Largest absolute entry over all coefficient blocks.
  double coefficient_sup_norm() const;
  // Sum over terms of operator norms weighted by base^(number of dt factors).
  double weighted_norm(double base) const;

  // Drops terms whose coefficient sup norm is at most tol.
  PolyForm pruned(double tol = 1e-30) const;

 private:
  int coord_dim_;
  GradedVectorSpace space_;
  // Inner key pairs the monomial with the internal degree of the coefficient
  // so that terms of different degree never collide.
  std::map<FormIndex, std::map<std::pair<Exponents, int>, GradedMap>> terms_;
};

PolyForm zero_form_identity(int coord_dim, const GradedVectorSpace& space);

// Graded wedge: (A dt_I)(B dt_J) = (-1)^{|I| deg B} (A o B) dt_I ^ dt_J.
PolyForm wedge(const PolyForm& a, const PolyForm& b);

PolyForm exterior_derivative(const PolyForm& a);

// Pullback along an affine map phi: source simplex -> target simplex, where
// `a` lives on the target.  Coordinates substitute affinely, dt's transform
// by the linear part.
PolyForm pullback(const PolyForm& a, const AffineSimplexMap& phi);

// Coefficient sup norm of  d(omega) + omega ^ omega.
double mc_residual(const PolyForm& omega);

// Invertible gauge: polynomial 0-form of internal degree 0 together with an
// explicit polynomial inverse.
struct GaugeElement {
  PolyForm f;
  PolyForm f_inverse;
};

// Largest deviation of f * f_inverse and f_inverse * f from the identity.
double gauge_pair_residual(const GaugeElement& g);

// omega . f  =  f^{-1} omega f + f^{-1} df.
PolyForm gauge_act(const PolyForm& omega, const GaugeElement& g);

}  // namespace holo
