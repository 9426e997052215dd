// Polynomial differential forms with graded coefficients: wedge signs, the
// exterior derivative, pullbacks, and gauge transformations.

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace holo;
using namespace holo::testing;

namespace {

double form_sup_diff(const PolyForm& a, const PolyForm& b) {
  return (a - b).pruned(0.0).coefficient_sup_norm();
}

}  // namespace

TEST_CASE("wedge obeys the sign rule against coefficient degrees") {
  // (A dt_1)(B dt_2) = (-1)^{deg B} (A o B) dt_1 dt_2.
  const GradedVectorSpace V({{0, 1}, {1, 1}});
  GradedMap up(V, V, 1);
  up.set_block(0, Matrix::Constant(1, 1, 2.0));
  GradedMap down(V, V, -1);
  down.set_block(1, Matrix::Constant(1, 1, 3.0));

  PolyForm a(2, V);
  a.add_term({1}, {0, 0}, down);
  PolyForm b(2, V);
  b.add_term({2}, {0, 0}, up);

  // deg(up) = 1 is odd, so up crossing dt_1 flips the sign; down o up acts
  // on the degree-0 part.
  const GradedMap c = wedge(a, b).evaluate_component({1, 2}, Vector::Zero(2));
  CHECK(c.degree() == 0);
  CHECK(c.block(0)(0, 0) == Catch::Approx(-6.0));

  // In the other order deg(down) = -1 crossing dt_2 flips once and the
  // orientation dt_2 ^ dt_1 = -dt_1 ^ dt_2 flips again.
  const GradedMap d = wedge(b, a).evaluate_component({1, 2}, Vector::Zero(2));
  CHECK(d.block(1)(0, 0) == Catch::Approx(6.0));

  PolyForm rep(2, V);
  rep.add_term({1}, {0, 0}, up);
  CHECK(wedge(rep, rep).empty());  // dt_1 ^ dt_1 = 0
}

TEST_CASE("wedge is associative and distributes over sums") {
  const GradedVectorSpace V({{0, 2}, {1, 1}});
  Rng rng(21);
  const PolyForm a = random_form(2, V, 1, rng);
  const PolyForm b = random_form(2, V, 0, rng);
  const PolyForm c = random_form(2, V, 1, rng);
  CHECK(form_sup_diff(wedge(wedge(a, b), c), wedge(a, wedge(b, c))) < 1e-12);
  CHECK(form_sup_diff(wedge(a + c, b), wedge(a, b) + wedge(c, b)) < 1e-12);
}

TEST_CASE("exterior derivative squares to zero and is a graded derivation") {
  const GradedVectorSpace V({{0, 2}, {1, 1}});
  Rng rng(22);
  for (int deg : {0, 1, 2}) {
    const PolyForm a = random_form(2, V, deg, rng);
    if (!exterior_derivative(a).empty())
      CHECK(exterior_derivative(exterior_derivative(a)).pruned().coefficient_sup_norm() <
            1e-12);
    const PolyForm b = random_form(2, V, 1, rng);
    // d(ab) = (da)b + (-1)^{|a|} a (db)  with |a| the total degree.
    const PolyForm lhs = exterior_derivative(wedge(a, b));
    const double sgn = deg % 2 == 0 ? 1.0 : -1.0;
    const PolyForm rhs =
        wedge(exterior_derivative(a), b) + wedge(a, exterior_derivative(b)) * sgn;
    CHECK(form_sup_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("derivative of a monomial lowers the exponent") {
  const GradedVectorSpace V = GradedVectorSpace::line(0);
  GradedMap one(V, V, 0);
  one.set_block(0, Matrix::Constant(1, 1, 1.0));
  PolyForm f(1, V);
  f.add_term({}, {3}, one);  // t^3
  const GradedMap c = exterior_derivative(f).evaluate_component({1}, Vector::Constant(1, 0.5));
  CHECK(c.block(0)(0, 0) == Catch::Approx(3 * 0.25));
}

TEST_CASE("pullback is functorial and matches substitution") {
  const GradedVectorSpace V({{0, 2}, {1, 1}});
  Rng rng(23);
  const PolyForm a = random_form(3, V, 1, rng);
  const AffineSimplexMap f = face_map(1, 2);  // triangle -> tetrahedron
  const AffineSimplexMap g = face_map(2, 1);  // edge -> triangle
  CHECK(form_sup_diff(pullback(pullback(a, f), g), pullback(a, compose(f, g))) < 1e-12);

  // Pullback commutes with the exterior derivative.
  CHECK(form_sup_diff(exterior_derivative(pullback(a, f)),
                      pullback(exterior_derivative(a), f)) < 1e-12);

  // Evaluating the pulled-back 0-form part agrees with evaluating at the image.
  const Vector t = Vector::Constant(1, 0.3);
  const GradedMap lhs = pullback(a, compose(f, g)).evaluate_component({}, t);
  const GradedMap rhs = a.evaluate_component({}, compose(f, g)(t));
  CHECK((lhs.flatten() - rhs.flatten()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("gauge pairs invert and act by conjugation plus derivative") {
  const GradedVectorSpace V({{0, 2}, {1, 2}});
  Rng rng(24);
  const GaugeElement g = random_polynomial_gauge(2, V, rng);
  CHECK(gauge_pair_residual(g) < 1e-12);

  const PolyForm omega = random_form(2, V, 1, rng);
  const PolyForm acted = gauge_act(omega, g);
  const PolyForm manual = wedge(wedge(g.f_inverse, omega), g.f) +
                          wedge(g.f_inverse, exterior_derivative(g.f));
  CHECK(form_sup_diff(acted, manual) < 1e-12);
}

TEST_CASE("gauge action preserves flatness") {
  const GradedVectorSpace V({{0, 2}, {1, 2}});
  Rng rng(25);
  const PolyForm flat = random_flat_connection(2, V, rng);
  CHECK(mc_residual(flat) < 1e-10);
  const GaugeElement g = random_polynomial_gauge(2, V, rng);
  CHECK(mc_residual(gauge_act(flat, g)) < 1e-9);

  // A generic connection is not flat; the residual reports that.
  const PolyForm generic = random_form(2, V, 1, rng);
  CHECK(mc_residual(generic) > 1e-3);
}

TEST_CASE("homogeneity bookkeeping") {
  const GradedVectorSpace V({{0, 2}, {1, 1}});
  Rng rng(26);
  const PolyForm a = random_form(2, V, 1, rng);
  CHECK(a.is_homogeneous_total_degree(1));
  CHECK_FALSE(a.is_homogeneous_total_degree(0));
  CHECK(total_degree_of(a) == 1);
  const PolyForm empty(2, V);
  CHECK(empty.is_homogeneous_total_degree(5));  // vacuously
  CHECK_THROWS_AS(total_degree_of(empty), InvariantError);
}
