// The transport series over the model simplex: closed-form cases, agreement
// with the ODE reference, degenerate vanishing, and the certified error
// control.

#include <cmath>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace holo;
using namespace holo::testing;

namespace {

PolyForm matrix_one_form(const std::vector<std::pair<Exponents, Matrix>>& terms) {
  const int dim = static_cast<int>(terms.front().second.rows());
  const GradedVectorSpace V = GradedVectorSpace::concentrated(0, dim);
  PolyForm out(1, V);
  for (const auto& [e, m] : terms) {
    GradedMap c(V, V, 0);
    c.set_block(0, m);
    out.add_term({1}, e, c);
  }
  return out;
}

}  // namespace

TEST_CASE("term signs follow the closed formula") {
  CHECK(transport_term_sign(0, 1) == 1);
  CHECK(transport_term_sign(1, 1) == -1);
  CHECK(transport_term_sign(1, 2) == 1);
  CHECK(transport_term_sign(2, 1) == -1);
  CHECK(transport_term_sign(2, 2) == 1);
  CHECK(transport_term_sign(3, 1) == 1);
  for (int k = 0; k <= 4; ++k) {
    for (int n = 1; n <= 4; ++n) {
      const int parity = (k * (k - 1) / 2 + k + n - 1) % 2;
      CHECK(transport_term_sign(k, n) == (parity == 0 ? 1 : -1));
    }
  }
}

TEST_CASE("holonomy of a constant matrix form is the matrix exponential") {
  Matrix A(2, 2);
  A << 0.2, -0.7, 0.4, 0.3;
  const PolyForm omega = matrix_one_form({{{0}, A}});
  const GradedMap H = hol_object(omega, 1, test_config());
  CHECK((H.block(0) - A.exp()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("nilpotent edge connection transports to the unipotent matrix") {
  Matrix A(2, 2);
  A << 0.0, 1.0, 0.0, 0.0;
  const PolyForm omega = matrix_one_form({{{0}, A}});
  const Matrix H = hol_object(omega, 1, test_config()).block(0);
  CHECK(H(0, 0) == Catch::Approx(1.0).margin(1e-12));
  CHECK(H(0, 1) == Catch::Approx(1.0).margin(1e-12));
  CHECK(H(1, 0) == Catch::Approx(0.0).margin(1e-12));
  CHECK(H(1, 1) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("commuting time dependence integrates the coefficient") {
  // a(t) = diag(t, 2t) dt  gives  diag(e^{1/2}, e^1): the transport runs
  // against the coordinate so only the integral of the coefficient matters.
  const Matrix D = (Matrix(2, 2) << 1.0, 0.0, 0.0, 2.0).finished();
  const PolyForm omega = matrix_one_form({{{1}, D}});
  const Matrix H = hol_object(omega, 1, test_config()).block(0);
  CHECK(H(0, 0) == Catch::Approx(std::exp(0.5)).epsilon(1e-9));
  CHECK(H(1, 1) == Catch::Approx(std::exp(1.0)).epsilon(1e-9));
  CHECK(std::abs(H(0, 1)) + std::abs(H(1, 0)) < 1e-12);
}

TEST_CASE("random interval connections match the ODE reference") {
  Rng rng(41);
  TransportConfig cfg;
  cfg.max_n = 60;
  cfg.tol = 1e-10;
  for (int trial = 0; trial < 5; ++trial) {
    const int dim = trial % 2 == 0 ? 2 : 3;
    const GradedVectorSpace V = GradedVectorSpace::concentrated(0, dim);
    const PolyForm omega = random_form(1, V, 1, rng, 3, 1.0);
    const GradedMap H = hol_object(omega, 1, cfg);
    const Matrix ref = oracle::interval_holonomy(
        [&](double t) {
          return omega.evaluate_component({1}, Vector::Constant(1, t)).block(0);
        },
        dim, 4000);
    CHECK((H.block(0) - ref).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("triangle transport of a constant two-form is minus half its coefficient") {
  const GradedVectorSpace V({{0, 1}, {1, 1}});
  GradedMap c(V, V, -1);
  c.set_block(1, Matrix::Constant(1, 1, 1.0));
  PolyForm omega(2, V);
  omega.add_term({1, 2}, {0, 0}, c);
  const GradedMap F2 = hol_object(omega, 2, test_config());
  CHECK(F2.degree() == -1);
  CHECK(F2.block(1)(0, 0) == Catch::Approx(-0.5).margin(1e-10));
}

TEST_CASE("volume integrals embedded as transport terms hit exact moments") {
  // For a scalar top form the single transport term reduces to an integral
  // over the simplex, up to the global term sign.
  const GradedVectorSpace V = GradedVectorSpace::line(0);
  auto volume = [&](int k, const Exponents& e) {
    GradedMap one(V, V, 0);
    one.set_block(0, Matrix::Constant(1, 1, 1.0));
    PolyForm omega(k, V);
    FormIndex I;
    for (int i = 1; i <= k; ++i) I.push_back(i);
    omega.add_term(I, e, one);
    // Undo the global term sign and the degree (-1)^k of the sweeping family.
    const double factor = transport_term_sign(k, 1) * (k % 2 == 0 ? 1.0 : -1.0);
    return factor * transport_term({omega}, k, test_config()).block(0)(0, 0);
  };
  CHECK(volume(2, {0, 0}) == Catch::Approx(0.5).margin(1e-10));
  CHECK(volume(2, {1, 0}) == Catch::Approx(1.0 / 3.0).margin(1e-10));
  CHECK(volume(3, {0, 0, 0}) == Catch::Approx(1.0 / 6.0).margin(1e-8));
}

TEST_CASE("path transport along the full polyline equals the edge holonomy") {
  Rng rng(42);
  const GradedVectorSpace V = GradedVectorSpace::concentrated(0, 2);
  const PolyForm omega = random_form(1, V, 1, rng, 2, 1.0);
  const PiecewiseLinearPath path = theta_polyline(1, CubePoint(0));
  const Matrix P = path_transport(omega, path, test_config());
  const Matrix H = hol_object(omega, 1, test_config()).block(0);
  CHECK((P - H).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("transport of degenerate pullbacks vanishes") {
  Rng rng(43);
  const GradedVectorSpace V({{0, 2}, {1, 1}});
  const PolyForm omega = random_form(1, V, 1, rng, 2, 0.8);
  // Pulling back along the collapse of the triangle onto the edge kills the
  // two-dimensional transport.
  for (int i = 1; i <= 2; ++i) {
    const PolyForm degen = pullback(omega, degeneracy_map(i, 2));
    const GradedMap F2 = hol_object(degen, 2, test_config());
    CHECK(F2.sup_norm() < 1e-10);
  }
}

TEST_CASE("the certified series rejects budgets that cannot reach the tolerance") {
  Matrix big = Matrix::Ones(2, 2) * 4.0;
  const PolyForm omega = matrix_one_form({{{0}, big}});
  TransportConfig tight;
  tight.max_n = 3;
  tight.tol = 1e-12;
  CHECK_THROWS_AS(hol_object(omega, 1, tight), AccuracyError);
}

TEST_CASE("transport terms reject mixed-degree arguments") {
  const GradedVectorSpace V({{0, 1}, {1, 1}});
  PolyForm mixed(1, V);
  GradedMap f(V, V, 0);
  f.set_block(0, Matrix::Constant(1, 1, 1.0));
  GradedMap g(V, V, 1);
  g.set_block(0, Matrix::Constant(1, 1, 1.0));
  mixed.add_term({1}, {0}, f);  // total degree 1
  mixed.add_term({}, {0}, f);   // total degree 0
  CHECK_THROWS_AS(transport_term({mixed}, 1), InvariantError);
}
