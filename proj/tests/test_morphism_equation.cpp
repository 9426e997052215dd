// The transport map from polynomial forms on the model simplex to normalized
// cochains on its nerve satisfies the morphism equation relating the exterior
// derivative and wedge product on one side to the cochain differential and
// slicewise composition on the other.  These tests evaluate both sides on
// random tuples over the triangle; the global sign choices in the evaluator
// are pinned by negative controls.

#include <array>
#include <utility>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace holo;
using namespace holo::testing;

namespace {

FormContext make_context(const GradedVectorSpace& V) {
  FormContext ctx = FormContext::model(2, V);
  ctx.cfg.max_n = 60;
  return ctx;
}

}  // namespace

TEST_CASE("transport of a single form commutes with the differentials") {
  const GradedVectorSpace V({{0, 2}, {1, 1}});
  const FormContext ctx = make_context(V);
  Rng rng(101);
  for (int deg : {0, 1, 2}) {
    CAPTURE(deg);
    const std::vector<PolyForm> args{random_form(2, V, deg, rng, 1, 0.4)};
    CHECK(transport_residual(ctx, args) < 1e-6);
  }
}

TEST_CASE("flipping the differential sign breaks the one-argument equation") {
  const GradedVectorSpace V({{0, 2}, {1, 1}});
  const FormContext ctx = make_context(V);
  Rng rng(102);
  const std::vector<PolyForm> args{random_form(2, V, 0, rng, 1, 0.4)};
  CHECK(transport_residual(ctx, args, EquationSigns{-1.0, 1.0}) > 1e-3);
}

TEST_CASE("transport of pairs satisfies the two-argument equation") {
  const GradedVectorSpace V({{0, 2}, {1, 1}});
  const FormContext ctx = make_context(V);
  Rng rng(103);
  const std::vector<std::pair<int, int>> degs{{1, 1}, {1, 2}, {2, 1}, {0, 1}, {2, 2}};
  for (const auto& [d1, d2] : degs) {
    CAPTURE(d1, d2);
    const std::vector<PolyForm> args{random_form(2, V, d1, rng, 1, 0.4),
                                     random_form(2, V, d2, rng, 1, 0.4)};
    CHECK(transport_residual(ctx, args) < 1e-6);
  }
}

TEST_CASE("flipping the composition sign breaks the two-argument equation") {
  const GradedVectorSpace V({{0, 2}, {1, 1}});
  const FormContext ctx = make_context(V);
  Rng rng(104);
  const std::vector<PolyForm> args{random_form(2, V, 1, rng, 1, 0.4),
                                   random_form(2, V, 1, rng, 1, 0.4)};
  CHECK(transport_residual(ctx, args, EquationSigns{1.0, -1.0}) > 1e-3);
}

TEST_CASE("transport of triples closes with no further sign freedom") {
  const GradedVectorSpace V({{0, 2}, {1, 1}});
  const FormContext ctx = make_context(V);
  Rng rng(105);
  const std::vector<std::array<int, 3>> degs{{1, 1, 1}, {1, 2, 1}, {0, 1, 2}, {2, 0, 1}};
  for (const auto& d : degs) {
    CAPTURE(d[0], d[1], d[2]);
    const std::vector<PolyForm> args{random_form(2, V, d[0], rng, 1, 0.4),
                                     random_form(2, V, d[1], rng, 1, 0.4),
                                     random_form(2, V, d[2], rng, 1, 0.4)};
    CHECK(transport_residual(ctx, args) < 1e-6);
  }
}

TEST_CASE("the equations hold over a three-degree grading") {
  const GradedVectorSpace V({{0, 1}, {1, 1}, {2, 1}});
  const FormContext ctx = make_context(V);
  Rng rng(106);
  CHECK(transport_residual(ctx, {random_form(2, V, 1, rng, 1, 0.4)}) < 1e-6);
  CHECK(transport_residual(ctx, {random_form(2, V, 1, rng, 1, 0.4),
                                 random_form(2, V, 2, rng, 1, 0.4)}) < 1e-6);
  CHECK(transport_residual(ctx, {random_form(2, V, 1, rng, 1, 0.4),
                                 random_form(2, V, 1, rng, 1, 0.4),
                                 random_form(2, V, 1, rng, 1, 0.4)}) < 1e-6);
}
