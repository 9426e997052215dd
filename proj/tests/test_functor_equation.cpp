// Chains of flat connections joined by connecting forms integrate, via the
// corner transport, to cochains between the integrated representations.  The
// assignment satisfies the morphism equation: the covariant differential and
// the wedge composition of connecting forms on one side match the morphism
// differential and composition of cochains on the other.

#include <cstddef>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace holo;
using namespace holo::testing;

namespace {

ChainContext make_chain(int m, const std::vector<int>& x_degrees, Rng& rng) {
  const std::vector<GradedVectorSpace> all{GradedVectorSpace({{0, 2}, {1, 2}}),
                                           GradedVectorSpace({{0, 1}, {1, 2}}),
                                           GradedVectorSpace({{0, 2}, {1, 1}})};
  const int n = static_cast<int>(x_degrees.size());
  std::vector<GradedVectorSpace> spaces(all.begin(), all.begin() + n + 1);
  std::vector<PolyForm> conns;
  for (int i = 0; i <= n; ++i)
    conns.push_back(random_flat_connection(m, spaces[static_cast<std::size_t>(i)], rng, 0.15));
  const DirectSum sum(spaces);
  std::vector<PolyForm> xs;
  for (int i = 1; i <= n; ++i) {
    PolyForm x(m, sum.total());
    const PolyForm dense =
        random_form(m, sum.total(), x_degrees[static_cast<std::size_t>(i - 1)], rng, 1, 0.3);
    dense.for_each_term([&](const FormIndex& I, const Exponents& e, const GradedMap& c) {
      x.add_term(I, e, sum.embed(sum.extract(c, i - 1, i), i - 1, i));
    });
    xs.push_back(x);
  }
  TransportConfig cfg;
  cfg.max_n = 100;
  cfg.tol = 1e-10;
  cfg.quad_order = 10;
  return ChainContext(m, std::move(spaces), std::move(conns), std::move(xs), cfg);
}

}  // namespace

TEST_CASE("a single connecting form over the interval intertwines the transports") {
  Rng rng(201);
  for (int deg : {0, 1}) {
    CAPTURE(deg);
    CHECK(chain_residual(make_chain(1, {deg}, rng)) < 1e-5);
  }
}

TEST_CASE("a single connecting form over the triangle intertwines the transports") {
  Rng rng(202);
  for (int deg : {0, 1}) {
    CAPTURE(deg);
    CHECK(chain_residual(make_chain(2, {deg}, rng)) < 1e-5);
  }
}

TEST_CASE("two-step chains satisfy the equation over the interval") {
  Rng rng(203);
  const std::vector<std::vector<int>> combos{{0, 1}, {1, 0}, {1, 1}, {0, 0}};
  for (const auto& degs : combos) {
    CAPTURE(degs[0], degs[1]);
    CHECK(chain_residual(make_chain(1, degs, rng)) < 1e-5);
  }
}

TEST_CASE("two-step chains satisfy the equation over the triangle") {
  Rng rng(204);
  const std::vector<std::vector<int>> combos{{0, 1}, {1, 1}};
  for (const auto& degs : combos) {
    CAPTURE(degs[0], degs[1]);
    CHECK(chain_residual(make_chain(2, degs, rng)) < 1e-5);
  }
}

TEST_CASE("flipping the differential sign breaks the chain equation") {
  Rng rng(205);
  CHECK(chain_residual(make_chain(1, {0}, rng), EquationSigns{-1.0, 1.0}) > 1e-3);
  CHECK(chain_residual(make_chain(2, {1, 1}, rng), EquationSigns{1.0, -1.0}) > 1e-4);
}
