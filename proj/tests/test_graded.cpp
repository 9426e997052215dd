// Graded vector spaces, homogeneous maps, flattening, and direct sums.

#include <map>

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace holo;
using namespace holo::testing;

TEST_CASE("graded space bookkeeping") {
  const GradedVectorSpace V({{-1, 2}, {0, 3}, {2, 1}});
  CHECK(V.dim(-1) == 2);
  CHECK(V.dim(0) == 3);
  CHECK(V.dim(1) == 0);
  CHECK(V.dim(2) == 1);
  CHECK(V.total_dim() == 6);
  CHECK(V.min_degree() == -1);
  CHECK(V.max_degree() == 2);
  CHECK(V.offset(-1) == 0);
  CHECK(V.offset(0) == 2);
  CHECK(V.offset(2) == 5);
  CHECK(V.shifted(1).dim(-2) == 2);
  CHECK(V.shifted(1).dim(1) == 1);
  CHECK(GradedVectorSpace::line(3).dim(3) == 1);
  CHECK(GradedVectorSpace::concentrated(-2, 4).dim(-2) == 4);
  CHECK(V == GradedVectorSpace({{0, 3}, {-1, 2}, {2, 1}}));
  CHECK(V != V.shifted(1));
}

TEST_CASE("maps compose with added degrees and flatten consistently") {
  const GradedVectorSpace V({{0, 2}, {1, 2}});
  Rng rng(1);
  const GradedMap f = random_graded_map(V, 1, rng);
  const GradedMap g = random_graded_map(V, -1, rng);
  const GradedMap fg = compose(f, g);
  CHECK(fg.degree() == 0);
  CHECK((fg.flatten() - f.flatten() * g.flatten()).cwiseAbs().maxCoeff() < 1e-14);

  const GradedMap h = GradedMap::from_flat(f.flatten(), V, V, 1);
  CHECK((h.flatten() - f.flatten()).cwiseAbs().maxCoeff() == 0.0);

  const GradedMap id = GradedMap::identity(V);
  CHECK((compose(id, f).flatten() - f.flatten()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((compose(f, id).flatten() - f.flatten()).cwiseAbs().maxCoeff() == 0.0);

  Vector x = Vector::LinSpaced(V.total_dim(), 0.0, 1.0);
  CHECK((f.apply_flat(x) - f.flatten() * x).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("arithmetic and norms") {
  const GradedVectorSpace V({{0, 2}, {1, 1}});
  Rng rng(2);
  GradedMap f = random_graded_map(V, 0, rng);
  const GradedMap g = random_graded_map(V, 0, rng);
  const GradedMap s = f + g * 2.0;
  CHECK((s.flatten() - (f.flatten() + 2.0 * g.flatten())).cwiseAbs().maxCoeff() < 1e-14);
  f *= 0.0;
  CHECK(f.is_zero());
  CHECK(GradedMap(V, V, 3).is_zero());
  CHECK(g.sup_norm() == g.flatten().cwiseAbs().maxCoeff());
  CHECK(g.operator_norm() ==
        Catch::Approx(g.flatten().jacobiSvd().singularValues()(0)).margin(1e-12));
}

TEST_CASE("blocks outside the grading are rejected") {
  const GradedVectorSpace V({{0, 2}, {1, 1}});
  GradedMap f(V, V, 1);
  CHECK_THROWS_AS(f.mutable_block(1), InvariantError);  // target degree 2 is empty
  CHECK(f.block(0).rows() == 1);
  CHECK(f.block(0).cols() == 2);
  CHECK_FALSE(f.has_block(0));
  f.set_block(0, Matrix::Ones(1, 2));
  CHECK(f.has_block(0));
}

TEST_CASE("direct sums embed and extract blocks") {
  const GradedVectorSpace A = GradedVectorSpace::concentrated(0, 2);
  const GradedVectorSpace B({{0, 1}, {1, 1}});
  const DirectSum sum({A, B});
  CHECK(sum.parts_count() == 2);
  CHECK(sum.total().dim(0) == 3);
  CHECK(sum.total().dim(1) == 1);

  Rng rng(3);
  GradedMap f(B, A, 0);  // part 1 -> part 0
  f.set_block(0, random_matrix(2, 1, rng));
  const GradedMap big = sum.embed(f, 0, 1);
  CHECK(big.source() == sum.total());
  const GradedMap back = sum.extract(big, 0, 1);
  CHECK((back.flatten() - f.flatten()).cwiseAbs().maxCoeff() == 0.0);
  // Round trip through a different block keeps everything else zero.
  CHECK(sum.extract(big, 1, 1).is_zero());
  CHECK(sum.extract(big, 0, 0).is_zero());
}
