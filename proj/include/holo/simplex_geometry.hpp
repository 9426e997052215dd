// Geometry of standard simplices in decreasing coordinates and the cubical
// path families used by the iterated-integral transport.
//
// The k-simplex is the set {1 >= t_1 >= ... >= t_k >= 0}. Its i-th vertex is
// (1,...,1,0,...,0) with i ones. Cofaces, degeneracies and the initial/final
// face inclusions are affine maps in these coordinates.
//
// The family theta_(k) assigns to x in I^{k-1} a piecewise linear path in the
// k-simplex from the last vertex to the first one: the projection of the
// backwards edge path through (x_1, ..., x_j, 0, ...) under the coordinatewise
// suffix-max retraction of the cube onto the simplex. Its adjoint I^k -> the
// simplex has degree (-1)^k, which is what orientation-sensitive consumers
// rely on.

#ifndef HOLO_SIMPLEX_GEOMETRY_HPP
#define HOLO_SIMPLEX_GEOMETRY_HPP

#include <vector>

#include "holo/common.hpp"

namespace holo {

using SimplexPoint = Vector;  // (t_1..t_k), decreasing in [0,1]
using CubePoint = Vector;

// Tolerance below which a max-tie counts as a non-smooth evaluation point, and
// the deterministic shift applied when retrying off the tie.
inline constexpr double kTieTolerance = 1e-10;
inline constexpr double kTieJitter = 1e-8;

bool in_simplex(const SimplexPoint& t, double tol = 1e-12);

// x -> A x + b in simplex coordinates.
struct AffineSimplexMap {
  Matrix A;
  Vector b;

  int source_dim() const { return static_cast<int>(A.cols()); }
  int target_dim() const { return static_cast<int>(A.rows()); }
  SimplexPoint operator()(const SimplexPoint& t) const;
};

AffineSimplexMap compose(const AffineSimplexMap& f, const AffineSimplexMap& g);
AffineSimplexMap identity_map(int k);

// Coface d_i : simplex_k -> simplex_{k+1}, 0 <= i <= k+1.
// i = 0 prepends a 1, i = k+1 appends a 0, otherwise coordinate t_i doubles.
AffineSimplexMap face_map(int i, int k);

// Degeneracy s_i : simplex_k -> simplex_{k-1} drops t_i, 1 <= i <= k.
AffineSimplexMap degeneracy_map(int i, int k);

// Initial face (first i+1 vertices): simplex_i -> simplex_k, appends zeros.
AffineSimplexMap back_face(int i, int k);
// Final face (last j+1 vertices): simplex_j -> simplex_k, prepends ones.
AffineSimplexMap front_face(int j, int k);

SimplexPoint vertex_point(int i, int k);

// Suffix-max retraction of the k-cube onto the k-simplex.
SimplexPoint pi_cube_to_simplex(const CubePoint& x);

// The path family: x in I^{k-1}, time t in [0,1].
SimplexPoint theta_path(int k, const CubePoint& x, double t);

// Jacobian of (t, x) -> theta at a smooth point; columns ordered
// (d/dt, d/dx_1, ..., d/dx_{k-1}). Throws NonSmoothPoint on a max-tie or a
// cell boundary within kTieTolerance.
Matrix theta_jacobian(int k, const CubePoint& x, double t);

// The adjoint map I^k -> simplex_k with u = (t, x_1..x_{k-1}).
SimplexPoint theta_cube_map(int k, const CubePoint& u);

// All times in [0,1] where the branch structure of theta(k, x, .) changes:
// the cell boundaries j/k plus the times where the moving coordinate crosses
// one of the frozen ones. Sorted, deduplicated, includes 0 and 1.
std::vector<double> theta_time_grid(int k, const CubePoint& x);

// Piecewise linear path: node times with node points, linear in between.
struct PiecewiseLinearPath {
  std::vector<double> times;        // 0 = times[0] < ... < times.back() = 1
  std::vector<SimplexPoint> points;

  int dim() const;
  SimplexPoint operator()(double t) const;
  SimplexPoint start() const { return points.front(); }
  SimplexPoint end() const { return points.back(); }
};

// Exact piecewise linear representation of t -> theta_path(k, x, t).
PiecewiseLinearPath theta_polyline(int k, const CubePoint& x);

// Concatenation through the middle vertex v_i: beta (in simplex_{k-i}) runs
// first along the final face, then alpha (in simplex_i) along the initial
// face; the time split is at (k-i)/k.
PiecewiseLinearPath mu_concat(const PiecewiseLinearPath& alpha,
                              const PiecewiseLinearPath& beta, int i, int k);

// True when the two paths trace the same polyline in the same direction,
// allowing monotone reparametrization (stationary stretches and interior
// collinear nodes are reduced away before comparing).
bool equal_up_to_reparam(const PiecewiseLinearPath& p, const PiecewiseLinearPath& q,
                         double tol);

}  // namespace holo

#endif
