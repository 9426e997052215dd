#include "holo/simplex_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace holo {

namespace {

// Value of the cube coordinate feeding cell i; the last one is pinned to 1.
double cube_coord(int k, const CubePoint& x, int i) {
  return (i == k) ? 1.0 : x(i - 1);
}

// Cell index i in 1..k with t in [(k-i)/k, (k-i+1)/k].
int theta_cell(int k, double t) {
  const double c = static_cast<double>(k) * t;
  int i = k - static_cast<int>(std::floor(c));
  return std::clamp(i, 1, k);
}

}  // namespace

bool in_simplex(const SimplexPoint& t, double tol) {
  double prev = 1.0 + tol;
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    if (t(j) > prev + tol || t(j) < -tol) return false;
    prev = t(j);
  }
  return true;
}

SimplexPoint AffineSimplexMap::operator()(const SimplexPoint& t) const {
  if (t.size() != A.cols()) throw InvariantError("AffineSimplexMap: dimension mismatch");
  return A * t + b;
}

AffineSimplexMap compose(const AffineSimplexMap& f, const AffineSimplexMap& g) {
  if (f.A.cols() != g.A.rows()) throw InvariantError("compose(AffineSimplexMap): dimension mismatch");
  return AffineSimplexMap{f.A * g.A, f.A * g.b + f.b};
}

AffineSimplexMap identity_map(int k) {
  return AffineSimplexMap{Matrix::Identity(k, k), Vector::Zero(k)};
}

AffineSimplexMap face_map(int i, int k) {
  if (i < 0 || i > k + 1) throw InvariantError("face_map: index out of range");
  Matrix A = Matrix::Zero(k + 1, k);
  Vector b = Vector::Zero(k + 1);
  if (i == 0) {
    b(0) = 1.0;
    for (int r = 0; r < k; ++r) A(r + 1, r) = 1.0;
  } else if (i == k + 1) {
    for (int r = 0; r < k; ++r) A(r, r) = 1.0;
  } else {
    // coordinates (t_1,...,t_i,t_i,...,t_k); rows 0..i-1 copy, row i repeats i-1
    for (int r = 0; r < i; ++r) A(r, r) = 1.0;
    A(i, i - 1) = 1.0;
    for (int r = i; r < k; ++r) A(r + 1, r) = 1.0;
  }
  return AffineSimplexMap{A, b};
}

AffineSimplexMap degeneracy_map(int i, int k) {
  if (i < 1 || i > k) throw InvariantError("degeneracy_map: index out of range");
  Matrix A = Matrix::Zero(k - 1, k);
  int r = 0;
  for (int c = 0; c < k; ++c) {
    if (c == i - 1) continue;
    A(r++, c) = 1.0;
  }
  return AffineSimplexMap{A, Vector::Zero(k - 1)};
}

AffineSimplexMap back_face(int i, int k) {
  if (i < 0 || i > k) throw InvariantError("back_face: index out of range");
  Matrix A = Matrix::Zero(k, i);
  for (int r = 0; r < i; ++r) A(r, r) = 1.0;
  return AffineSimplexMap{A, Vector::Zero(k)};
}

AffineSimplexMap front_face(int j, int k) {
  if (j < 0 || j > k) throw InvariantError("front_face: index out of range");
  Matrix A = Matrix::Zero(k, j);
  Vector b = Vector::Zero(k);
  for (int r = 0; r < k - j; ++r) b(r) = 1.0;
  for (int r = 0; r < j; ++r) A(k - j + r, r) = 1.0;
  return AffineSimplexMap{A, b};
}

SimplexPoint vertex_point(int i, int k) {
  if (i < 0 || i > k) throw InvariantError("vertex_point: index out of range");
  Vector v = Vector::Zero(k);
  for (int r = 0; r < i; ++r) v(r) = 1.0;
  return v;
}

SimplexPoint pi_cube_to_simplex(const CubePoint& x) {
  const Eigen::Index k = x.size();
  Vector t(k);
  double running = 0.0;
  for (Eigen::Index j = k - 1; j >= 0; --j) {
    running = std::max(running, x(j));
    t(j) = running;
  }
  return t;
}

SimplexPoint theta_path(int k, const CubePoint& x, double t) {
  if (k == 0) return Vector(0);
  if (x.size() != k - 1) throw InvariantError("theta_path: x must have k-1 coordinates");
  const int i = theta_cell(k, t);
  const double xi = cube_coord(k, x, i);
  // Moving coordinate: decreases from x_i to 0 across the cell.
  const double y = (static_cast<double>(k - i + 1) - static_cast<double>(k) * t) * xi;
  Vector lambda = Vector::Zero(k);
  for (int j = 1; j < i; ++j) lambda(j - 1) = x(j - 1);
  lambda(i - 1) = y;
  return pi_cube_to_simplex(lambda);
}

SimplexPoint theta_cube_map(int k, const CubePoint& u) {
  if (u.size() != k) throw InvariantError("theta_cube_map: point must have k coordinates");
  return theta_path(k, u.tail(k - 1), u(0));
}

std::vector<double> theta_time_grid(int k, const CubePoint& x) {
  std::vector<double> grid;
  for (int j = 0; j <= k; ++j) grid.push_back(static_cast<double>(j) / k);
  for (int i = 1; i <= k; ++i) {
    const double xi = cube_coord(k, x, i);
    if (xi <= 0.0) continue;
    // In cell i the moving coordinate crosses each frozen suffix max once.
    for (int j = 1; j < i; ++j) {
      double m = 0.0;
      for (int l = j; l < i; ++l) m = std::max(m, x(l - 1));
      if (m > 0.0 && m < xi) {
        grid.push_back(static_cast<double>(k - i + 1) / k - m / (static_cast<double>(k) * xi));
      }
    }
  }
  std::sort(grid.begin(), grid.end());
  std::vector<double> out;
  for (double g : grid) {
    g = std::clamp(g, 0.0, 1.0);
    if (out.empty() || g - out.back() > 1e-14) out.push_back(g);
  }
  if (out.back() < 1.0) out.push_back(1.0);
  return out;
}

Matrix theta_jacobian(int k, const CubePoint& x, double t) {
  if (k == 0) return Matrix(0, 0);
  if (x.size() != k - 1) throw InvariantError("theta_jacobian: x must have k-1 coordinates");
  for (double g : theta_time_grid(k, x)) {
    if (std::abs(t - g) < kTieTolerance && g > 0.0 && g < 1.0)
      throw NonSmoothPoint("theta_jacobian: t sits on a breakpoint of the path family");
  }
  const int i = theta_cell(k, t);
  const double xi = cube_coord(k, x, i);
  const double y = (static_cast<double>(k - i + 1) - static_cast<double>(k) * t) * xi;

  Matrix J = Matrix::Zero(k, k);  // columns: t, x_1, ..., x_{k-1}
  for (int j = 1; j <= i; ++j) {
    // Winner of max{x_j, ..., x_{i-1}, y} decides the row.
    int win = -1;  // -1 encodes y
    double best = y;
    for (int l = j; l < i; ++l) {
      if (x(l - 1) > best) {
        best = x(l - 1);
        win = l;
      }
    }
    // Any runner-up within the tie tolerance makes the derivative undefined.
    double second = -1.0;
    if (win != -1) second = std::max(second, y);
    for (int l = j; l < i; ++l)
      if (l != win) second = std::max(second, x(l - 1));
    if (second >= 0.0 && best - second < kTieTolerance)
      throw NonSmoothPoint("theta_jacobian: max-tie at the evaluation point");

    if (win == -1) {
      J(j - 1, 0) = -static_cast<double>(k) * xi;
      if (i < k) J(j - 1, i) = static_cast<double>(k - i + 1) - static_cast<double>(k) * t;
    } else {
      J(j - 1, win) = 1.0;
    }
  }
  return J;
}

int PiecewiseLinearPath::dim() const {
  return points.empty() ? 0 : static_cast<int>(points.front().size());
}

SimplexPoint PiecewiseLinearPath::operator()(double t) const {
  if (times.size() < 2) return points.front();
  t = std::clamp(t, times.front(), times.back());
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t hi = std::min<std::size_t>(static_cast<std::size_t>(it - times.begin()), times.size() - 1);
  if (hi == 0) hi = 1;
  const std::size_t lo = hi - 1;
  const double span = times[hi] - times[lo];
  const double s = span > 0.0 ? (t - times[lo]) / span : 0.0;
  return points[lo] + s * (points[hi] - points[lo]);
}

PiecewiseLinearPath theta_polyline(int k, const CubePoint& x) {
  PiecewiseLinearPath path;
  if (k == 0) {
    path.times = {0.0, 1.0};
    path.points = {Vector(0), Vector(0)};
    return path;
  }
  for (double t : theta_time_grid(k, x)) {
    path.times.push_back(t);
    path.points.push_back(theta_path(k, x, t));
  }
  return path;
}

PiecewiseLinearPath mu_concat(const PiecewiseLinearPath& alpha,
                              const PiecewiseLinearPath& beta, int i, int k) {
  if (i < 1 || i > k - 1) throw InvariantError("mu_concat: need 1 <= i <= k-1");
  if (alpha.dim() != i || beta.dim() != k - i)
    throw InvariantError("mu_concat: path dimensions must be i and k-i");
  const AffineSimplexMap U = front_face(k - i, k);
  const AffineSimplexMap V = back_face(i, k);
  const double split = static_cast<double>(k - i) / k;

  PiecewiseLinearPath out;
  for (std::size_t j = 0; j < beta.times.size(); ++j) {
    out.times.push_back(beta.times[j] * split);
    out.points.push_back(U(beta.points[j]));
  }
  for (std::size_t j = 0; j < alpha.times.size(); ++j) {
    const double t = split + alpha.times[j] * (1.0 - split);
    if (j == 0) {
      // Junction point: both legs hit the middle vertex; keep a single node.
      if ((out.points.back() - V(alpha.points[j])).norm() > 1e-9)
        throw InvariantError("mu_concat: paths do not meet at the middle vertex");
      continue;
    }
    out.times.push_back(t);
    out.points.push_back(V(alpha.points[j]));
  }
  return out;
}

namespace {

std::vector<Vector> reduced_polyline(const PiecewiseLinearPath& p, double tol) {
  std::vector<Vector> nodes;
  for (const auto& pt : p.points) {
    if (nodes.empty() || (pt - nodes.back()).norm() > tol) nodes.push_back(pt);
  }
  if (nodes.empty()) nodes.push_back(p.points.front());
  std::vector<Vector> out;
  for (const auto& pt : nodes) {
    while (out.size() >= 2) {
      const Vector& a = out[out.size() - 2];
      const Vector& b = out.back();
      const Vector d = pt - a;
      const double dd = d.squaredNorm();
      if (dd <= tol * tol) break;
      const double s = (b - a).dot(d) / dd;
      if (s < -tol || s > 1.0 + tol) break;
      if ((b - (a + s * d)).norm() > tol) break;
      out.pop_back();
    }
    out.push_back(pt);
  }
  return out;
}

}  // namespace

bool equal_up_to_reparam(const PiecewiseLinearPath& p, const PiecewiseLinearPath& q,
                         double tol) {
  if (p.dim() != q.dim()) return false;
  const auto rp = reduced_polyline(p, tol);
  const auto rq = reduced_polyline(q, tol);
  if (rp.size() != rq.size()) return false;
  for (std::size_t j = 0; j < rp.size(); ++j)
    if ((rp[j] - rq[j]).norm() > 10 * tol) return false;
  return true;
}

}  // namespace holo
