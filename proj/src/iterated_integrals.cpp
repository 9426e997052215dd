#include "holo/iterated_integrals.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>

namespace holo {

// ---------------------------------------------------------------------------
// ExteriorMatrix
// ---------------------------------------------------------------------------

ExteriorMatrix ExteriorMatrix::zero(int dim, int num_x) {
  ExteriorMatrix e;
  e.dim = dim;
  e.num_x = num_x;
  e.comp.resize(std::size_t{1} << num_x);
  return e;
}

ExteriorMatrix ExteriorMatrix::unit(int dim, int num_x) {
  ExteriorMatrix e = zero(dim, num_x);
  e.comp[0] = Matrix::Identity(dim, dim);
  return e;
}

bool ExteriorMatrix::component_set(unsigned mask) const {
  return mask < comp.size() && comp[mask].size() > 0;
}

Matrix ExteriorMatrix::component(unsigned mask) const {
  if (component_set(mask)) return comp[mask];
  return Matrix::Zero(dim, dim);
}

ExteriorMatrix& ExteriorMatrix::accumulate(double scale, const ExteriorMatrix& other) {
  if (dim != other.dim || num_x != other.num_x)
    throw InvariantError("ExteriorMatrix::accumulate: shape mismatch");
  for (std::size_t mask = 0; mask < comp.size(); ++mask) {
    if (!other.component_set(static_cast<unsigned>(mask))) continue;
    if (comp[mask].size() == 0) {
      comp[mask] = scale * other.comp[mask];
    } else {
      comp[mask] += scale * other.comp[mask];
    }
  }
  return *this;
}

bool ExteriorMatrix::is_zero(double tol) const {
  for (const auto& m : comp) {
    if (m.size() > 0 && m.cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

double ExteriorMatrix::size_bound() const {
  double s = 0.0;
  for (const auto& m : comp) {
    if (m.size() > 0) s += m.norm();
  }
  return s;
}

int exterior_reorder_sign(unsigned s_mask, unsigned t_mask) {
  int swaps = 0;
  for (unsigned t = t_mask; t != 0; t &= t - 1) {
    const unsigned low = t & ~(t - 1);
    // Count generators of s_mask strictly above this t-generator.
    swaps += std::popcount(s_mask & ~((low << 1) - 1));
  }
  return (swaps % 2 == 0) ? 1 : -1;
}

ExteriorMatrix exterior_wedge(const ExteriorMatrix& a, const ExteriorMatrix& b,
                              const Matrix& parity) {
  if (a.dim != b.dim || a.num_x != b.num_x)
    throw InvariantError("exterior_wedge: shape mismatch");
  ExteriorMatrix out = ExteriorMatrix::zero(a.dim, a.num_x);
  for (unsigned s = 0; s < a.comp.size(); ++s) {
    if (!a.component_set(s)) continue;
    const bool odd = (std::popcount(s) % 2) != 0;
    for (unsigned t = 0; t < b.comp.size(); ++t) {
      if (!b.component_set(t) || (s & t) != 0) continue;
      const int sign = exterior_reorder_sign(s, t);
      Matrix rhs = odd ? Matrix(parity * b.comp[t] * parity) : b.comp[t];
      Matrix prod = a.comp[s] * rhs;
      const unsigned u = s | t;
      if (out.comp[u].size() == 0) {
        out.comp[u] = sign > 0 ? prod : Matrix(-prod);
      } else {
        out.comp[u] += sign > 0 ? prod : Matrix(-prod);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre nodes on [0, 1]
// ---------------------------------------------------------------------------

void gauss_legendre_unit(int order, std::vector<double>& nodes,
                         std::vector<double>& weights) {
  if (order < 1) throw InvariantError("gauss_legendre_unit: order must be positive");
  nodes.assign(static_cast<std::size_t>(order), 0.0);
  weights.assign(static_cast<std::size_t>(order), 0.0);
  for (int i = 1; i <= order; ++i) {
    double x = std::cos(M_PI * (i - 0.25) / (order + 0.5));
    double deriv = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= order; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      deriv = order * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / deriv;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
    // Roots come out in descending x, so (1 - x)/2 lists nodes ascending.
    nodes[static_cast<std::size_t>(i - 1)] = 0.5 * (1.0 - x);
    weights[static_cast<std::size_t>(i - 1)] = 0.5 * w;
  }
}

namespace {

// ---------------------------------------------------------------------------
// Scalar polynomials in one variable (dense coefficient vectors)
// ---------------------------------------------------------------------------

using Poly = std::vector<double>;

Poly poly_mul(const Poly& p, const Poly& q) {
  if (p.empty() || q.empty()) return {};
  Poly out(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
  }
  return out;
}

// p(a + b u) as a polynomial in u.
Poly poly_affine(const Poly& p, double a, double b) {
  if (p.empty()) return {};
  Poly out{p.back()};
  for (std::size_t r = p.size() - 1; r-- > 0;) {
    // out = out * (a + b u) + p[r]
    Poly next(out.size() + 1, 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
      next[i] += out[i] * a;
      next[i + 1] += out[i] * b;
    }
    next[0] += p[r];
    out = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Piecewise polynomials in t with ExteriorMatrix coefficients
// ---------------------------------------------------------------------------

// cells[c][p] multiplies u^p where u in [0,1] is the local coordinate of
// [grid[c], grid[c+1]].
struct PiecewiseExtPoly {
  std::vector<double> grid;
  std::vector<std::vector<ExteriorMatrix>> cells;
  int dim = 0;
  int num_x = 0;
};

PiecewiseExtPoly pp_make(const std::vector<double>& grid, int dim, int num_x) {
  PiecewiseExtPoly p;
  p.grid = grid;
  p.cells.resize(grid.size() - 1);
  p.dim = dim;
  p.num_x = num_x;
  return p;
}

PiecewiseExtPoly pp_unit(const std::vector<double>& grid, int dim, int num_x) {
  PiecewiseExtPoly p = pp_make(grid, dim, num_x);
  for (auto& cell : p.cells) cell.push_back(ExteriorMatrix::unit(dim, num_x));
  return p;
}

void pp_accumulate_coeff(PiecewiseExtPoly& p, std::size_t cell, std::size_t power,
                         unsigned mask, double scale, const Matrix& m) {
  auto& coeffs = p.cells[cell];
  if (coeffs.size() <= power) {
    coeffs.resize(power + 1, ExteriorMatrix::zero(p.dim, p.num_x));
  }
  Matrix& slot = coeffs[power].comp[mask];
  if (slot.size() == 0) {
    slot = scale * m;
  } else {
    slot += scale * m;
  }
}

PiecewiseExtPoly pp_wedge(const PiecewiseExtPoly& a, const PiecewiseExtPoly& b,
                          const Matrix& parity) {
  PiecewiseExtPoly out = pp_make(a.grid, a.dim, a.num_x);
  for (std::size_t c = 0; c < out.cells.size(); ++c) {
    const auto& pa = a.cells[c];
    const auto& pb = b.cells[c];
    if (pa.empty() || pb.empty()) continue;
    auto& po = out.cells[c];
    po.resize(pa.size() + pb.size() - 1, ExteriorMatrix::zero(a.dim, a.num_x));
    for (std::size_t i = 0; i < pa.size(); ++i) {
      if (pa[i].is_zero(0.0)) continue;
      for (std::size_t j = 0; j < pb.size(); ++j) {
        if (pb[j].is_zero(0.0)) continue;
        po[i + j].accumulate(1.0, exterior_wedge(pa[i], pb[j], parity));
      }
    }
  }
  return out;
}

// Running integral from t = 0; continuous across cells.
PiecewiseExtPoly pp_integral(const PiecewiseExtPoly& p) {
  PiecewiseExtPoly out = pp_make(p.grid, p.dim, p.num_x);
  ExteriorMatrix running = ExteriorMatrix::zero(p.dim, p.num_x);
  for (std::size_t c = 0; c < p.cells.size(); ++c) {
    const double h = p.grid[c + 1] - p.grid[c];
    const auto& pc = p.cells[c];
    auto& oc = out.cells[c];
    oc.resize(pc.size() + 1, ExteriorMatrix::zero(p.dim, p.num_x));
    oc[0] = running;
    for (std::size_t q = 0; q < pc.size(); ++q) {
      oc[q + 1].accumulate(h / static_cast<double>(q + 1), pc[q]);
    }
    ExteriorMatrix at_one = ExteriorMatrix::zero(p.dim, p.num_x);
    for (const auto& coeff : oc) at_one.accumulate(1.0, coeff);
    running = at_one;
  }
  return out;
}

ExteriorMatrix pp_end_value(const PiecewiseExtPoly& p) {
  ExteriorMatrix v = ExteriorMatrix::zero(p.dim, p.num_x);
  if (p.cells.empty()) return v;
  for (const auto& coeff : p.cells.back()) v.accumulate(1.0, coeff);
  return v;
}

ExteriorMatrix pp_eval(const PiecewiseExtPoly& p, double t) {
  ExteriorMatrix v = ExteriorMatrix::zero(p.dim, p.num_x);
  if (p.cells.empty()) return v;
  auto it = std::upper_bound(p.grid.begin(), p.grid.end(), t);
  std::size_t c = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - p.grid.begin() - 1, 0));
  c = std::min(c, p.cells.size() - 1);
  const double h = p.grid[c + 1] - p.grid[c];
  const double u = h > 0.0 ? (t - p.grid[c]) / h : 0.0;
  double up = 1.0;
  for (const auto& coeff : p.cells[c]) {
    v.accumulate(up, coeff);
    up *= u;
  }
  return v;
}

bool pp_is_zero(const PiecewiseExtPoly& p, double tol = 0.0) {
  for (const auto& cell : p.cells) {
    for (const auto& coeff : cell) {
      if (!coeff.is_zero(tol)) return false;
    }
  }
  return true;
}

// Upper bound for the integral of the coefficient size over [0, 1].
double pp_size_bound(const PiecewiseExtPoly& p) {
  double s = 0.0;
  for (std::size_t c = 0; c < p.cells.size(); ++c) {
    const double h = p.grid[c + 1] - p.grid[c];
    double cell = 0.0;
    for (const auto& coeff : p.cells[c]) cell += coeff.size_bound();
    s += h * cell;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Building the dt-contraction of the pulled-back form, cell by cell
// ---------------------------------------------------------------------------

struct FlatTerm {
  FormIndex I;
  Exponents e;
  Matrix C;
};

std::vector<FlatTerm> flatten_terms(const PolyForm& form) {
  std::vector<FlatTerm> out;
  form.for_each_term([&](const FormIndex& I, const Exponents& e, const GradedMap& c) {
    out.push_back(FlatTerm{I, e, c.flatten()});
  });
  return out;
}

// Per-cell description of one path coordinate theta_j(t).
struct CoordTheta {
  bool zero = false;    // theta_j vanishes identically on the cell
  bool moving = false;  // theta_j equals the moving coordinate y
  Poly value;           // theta_j(t) in the global time variable
  double dt_coef = 0.0;  // coefficient of dt in d(theta_j)
  Poly dx_coef;          // coefficient of dx_{dx_axis} in d(theta_j)
  int dx_axis = 0;       // 1-based cube axis; 0 when there is no dx part
};

std::vector<CoordTheta> cell_coords(int k, const Vector& x, double t_mid) {
  const int cell = std::clamp(k - static_cast<int>(std::floor(k * t_mid)), 1, k);
  const double xi = (cell == k) ? 1.0 : x(cell - 1);
  const double y_mid = (static_cast<double>(k - cell + 1) - k * t_mid) * xi;

  std::vector<CoordTheta> coords(static_cast<std::size_t>(k));
  for (int j = 1; j <= k; ++j) {
    CoordTheta& c = coords[static_cast<std::size_t>(j - 1)];
    if (j > cell) {
      c.zero = true;
      continue;
    }
    // Winner of max{x_j, ..., x_{cell-1}, y}; must be strict at the midpoint.
    int win = -1;  // -1 encodes the moving coordinate
    double best = y_mid;
    for (int l = j; l < cell; ++l) {
      if (x(l - 1) > best) {
        best = x(l - 1);
        win = l;
      }
    }
    double second = -std::numeric_limits<double>::infinity();
    if (win != -1) second = y_mid;
    for (int l = j; l < cell; ++l) {
      if (l != win) second = std::max(second, x(l - 1));
    }
    if (j < cell && best - second < kTieTolerance)
      throw NonSmoothPoint("cell_coords: max-tie inside a time cell");

    if (win == -1) {
      c.moving = true;
      c.value = {static_cast<double>(k - cell + 1) * xi, -static_cast<double>(k) * xi};
      c.dt_coef = -static_cast<double>(k) * xi;
      if (cell < k) {
        c.dx_axis = cell;
        c.dx_coef = {static_cast<double>(k - cell + 1), -static_cast<double>(k)};
      }
    } else {
      c.value = {x(win - 1)};
      c.dx_axis = win;
      c.dx_coef = {1.0};
    }
  }
  return coords;
}

// Adds the contribution of one form term to the cell polynomial of B.
void add_term_to_cell(PiecewiseExtPoly& B, std::size_t cell_idx, double t0, double h,
                      const FlatTerm& term, const std::vector<CoordTheta>& coords) {
  // Scalar monomial factor prod_j theta_j^{e_j}.
  Poly scalar{1.0};
  for (std::size_t j = 0; j < term.e.size(); ++j) {
    for (int r = 0; r < term.e[j]; ++r) {
      if (coords[j].zero || coords[j].value.empty()) return;
      scalar = poly_mul(scalar, coords[j].value);
    }
  }

  const std::size_t n_legs = term.I.size();
  if (n_legs == 0) return;  // pure 0-form: no dt component
  for (int idx : term.I) {
    if (coords[static_cast<std::size_t>(idx - 1)].zero) return;  // d(theta) = 0
  }

  for (std::size_t r = 0; r < n_legs; ++r) {
    const CoordTheta& cr = coords[static_cast<std::size_t>(term.I[r] - 1)];
    if (!cr.moving || cr.dt_coef == 0.0) continue;
    // Wedge of the dx parts of the other legs.
    bool dead = false;
    Poly q = scalar;
    std::vector<int> axes;
    axes.reserve(n_legs - 1);
    for (std::size_t l = 0; l < n_legs; ++l) {
      if (l == r) continue;
      const CoordTheta& cl = coords[static_cast<std::size_t>(term.I[l] - 1)];
      if (cl.dx_axis == 0 || cl.dx_coef.empty()) {
        dead = true;
        break;
      }
      axes.push_back(cl.dx_axis);
      q = poly_mul(q, cl.dx_coef);
    }
    if (dead) continue;
    // Sort axes, counting inversions; duplicates wedge to zero.
    int inversions = 0;
    bool dup = false;
    for (std::size_t a = 0; a < axes.size() && !dup; ++a) {
      for (std::size_t b = a + 1; b < axes.size(); ++b) {
        if (axes[a] == axes[b]) {
          dup = true;
          break;
        }
        if (axes[a] > axes[b]) ++inversions;
      }
    }
    if (dup) continue;
    unsigned mask = 0;
    for (int a : axes) mask |= 1u << (a - 1);

    double sign = (r % 2 == 0) ? 1.0 : -1.0;           // dt hops to the front
    if (inversions % 2 != 0) sign = -sign;             // sorting the dx factors
    const double scale = sign * cr.dt_coef;

    const Poly qu = poly_affine(q, t0, h);
    for (std::size_t p = 0; p < qu.size(); ++p) {
      if (qu[p] == 0.0) continue;
      pp_accumulate_coeff(B, cell_idx, p, mask, scale * qu[p], term.C);
    }
  }
}

PiecewiseExtPoly build_contraction(int k, const Vector& x, const std::vector<double>& grid,
                                   const std::vector<FlatTerm>& terms, int dim) {
  const int num_x = k - 1;
  PiecewiseExtPoly B = pp_make(grid, dim, num_x);
  for (std::size_t c = 0; c + 1 < grid.size(); ++c) {
    const double t0 = grid[c];
    const double h = grid[c + 1] - grid[c];
    if (h <= 0.0) continue;
    const auto coords = cell_coords(k, x, t0 + 0.5 * h);
    for (const auto& term : terms) add_term_to_cell(B, c, t0, h, term, coords);
  }
  return B;
}

std::vector<double> time_grid_for(int k, const Vector& x, bool subdivide) {
  if (subdivide) return theta_time_grid(k, x);
  std::vector<double> grid;
  for (int j = 0; j <= k; ++j) grid.push_back(static_cast<double>(j) / k);
  return grid;
}

// ---------------------------------------------------------------------------
// Cube quadrature over monotone sectors
// ---------------------------------------------------------------------------

void for_each_cube_node(int m, int order,
                        const std::function<void(const Vector&, double)>& fn) {
  if (m == 0) {
    fn(Vector(0), 1.0);
    return;
  }
  std::vector<double> nodes, weights;
  gauss_legendre_unit(order, nodes, weights);

  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  do {
    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    while (true) {
      double w = 1.0;
      std::vector<double> v(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j) {
        v[static_cast<std::size_t>(j)] = nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
        w *= weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
      }
      // Ordered values y_j = prod_{l >= j} v_l (ascending in j) and the
      // Jacobian prod_l v_l^l of the monotone-sector parametrization.
      double jac = 1.0;
      for (int l = 0; l < m; ++l) {
        for (int r = 0; r < l; ++r) jac *= v[static_cast<std::size_t>(l)];
      }
      Vector x(m);
      double run = 1.0;
      for (int j = m - 1; j >= 0; --j) {
        run *= v[static_cast<std::size_t>(j)];
        x(perm[static_cast<std::size_t>(j)]) = run;
      }
      fn(x, w * jac);
      int pos = m - 1;
      while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == order) {
        idx[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

// Upper bound for sum_{q > n} M^q / q!, infinite unless M < n + 2.
double factorial_tail_bound(double M, int n) {
  if (M <= 0.0) return 0.0;
  if (M >= n + 2) return std::numeric_limits<double>::infinity();
  const double head = std::exp((n + 1) * std::log(M) - std::lgamma(n + 2.0));
  return head / (1.0 - M / (n + 2));
}

void validate_simplex_dim(int k, const TransportConfig& cfg) {
  if (k < 1) throw InvariantError("transport: simplex dimension must be at least 1");
  if (k > cfg.max_simplex_dim)
    throw InvariantError("transport: simplex dimension exceeds the configured cap");
}

Vector jittered(const Vector& x, Rng& rng) {
  Vector out = x;
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    out(j) = std::clamp(out(j) + (2.0 * rng.uniform() - 1.0) * kTieJitter, 1e-12,
                        1.0 - 1e-12);
  }
  return out;
}

int homogeneous_degree_or(const PolyForm& form, int fallback) {
  std::optional<int> deg;
  bool mixed = false;
  form.for_each_term([&](const FormIndex& I, const Exponents&, const GradedMap& c) {
    const int d = static_cast<int>(I.size()) + c.degree();
    if (!deg) {
      deg = d;
    } else if (*deg != d) {
      mixed = true;
    }
  });
  if (mixed) throw InvariantError("transport argument must have homogeneous total degree");
  return deg.value_or(fallback);
}

GradedMap wrap_graded_checked(const Matrix& flat, const GradedVectorSpace& V, int degree) {
  GradedMap g = GradedMap::from_flat(flat, V, V, degree);
  const double dropped = (flat - g.flatten()).cwiseAbs().maxCoeff();
  const double scale = 1.0 + flat.cwiseAbs().maxCoeff();
  if (dropped > 1e-6 * scale)
    throw InvariantError("transport result has mass outside the expected degree");
  return g;
}

}  // namespace

int transport_term_sign(int k, int n) {
  const int parity = (k * (k - 1) / 2 + k + n - 1) % 2;
  return parity == 0 ? 1 : -1;
}

GradedMap transport_term(const std::vector<PolyForm>& args, int k,
                         const TransportConfig& cfg) {
  if (args.empty()) throw InvariantError("transport_term: needs at least one argument");
  validate_simplex_dim(k, cfg);
  const GradedVectorSpace& V = args.front().space();
  int degree_sum = 0;
  for (const auto& a : args) {
    if (a.coord_dim() != k)
      throw InvariantError("transport_term: argument does not live on the k-simplex");
    if (a.space() != V) throw InvariantError("transport_term: mixed bundle spaces");
    degree_sum += homogeneous_degree_or(a, 1);
  }
  const int n = static_cast<int>(args.size());
  const int dim = V.total_dim();
  const Matrix parity = parity_matrix(V);
  const int m = k - 1;
  const unsigned full_mask = (1u << m) - 1u;

  std::vector<std::vector<FlatTerm>> terms;
  terms.reserve(args.size());
  for (const auto& a : args) terms.push_back(flatten_terms(a));

  Matrix acc = Matrix::Zero(dim, dim);
  Rng rng(cfg.jitter_seed);
  for_each_cube_node(m, cfg.quad_order, [&](const Vector& x0, double w) {
    Vector x = x0;
    for (int attempt = 0;; ++attempt) {
      try {
        const auto grid = time_grid_for(k, x, cfg.subdivide);
        PiecewiseExtPoly J = pp_unit(grid, dim, m);
        for (int i = n - 1; i >= 0; --i) {
          PiecewiseExtPoly Bi =
              build_contraction(k, x, grid, terms[static_cast<std::size_t>(i)], dim);
          J = pp_integral(pp_wedge(Bi, J, parity));
        }
        const ExteriorMatrix end = pp_end_value(J);
        if (end.component_set(full_mask)) acc += w * end.comp[full_mask];
        return;
      } catch (const NonSmoothPoint&) {
        if (attempt >= 6) throw;
        x = jittered(x, rng);
      }
    }
  });

  acc *= transport_term_sign(k, n);
  const int result_degree = degree_sum - n - k + 1;
  return wrap_graded_checked(acc, V, result_degree);
}

Matrix holonomy_series_flat(const PolyForm& omega, int k, const TransportConfig& cfg,
                            TransportDiagnostics* diag) {
  validate_simplex_dim(k, cfg);
  if (omega.coord_dim() != k)
    throw InvariantError("holonomy_series_flat: form does not live on the k-simplex");
  const GradedVectorSpace& V = omega.space();
  const int dim = V.total_dim();
  const Matrix parity = parity_matrix(V);
  const int m = k - 1;
  const unsigned full_mask = (1u << m) - 1u;
  const auto terms = flatten_terms(omega);

  std::vector<Matrix> acc(static_cast<std::size_t>(cfg.max_n) + 1,
                          Matrix::Zero(dim, dim));
  int n_used = 0;
  double tail_total = 0.0;
  double growth = 0.0;
  Rng rng(cfg.jitter_seed);

  for_each_cube_node(m, cfg.quad_order, [&](const Vector& x0, double w) {
    Vector x = x0;
    for (int attempt = 0;; ++attempt) {
      try {
        const auto grid = time_grid_for(k, x, cfg.subdivide);
        const PiecewiseExtPoly B = build_contraction(k, x, grid, terms, dim);
        const double M = pp_size_bound(B);
        growth = std::max(growth, M);

        int stop_n = -1;
        for (int n = 1; n <= cfg.max_n; ++n) {
          if (factorial_tail_bound(M, n) <= cfg.tol) {
            stop_n = n;
            break;
          }
        }
        if (stop_n < 0) {
          throw AccuracyError(
              "holonomy series cannot certify tolerance " + format_double(cfg.tol) +
              " within " + std::to_string(cfg.max_n) +
              " terms (integrand size " + format_double(M) + "); raise max_n");
        }

        PiecewiseExtPoly T = pp_unit(grid, dim, m);
        bool exact_zero = false;
        int n = 0;
        while (n < stop_n) {
          T = pp_integral(pp_wedge(B, T, parity));
          ++n;
          const ExteriorMatrix end = pp_end_value(T);
          if (end.component_set(full_mask)) {
            acc[static_cast<std::size_t>(n)] += w * end.comp[full_mask];
          }
          if (pp_is_zero(T, 0.0)) {
            exact_zero = true;
            break;
          }
        }
        n_used = std::max(n_used, n);
        tail_total += w * (exact_zero ? 0.0 : factorial_tail_bound(M, n));
        return;
      } catch (const NonSmoothPoint&) {
        if (attempt >= 6) throw;
        x = jittered(x, rng);
      }
    }
  });

  Matrix H = Matrix::Zero(dim, dim);
  for (int n = 1; n <= cfg.max_n; ++n) {
    const double s = transport_term_sign(k, n);
    H += s * acc[static_cast<std::size_t>(n)];
  }
  if (diag != nullptr) {
    diag->n_used = n_used;
    diag->truncation_bound = tail_total;
    diag->growth_constant = growth;
  }
  return H;
}

GradedMap holonomy_series(const PolyForm& omega, int k, const TransportConfig& cfg,
                          TransportDiagnostics* diag) {
  if (!omega.is_homogeneous_total_degree(1))
    throw InvariantError("holonomy_series: connection form must have total degree 1");
  const Matrix H = holonomy_series_flat(omega, k, cfg, diag);
  return wrap_graded_checked(H, omega.space(), 1 - k);
}

ExteriorMatrix transport_integrand(const std::vector<PolyForm>& args, int k,
                                   const CubePoint& x, const std::vector<double>& ts,
                                   const TransportConfig& cfg) {
  if (args.size() != ts.size())
    throw InvariantError("transport_integrand: one time per argument required");
  validate_simplex_dim(k, cfg);
  const GradedVectorSpace& V = args.front().space();
  const int dim = V.total_dim();
  const Matrix parity = parity_matrix(V);
  const int m = k - 1;

  Rng rng(cfg.jitter_seed);
  Vector xx = x;
  for (int attempt = 0;; ++attempt) {
    try {
      const auto grid = time_grid_for(k, xx, cfg.subdivide);
      ExteriorMatrix prod = ExteriorMatrix::unit(dim, m);
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i].coord_dim() != k || args[i].space() != V)
          throw InvariantError("transport_integrand: argument shape mismatch");
        double t = ts[i];
        for (double g : grid) {
          if (std::abs(t - g) < kTieTolerance && g > 0.0 && g < 1.0) {
            t += kTieJitter;
            break;
          }
        }
        const PiecewiseExtPoly B = build_contraction(k, xx, grid, flatten_terms(args[i]), dim);
        prod = exterior_wedge(prod, pp_eval(B, t), parity);
      }
      return prod;
    } catch (const NonSmoothPoint&) {
      if (attempt >= 6) throw;
      xx = jittered(xx, rng);
    }
  }
}

Matrix path_transport(const PolyForm& omega, const PiecewiseLinearPath& path,
                      const TransportConfig& cfg, TransportDiagnostics* diag) {
  const int k = path.dim();
  if (omega.coord_dim() != k)
    throw InvariantError("path_transport: form and path dimensions disagree");
  const GradedVectorSpace& V = omega.space();
  const int dim = V.total_dim();
  const Matrix parity = parity_matrix(V);

  // Build A(t) = -(dt-component of the pullback of omega along the path),
  // cellwise in the local coordinate of each segment.
  PiecewiseExtPoly A = pp_make(path.times, dim, 0);
  for (std::size_t c = 0; c + 1 < path.times.size(); ++c) {
    const double h = path.times[c + 1] - path.times[c];
    if (h <= 0.0) continue;
    const Vector p = path.points[c];
    const Vector q = path.points[c + 1];
    AffineSimplexMap seg{Matrix(k, 1), p};
    seg.A.col(0) = q - p;
    const PolyForm pulled = pullback(omega, seg);
    pulled.for_each_term([&](const FormIndex& I, const Exponents& e, const GradedMap& coeff) {
      if (I.size() != 1) return;  // only the du-component transports
      const Matrix C = coeff.flatten();
      pp_accumulate_coeff(A, c, static_cast<std::size_t>(e[0]), 0, -1.0 / h, C);
    });
  }

  const double M = pp_size_bound(A);
  int stop_n = -1;
  for (int n = 1; n <= cfg.max_n; ++n) {
    if (factorial_tail_bound(M, n) <= cfg.tol) {
      stop_n = n;
      break;
    }
  }
  if (stop_n < 0) {
    throw AccuracyError("path transport cannot certify tolerance " +
                        format_double(cfg.tol) + " within " + std::to_string(cfg.max_n) +
                        " terms (integrand size " + format_double(M) + "); raise max_n");
  }

  Matrix H = Matrix::Identity(dim, dim);
  PiecewiseExtPoly T = pp_unit(path.times, dim, 0);
  int n = 0;
  bool exact_zero = false;
  while (n < stop_n) {
    T = pp_integral(pp_wedge(A, T, parity));
    ++n;
    H += pp_end_value(T).component(0);
    if (pp_is_zero(T, 0.0)) {
      exact_zero = true;
      break;
    }
  }
  if (diag != nullptr) {
    diag->n_used = n;
    diag->truncation_bound = exact_zero ? 0.0 : factorial_tail_bound(M, n);
    diag->growth_constant = M;
  }
  return H;
}

}  // namespace holo
