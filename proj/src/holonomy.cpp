#include "holo/holonomy.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace holo {

namespace {

std::string simplex_id(const SimplexTuple& s) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? " " : "") << s[i];
  os << ")";
  return os.str();
}

const PolyForm& form_of(const FormValuedComplex& c, const SimplexTuple& s) {
  auto it = c.forms.find(s);
  if (it == c.forms.end())
    throw InvariantError("missing form on simplex " + simplex_id(s));
  return it->second;
}

}  // namespace

double face_compatibility_residual(const FormValuedComplex& c) {
  double worst = 0.0;
  for (int k = 1; k <= c.X.dim(); ++k) {
    for (const SimplexTuple& s : c.X.nondegenerate(k)) {
      const PolyForm& omega = form_of(c, s);
      for (int i = 0; i <= k; ++i) {
        const PolyForm& face_form = form_of(c, FiniteSimplicialSet::face(s, i));
        const PolyForm diff = face_form - pullback(omega, face_map(i, k - 1));
        worst = std::max(worst, diff.coefficient_sup_norm());
      }
    }
  }
  return worst;
}

double flatness_residual(const FormValuedComplex& c) {
  double worst = 0.0;
  for (const auto& [s, omega] : c.forms) worst = std::max(worst, mc_residual(omega));
  return worst;
}

void validate_form_complex(const FormValuedComplex& c, double tol) {
  for (int k = 0; k <= c.X.dim(); ++k) {
    for (const SimplexTuple& s : c.X.nondegenerate(k)) {
      const PolyForm& omega = form_of(c, s);
      if (omega.coord_dim() != k)
        throw InvariantError("form on simplex " + simplex_id(s) +
                             " has wrong coordinate dimension");
      if (omega.space() != c.space)
        throw InvariantError("form on simplex " + simplex_id(s) +
                             " lives on the wrong bundle space");
      if (!omega.is_homogeneous_total_degree(1))
        throw InvariantError("form on simplex " + simplex_id(s) +
                             " is not of total degree 1");
    }
  }
  const double face = face_compatibility_residual(c);
  if (face > tol)
    throw InvariantError("face compatibility residual " + format_double(face) +
                         " exceeds tolerance");
  const double flat = flatness_residual(c);
  if (flat > tol)
    throw InvariantError("flatness residual " + format_double(flat) + " exceeds tolerance");
}

GradedMap hol_object(const PolyForm& omega, int k, const TransportConfig& cfg) {
  if (k < 0) throw std::invalid_argument("hol_object: negative dimension");
  if (omega.coord_dim() != k)
    throw std::invalid_argument("hol_object: form does not live on the model k-simplex");
  if (k == 0) {
    if (!omega.is_zero_form())
      throw InvariantError("hol_object: a form on a point must be a 0-form");
    const GradedMap value = omega.evaluate_component({}, SimplexPoint());
    // The operator attached to a vertex always has degree 1, also when the
    // connection's function part vanishes identically.
    if (value.is_zero(0.0) && value.degree() != 1)
      return GradedMap(omega.space(), omega.space(), 1);
    if (value.degree() != 1)
      throw InvariantError("hol_object: the function part of a connection has degree 1");
    return value;
  }
  GradedMap series = holonomy_series(omega, k, cfg);
  if (k == 1) return GradedMap::identity(omega.space()) + series;
  return series;
}

SimplicialRep integrate_rep(const FormValuedComplex& c, const TransportConfig& cfg) {
  validate_form_complex(c, cfg.tol > 0 ? std::max(cfg.tol, 1e-8) : 1e-8);
  SimplicialRep rep;
  rep.X = c.X;
  rep.space = c.space;
  rep.unital = true;
  for (int k = 0; k <= c.X.dim(); ++k) {
    for (const SimplexTuple& s : c.X.nondegenerate(k)) {
      try {
        rep.ops[s] = hol_object(form_of(c, s), k, cfg);
      } catch (const AccuracyError& e) {
        throw AccuracyError("simplex " + simplex_id(s) + ": " + e.what());
      } catch (const InvariantError& e) {
        throw InvariantError("simplex " + simplex_id(s) + ": " + e.what());
      }
    }
  }
  return rep;
}

PolyForm embed_endo_form(const DirectSum& sum, int i, const PolyForm& form) {
  if (form.space() != sum.part(i))
    throw InvariantError("embed_endo_form: form space does not match the part");
  PolyForm out(form.coord_dim(), sum.total());
  form.for_each_term([&](const FormIndex& I, const Exponents& e, const GradedMap& c) {
    out.add_term(I, e, sum.embed(c, i, i));
  });
  return out;
}

PolyForm block_form_term(const DirectSum& sum, int i, int j, int coord_dim,
                         const FormIndex& I, const Exponents& e, const GradedMap& coeff) {
  PolyForm out(coord_dim, sum.total());
  out.add_term(I, e, sum.embed(coeff, i, j));
  return out;
}

namespace {

// Homogeneous total degree of a form (|I| + coefficient degree); throws when
// mixed or empty.
int homogeneous_degree(const PolyForm& f, const char* what) {
  bool seen = false;
  int deg = 0;
  f.for_each_term([&](const FormIndex& I, const Exponents&, const GradedMap& c) {
    const int d = static_cast<int>(I.size()) + c.degree();
    if (!seen) {
      deg = d;
      seen = true;
    } else if (d != deg) {
      throw InvariantError(std::string(what) + ": form is not homogeneous");
    }
  });
  if (!seen) throw InvariantError(std::string(what) + ": form is zero, degree undetermined");
  return deg;
}

// Checks that a form over the direct sum is supported in the (i, j) block.
void check_block_support(const DirectSum& sum, const PolyForm& f, int i, int j,
                         const char* what) {
  f.for_each_term([&](const FormIndex&, const Exponents&, const GradedMap& c) {
    for (int p = 0; p < sum.parts_count(); ++p) {
      for (int q = 0; q < sum.parts_count(); ++q) {
        if (p == i && q == j) continue;
        if (!sum.extract(c, p, q).is_zero(0.0))
          throw InvariantError(std::string(what) + ": coefficient leaks outside its block");
      }
    }
  });
}

int flat_offset(const DirectSum& sum, int part, int degree, int local) {
  int off = sum.total().offset(degree);
  for (int p = 0; p < part; ++p) off += sum.part(p).dim(degree);
  return off + local;
}

}  // namespace

PolyForm assemble_chain(const MorphismChainDatum& d) {
  const int n = d.sum.parts_count() - 1;
  if (n < 1) throw InvariantError("morphism chain needs at least two bundles");
  if (static_cast<int>(d.connections.size()) != n + 1)
    throw InvariantError("morphism chain: expected one connection per bundle");
  if (static_cast<int>(d.connecting.size()) != n)
    throw InvariantError("morphism chain: expected one connecting form per arrow");
  PolyForm total(d.k, d.sum.total());
  for (int i = 0; i <= n; ++i) {
    const PolyForm& w = d.connections[static_cast<std::size_t>(i)];
    if (w.coord_dim() != d.k)
      throw InvariantError("morphism chain: connection lives on the wrong simplex");
    if (!w.empty() && !w.is_homogeneous_total_degree(1))
      throw InvariantError("morphism chain: connection is not of total degree 1");
    total = total + embed_endo_form(d.sum, i, w);
  }
  for (int i = 1; i <= n; ++i) {
    const PolyForm& eta = d.connecting[static_cast<std::size_t>(i - 1)];
    if (eta.coord_dim() != d.k)
      throw InvariantError("morphism chain: connecting form lives on the wrong simplex");
    if (eta.space() != d.sum.total())
      throw InvariantError("morphism chain: connecting form must live over the direct sum");
    check_block_support(d.sum, eta, i - 1, i, "morphism chain");
    total = total + eta;
  }
  return total;
}

GradedMap hol_morphism_chain(const MorphismChainDatum& d, const TransportConfig& cfg) {
  const int n = d.sum.parts_count() - 1;
  const int k = d.k;
  const PolyForm omega = assemble_chain(d);  // validates shapes
  int degree_sum = 0;
  for (int i = 1; i <= n; ++i)
    degree_sum += homogeneous_degree(d.connecting[static_cast<std::size_t>(i - 1)],
                                     "morphism chain connecting form");
  const int out_degree = degree_sum - n - k + 1;
  const GradedVectorSpace& V0 = d.sum.part(0);
  const GradedVectorSpace& Vn = d.sum.part(n);

  if (k == 0) {
    if (n == 1) {
      const GradedMap val =
          d.connecting[0].evaluate_component({}, SimplexPoint());
      return d.sum.extract(val, 0, 1);
    }
    return GradedMap(Vn, V0, out_degree);
  }

  const Matrix flat = holonomy_series_flat(omega, k, cfg, nullptr);

  GradedMap out(Vn, V0, out_degree);
  double dropped = 0.0;
  double kept = 0.0;
  for (int s : Vn.degrees()) {
    const int cols0 = flat_offset(d.sum, n, s, 0);
    const int w = Vn.dim(s);
    for (int u : V0.degrees()) {
      const int rows0 = flat_offset(d.sum, 0, u, 0);
      const int h = V0.dim(u);
      const Matrix blk = flat.block(rows0, cols0, h, w);
      if (u == s + out_degree) {
        if (blk.cwiseAbs().maxCoeff() > 0.0) out.set_block(s, blk);
        kept = std::max(kept, blk.cwiseAbs().maxCoeff());
      } else {
        dropped = std::max(dropped, blk.cwiseAbs().maxCoeff());
      }
    }
  }
  if (dropped > 1e-6 * (1.0 + kept))
    throw InvariantError(
        "morphism chain transport produced off-degree corner entries of size " +
        format_double(dropped));
  return out;
}

Vector LieAlgebra::bracket_of(const Vector& x, const Vector& y) const {
  Vector out = Vector::Zero(dim);
  for (int c = 0; c < dim; ++c) out(c) = x.dot(bracket[static_cast<std::size_t>(c)] * y);
  return out;
}

double LieAlgebra::jacobi_residual() const {
  if (static_cast<int>(bracket.size()) != dim)
    throw InvariantError("Lie algebra: one bracket matrix per basis coefficient required");
  double worst = 0.0;
  for (int e = 0; e < dim; ++e) {
    const Matrix& m = bracket[static_cast<std::size_t>(e)];
    if (m.rows() != dim || m.cols() != dim)
      throw InvariantError("Lie algebra: bracket matrix has wrong shape");
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) worst = std::max(worst, std::abs(m(a, b) + m(b, a)));
  }
  auto c = [&](int e, int a, int b) { return bracket[static_cast<std::size_t>(e)](a, b); };
  for (int a = 0; a < dim; ++a) {
    for (int b = 0; b < dim; ++b) {
      for (int cc = 0; cc < dim; ++cc) {
        for (int e = 0; e < dim; ++e) {
          double acc = 0.0;
          for (int m = 0; m < dim; ++m) {
            acc += c(m, a, b) * c(e, m, cc);
            acc += c(m, b, cc) * c(e, m, a);
            acc += c(m, cc, a) * c(e, m, b);
          }
          worst = std::max(worst, std::abs(acc));
        }
      }
    }
  }
  return worst;
}

PolyForm ce_differential(const LieAlgebra& g, const PolyForm& c) {
  if (c.coord_dim() != g.dim)
    throw InvariantError("ce_differential: cochain coordinates must match the algebra dimension");
  PolyForm out(g.dim, c.space());
  const Exponents zero(static_cast<std::size_t>(g.dim), 0);
  c.for_each_term([&](const FormIndex& I, const Exponents& e, const GradedMap& coeff) {
    if (e != zero)
      throw InvariantError("ce_differential: cochain must have constant coefficients");
    const int parity = (coeff.degree() % 2 == 0) ? 1 : -1;
    for (std::size_t r = 0; r < I.size(); ++r) {
      FormIndex rest;
      for (std::size_t l = 0; l < I.size(); ++l) {
        if (l != r) rest.push_back(I[l]);
      }
      const int base = (r % 2 == 0) ? 1 : -1;  // (-1)^r for the Leibniz walk
      const Matrix& br = g.bracket[static_cast<std::size_t>(I[r] - 1)];
      for (int a = 1; a <= g.dim; ++a) {
        for (int b = a + 1; b <= g.dim; ++b) {
          const double cf = br(a - 1, b - 1);
          if (cf == 0.0) continue;
          FormIndex merged;
          const int msign = form_index_merge_sign({a, b}, rest, merged);
          if (msign == 0) continue;
          // d(theta^i) = -sum_{a<b} c^i_{ab} theta^a theta^b.
          out.add_term(merged, zero, coeff * (-cf * parity * base * msign));
        }
      }
    }
  });
  return out.pruned(0.0);
}

double ce_mc_residual(const LieAlgebra& g, const PolyForm& omega) {
  return (ce_differential(g, omega) + wedge(omega, omega)).coefficient_sup_norm();
}

double lie_flatness_residual(const LieAlgebra& g, const std::vector<PolyForm>& theta) {
  if (static_cast<int>(theta.size()) != g.dim)
    throw InvariantError("lie_flatness_residual: one component form per basis vector required");
  double worst = 0.0;
  for (int cc = 0; cc < g.dim; ++cc) {
    PolyForm r = exterior_derivative(theta[static_cast<std::size_t>(cc)]);
    for (int a = 0; a < g.dim; ++a) {
      for (int b = a + 1; b < g.dim; ++b) {
        const double cf = g.bracket[static_cast<std::size_t>(cc)](a, b);
        if (cf == 0.0) continue;
        r = r + wedge(theta[static_cast<std::size_t>(a)], theta[static_cast<std::size_t>(b)]) * cf;
      }
    }
    worst = std::max(worst, r.coefficient_sup_norm());
  }
  return worst;
}

PolyForm lie_rep_to_ce(const LieRepData& rep, const LieAlgebra& g) {
  PolyForm out(g.dim, rep.space);
  const Exponents zero(static_cast<std::size_t>(g.dim), 0);
  if (rep.differential.degree() != 1)
    throw InvariantError("Lie representation: differential must have degree 1");
  out.add_term({}, zero, rep.differential);
  for (const auto& [key, R] : rep.multi) {
    if (R.degree() != 1 - static_cast<int>(key.size()))
      throw InvariantError("Lie representation: operator on a j-multivector must have degree 1-j");
    out.add_term(key, zero, R);
  }
  return out;
}

PolyForm pullback_lie_algebra_simplex(const LieRepData& rep, const LieAlgebra& g,
                                      const std::vector<PolyForm>& theta,
                                      double flatness_tol, double rep_tol) {
  if (static_cast<int>(theta.size()) != g.dim)
    throw InvariantError("pullback_lie_algebra_simplex: one scalar form per basis vector");
  const GradedVectorSpace line = GradedVectorSpace::line(0);
  for (const PolyForm& th : theta) {
    if (th.space() != line)
      throw InvariantError("pullback_lie_algebra_simplex: component forms must be scalar");
    if (!th.empty() && !th.is_homogeneous_total_degree(1))
      throw InvariantError("pullback_lie_algebra_simplex: component forms must be 1-forms");
  }
  const double flat = lie_flatness_residual(g, theta);
  if (flat > flatness_tol)
    throw InvariantError("pullback_lie_algebra_simplex: family is not flat, residual " +
                         format_double(flat));
  const double mc = ce_mc_residual(g, lie_rep_to_ce(rep, g));
  if (mc > rep_tol)
    throw InvariantError("pullback_lie_algebra_simplex: representation data residual " +
                         format_double(mc));

  const int kk = theta.empty() ? 0 : theta[0].coord_dim();
  PolyForm out(kk, rep.space);
  out.add_term({}, Exponents(static_cast<std::size_t>(kk), 0), rep.differential);
  for (const auto& [key, R] : rep.multi) {
    PolyForm word = zero_form_identity(kk, line);
    for (int idx : key) word = wedge(word, theta[static_cast<std::size_t>(idx - 1)]);
    word.for_each_term([&](const FormIndex& I, const Exponents& e, const GradedMap& c) {
      out.add_term(I, e, R * c.block(0)(0, 0));
    });
  }
  const double out_mc = mc_residual(out);
  if (out_mc > 1e-8)
    throw InvariantError("pullback_lie_algebra_simplex: pulled-back form residual " +
                         format_double(out_mc));
  return out.pruned(0.0);
}

}  // namespace holo
