// Shared helpers for the test suite: random data builders, the affine
// inclusion of a face into the model simplex, and evaluators for the two
// compatibility equations of the transport map (against the differential
// graded structure of forms, and against chains of connections).

#ifndef HOLO_TESTS_SUPPORT_HPP
#define HOLO_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "holo/holonomy.hpp"
#include "holo/oracles.hpp"
#include "holo/scenario.hpp"
#include "holo/simplex_geometry.hpp"
#include "holo/simplicial_reps.hpp"

namespace holo::testing {

// Transport configuration with enough series budget for test-sized data; the
// library default is sized for small connections only.
inline TransportConfig test_config(int max_n = 60, double tol = 1e-10, int quad_order = 10) {
  TransportConfig cfg;
  cfg.max_n = max_n;
  cfg.tol = tol;
  cfg.quad_order = quad_order;
  return cfg;
}

// ---------------------------------------------------------------------------
// Geometry

// Affine inclusion of the face spanned by the (strictly increasing) vertex
// tuple s into the model m-simplex.
inline AffineSimplexMap vertex_inclusion(const SimplexTuple& s, int m) {
  const int k = static_cast<int>(s.size()) - 1;
  AffineSimplexMap map{Matrix::Zero(m, k), vertex_point(s[0], m)};
  for (int l = 1; l <= k; ++l)
    map.A.col(l - 1) = vertex_point(s[static_cast<std::size_t>(l)], m) -
                       vertex_point(s[static_cast<std::size_t>(l - 1)], m);
  return map;
}

// ---------------------------------------------------------------------------
// Random data

inline Matrix random_matrix(int rows, int cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-scale, scale);
  return m;
}

inline GradedMap random_graded_map(const GradedVectorSpace& V, int degree, Rng& rng,
                                   double scale = 1.0) {
  GradedMap g(V, V, degree);
  for (int d : V.degrees()) {
    if (V.dim(d + degree) == 0) continue;
    g.set_block(d, random_matrix(V.dim(d + degree), V.dim(d), rng, scale));
  }
  return g;
}

inline std::vector<FormIndex> form_indices(int k, int size) {
  std::vector<FormIndex> out;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    FormIndex I;
    for (int a = 1; a <= k; ++a) {
      if (mask & (1u << (a - 1))) I.push_back(a);
    }
    if (static_cast<int>(I.size()) == size) out.push_back(I);
  }
  return out;
}

// Random polynomial form of homogeneous total degree on the model k-simplex.
inline PolyForm random_form(int k, const GradedVectorSpace& V, int total_degree, Rng& rng,
                            int max_power = 2, double scale = 0.6) {
  PolyForm out(k, V);
  for (int fs = 0; fs <= k; ++fs) {
    const int cd = total_degree - fs;
    bool hits = false;
    for (int d : V.degrees()) {
      if (V.dim(d + cd) > 0) hits = true;
    }
    if (!hits) continue;
    for (const FormIndex& I : form_indices(k, fs)) {
      Exponents e(static_cast<std::size_t>(k), 0);
      for (int a = 0; a < k; ++a)
        e[static_cast<std::size_t>(a)] = rng.uniform_int(0, max_power);
      out.add_term(I, e, random_graded_map(V, cd, rng, scale));
    }
  }
  return out;
}

// Unipotent polynomial gauge: for every degree block of dimension >= 2 the
// leading 2x2 corner gets an upper and a lower unipotent polynomial factor;
// the inverse is exact in polynomial arithmetic.
inline GaugeElement random_polynomial_gauge(int k, const GradedVectorSpace& V, Rng& rng,
                                            double scale = 0.5) {
  auto elementary = [&](int block, bool upper, const std::vector<double>& poly, double sign) {
    PolyForm f = zero_form_identity(k, V);
    for (int j = 0; j <= k; ++j) {
      if (poly[static_cast<std::size_t>(j)] == 0.0) continue;
      Matrix n = Matrix::Zero(V.dim(block), V.dim(block));
      n(upper ? 0 : 1, upper ? 1 : 0) = sign * poly[static_cast<std::size_t>(j)];
      GradedMap c(V, V, 0);
      c.set_block(block, n);
      Exponents e(static_cast<std::size_t>(k), 0);
      if (j > 0) e[static_cast<std::size_t>(j - 1)] = 1;
      f.add_term({}, e, c);
    }
    return f;
  };
  PolyForm f = zero_form_identity(k, V);
  PolyForm f_inv = zero_form_identity(k, V);
  for (int d : V.degrees()) {
    if (V.dim(d) < 2) continue;
    std::vector<double> p(static_cast<std::size_t>(k + 1));
    std::vector<double> q(static_cast<std::size_t>(k + 1));
    for (int j = 0; j <= k; ++j) {
      p[static_cast<std::size_t>(j)] = rng.uniform(-scale, scale);
      q[static_cast<std::size_t>(j)] = rng.uniform(-scale, scale);
    }
    f = wedge(f, wedge(elementary(d, true, p, 1.0), elementary(d, false, q, 1.0)));
    f_inv = wedge(wedge(elementary(d, false, q, -1.0), elementary(d, true, p, -1.0)), f_inv);
  }
  return GaugeElement{f, f_inv};
}

// Exactly flat polynomial connection on the model k-simplex over a space in
// degrees {0, 1}: a square-zero constant connection conjugated by a random
// polynomial gauge.
inline PolyForm random_flat_connection(int k, const GradedVectorSpace& V, Rng& rng,
                                       double gauge_scale = 0.3) {
  PolyForm base(k, V);
  Matrix del = Matrix::Zero(V.dim(1), V.dim(0));
  del(0, 0) = rng.uniform(0.4, 1.2);
  GradedMap c0(V, V, 1);
  c0.set_block(0, del);
  base.add_term({}, Exponents(static_cast<std::size_t>(k), 0), c0);
  // A scalar 1-form part commutes with everything, so it keeps the square
  // zero while making the parallel transport nontrivial.
  base.add_term({1}, Exponents(static_cast<std::size_t>(k), 0),
                GradedMap::identity(V) * rng.uniform(-0.8, 0.8));
  if (k >= 2 && V.dim(0) >= 2 && V.dim(1) >= 2) {
    Matrix eta = Matrix::Zero(V.dim(0), V.dim(1));
    eta(V.dim(0) - 1, V.dim(1) - 1) = rng.uniform(-1.0, 1.0);
    GradedMap c2(V, V, -1);
    c2.set_block(1, eta);
    Exponents e(static_cast<std::size_t>(k), 0);
    base.add_term({1, 2}, e, c2);
  }
  return gauge_act(base, random_polynomial_gauge(k, V, rng, gauge_scale));
}

// ---------------------------------------------------------------------------
// Cochain arithmetic

inline int total_degree_of(const PolyForm& a) {
  int deg = 0;
  bool found = false;
  a.for_each_term([&](const FormIndex& I, const Exponents&, const GradedMap& c) {
    const int t = static_cast<int>(I.size()) + c.degree();
    if (!found) {
      deg = t;
      found = true;
    } else if (t != deg) {
      throw InvariantError("total_degree_of: form is not homogeneous");
    }
  });
  if (!found) throw InvariantError("total_degree_of: empty form");
  return deg;
}

inline MorphismCochain cochain_scale(MorphismCochain a, double s) {
  for (auto& [key, comp] : a.components) comp *= s;
  return a;
}

inline MorphismCochain cochain_add(const MorphismCochain& a, const MorphismCochain& b) {
  if (a.total_degree != b.total_degree || !(a.source == b.source) || !(a.target == b.target))
    throw InvariantError("cochain_add: incompatible cochains");
  MorphismCochain out = a;
  for (const auto& [key, comp] : b.components) {
    auto it = out.components.find(key);
    if (it == out.components.end()) {
      out.components.emplace(key, comp);
    } else {
      it->second += comp;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Compatibility with the differential graded structure of forms.
//
// The transport map sends polynomial forms on the model m-simplex to
// normalized cochains on its nerve.  Seen through the suspension, forms carry
// the operations  b1(a) = da  and  b2(a, b) = (-1)^{|a|-1} a ^ b,  cochains
// carry the morphism differential between trivial representations and the
// sign-adjusted slicewise composition.  transport_residual evaluates both
// sides of the corresponding morphism equation on one argument tuple.

// Global signs of the cochain-side operations relative to
// morphism_differential and compose_morphisms.  The defaults are pinned by
// the equation tests: with them the identities close at quadrature accuracy
// for every tuple length, and flipping either one breaks the length where it
// first enters.
struct EquationSigns {
  double differential = 1.0;
  double composition = 1.0;
};

struct FormContext {
  FiniteSimplicialSet X;
  int m = 0;
  GradedVectorSpace V;
  TransportConfig cfg;

  static FormContext model(int m, const GradedVectorSpace& V) {
    FormContext c;
    SimplexTuple top(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) top[static_cast<std::size_t>(i)] = i;
    c.X = FiniteSimplicialSet::from_simplices(m + 1, {top});
    c.m = m;
    c.V = V;
    c.cfg.max_n = 40;
    c.cfg.tol = 1e-10;
    c.cfg.quad_order = 10;
    return c;
  }
};

// Transport cochain  psi_n(a_1, ..., a_n):  on a k-face the signed
// time-ordered integral of the pulled-back arguments.
inline MorphismCochain transport_cochain(const FormContext& c,
                                         const std::vector<PolyForm>& args) {
  const int n = static_cast<int>(args.size());
  int total = 1 - n;
  for (const PolyForm& a : args) total += total_degree_of(a);
  MorphismCochain phi;
  phi.source = c.V;
  phi.target = c.V;
  phi.total_degree = total;
  for (int k = 0; k <= c.X.dim(); ++k) {
    for (const SimplexTuple& s : c.X.nondegenerate(k)) {
      const AffineSimplexMap inc = vertex_inclusion(s, c.m);
      if (k == 0) {
        if (n != 1) continue;  // only the one-argument piece evaluates at points
        GradedMap value = pullback(args[0], inc).evaluate_component({}, SimplexPoint());
        if (value.is_zero(0.0) && value.degree() != total) continue;
        phi.components.emplace(s, std::move(value));
        continue;
      }
      std::vector<PolyForm> pulled;
      pulled.reserve(args.size());
      for (const PolyForm& a : args) pulled.push_back(pullback(a, inc));
      GradedMap comp = transport_term(pulled, k, c.cfg);
      if (comp.is_zero(0.0) && comp.degree() != total - k) continue;
      phi.components.emplace(s, std::move(comp));
    }
  }
  return phi;
}

inline PolyForm form_b2(const PolyForm& a, const PolyForm& b) {
  const double sign = (total_degree_of(a) - 1) % 2 == 0 ? 1.0 : -1.0;
  return wedge(a, b) * sign;
}

inline MorphismCochain cochain_b1(const FormContext& c, const MorphismCochain& phi,
                                  const EquationSigns& signs) {
  const SimplicialRep triv = trivial_rep(c.X, c.V);
  return cochain_scale(morphism_differential(triv, triv, phi), signs.differential);
}

inline MorphismCochain cochain_b2(const MorphismCochain& a, const MorphismCochain& b,
                                  const EquationSigns& signs) {
  const double sign = (a.total_degree - 1) % 2 == 0 ? 1.0 : -1.0;
  return cochain_scale(compose_morphisms(a, b), signs.composition * sign);
}

// Residual of the morphism equation on one tuple of forms.
inline double transport_residual(const FormContext& c, const std::vector<PolyForm>& args,
                                 const EquationSigns& signs = {}) {
  const int n = static_cast<int>(args.size());
  auto insertion_sign = [&](int i) {
    int par = 0;
    for (int l = 0; l < i; ++l) par += total_degree_of(args[static_cast<std::size_t>(l)]) - 1;
    return par % 2 == 0 ? 1.0 : -1.0;
  };

  MorphismCochain lhs = cochain_b1(c, transport_cochain(c, args), signs);
  for (int j = 1; j <= n - 1; ++j) {
    lhs = cochain_add(lhs, cochain_b2(transport_cochain(
                               c, {args.begin(), args.begin() + j}),
                           transport_cochain(c, {args.begin() + j, args.end()}), signs));
  }

  for (int i = 0; i < n; ++i) {
    std::vector<PolyForm> mod = args;
    mod[static_cast<std::size_t>(i)] = exterior_derivative(args[static_cast<std::size_t>(i)]);
    if (mod[static_cast<std::size_t>(i)].empty()) continue;
    lhs = cochain_add(lhs, cochain_scale(transport_cochain(c, mod), -insertion_sign(i)));
  }
  for (int i = 0; i + 1 < n; ++i) {
    std::vector<PolyForm> mod;
    for (int l = 0; l < n; ++l) {
      if (l == i) {
        mod.push_back(form_b2(args[static_cast<std::size_t>(l)],
                              args[static_cast<std::size_t>(l + 1)]));
        ++l;
      } else {
        mod.push_back(args[static_cast<std::size_t>(l)]);
      }
    }
    if (mod[static_cast<std::size_t>(i)].empty()) continue;
    lhs = cochain_add(lhs, cochain_scale(transport_cochain(c, mod), -insertion_sign(i)));
  }
  return cochain_sup_norm(lhs);
}

// ---------------------------------------------------------------------------
// Compatibility with chains of connections.
//
// A chain datum: flat connections omega^0..omega^n on the model m-simplex
// (each over its own space) and connecting forms x_i packed as blocks
// (i-1, i) of the direct sum.  The corner transport defines cochains between
// the integrated representations; chain_residual evaluates the morphism
// equation for that assignment.

struct ChainContext {
  FiniteSimplicialSet X;
  int m = 0;
  DirectSum sum;
  std::vector<PolyForm> connections;  // over sum.part(i)
  std::vector<PolyForm> connecting;   // over sum.total(), block (i-1, i)
  std::vector<SimplicialRep> reps;
  TransportConfig cfg;

  ChainContext(int model_dim, std::vector<GradedVectorSpace> spaces,
               std::vector<PolyForm> conns, std::vector<PolyForm> xs,
               const TransportConfig& transport)
      : m(model_dim),
        sum(std::move(spaces)),
        connections(std::move(conns)),
        connecting(std::move(xs)),
        cfg(transport) {
    SimplexTuple top(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) top[static_cast<std::size_t>(i)] = i;
    X = FiniteSimplicialSet::from_simplices(m + 1, {top});
    for (int i = 0; i < sum.parts_count(); ++i) {
      FormValuedComplex cx;
      cx.X = X;
      cx.space = sum.part(i);
      for (int k = 0; k <= X.dim(); ++k) {
        for (const SimplexTuple& s : X.nondegenerate(k))
          cx.forms.emplace(s, pullback(connections[static_cast<std::size_t>(i)],
                                       vertex_inclusion(s, m)));
      }
      reps.push_back(integrate_rep(cx, cfg));
    }
  }
};

// A consecutive run of connecting data: slot j joins bundle left_j to
// right_j = left_{j+1}; forms live over ctx.sum.total().
struct ChainSlot {
  int left = 0;
  int right = 0;
  PolyForm form;
};

// Moves the (fi, fj) block of a form over `from` to the (ti, tj) block over
// `to`.
inline PolyForm reembed_block(const PolyForm& src, const DirectSum& from, int fi, int fj,
                              const DirectSum& to, int ti, int tj) {
  PolyForm out(src.coord_dim(), to.total());
  src.for_each_term([&](const FormIndex& I, const Exponents& e, const GradedMap& c) {
    out.add_term(I, e, to.embed(from.extract(c, fi, fj), ti, tj));
  });
  return out;
}

// Corner transport of a consecutive chain of slots, as a cochain between the
// integrated representations of the outer bundles.
inline MorphismCochain chain_integral(const ChainContext& c,
                                      const std::vector<ChainSlot>& slots) {
  const int n = static_cast<int>(slots.size());
  if (n == 0) throw InvariantError("chain_integral: empty chain");
  std::vector<GradedVectorSpace> parts;
  parts.push_back(c.sum.part(slots[0].left));
  for (const ChainSlot& s : slots) parts.push_back(c.sum.part(s.right));
  const DirectSum sub(parts);

  int total = 1 - n;
  for (const ChainSlot& s : slots) total += total_degree_of(s.form);

  MorphismCochain phi;
  phi.source = c.sum.part(slots.back().right);
  phi.target = c.sum.part(slots[0].left);
  phi.total_degree = total;
  for (int k = 0; k <= c.X.dim(); ++k) {
    for (const SimplexTuple& s : c.X.nondegenerate(k)) {
      const AffineSimplexMap inc = vertex_inclusion(s, c.m);
      MorphismChainDatum datum(k, sub);
      datum.connections.push_back(
          pullback(c.connections[static_cast<std::size_t>(slots[0].left)], inc));
      for (int j = 0; j < n; ++j)
        datum.connections.push_back(pullback(
            c.connections[static_cast<std::size_t>(slots[static_cast<std::size_t>(j)].right)],
            inc));
      bool vanished = false;
      for (int j = 0; j < n; ++j) {
        const ChainSlot& slot = slots[static_cast<std::size_t>(j)];
        PolyForm pulled = pullback(slot.form, inc);
        if (pulled.empty()) {
          vanished = true;  // the corner transport is zero on this face
          break;
        }
        datum.connecting.push_back(
            reembed_block(pulled, c.sum, slot.left, slot.right, sub, j, j + 1));
      }
      if (vanished) continue;
      GradedMap comp = hol_morphism_chain(datum, c.cfg);
      if (comp.is_zero(0.0) && comp.degree() != total - k) continue;
      phi.components.emplace(s, std::move(comp));
    }
  }
  return phi;
}

// Covariant differential of a connecting form between the connections of its
// end bundles:  d x + omega' ^ x - (-1)^{|x|} x ^ omega.
inline PolyForm chain_b1(const ChainContext& c, const ChainSlot& slot) {
  const PolyForm left = reembed_block(c.connections[static_cast<std::size_t>(slot.left)],
                                      DirectSum({c.sum.part(slot.left)}), 0, 0, c.sum,
                                      slot.left, slot.left);
  const PolyForm right = reembed_block(c.connections[static_cast<std::size_t>(slot.right)],
                                       DirectSum({c.sum.part(slot.right)}), 0, 0, c.sum,
                                       slot.right, slot.right);
  const double sign = total_degree_of(slot.form) % 2 == 0 ? 1.0 : -1.0;
  return exterior_derivative(slot.form) + wedge(left, slot.form) +
         wedge(slot.form, right) * (-sign);
}

// Composition of adjacent connecting forms:  (-1)^{|x|-1} x ^ y.
inline PolyForm chain_b2(const ChainSlot& a, const ChainSlot& b) {
  const double sign = (total_degree_of(a.form) - 1) % 2 == 0 ? 1.0 : -1.0;
  return wedge(a.form, b.form) * sign;
}

// Residual of the morphism equation for one chain of connecting forms.
inline double chain_residual(const ChainContext& c, const EquationSigns& signs = {}) {
  const int n = static_cast<int>(c.connecting.size());
  std::vector<ChainSlot> base;
  for (int i = 0; i < n; ++i)
    base.push_back({i, i + 1, c.connecting[static_cast<std::size_t>(i)]});
  auto insertion_sign = [&](int i) {
    int par = 0;
    for (int l = 0; l < i; ++l)
      par += total_degree_of(base[static_cast<std::size_t>(l)].form) - 1;
    return par % 2 == 0 ? 1.0 : -1.0;
  };

  MorphismCochain lhs = cochain_scale(
      morphism_differential(c.reps.front(), c.reps.back(), chain_integral(c, base)),
      signs.differential);
  for (int j = 1; j <= n - 1; ++j) {
    const MorphismCochain head =
        chain_integral(c, {base.begin(), base.begin() + j});
    const MorphismCochain tail = chain_integral(c, {base.begin() + j, base.end()});
    const double sign = (head.total_degree - 1) % 2 == 0 ? 1.0 : -1.0;
    lhs = cochain_add(lhs, cochain_scale(compose_morphisms(head, tail),
                                         signs.composition * sign));
  }

  for (int i = 0; i < n; ++i) {
    std::vector<ChainSlot> mod = base;
    mod[static_cast<std::size_t>(i)].form = chain_b1(c, base[static_cast<std::size_t>(i)]);
    if (mod[static_cast<std::size_t>(i)].form.empty()) continue;
    lhs = cochain_add(lhs, cochain_scale(chain_integral(c, mod), -insertion_sign(i)));
  }
  for (int i = 0; i + 1 < n; ++i) {
    std::vector<ChainSlot> mod;
    for (int l = 0; l < n; ++l) {
      if (l == i) {
        mod.push_back({base[static_cast<std::size_t>(l)].left,
                       base[static_cast<std::size_t>(l + 1)].right,
                       chain_b2(base[static_cast<std::size_t>(l)],
                                base[static_cast<std::size_t>(l + 1)])});
        ++l;
      } else {
        mod.push_back(base[static_cast<std::size_t>(l)]);
      }
    }
    if (mod[static_cast<std::size_t>(i)].form.empty()) continue;
    lhs = cochain_add(lhs, cochain_scale(chain_integral(c, mod), -insertion_sign(i)));
  }
  return cochain_sup_norm(lhs);
}

}  // namespace holo::testing

#endif
