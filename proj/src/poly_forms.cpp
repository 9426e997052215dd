#include "holo/poly_forms.hpp"

#include <algorithm>
#include <cmath>

namespace holo {

namespace {

bool strictly_increasing(const FormIndex& I, int coord_dim) {
  int prev = 0;
  for (int i : I) {
    if (i <= prev || i > coord_dim) return false;
    prev = i;
  }
  return true;
}

double monomial_value(const Exponents& e, const SimplexPoint& t) {
  double v = 1.0;
  for (std::size_t j = 0; j < e.size(); ++j) {
    for (int r = 0; r < e[j]; ++r) v *= t(static_cast<Eigen::Index>(j));
  }
  return v;
}

using ScalarPoly = std::map<Exponents, double>;

ScalarPoly poly_mul(const ScalarPoly& p, const ScalarPoly& q) {
  ScalarPoly out;
  for (const auto& [ep, cp] : p) {
    for (const auto& [eq, cq] : q) {
      Exponents e(ep.size());
      for (std::size_t j = 0; j < e.size(); ++j) e[j] = ep[j] + eq[j];
      out[e] += cp * cq;
    }
  }
  return out;
}

ScalarPoly poly_pow(const ScalarPoly& p, int n, int coord_dim) {
  ScalarPoly out{{Exponents(coord_dim, 0), 1.0}};
  for (int r = 0; r < n; ++r) out = poly_mul(out, p);
  return out;
}

}  // namespace

int form_index_merge_sign(const FormIndex& a, const FormIndex& b, FormIndex& merged) {
  merged.clear();
  merged.reserve(a.size() + b.size());
  int inversions = 0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia] == b[ib]) return 0;
    if (a[ia] < b[ib]) {
      merged.push_back(a[ia++]);
    } else {
      // b[ib] hops over the remaining a-entries.
      inversions += static_cast<int>(a.size() - ia);
      merged.push_back(b[ib++]);
    }
  }
  while (ia < a.size()) merged.push_back(a[ia++]);
  while (ib < b.size()) merged.push_back(b[ib++]);
  return (inversions % 2 == 0) ? 1 : -1;
}

PolyForm::PolyForm(int coord_dim, GradedVectorSpace space)
    : coord_dim_(coord_dim), space_(std::move(space)) {
  if (coord_dim < 0) throw InvariantError("PolyForm: negative coordinate dimension");
}

void PolyForm::add_term(const FormIndex& I, const Exponents& e, const GradedMap& coeff) {
  if (!strictly_increasing(I, coord_dim_))
    throw InvariantError("PolyForm::add_term: form index must be strictly increasing in 1..k");
  if (static_cast<int>(e.size()) != coord_dim_)
    throw InvariantError("PolyForm::add_term: exponent vector has wrong length");
  if (coeff.source() != space_ || coeff.target() != space_)
    throw InvariantError("PolyForm::add_term: coefficient must be an endomorphism of the bundle space");
  if (coeff.is_zero(0.0)) return;
  auto key = std::make_pair(e, coeff.degree());
  auto& slot = terms_[I];
  auto it = slot.find(key);
  if (it == slot.end()) {
    slot.emplace(key, coeff);
  } else {
    it->second += coeff;
  }
}

void PolyForm::for_each_term(
    const std::function<void(const FormIndex&, const Exponents&, const GradedMap&)>& fn) const {
  for (const auto& [I, inner] : terms_) {
    for (const auto& [key, coeff] : inner) fn(I, key.first, coeff);
  }
}

std::size_t PolyForm::term_count() const {
  std::size_t n = 0;
  for (const auto& [I, inner] : terms_) n += inner.size();
  return n;
}

bool PolyForm::is_homogeneous_total_degree(int total) const {
  for (const auto& [I, inner] : terms_) {
    for (const auto& [key, coeff] : inner) {
      if (coeff.is_zero(0.0)) continue;
      if (static_cast<int>(I.size()) + key.second != total) return false;
    }
  }
  return true;
}

bool PolyForm::is_zero_form() const {
  for (const auto& [I, inner] : terms_) {
    if (I.empty()) continue;
    for (const auto& [key, coeff] : inner) {
      if (!coeff.is_zero(0.0)) return false;
    }
  }
  return true;
}

PolyForm PolyForm::operator+(const PolyForm& other) const {
  if (coord_dim_ != other.coord_dim_ || space_ != other.space_)
    throw InvariantError("PolyForm::operator+: mismatched shapes");
  PolyForm out = *this;
  other.for_each_term([&](const FormIndex& I, const Exponents& e, const GradedMap& c) {
    out.add_term(I, e, c);
  });
  return out;
}

PolyForm PolyForm::operator-(const PolyForm& other) const { return *this + other * (-1.0); }

PolyForm PolyForm::operator*(double scalar) const {
  PolyForm out(coord_dim_, space_);
  for_each_term([&](const FormIndex& I, const Exponents& e, const GradedMap& c) {
    out.add_term(I, e, c * scalar);
  });
  return out;
}

GradedMap PolyForm::evaluate_component(const FormIndex& I, const SimplexPoint& t) const {
  auto it = terms_.find(I);
  bool have = false;
  GradedMap acc;
  if (it != terms_.end()) {
    for (const auto& [key, coeff] : it->second) {
      GradedMap scaled = coeff * monomial_value(key.first, t);
      if (!have) {
        acc = scaled;
        have = true;
      } else {
        if (acc.degree() != scaled.degree())
          throw InvariantError("PolyForm::evaluate_component: mixed internal degrees");
        acc += scaled;
      }
    }
  }
  if (!have) return GradedMap(space_, space_, 0);
  return acc;
}

std::map<FormIndex, GradedMap> PolyForm::evaluate(const SimplexPoint& t) const {
  std::map<FormIndex, GradedMap> out;
  for (const auto& [I, inner] : terms_) out.emplace(I, evaluate_component(I, t));
  return out;
}

double PolyForm::coefficient_sup_norm() const {
  double best = 0.0;
  for (const auto& [I, inner] : terms_) {
    for (const auto& [key, coeff] : inner) best = std::max(best, coeff.sup_norm());
  }
  return best;
}

double PolyForm::weighted_norm(double base) const {
  double total = 0.0;
  for (const auto& [I, inner] : terms_) {
    double w = 1.0;
    for (std::size_t r = 0; r < I.size(); ++r) w *= base;
    for (const auto& [key, coeff] : inner) total += w * coeff.operator_norm();
  }
  return total;
}

PolyForm PolyForm::pruned(double tol) const {
  PolyForm out(coord_dim_, space_);
  for_each_term([&](const FormIndex& I, const Exponents& e, const GradedMap& c) {
    if (c.sup_norm() > tol) out.add_term(I, e, c);
  });
  return out;
}

PolyForm zero_form_identity(int coord_dim, const GradedVectorSpace& space) {
  PolyForm out(coord_dim, space);
  out.add_term({}, Exponents(coord_dim, 0), GradedMap::identity(space));
  return out;
}

PolyForm wedge(const PolyForm& a, const PolyForm& b) {
  if (a.coord_dim() != b.coord_dim() || a.space() != b.space())
    throw InvariantError("wedge(PolyForm): mismatched shapes");
  PolyForm out(a.coord_dim(), a.space());
  a.for_each_term([&](const FormIndex& I, const Exponents& e, const GradedMap& A) {
    b.for_each_term([&](const FormIndex& J, const Exponents& f, const GradedMap& B) {
      FormIndex merged;
      const int msign = form_index_merge_sign(I, J, merged);
      if (msign == 0) return;
      // Koszul sign from moving dt_I past the internal degree of B.
      const int koszul = ((static_cast<int>(I.size()) * B.degree()) % 2 == 0) ? 1 : -1;
      Exponents sum(e.size());
      for (std::size_t j = 0; j < e.size(); ++j) sum[j] = e[j] + f[j];
      out.add_term(merged, sum, compose(A, B) * static_cast<double>(msign * koszul));
    });
  });
  return out;
}

PolyForm exterior_derivative(const PolyForm& a) {
  PolyForm out(a.coord_dim(), a.space());
  a.for_each_term([&](const FormIndex& I, const Exponents& e, const GradedMap& c) {
    // d = 1 (x) d_form on coefficient (x) form, so d crosses the coefficient
    // and picks up its parity; without this the graded Leibniz rule fails.
    const int parity = (((c.degree() % 2) + 2) % 2 == 0) ? 1 : -1;
    for (int j = 1; j <= a.coord_dim(); ++j) {
      if (e[j - 1] == 0) continue;
      FormIndex merged;
      const int msign = form_index_merge_sign({j}, I, merged);
      if (msign == 0) continue;
      Exponents de = e;
      de[j - 1] -= 1;
      out.add_term(merged, de, c * (static_cast<double>(e[j - 1]) * msign * parity));
    }
  });
  return out;
}

PolyForm pullback(const PolyForm& a, const AffineSimplexMap& phi) {
  if (a.coord_dim() != phi.target_dim())
    throw InvariantError("pullback(PolyForm): form must live on the target simplex");
  const int m = phi.source_dim();
  PolyForm out(m, a.space());

  // Affine substitution polynomials for each target coordinate.
  std::vector<ScalarPoly> coord(a.coord_dim());
  for (int i = 0; i < a.coord_dim(); ++i) {
    ScalarPoly p;
    Exponents zero(m, 0);
    if (phi.b(i) != 0.0) p[zero] += phi.b(i);
    for (int j = 0; j < m; ++j) {
      if (phi.A(i, j) == 0.0) continue;
      Exponents lin(m, 0);
      lin[j] = 1;
      p[lin] += phi.A(i, j);
    }
    if (p.empty()) p[zero] = 0.0;
    coord[i] = p;
  }

  a.for_each_term([&](const FormIndex& I, const Exponents& e, const GradedMap& c) {
    // Scalar part.
    ScalarPoly scalar{{Exponents(m, 0), 1.0}};
    for (int i = 0; i < a.coord_dim(); ++i) {
      if (e[i] == 0) continue;
      scalar = poly_mul(scalar, poly_pow(coord[i], e[i], m));
    }
    // Form part: wedge the pulled-back 1-forms in order.
    std::map<FormIndex, double> form{{FormIndex{}, 1.0}};
    for (int i : I) {
      std::map<FormIndex, double> next;
      for (const auto& [F, cf] : form) {
        for (int j = 1; j <= m; ++j) {
          const double aij = phi.A(i - 1, j - 1);
          if (aij == 0.0) continue;
          FormIndex merged;
          const int msign = form_index_merge_sign(F, {j}, merged);
          if (msign == 0) continue;
          next[merged] += cf * msign * aij;
        }
      }
      form = std::move(next);
      if (form.empty()) break;
    }
    for (const auto& [F, cf] : form) {
      if (cf == 0.0) continue;
      for (const auto& [exp, cs] : scalar) {
        if (cs == 0.0) continue;
        out.add_term(F, exp, c * (cf * cs));
      }
    }
  });
  return out.pruned(0.0);
}

double mc_residual(const PolyForm& omega) {
  PolyForm r = exterior_derivative(omega) + wedge(omega, omega);
  return r.coefficient_sup_norm();
}

double gauge_pair_residual(const GaugeElement& g) {
  const PolyForm id = zero_form_identity(g.f.coord_dim(), g.f.space());
  const double r1 = (wedge(g.f, g.f_inverse) - id).coefficient_sup_norm();
  const double r2 = (wedge(g.f_inverse, g.f) - id).coefficient_sup_norm();
  return std::max(r1, r2);
}

PolyForm gauge_act(const PolyForm& omega, const GaugeElement& g) {
  if (!g.f.is_zero_form() || !g.f_inverse.is_zero_form())
    throw InvariantError("gauge_act: gauge elements must be 0-forms");
  PolyForm conj = wedge(wedge(g.f_inverse, omega), g.f);
  PolyForm derivative_part = wedge(g.f_inverse, exterior_derivative(g.f));
  return (conj + derivative_part).pruned(0.0);
}

}  // namespace holo
