#include "holo/ainfty_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace holo {

int degree_of_flat_index(const GradedVectorSpace& space, int index) {
  for (int d : space.degrees()) {
    const int off = space.offset(d);
    if (index >= off && index < off + space.dim(d)) return d;
  }
  throw std::out_of_range("degree_of_flat_index: index outside the space");
}

MultiOp::MultiOp(GradedVectorSpace domain, GradedVectorSpace target, int arity, int degree)
    : domain_(std::move(domain)), target_(std::move(target)), arity_(arity), degree_(degree) {
  if (arity < 1) throw std::invalid_argument("MultiOp: arity must be positive");
  long cols = 1;
  for (int i = 0; i < arity; ++i) cols *= domain_.total_dim();
  data_ = Matrix::Zero(target_.total_dim(), cols);
}

int MultiOp::tuple_index(const std::vector<int>& idx) const {
  if (static_cast<int>(idx.size()) != arity_)
    throw std::invalid_argument("MultiOp: tuple has wrong length");
  int out = 0;
  for (int i : idx) {
    if (i < 0 || i >= domain_.total_dim()) throw std::out_of_range("MultiOp: index");
    out = out * domain_.total_dim() + i;
  }
  return out;
}

void MultiOp::set_column(const std::vector<int>& idx, const Vector& value) {
  if (value.size() != target_.total_dim())
    throw std::invalid_argument("MultiOp: column has wrong size");
  data_.col(tuple_index(idx)) = value;
}

Vector MultiOp::column(const std::vector<int>& idx) const {
  return data_.col(tuple_index(idx));
}

Vector MultiOp::apply(const std::vector<Vector>& args) const {
  if (static_cast<int>(args.size()) != arity_)
    throw std::invalid_argument("MultiOp::apply: wrong argument count");
  for (const Vector& a : args) {
    if (a.size() != domain_.total_dim())
      throw std::invalid_argument("MultiOp::apply: argument has wrong size");
  }
  Vector out = Vector::Zero(target_.total_dim());
  std::vector<int> idx(static_cast<std::size_t>(arity_), 0);
  std::function<void(int, double)> walk = [&](int slot, double coeff) {
    if (coeff == 0.0) return;
    if (slot == arity_) {
      out += coeff * data_.col(tuple_index(idx));
      return;
    }
    for (int i = 0; i < domain_.total_dim(); ++i) {
      idx[static_cast<std::size_t>(slot)] = i;
      walk(slot + 1, coeff * args[static_cast<std::size_t>(slot)](i));
    }
  };
  walk(0, 1.0);
  return out;
}

double MultiOp::degree_defect() const {
  double worst = 0.0;
  std::vector<int> idx(static_cast<std::size_t>(arity_), 0);
  std::function<void(int, int)> walk = [&](int slot, int deg_sum) {
    if (slot == arity_) {
      const Vector col = data_.col(tuple_index(idx));
      const int good = deg_sum + degree_;
      for (int r = 0; r < col.size(); ++r) {
        if (col(r) != 0.0 && degree_of_flat_index(target_, r) != good)
          worst = std::max(worst, std::abs(col(r)));
      }
      return;
    }
    for (int i = 0; i < domain_.total_dim(); ++i) {
      idx[static_cast<std::size_t>(slot)] = i;
      walk(slot + 1, deg_sum + degree_of_flat_index(domain_, i));
    }
  };
  walk(0, 0);
  return worst;
}

double MultiOp::sup_norm() const {
  if (data_.size() == 0) return 0.0;
  return data_.cwiseAbs().maxCoeff();
}

MultiOp& MultiOp::operator+=(const MultiOp& other) {
  if (arity_ != other.arity_ || degree_ != other.degree_ || !(domain_ == other.domain_) ||
      !(target_ == other.target_))
    throw std::invalid_argument("MultiOp: incompatible addition");
  data_ += other.data_;
  return *this;
}

const MultiOp* AInftyAlgebra::op(int arity) const {
  if (arity < 1 || arity > static_cast<int>(b.size())) return nullptr;
  const MultiOp& m = b[static_cast<std::size_t>(arity - 1)];
  return m.empty() ? nullptr : &m;
}

const MultiOp* AInftyMorphism::op(int arity) const {
  if (arity < 1 || arity > static_cast<int>(psi.size())) return nullptr;
  const MultiOp& m = psi[static_cast<std::size_t>(arity - 1)];
  return m.empty() ? nullptr : &m;
}

AInftyMorphism identity_morphism(const AInftyAlgebra& A) {
  AInftyMorphism id;
  id.source = A.space;
  id.target = A.space;
  id.n_max = A.n_max;
  MultiOp one(A.space, A.space, 1, 0);
  for (int i = 0; i < A.space.total_dim(); ++i) {
    Vector v = Vector::Zero(A.space.total_dim());
    v(i) = 1.0;
    one.set_column({i}, v);
  }
  id.psi.push_back(one);
  return id;
}

namespace {

// op(pre..., mid, post...) for basis slots around one general vector.
Vector apply_around(const MultiOp& op, const std::vector<int>& tuple, int start, int len,
                    const Vector& mid) {
  Vector out = Vector::Zero(op.target().total_dim());
  std::vector<int> idx;
  idx.reserve(tuple.size() - static_cast<std::size_t>(len) + 1);
  for (int l = 0; l < start; ++l) idx.push_back(tuple[static_cast<std::size_t>(l)]);
  const int mid_pos = start;
  idx.push_back(0);
  for (std::size_t l = static_cast<std::size_t>(start + len); l < tuple.size(); ++l)
    idx.push_back(tuple[l]);
  for (int m = 0; m < mid.size(); ++m) {
    if (mid(m) == 0.0) continue;
    idx[static_cast<std::size_t>(mid_pos)] = m;
    out += mid(m) * op.column(idx);
  }
  return out;
}

void for_each_tuple(int dim, int n, long exhaustive_limit, Rng* rng, int samples,
                    const std::function<void(const std::vector<int>&)>& fn) {
  if (dim <= 0 || n <= 0) return;
  double total = std::pow(static_cast<double>(dim), n);
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  if (total <= static_cast<double>(exhaustive_limit)) {
    while (true) {
      fn(idx);
      int pos = n - 1;
      while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == dim) {
        idx[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
    return;
  }
  Rng fallback(0x5eedULL);
  Rng& r = rng ? *rng : fallback;
  for (int s = 0; s < samples; ++s) {
    for (int l = 0; l < n; ++l)
      idx[static_cast<std::size_t>(l)] =
          std::min(dim - 1, static_cast<int>(r.uniform() * dim));
    fn(idx);
  }
}

int insertion_sign(const GradedVectorSpace& space, const std::vector<int>& tuple, int i) {
  int s = 0;
  for (int l = 0; l < i; ++l)
    s += degree_of_flat_index(space, tuple[static_cast<std::size_t>(l)]);
  return (s % 2 == 0) ? 1 : -1;
}

// All ordered lists of positive integers summing to n.
void for_each_composition(int n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> parts;
  std::function<void(int)> walk = [&](int rest) {
    if (rest == 0) {
      fn(parts);
      return;
    }
    for (int p = 1; p <= rest; ++p) {
      parts.push_back(p);
      walk(rest - p);
      parts.pop_back();
    }
  };
  walk(n);
}

// All lists of `gaps` nonnegative integers summing to extra.
void for_each_distribution(int extra, int gaps,
                           const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> parts;
  std::function<void(int, int)> walk = [&](int rest, int remaining_gaps) {
    if (remaining_gaps == 1) {
      parts.push_back(rest);
      fn(parts);
      parts.pop_back();
      return;
    }
    for (int p = 0; p <= rest; ++p) {
      parts.push_back(p);
      walk(rest - p, remaining_gaps - 1);
      parts.pop_back();
    }
  };
  if (gaps >= 1) walk(extra, gaps);
}

Vector basis_vector(int dim, int i) {
  Vector v = Vector::Zero(dim);
  v(i) = 1.0;
  return v;
}

Vector structure_defect(const AInftyAlgebra& A, const std::vector<int>& tuple) {
  const int n = static_cast<int>(tuple.size());
  Vector acc = Vector::Zero(A.space.total_dim());
  for (int j = 1; j <= n; ++j) {
    const MultiOp* inner = A.op(j);
    if (!inner) continue;
    const MultiOp* outer = A.op(n - j + 1);
    if (!outer) continue;
    for (int i = 0; i + j <= n; ++i) {
      std::vector<int> slice(tuple.begin() + i, tuple.begin() + i + j);
      const Vector mid = inner->column(slice);
      const double sign = insertion_sign(A.space, tuple, i);
      acc += sign * apply_around(*outer, tuple, i, j, mid);
    }
  }
  return acc;
}

Vector morphism_defect(const AInftyMorphism& psi, const AInftyAlgebra& A,
                       const AInftyAlgebra& Ap, const std::vector<int>& tuple) {
  const int n = static_cast<int>(tuple.size());
  Vector lhs = Vector::Zero(psi.target.total_dim());
  for (int j = 1; j <= n; ++j) {
    const MultiOp* inner = A.op(j);
    if (!inner) continue;
    const MultiOp* outer = psi.op(n - j + 1);
    if (!outer) continue;
    for (int i = 0; i + j <= n; ++i) {
      std::vector<int> slice(tuple.begin() + i, tuple.begin() + i + j);
      const Vector mid = inner->column(slice);
      const double sign = insertion_sign(A.space, tuple, i);
      lhs += sign * apply_around(*outer, tuple, i, j, mid);
    }
  }
  Vector rhs = Vector::Zero(psi.target.total_dim());
  for_each_composition(n, [&](const std::vector<int>& parts) {
    const int r = static_cast<int>(parts.size());
    const MultiOp* br = Ap.op(r);
    if (!br) return;
    std::vector<Vector> args;
    args.reserve(parts.size());
    int pos = 0;
    for (int l : parts) {
      const MultiOp* pl = psi.op(l);
      if (!pl) return;
      std::vector<int> slice(tuple.begin() + pos, tuple.begin() + pos + l);
      args.push_back(pl->column(slice));
      pos += l;
    }
    rhs += br->apply(args);
  });
  return lhs - rhs;
}

}  // namespace

double structure_residual_algebra(const AInftyAlgebra& A, Rng* rng, int samples,
                                  long exhaustive_limit) {
  double worst = 0.0;
  const int dim = A.space.total_dim();
  for (int n = 1; n <= 2 * A.n_max - 1; ++n) {
    for_each_tuple(dim, n, exhaustive_limit, rng, samples, [&](const std::vector<int>& t) {
      const Vector v = structure_defect(A, t);
      if (v.size() > 0) worst = std::max(worst, v.cwiseAbs().maxCoeff());
    });
  }
  return worst;
}

double morphism_residual(const AInftyMorphism& psi, const AInftyAlgebra& A,
                         const AInftyAlgebra& Aprime, Rng* rng, int samples,
                         long exhaustive_limit) {
  if (!(psi.source == A.space) || !(psi.target == Aprime.space))
    throw std::invalid_argument("morphism_residual: spaces do not match");
  double worst = 0.0;
  const int dim = A.space.total_dim();
  const int top = 2 * std::max(psi.n_max, std::max(A.n_max, Aprime.n_max)) - 1;
  for (int n = 1; n <= top; ++n) {
    for_each_tuple(dim, n, exhaustive_limit, rng, samples, [&](const std::vector<int>& t) {
      const Vector v = morphism_defect(psi, A, Aprime, t);
      if (v.size() > 0) worst = std::max(worst, v.cwiseAbs().maxCoeff());
    });
  }
  return worst;
}

AInftyMorphism compose_ainfty(const AInftyMorphism& outer, const AInftyMorphism& inner) {
  if (!(inner.target == outer.source))
    throw std::invalid_argument("compose_ainfty: morphisms are not composable");
  AInftyMorphism out;
  out.source = inner.source;
  out.target = outer.target;
  out.n_max = std::min(outer.n_max, inner.n_max);
  const int dim = inner.source.total_dim();
  for (int n = 1; n <= out.n_max; ++n) {
    MultiOp comp(out.source, out.target, n, 0);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::function<void(int)> walk = [&](int slot) {
      if (slot == n) {
        Vector value = Vector::Zero(out.target.total_dim());
        for_each_composition(n, [&](const std::vector<int>& parts) {
          const MultiOp* o = outer.op(static_cast<int>(parts.size()));
          if (!o) return;
          std::vector<Vector> args;
          int pos = 0;
          for (int l : parts) {
            const MultiOp* pl = inner.op(l);
            if (!pl) return;
            std::vector<int> slice(idx.begin() + pos, idx.begin() + pos + l);
            args.push_back(pl->column(slice));
            pos += l;
          }
          value += o->apply(args);
        });
        comp.set_column(idx, value);
        return;
      }
      for (int i = 0; i < dim; ++i) {
        idx[static_cast<std::size_t>(slot)] = i;
        walk(slot + 1);
      }
    };
    walk(0);
    out.psi.push_back(comp);
  }
  return out;
}

namespace {

void check_mc_degree(const GradedVectorSpace& space, const Vector& x) {
  if (x.size() != space.total_dim())
    throw std::invalid_argument("Maurer-Cartan element has wrong size");
  for (int i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0 && degree_of_flat_index(space, i) != 0)
      throw InvariantError("Maurer-Cartan element must sit in degree 0 of the shifted space");
  }
}

}  // namespace

double mc_residual_element(const AInftyAlgebra& A, const Vector& x) {
  check_mc_degree(A.space, x);
  Vector acc = Vector::Zero(A.space.total_dim());
  for (int n = 1; n <= A.n_max; ++n) {
    const MultiOp* bn = A.op(n);
    if (!bn) continue;
    acc += bn->apply(std::vector<Vector>(static_cast<std::size_t>(n), x));
  }
  return acc.size() ? acc.cwiseAbs().maxCoeff() : 0.0;
}

AInftyAlgebra twist_algebra(const AInftyAlgebra& A, const Vector& x) {
  check_mc_degree(A.space, x);
  AInftyAlgebra out;
  out.space = A.space;
  out.n_max = A.n_max;
  const int dim = A.space.total_dim();
  for (int n = 1; n <= A.n_max; ++n) {
    MultiOp tw(A.space, A.space, n, 1);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::function<void(int)> walk = [&](int slot) {
      if (slot == n) {
        Vector value = Vector::Zero(dim);
        for (int m = n; m <= A.n_max; ++m) {
          const MultiOp* bm = A.op(m);
          if (!bm) continue;
          for_each_distribution(m - n, n + 1, [&](const std::vector<int>& gaps) {
            std::vector<Vector> args;
            args.reserve(static_cast<std::size_t>(m));
            for (int g = 0; g <= n; ++g) {
              for (int c = 0; c < gaps[static_cast<std::size_t>(g)]; ++c) args.push_back(x);
              if (g < n) args.push_back(basis_vector(dim, idx[static_cast<std::size_t>(g)]));
            }
            value += bm->apply(args);
          });
        }
        tw.set_column(idx, value);
        return;
      }
      for (int i = 0; i < dim; ++i) {
        idx[static_cast<std::size_t>(slot)] = i;
        walk(slot + 1);
      }
    };
    walk(0);
    out.b.push_back(tw);
  }
  return out;
}

AInftyMorphism twist_morphism(const AInftyMorphism& psi, const AInftyAlgebra& A,
                              const AInftyAlgebra& Aprime, const Vector& x) {
  check_mc_degree(psi.source, x);
  if (!(psi.source == A.space) || !(psi.target == Aprime.space))
    throw std::invalid_argument("twist_morphism: spaces do not match");
  AInftyMorphism out;
  out.source = psi.source;
  out.target = psi.target;
  out.n_max = psi.n_max;
  const int dim = psi.source.total_dim();
  for (int n = 1; n <= psi.n_max; ++n) {
    MultiOp tw(psi.source, psi.target, n, 0);
    std::vector<int> idx(static_cast<std::size_t>(n), 0);
    std::function<void(int)> walk = [&](int slot) {
      if (slot == n) {
        Vector value = Vector::Zero(psi.target.total_dim());
        for (int m = n; m <= psi.n_max; ++m) {
          const MultiOp* pm = psi.op(m);
          if (!pm) continue;
          for_each_distribution(m - n, n + 1, [&](const std::vector<int>& gaps) {
            std::vector<Vector> args;
            args.reserve(static_cast<std::size_t>(m));
            for (int g = 0; g <= n; ++g) {
              for (int c = 0; c < gaps[static_cast<std::size_t>(g)]; ++c) args.push_back(x);
              if (g < n) args.push_back(basis_vector(dim, idx[static_cast<std::size_t>(g)]));
            }
            value += pm->apply(args);
          });
        }
        tw.set_column(idx, value);
        return;
      }
      for (int i = 0; i < dim; ++i) {
        idx[static_cast<std::size_t>(slot)] = i;
        walk(slot + 1);
      }
    };
    walk(0);
    out.psi.push_back(tw);
  }
  return out;
}

Vector mc_pushforward(const AInftyMorphism& psi, const Vector& x) {
  check_mc_degree(psi.source, x);
  Vector acc = Vector::Zero(psi.target.total_dim());
  for (int n = 1; n <= psi.n_max; ++n) {
    const MultiOp* pn = psi.op(n);
    if (!pn) continue;
    acc += pn->apply(std::vector<Vector>(static_cast<std::size_t>(n), x));
  }
  return acc;
}

Vector GradedAlgebraData::multiply(const Vector& a, const Vector& b) const {
  const int dim = space.total_dim();
  Vector out = Vector::Zero(dim);
  for (int i = 0; i < dim; ++i) {
    if (a(i) == 0.0) continue;
    for (int j = 0; j < dim; ++j) {
      if (b(j) == 0.0) continue;
      out += a(i) * b(j) * mult[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

double GradedAlgebraData::associativity_residual() const {
  const int dim = space.total_dim();
  double worst = 0.0;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      for (int k = 0; k < dim; ++k) {
        const Vector left = multiply(mult[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                                     basis_vector(dim, k));
        const Vector right = multiply(basis_vector(dim, i),
                                      mult[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]);
        worst = std::max(worst, (left - right).cwiseAbs().maxCoeff());
      }
    }
  }
  return worst;
}

double GradedAlgebraData::unit_residual() const {
  const int dim = space.total_dim();
  double worst = 0.0;
  for (int i = 0; i < dim; ++i) {
    const Vector e = basis_vector(dim, i);
    worst = std::max(worst, (multiply(unit, e) - e).cwiseAbs().maxCoeff());
    worst = std::max(worst, (multiply(e, unit) - e).cwiseAbs().maxCoeff());
  }
  return worst;
}

TensorBasis::TensorBasis(GradedVectorSpace E, GradedVectorSpace W)
    : E_(std::move(E)), W_(std::move(W)) {
  std::map<int, int> dims;
  for (int p : E_.degrees())
    for (int q : W_.degrees()) dims[p + q] += E_.dim(p) * W_.dim(q);
  total_ = GradedVectorSpace(dims);
  table_.assign(static_cast<std::size_t>(E_.total_dim()),
                std::vector<int>(static_cast<std::size_t>(W_.total_dim()), -1));
  std::map<int, int> pos;
  for (int p : E_.degrees()) {
    for (int le = 0; le < E_.dim(p); ++le) {
      for (int q : W_.degrees()) {
        for (int lw = 0; lw < W_.dim(q); ++lw) {
          const int d = p + q;
          table_[static_cast<std::size_t>(E_.offset(p) + le)]
                [static_cast<std::size_t>(W_.offset(q) + lw)] = total_.offset(d) + pos[d];
          ++pos[d];
        }
      }
    }
  }
}

int TensorBasis::index(int e_flat, int w_flat) const {
  return table_[static_cast<std::size_t>(e_flat)][static_cast<std::size_t>(w_flat)];
}

AInftyAlgebra tensor_dga(const GradedAlgebraData& E, const AInftyAlgebra& A) {
  if (E.associativity_residual() > 1e-9 || E.unit_residual() > 1e-9)
    throw InvariantError("tensor_dga: coefficient algebra is not associative unital");
  for (int n = 3; n <= A.n_max; ++n) {
    if (A.op(n)) throw InvariantError("tensor_dga: the form factor must be a dga");
  }
  const TensorBasis T(E.space, A.space);
  const int de = E.space.total_dim();
  const int dw = A.space.total_dim();
  AInftyAlgebra out;
  out.space = T.total();
  out.n_max = std::max(A.n_max, 2);

  MultiOp b1(T.total(), T.total(), 1, 1);
  if (const MultiOp* a1 = A.op(1)) {
    for (int e = 0; e < de; ++e) {
      const int se = (degree_of_flat_index(E.space, e) % 2 + 2) % 2 == 0 ? 1 : -1;
      for (int w = 0; w < dw; ++w) {
        const Vector dv = a1->column({w});
        Vector col = Vector::Zero(T.total().total_dim());
        for (int m = 0; m < dw; ++m) {
          if (dv(m) != 0.0) col(T.index(e, m)) += se * dv(m);
        }
        b1.set_column({T.index(e, w)}, col);
      }
    }
  }
  out.b.push_back(b1);

  MultiOp b2(T.total(), T.total(), 2, 1);
  if (const MultiOp* a2 = A.op(2)) {
    for (int e = 0; e < de; ++e) {
      const int pe = degree_of_flat_index(E.space, e);
      for (int w1 = 0; w1 < dw; ++w1) {
        const int q1 = degree_of_flat_index(A.space, w1);
        for (int f = 0; f < de; ++f) {
          const int pf = degree_of_flat_index(E.space, f);
          const int sgn = (((pe + (q1 + 1) * pf) % 2 + 2) % 2 == 0) ? 1 : -1;
          const Vector ef = E.mult[static_cast<std::size_t>(e)][static_cast<std::size_t>(f)];
          for (int w2 = 0; w2 < dw; ++w2) {
            const Vector prod = a2->column({w1, w2});
            Vector col = Vector::Zero(T.total().total_dim());
            for (int ei = 0; ei < de; ++ei) {
              if (ef(ei) == 0.0) continue;
              for (int m = 0; m < dw; ++m) {
                if (prod(m) != 0.0) col(T.index(ei, m)) += sgn * ef(ei) * prod(m);
              }
            }
            b2.set_column({T.index(e, w1), T.index(f, w2)}, col);
          }
        }
      }
    }
  }
  out.b.push_back(b2);
  for (int n = 3; n <= out.n_max; ++n) out.b.emplace_back();
  return out;
}

AInftyMorphism tensor_with_algebra(const GradedAlgebraData& E, const AInftyMorphism& psi) {
  const TensorBasis Ts(E.space, psi.source);
  const TensorBasis Tt(E.space, psi.target);
  const int de = E.space.total_dim();
  const int dws = psi.source.total_dim();

  // Reverse lookup: tensor index -> (e, w).
  std::vector<std::pair<int, int>> factors(
      static_cast<std::size_t>(Ts.total().total_dim()));
  for (int e = 0; e < de; ++e)
    for (int w = 0; w < dws; ++w) factors[static_cast<std::size_t>(Ts.index(e, w))] = {e, w};

  AInftyMorphism out;
  out.source = Ts.total();
  out.target = Tt.total();
  out.n_max = psi.n_max;
  const int dim = Ts.total().total_dim();
  for (int n = 1; n <= psi.n_max; ++n) {
    MultiOp comp(Ts.total(), Tt.total(), n, 0);
    const MultiOp* pn = psi.op(n);
    if (pn) {
      std::vector<int> idx(static_cast<std::size_t>(n), 0);
      std::function<void(int)> walk = [&](int slot) {
        if (slot == n) {
          std::vector<int> es(static_cast<std::size_t>(n));
          std::vector<int> ws(static_cast<std::size_t>(n));
          for (int l = 0; l < n; ++l) {
            es[static_cast<std::size_t>(l)] = factors[static_cast<std::size_t>(
                                                          idx[static_cast<std::size_t>(l)])].first;
            ws[static_cast<std::size_t>(l)] = factors[static_cast<std::size_t>(
                                                          idx[static_cast<std::size_t>(l)])].second;
          }
          int sgn_exp = 0;
          for (int i = 0; i < n; ++i) {
            int tail = 0;
            for (int l = i + 1; l < n; ++l)
              tail += degree_of_flat_index(E.space, es[static_cast<std::size_t>(l)]);
            sgn_exp += degree_of_flat_index(psi.source, ws[static_cast<std::size_t>(i)]) * tail;
          }
          const double sgn = (sgn_exp % 2 == 0) ? 1.0 : -1.0;
          Vector eprod = basis_vector(de, es[0]);
          for (int l = 1; l < n; ++l)
            eprod = E.multiply(eprod, basis_vector(de, es[static_cast<std::size_t>(l)]));
          const Vector pv = pn->column(ws);
          Vector col = Vector::Zero(Tt.total().total_dim());
          for (int ei = 0; ei < de; ++ei) {
            if (eprod(ei) == 0.0) continue;
            for (int m = 0; m < pv.size(); ++m) {
              if (pv(m) != 0.0) col(Tt.index(ei, m)) += sgn * eprod(ei) * pv(m);
            }
          }
          comp.set_column(idx, col);
          return;
        }
        for (int i = 0; i < dim; ++i) {
          idx[static_cast<std::size_t>(slot)] = i;
          walk(slot + 1);
        }
      };
      walk(0);
    }
    out.psi.push_back(comp);
  }
  return out;
}

AInftyAlgebra dga_to_ainfty(const GradedVectorSpace& V, const GradedMap& d,
                            const std::vector<std::vector<Vector>>& mult, int n_max) {
  if (d.degree() != 1) throw std::invalid_argument("dga_to_ainfty: differential degree must be 1");
  const GradedVectorSpace W = V.shifted(1);
  const int dim = V.total_dim();
  AInftyAlgebra out;
  out.space = W;
  out.n_max = n_max;

  const Matrix dflat = d.flatten();
  MultiOp b1(W, W, 1, 1);
  for (int i = 0; i < dim; ++i) b1.set_column({i}, dflat.col(i));
  out.b.push_back(b1);

  MultiOp b2(W, W, 2, 1);
  for (int i = 0; i < dim; ++i) {
    const int sa = degree_of_flat_index(W, i);  // suspended degree of slot 1
    const double sgn = (((sa % 2) + 2) % 2 == 0) ? 1.0 : -1.0;
    for (int j = 0; j < dim; ++j)
      b2.set_column({i, j}, sgn * mult[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  }
  out.b.push_back(b2);
  for (int n = 3; n <= n_max; ++n) out.b.emplace_back();
  return out;
}

}  // namespace holo
