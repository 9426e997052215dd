#include "holo/simplicial_reps.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <stdexcept>

#include "holo/common.hpp"

namespace holo {

const std::vector<SimplexTuple> FiniteSimplicialSet::kEmpty;

namespace {

bool strictly_increasing(const SimplexTuple& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i - 1] >= s[i]) return false;
  }
  return true;
}

bool weakly_increasing(const SimplexTuple& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i - 1] > s[i]) return false;
  }
  return true;
}

// All weakly increasing tuples of given length with support exactly `supp`.
void tuples_with_support(const SimplexTuple& supp, int length, std::size_t pos,
                         SimplexTuple& current, std::vector<SimplexTuple>& out) {
  const int remaining_slots = length - static_cast<int>(current.size());
  const int remaining_vertices = static_cast<int>(supp.size() - pos);
  if (remaining_vertices == 0) {
    if (remaining_slots == 0) out.push_back(current);
    return;
  }
  // Each remaining vertex needs at least one slot.
  for (int count = 1; count <= remaining_slots - (remaining_vertices - 1); ++count) {
    current.insert(current.end(), count, supp[pos]);
    tuples_with_support(supp, length, pos + 1, current, out);
    current.resize(current.size() - count);
  }
}

}  // namespace

FiniteSimplicialSet FiniteSimplicialSet::from_simplices(
    int num_vertices, const std::vector<SimplexTuple>& generators) {
  FiniteSimplicialSet X;
  X.num_vertices_ = num_vertices;
  for (const SimplexTuple& g : generators) {
    if (g.empty()) throw SchemaError("empty simplex");
    if (!strictly_increasing(g))
      throw SchemaError("generating simplices must be strictly increasing vertex tuples");
    if (g.front() < 0 || g.back() >= num_vertices)
      throw SchemaError("simplex vertex out of range");
    // Close under faces: every nonempty subsequence of a strictly increasing
    // tuple is again one.
    const int n = static_cast<int>(g.size());
    for (int mask = 1; mask < (1 << n); ++mask) {
      SimplexTuple sub;
      for (int i = 0; i < n; ++i) {
        if (mask & (1 << i)) sub.push_back(g[i]);
      }
      X.supports_.insert(sub);
    }
  }
  int d = -1;
  for (const SimplexTuple& s : X.supports_) d = std::max(d, static_cast<int>(s.size()) - 1);
  X.nondeg_.assign(d + 1, {});
  for (const SimplexTuple& s : X.supports_) X.nondeg_[s.size() - 1].push_back(s);
  for (auto& level : X.nondeg_) std::sort(level.begin(), level.end());
  return X;
}

const std::vector<SimplexTuple>& FiniteSimplicialSet::nondegenerate(int k) const {
  if (k < 0 || k >= static_cast<int>(nondeg_.size())) return kEmpty;
  return nondeg_[k];
}

std::vector<SimplexTuple> FiniteSimplicialSet::all_tuples(int k) const {
  std::vector<SimplexTuple> out;
  if (k < 0) return out;
  for (int m = 0; m <= std::min(k, dim()); ++m) {
    for (const SimplexTuple& supp : nondeg_[m]) {
      SimplexTuple current;
      tuples_with_support(supp, k + 1, 0, current, out);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool FiniteSimplicialSet::contains_support(const SimplexTuple& t) const {
  if (t.empty() || !weakly_increasing(t)) return false;
  return supports_.count(support(t)) > 0;
}

SimplexTuple FiniteSimplicialSet::face(const SimplexTuple& s, int i) {
  if (i < 0 || i >= static_cast<int>(s.size()))
    throw std::out_of_range("face index out of range");
  SimplexTuple out = s;
  out.erase(out.begin() + i);
  return out;
}

SimplexTuple FiniteSimplicialSet::degeneracy(const SimplexTuple& s, int i) {
  if (i < 0 || i >= static_cast<int>(s.size()))
    throw std::out_of_range("degeneracy index out of range");
  SimplexTuple out = s;
  out.insert(out.begin() + i, s[i]);
  return out;
}

SimplexTuple FiniteSimplicialSet::slice(const SimplexTuple& s, int a, int b) {
  if (a < 0 || b >= static_cast<int>(s.size()) || a > b)
    throw std::out_of_range("slice out of range");
  return SimplexTuple(s.begin() + a, s.begin() + b + 1);
}

bool FiniteSimplicialSet::is_degenerate(const SimplexTuple& s) {
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i - 1] == s[i]) return true;
  }
  return false;
}

SimplexTuple FiniteSimplicialSet::support(const SimplexTuple& s) {
  SimplexTuple out;
  for (int v : s) {
    if (out.empty() || out.back() != v) out.push_back(v);
  }
  return out;
}

GradedMap SimplicialRep::op(const SimplexTuple& s) const {
  if (s.empty()) throw std::invalid_argument("empty simplex tuple");
  const int k = static_cast<int>(s.size()) - 1;
  auto it = ops.find(s);
  if (it != ops.end()) return it->second;
  if (FiniteSimplicialSet::is_degenerate(s)) {
    auto ov = degenerate_overrides.find(s);
    if (ov != degenerate_overrides.end()) return ov->second;
    if (unital && k == 1) return GradedMap::identity(space);
    return GradedMap(space, space, 1 - k);
  }
  return GradedMap(space, space, 1 - k);
}

SimplicialRep trivial_rep(const FiniteSimplicialSet& X, const GradedVectorSpace& V) {
  SimplicialRep rep;
  rep.X = X;
  rep.space = V;
  rep.unital = true;
  for (const SimplexTuple& e : X.nondegenerate(1)) rep.ops[e] = GradedMap::identity(V);
  return rep;
}

namespace {

GradedMap structure_term(const SimplicialRep& rep, const SimplexTuple& s) {
  const int k = static_cast<int>(s.size()) - 1;
  GradedMap acc(rep.space, rep.space, 2 - k);
  for (int j = 1; j <= k - 1; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    acc += sign * rep.op(FiniteSimplicialSet::face(s, j));
  }
  for (int j = 0; j <= k; ++j) {
    const double sign = (j % 2 == 0) ? -1.0 : 1.0;  // (-1)^{j+1}
    acc += sign * compose(rep.op(FiniteSimplicialSet::slice(s, 0, j)),
                          rep.op(FiniteSimplicialSet::slice(s, j, k)));
  }
  return acc;
}

}  // namespace

double structure_residual(const SimplicialRep& rep) {
  double worst = 0.0;
  for (int k = 0; k <= rep.X.dim() + 1; ++k) {
    for (const SimplexTuple& s : rep.X.all_tuples(k)) {
      worst = std::max(worst, structure_term(rep, s).sup_norm());
    }
  }
  return worst;
}

double unitality_residual(const SimplicialRep& rep) {
  double worst = 0.0;
  for (const auto& [s, value] : rep.degenerate_overrides) {
    const int k = static_cast<int>(s.size()) - 1;
    GradedMap expected = (k == 1) ? GradedMap::identity(rep.space)
                                  : GradedMap(rep.space, rep.space, 1 - k);
    worst = std::max(worst, (value - expected).sup_norm());
  }
  return worst;
}

SimplicialRep mc_to_rep(const FiniteSimplicialSet& X, const GradedVectorSpace& V,
                        const std::map<SimplexTuple, GradedMap>& components, bool unital) {
  SimplicialRep rep;
  rep.X = X;
  rep.space = V;
  rep.unital = unital;
  for (const auto& [s, value] : components) {
    if (!X.contains_support(s)) throw SchemaError("component on a simplex outside the set");
    const int k = static_cast<int>(s.size()) - 1;
    if (value.degree() != 1 - k)
      throw SchemaError("component on a " + std::to_string(k) +
                        "-simplex must have degree " + std::to_string(1 - k));
    if (!(value.source() == V) || !(value.target() == V))
      throw SchemaError("component spaces do not match the representation space");
    if (FiniteSimplicialSet::is_degenerate(s)) {
      rep.degenerate_overrides[s] = value;
    } else {
      rep.ops[s] = value;
    }
  }
  return rep;
}

const std::map<SimplexTuple, GradedMap>& rep_to_mc(const SimplicialRep& rep) {
  return rep.ops;
}

GradedMap MorphismCochain::component(const SimplexTuple& s) const {
  auto it = components.find(s);
  if (it != components.end()) return it->second;
  const int k = static_cast<int>(s.size()) - 1;
  return GradedMap(source, target, total_degree - k);
}

MorphismCochain morphism_differential(const SimplicialRep& target,
                                      const SimplicialRep& source,
                                      const MorphismCochain& phi) {
  if (!(phi.source == source.space) || !(phi.target == target.space))
    throw std::invalid_argument("cochain spaces do not match the representations");
  const int n = phi.total_degree;
  MorphismCochain out;
  out.source = phi.source;
  out.target = phi.target;
  out.total_degree = n + 1;
  const int top = std::max(target.X.dim(), source.X.dim()) + 1;
  for (int k = 0; k <= top; ++k) {
    for (const SimplexTuple& s : target.X.all_tuples(k)) {
      GradedMap acc(phi.source, phi.target, n + 1 - k);
      for (int j = 0; j <= k; ++j) {
        const double left_sign = ((j * n) % 2 == 0) ? 1.0 : -1.0;
        acc += left_sign * compose(target.op(FiniteSimplicialSet::slice(s, 0, j)),
                                   phi.component(FiniteSimplicialSet::slice(s, j, k)));
        const double right_sign = ((n + j + 1) % 2 == 0) ? 1.0 : -1.0;
        acc += right_sign * compose(phi.component(FiniteSimplicialSet::slice(s, 0, j)),
                                    source.op(FiniteSimplicialSet::slice(s, j, k)));
      }
      for (int j = 1; j <= k - 1; ++j) {
        const double sign = ((j + n) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * phi.component(FiniteSimplicialSet::face(s, j));
      }
      if (!acc.is_zero()) out.components[s] = acc;
    }
  }
  return out;
}

MorphismCochain compose_morphisms(const MorphismCochain& outer,
                                  const MorphismCochain& inner) {
  if (!(inner.target == outer.source))
    throw std::invalid_argument("morphism composition: spaces do not match");
  const int n = inner.total_degree;
  MorphismCochain out;
  out.source = inner.source;
  out.target = outer.target;
  out.total_degree = outer.total_degree + inner.total_degree;

  std::set<SimplexTuple> keys_outer;
  for (const auto& [s, v] : outer.components) keys_outer.insert(s);
  std::set<SimplexTuple> keys_inner;
  for (const auto& [s, v] : inner.components) keys_inner.insert(s);

  // Any simplex carrying a nonzero composite is a concatenation of a simplex
  // with an outer component and one with an inner component sharing a vertex.
  std::set<SimplexTuple> candidates;
  for (const SimplexTuple& a : keys_outer) {
    for (const SimplexTuple& b : keys_inner) {
      if (a.back() != b.front()) continue;
      SimplexTuple s = a;
      s.insert(s.end(), b.begin() + 1, b.end());
      candidates.insert(s);
    }
  }
  for (const SimplexTuple& s : candidates) {
    const int k = static_cast<int>(s.size()) - 1;
    GradedMap acc(out.source, out.target, out.total_degree - k);
    for (int j = 0; j <= k; ++j) {
      const double sign = ((j * n) % 2 == 0) ? 1.0 : -1.0;
      acc += sign * compose(outer.component(FiniteSimplicialSet::slice(s, 0, j)),
                            inner.component(FiniteSimplicialSet::slice(s, j, k)));
    }
    if (!acc.is_zero()) out.components[s] = acc;
  }
  return out;
}

MorphismCochain cochain_difference(const MorphismCochain& a, const MorphismCochain& b) {
  if (!(a.source == b.source) || !(a.target == b.target) ||
      a.total_degree != b.total_degree)
    throw std::invalid_argument("cochain difference: shapes do not match");
  MorphismCochain out = a;
  for (const auto& [s, v] : b.components) {
    auto it = out.components.find(s);
    if (it == out.components.end()) {
      out.components[s] = -1.0 * v;
    } else {
      it->second -= v;
    }
  }
  return out;
}

double cochain_sup_norm(const MorphismCochain& phi) {
  double worst = 0.0;
  for (const auto& [s, v] : phi.components) worst = std::max(worst, v.sup_norm());
  return worst;
}

namespace {

struct BasisSlot {
  SimplexTuple simplex;
  int internal_degree;
  int index;
};

std::vector<BasisSlot> cochain_basis(const FiniteSimplicialSet& X,
                                     const GradedVectorSpace& V, int n) {
  std::vector<BasisSlot> slots;
  for (int k = 0; k <= X.dim(); ++k) {
    const int d = n - k;
    const int dv = V.dim(d);
    if (dv == 0) continue;
    for (const SimplexTuple& s : X.nondegenerate(k)) {
      for (int i = 0; i < dv; ++i) slots.push_back({s, d, i});
    }
  }
  return slots;
}

int svd_rank(const Matrix& m, double threshold_factor) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double cutoff = threshold_factor * sv(0);
  if (sv(0) == 0.0) return 0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

}  // namespace

std::vector<int> twisted_betti(const SimplicialRep& rep, double rank_threshold) {
  const GradedVectorSpace line = GradedVectorSpace::line(0);
  const SimplicialRep triv = trivial_rep(rep.X, line);
  const int n_min = rep.space.min_degree();
  const int n_max = rep.X.dim() + rep.space.max_degree();

  std::vector<std::vector<BasisSlot>> bases;
  for (int n = n_min; n <= n_max + 1; ++n)
    bases.push_back(cochain_basis(rep.X, rep.space, n));

  std::vector<int> ranks;  // rank of D: C^n -> C^{n+1}
  for (int n = n_min; n <= n_max; ++n) {
    const auto& dom = bases[n - n_min];
    const auto& cod = bases[n + 1 - n_min];
    Matrix D = Matrix::Zero(static_cast<int>(cod.size()), static_cast<int>(dom.size()));
    for (std::size_t c = 0; c < dom.size(); ++c) {
      MorphismCochain phi;
      phi.source = line;
      phi.target = rep.space;
      phi.total_degree = n;
      GradedMap unit(line, rep.space, dom[c].internal_degree);
      Matrix col = Matrix::Zero(rep.space.dim(dom[c].internal_degree), 1);
      col(dom[c].index, 0) = 1.0;
      unit.set_block(0, col);
      phi.components[dom[c].simplex] = unit;
      const MorphismCochain dphi = morphism_differential(rep, triv, phi);
      for (std::size_t r = 0; r < cod.size(); ++r) {
        const GradedMap& comp = dphi.component(cod[r].simplex);
        const Matrix block = comp.block(0);
        if (block.rows() > cod[r].index) D(static_cast<int>(r), static_cast<int>(c)) =
            block(cod[r].index, 0);
      }
    }
    ranks.push_back(svd_rank(D, rank_threshold));
  }

  std::vector<int> betti;
  for (int n = n_min; n <= n_max; ++n) {
    const int dim_n = static_cast<int>(bases[n - n_min].size());
    const int rank_out = ranks[n - n_min];
    const int rank_in = (n > n_min) ? ranks[n - 1 - n_min] : 0;
    betti.push_back(dim_n - rank_out - rank_in);
  }
  return betti;
}

}  // namespace holo
