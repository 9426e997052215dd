// Finite simplicial sets generated by ordered complexes, homotopy
// representations on graded spaces, and the associated morphism complex.
//
// A representation assigns to every vertex a degree-1 operator, to every edge
// a degree-0 operator, and to every k-simplex a degree-(1-k) operator, tied
// together by the structure equation
//
//   sum_{j=1}^{k-1} (-1)^j F(d_j s) + sum_{j=0}^{k} (-1)^{j+1} F(s[0:j]) F(s[j:k]) = 0.
//
// Unital representations extend to degenerate simplices by the identity on
// singular edges and zero above; that extension keeps the normalized morphism
// complex finite-dimensional, which is what the cohomology routines use.

#ifndef HOLO_SIMPLICIAL_REPS_HPP
#define HOLO_SIMPLICIAL_REPS_HPP

#include <map>
#include <set>
#include <vector>

#include "holo/graded.hpp"

namespace holo {

// Weakly increasing vertex list; strictly increasing means nondegenerate.
using SimplexTuple = std::vector<int>;

class FiniteSimplicialSet {
 public:
  FiniteSimplicialSet() = default;
  // Closes the generating simplices (strictly increasing tuples) under faces.
  static FiniteSimplicialSet from_simplices(int num_vertices,
                                            const std::vector<SimplexTuple>& generators);

  int num_vertices() const { return num_vertices_; }
  int dim() const { return static_cast<int>(nondeg_.size()) - 1; }
  const std::vector<SimplexTuple>& nondegenerate(int k) const;
  // All weakly increasing (k+1)-tuples whose support is a simplex of the set.
  std::vector<SimplexTuple> all_tuples(int k) const;
  bool contains_support(const SimplexTuple& t) const;

  static SimplexTuple face(const SimplexTuple& s, int i);
  static SimplexTuple degeneracy(const SimplexTuple& s, int i);
  static SimplexTuple slice(const SimplexTuple& s, int a, int b);  // entries a..b
  static bool is_degenerate(const SimplexTuple& s);
  static SimplexTuple support(const SimplexTuple& s);

 private:
  int num_vertices_ = 0;
  std::vector<std::vector<SimplexTuple>> nondeg_;
  std::set<SimplexTuple> supports_;
  static const std::vector<SimplexTuple> kEmpty;
};

struct SimplicialRep {
  FiniteSimplicialSet X;
  GradedVectorSpace space;
  bool unital = true;
  std::map<SimplexTuple, GradedMap> ops;                   // nondegenerate simplices
  std::map<SimplexTuple, GradedMap> degenerate_overrides;  // optional explicit values

  // Operator of any simplex: stored value, override, or the unital default
  // (identity on singular edges, zero on higher degenerate simplices).
  GradedMap op(const SimplexTuple& s) const;
};

// F1 = identity on every edge, everything else zero.
SimplicialRep trivial_rep(const FiniteSimplicialSet& X, const GradedVectorSpace& V);

// Largest entry of the structure equation over all tuples (including
// degenerate ones) of dimension up to dim + 1.
double structure_residual(const SimplicialRep& rep);

// Deviation of stored degenerate values from the unital prescription.
double unitality_residual(const SimplicialRep& rep);

SimplicialRep mc_to_rep(const FiniteSimplicialSet& X, const GradedVectorSpace& V,
                        const std::map<SimplexTuple, GradedMap>& components,
                        bool unital = true);
const std::map<SimplexTuple, GradedMap>& rep_to_mc(const SimplicialRep& rep);

// Cochain of maps between two representation spaces; the component on a
// k-simplex has internal degree total_degree - k.  Absent components are
// zero; components on degenerate simplices default to zero (normalization).
struct MorphismCochain {
  GradedVectorSpace source;
  GradedVectorSpace target;
  int total_degree = 0;
  std::map<SimplexTuple, GradedMap> components;

  GradedMap component(const SimplexTuple& s) const;
};

// Differential of the morphism complex Hom((V,F) -> (V',F')) of degree +1:
//   (D phi)(s^k) = sum_{j+i=k} (-1)^{j n} F'(s[0:j]) phi(s[j:k])
//               + sum_{j+i=k} (-1)^{n+j+1} phi(s[0:j]) F(s[j:k])
//               + sum_{j=1}^{k-1} (-1)^{j+n} phi(d_j s),      n = deg phi.
// Components are produced for every tuple up to dimension dim + 1.
MorphismCochain morphism_differential(const SimplicialRep& target,
                                      const SimplicialRep& source,
                                      const MorphismCochain& phi);

// Composition (outer . inner)_k = sum_{j+i=k} (-1)^{j n} outer_j cup inner_i,
// with n the total degree of inner.
MorphismCochain compose_morphisms(const MorphismCochain& outer,
                                  const MorphismCochain& inner);

MorphismCochain cochain_difference(const MorphismCochain& a, const MorphismCochain& b);
double cochain_sup_norm(const MorphismCochain& phi);

// Cohomology of the normalized twisted complex C^n = sum_{k} V^{n-k} over the
// nondegenerate k-simplices, with the morphism differential out of the
// trivial line representation.  Returns Betti numbers for n = V.min_degree()
// .. dim + V.max_degree(); ranks use singular values above
// rank_threshold * sigma_max.
std::vector<int> twisted_betti(const SimplicialRep& rep, double rank_threshold = 1e-8);

}  // namespace holo

#endif
