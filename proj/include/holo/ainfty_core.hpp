// Finite-dimensional A-infinity machinery in the suspended convention: all
// structure maps b_n have degree +1 and all morphism components psi_n have
// degree 0 on the (already shifted) graded space, so the structure and
// morphism equations carry only the insertion signs
// (-1)^{deg x_1 + ... + deg x_i} from moving b past the first i slots.

#ifndef HOLO_AINFTY_CORE_HPP
#define HOLO_AINFTY_CORE_HPP

#include <vector>

#include "holo/graded.hpp"

namespace holo {

// Degree of the flat basis index inside the degree-ordered basis.
int degree_of_flat_index(const GradedVectorSpace& space, int index);

// Dense n-linear map W^{(x)n} -> W' of fixed degree, stored column-per-tuple
// (first slot most significant).
class MultiOp {
 public:
  MultiOp() = default;
  MultiOp(GradedVectorSpace domain, GradedVectorSpace target, int arity, int degree);

  int arity() const { return arity_; }
  int degree() const { return degree_; }
  const GradedVectorSpace& domain() const { return domain_; }
  const GradedVectorSpace& target() const { return target_; }
  bool empty() const { return data_.size() == 0; }

  int tuple_index(const std::vector<int>& idx) const;
  void set_column(const std::vector<int>& idx, const Vector& value);
  Vector column(const std::vector<int>& idx) const;
  // Multilinear extension; args.size() == arity.
  Vector apply(const std::vector<Vector>& args) const;

  // Largest entry landing outside the graded degree prescribed by the slot
  // degrees; 0 for a well-graded map.
  double degree_defect() const;

  double sup_norm() const;
  MultiOp& operator+=(const MultiOp& other);

 private:
  GradedVectorSpace domain_;
  GradedVectorSpace target_;
  int arity_ = 0;
  int degree_ = 0;
  Matrix data_;
};

// Structure maps b_1..b_{n_max} over an already-suspended graded space.
struct AInftyAlgebra {
  GradedVectorSpace space;
  int n_max = 0;
  std::vector<MultiOp> b;  // b[i] has arity i+1

  const MultiOp* op(int arity) const;  // nullptr when absent
};

// Components psi_1..psi_{n_max}, degree 0.
struct AInftyMorphism {
  GradedVectorSpace source;
  GradedVectorSpace target;
  int n_max = 0;
  std::vector<MultiOp> psi;

  const MultiOp* op(int arity) const;
};

AInftyMorphism identity_morphism(const AInftyAlgebra& A);

// Largest violation of  sum_{i+j+k=n} (-1)^{...} b(id^i (x) b_j (x) id^k) = 0
// over basis tuples, n = 1..2 n_max - 1.  Tuple sets larger than
// exhaustive_limit are sampled (samples per arity) with rng.
double structure_residual_algebra(const AInftyAlgebra& A, Rng* rng = nullptr,
                                  int samples = 64, long exhaustive_limit = 20000);

// Both sides of the morphism equation
//   sum psi(id^i (x) b_j (x) id^k) = sum b'_r (psi_{l_1} (x) ... (x) psi_{l_r}).
double morphism_residual(const AInftyMorphism& psi, const AInftyAlgebra& A,
                         const AInftyAlgebra& Aprime, Rng* rng = nullptr,
                         int samples = 64, long exhaustive_limit = 20000);

// (outer . inner)_n = sum_r outer_r (inner_{l_1} (x) ... (x) inner_{l_r});
// truncated at min of the two supports.
AInftyMorphism compose_ainfty(const AInftyMorphism& outer, const AInftyMorphism& inner);

// Maurer-Cartan residual  | sum_n b_n(x,...,x) |  for degree-0 x.
double mc_residual_element(const AInftyAlgebra& A, const Vector& x);

// Twisted structure maps  b^x_n = sum b_{n+j_0+...+j_n}(x^{j_0}, ., x^{j_1}, ...);
// finite because b vanishes above n_max.
AInftyAlgebra twist_algebra(const AInftyAlgebra& A, const Vector& x);
AInftyMorphism twist_morphism(const AInftyMorphism& psi, const AInftyAlgebra& A,
                              const AInftyAlgebra& Aprime, const Vector& x);
// Pushforward  sum_n psi_n(x,...,x)  of a Maurer-Cartan element.
Vector mc_pushforward(const AInftyMorphism& psi, const Vector& x);

// Associative graded algebra with unit, dense structure constants.
struct GradedAlgebraData {
  GradedVectorSpace space;
  std::vector<std::vector<Vector>> mult;  // mult[i][j] = e_i * e_j over the flat basis
  Vector unit;

  Vector multiply(const Vector& a, const Vector& b) const;
  double associativity_residual() const;
  double unit_residual() const;
};

// Index bookkeeping of the graded tensor product E (x) W.
class TensorBasis {
 public:
  TensorBasis(GradedVectorSpace E, GradedVectorSpace W);
  const GradedVectorSpace& total() const { return total_; }
  int index(int e_flat, int w_flat) const;

 private:
  GradedVectorSpace E_, W_;
  GradedVectorSpace total_;
  std::vector<std::vector<int>> table_;
};

// Differential graded algebra (b_n = 0 for n >= 3) tensored with E, over the
// identification s(E (x) A) = E (x) sA carrying the sign (-1)^{|e|}:
//   b1(e (x) w)          = (-1)^{|e|} e (x) b1(w)
//   b2(e (x) w1, f (x) w2) = (-1)^{|e| + (|w1|+1)|f|} (e f) (x) b2(w1, w2).
AInftyAlgebra tensor_dga(const GradedAlgebraData& E, const AInftyAlgebra& A);

// id_E (x) psi with the sign (-1)^{sum_i |w_i| (|e_{i+1}|+...+|e_n|)}.
AInftyMorphism tensor_with_algebra(const GradedAlgebraData& E, const AInftyMorphism& psi);

// Suspended structure of a differential graded algebra given unsuspended
// data: W = V shifted by 1, b1(sa) = s(da), b2(sa (x) sb) = (-1)^{deg sa} s(ab).
AInftyAlgebra dga_to_ainfty(const GradedVectorSpace& V, const GradedMap& d,
                            const std::vector<std::vector<Vector>>& mult, int n_max = 6);

}  // namespace holo

#endif
