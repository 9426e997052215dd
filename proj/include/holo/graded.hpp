// Z-graded vector spaces and degree-homogeneous linear maps.
//
// A GradedVectorSpace is a finite window of degrees with a dimension in each.
// A GradedMap of degree d sends the degree-k component of the source into the
// degree-(k+d) component of the target and is stored as one dense Eigen block
// per populated source degree. Flattened forms (one big matrix over the
// degree-ordered basis) are provided for rank computations and for the
// integrator, which prefers to work on plain matrices.

#ifndef HOLO_GRADED_HPP
#define HOLO_GRADED_HPP

#include <initializer_list>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "holo/common.hpp"

namespace holo {

class GradedVectorSpace {
 public:
  GradedVectorSpace() = default;
  explicit GradedVectorSpace(const std::map<int, int>& dims);

  // One-dimensional space in a single degree, and the general single-degree case.
  static GradedVectorSpace line(int degree = 0);
  static GradedVectorSpace concentrated(int degree, int dim);

  int dim(int degree) const;
  int total_dim() const;
  bool empty() const { return dims_.empty(); }

  // Sorted list of degrees with nonzero dimension.
  const std::vector<int>& degrees() const { return degree_list_; }
  int min_degree() const;
  int max_degree() const;

  // shifted(s).dim(d) == dim(d + s); shifted(1) is the suspension sV.
  GradedVectorSpace shifted(int s) const;

  // Start of the degree block in the flattened basis (degrees ascending).
  int offset(int degree) const;

  bool operator==(const GradedVectorSpace& other) const { return dims_ == other.dims_; }
  bool operator!=(const GradedVectorSpace& other) const { return !(*this == other); }

 private:
  std::vector<std::pair<int, int>> dims_;  // (degree, dim), sorted, dim > 0
  std::vector<int> degree_list_;
};

class GradedMap {
 public:
  GradedMap() = default;
  GradedMap(GradedVectorSpace source, GradedVectorSpace target, int degree);

  static GradedMap identity(const GradedVectorSpace& V);

  const GradedVectorSpace& source() const { return source_; }
  const GradedVectorSpace& target() const { return target_; }
  int degree() const { return degree_; }

  bool has_block(int source_degree) const;
  // Zero matrix of the right shape when the block is absent (possibly 0 x n).
  Matrix block(int source_degree) const;
  // Creates the block on demand; rejects source degrees where either side has
  // dimension zero (such a block carries no data and would corrupt flatten()).
  Matrix& mutable_block(int source_degree);
  void set_block(int source_degree, const Matrix& m);

  GradedMap& operator+=(const GradedMap& other);
  GradedMap& operator-=(const GradedMap& other);
  GradedMap& operator*=(double c);

  // Same blocks over shifted spaces; no sign is applied here, sign conventions
  // for (de)suspension live with the callers.
  GradedMap shifted(int s) const;

  double sup_norm() const;
  double frobenius_norm() const;
  double operator_norm() const;  // largest singular value of the flattened matrix
  bool is_zero(double tol = 0.0) const;

  Matrix flatten() const;
  static GradedMap from_flat(const Matrix& m, const GradedVectorSpace& source,
                             const GradedVectorSpace& target, int degree);

  // Apply to the flattened coordinate vector of the source.
  Vector apply_flat(const Vector& x) const;

 private:
  GradedVectorSpace source_;
  GradedVectorSpace target_;
  int degree_ = 0;
  std::map<int, Matrix> blocks_;  // keyed by source degree
};

GradedMap operator+(GradedMap a, const GradedMap& b);
GradedMap operator-(GradedMap a, const GradedMap& b);
GradedMap operator*(double c, GradedMap a);
GradedMap operator*(GradedMap a, double c);

// compose(f, g) = f after g; degrees add.
GradedMap compose(const GradedMap& f, const GradedMap& g);
GradedMap operator*(const GradedMap& f, const GradedMap& g);

// Koszul sign picked up when a block of graded symbols with degrees b moves
// past a block with degrees a: (-1)^{(sum a)(sum b)}.
int koszul_sign(std::span<const int> a, std::span<const int> b);

// Sign of reordering graded symbols by the permutation perm (perm[i] is the
// source position of the symbol landing in slot i), counted crossing by
// crossing with the Koszul rule.
int koszul_permutation_sign(std::span<const int> degrees, std::span<const int> perm);

// Sign relating a tensor of suspended symbols to the tensor of their
// desuspensions: (-1)^{sum_i d_i * (n-1-i)} with 0-based i.
int desuspension_sign(std::span<const int> degrees);

// diag((-1)^degree) over the flattened basis; conjugating a flattened map by
// this flips the sign of its odd-degree part.
Matrix parity_matrix(const GradedVectorSpace& V);

// Finite direct sum with block embedding/extraction, used to pack a chain of
// graded spaces into one space so maps between different summands become
// corners of one endomorphism.
class DirectSum {
 public:
  explicit DirectSum(std::vector<GradedVectorSpace> parts);

  const GradedVectorSpace& total() const { return total_; }
  const GradedVectorSpace& part(int i) const { return parts_[static_cast<std::size_t>(i)]; }
  int parts_count() const { return static_cast<int>(parts_.size()); }

  // f maps part j into part i; result is the corresponding endomorphism block
  // of the total space (everything else zero).
  GradedMap embed(const GradedMap& f, int i, int j) const;
  GradedMap extract(const GradedMap& F, int i, int j) const;

 private:
  int offset_in_degree(int part, int degree) const;

  std::vector<GradedVectorSpace> parts_;
  GradedVectorSpace total_;
};

}  // namespace holo

#endif
