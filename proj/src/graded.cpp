#include "holo/graded.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace holo {

GradedVectorSpace::GradedVectorSpace(const std::map<int, int>& dims) {
  for (const auto& [deg, dim] : dims) {
    if (dim < 0) throw InvariantError("negative dimension in graded space");
    if (dim > 0) {
      dims_.emplace_back(deg, dim);
      degree_list_.push_back(deg);
    }
  }
}

GradedVectorSpace GradedVectorSpace::line(int degree) { return concentrated(degree, 1); }

GradedVectorSpace GradedVectorSpace::concentrated(int degree, int dim) {
  return GradedVectorSpace(std::map<int, int>{{degree, dim}});
}

int GradedVectorSpace::dim(int degree) const {
  for (const auto& [deg, dim] : dims_)
    if (deg == degree) return dim;
  return 0;
}

int GradedVectorSpace::total_dim() const {
  int n = 0;
  for (const auto& [deg, dim] : dims_) n += dim;
  return n;
}

int GradedVectorSpace::min_degree() const {
  if (dims_.empty()) throw InvariantError("min_degree of empty graded space");
  return dims_.front().first;
}

int GradedVectorSpace::max_degree() const {
  if (dims_.empty()) throw InvariantError("max_degree of empty graded space");
  return dims_.back().first;
}

GradedVectorSpace GradedVectorSpace::shifted(int s) const {
  std::map<int, int> shifted_dims;
  for (const auto& [deg, dim] : dims_) shifted_dims[deg - s] = dim;
  return GradedVectorSpace(shifted_dims);
}

int GradedVectorSpace::offset(int degree) const {
  int off = 0;
  for (const auto& [deg, dim] : dims_) {
    if (deg == degree) return off;
    off += dim;
  }
  throw InvariantError("offset() of a degree not present in the graded space");
}

GradedMap::GradedMap(GradedVectorSpace source, GradedVectorSpace target, int degree)
    : source_(std::move(source)), target_(std::move(target)), degree_(degree) {}

GradedMap GradedMap::identity(const GradedVectorSpace& V) {
  GradedMap id(V, V, 0);
  for (int d : V.degrees()) id.mutable_block(d) = Matrix::Identity(V.dim(d), V.dim(d));
  return id;
}

bool GradedMap::has_block(int source_degree) const { return blocks_.count(source_degree) > 0; }

Matrix GradedMap::block(int source_degree) const {
  auto it = blocks_.find(source_degree);
  if (it != blocks_.end()) return it->second;
  return Matrix::Zero(target_.dim(source_degree + degree_), source_.dim(source_degree));
}

Matrix& GradedMap::mutable_block(int source_degree) {
  const int rows = target_.dim(source_degree + degree_);
  const int cols = source_.dim(source_degree);
  if (rows == 0 || cols == 0)
    throw InvariantError("GradedMap block requested where source or target degree is empty");
  auto it = blocks_.find(source_degree);
  if (it == blocks_.end()) it = blocks_.emplace(source_degree, Matrix::Zero(rows, cols)).first;
  return it->second;
}

void GradedMap::set_block(int source_degree, const Matrix& m) {
  const int rows = target_.dim(source_degree + degree_);
  const int cols = source_.dim(source_degree);
  if (m.rows() != rows || m.cols() != cols)
    throw InvariantError("GradedMap::set_block shape mismatch");
  if (rows == 0 || cols == 0) return;
  blocks_[source_degree] = m;
}

GradedMap& GradedMap::operator+=(const GradedMap& other) {
  if (source_ != other.source_ || target_ != other.target_ || degree_ != other.degree_)
    throw InvariantError("GradedMap addition: incompatible maps");
  for (const auto& [k, m] : other.blocks_) {
    auto it = blocks_.find(k);
    if (it == blocks_.end())
      blocks_[k] = m;
    else
      it->second += m;
  }
  return *this;
}

GradedMap& GradedMap::operator-=(const GradedMap& other) {
  GradedMap neg = other;
  neg *= -1.0;
  return (*this += neg);
}

GradedMap& GradedMap::operator*=(double c) {
  for (auto& [k, m] : blocks_) m *= c;
  return *this;
}

GradedMap GradedMap::shifted(int s) const {
  GradedMap out(source_.shifted(s), target_.shifted(s), degree_);
  for (const auto& [k, m] : blocks_) out.blocks_[k - s] = m;
  return out;
}

double GradedMap::sup_norm() const {
  double n = 0.0;
  for (const auto& [k, m] : blocks_)
    if (m.size() > 0) n = std::max(n, m.cwiseAbs().maxCoeff());
  return n;
}

double GradedMap::frobenius_norm() const {
  double s = 0.0;
  for (const auto& [k, m] : blocks_) s += m.squaredNorm();
  return std::sqrt(s);
}

double GradedMap::operator_norm() const {
  const Matrix flat = flatten();
  if (flat.size() == 0) return 0.0;
  return flat.jacobiSvd().singularValues()(0);
}

bool GradedMap::is_zero(double tol) const { return sup_norm() <= tol; }

Matrix GradedMap::flatten() const {
  Matrix out = Matrix::Zero(target_.total_dim(), source_.total_dim());
  for (const auto& [k, m] : blocks_) {
    if (m.size() == 0) continue;
    out.block(target_.offset(k + degree_), source_.offset(k), m.rows(), m.cols()) = m;
  }
  return out;
}

GradedMap GradedMap::from_flat(const Matrix& m, const GradedVectorSpace& source,
                               const GradedVectorSpace& target, int degree) {
  if (m.rows() != target.total_dim() || m.cols() != source.total_dim())
    throw InvariantError("GradedMap::from_flat shape mismatch");
  GradedMap out(source, target, degree);
  for (int k : source.degrees()) {
    if (target.dim(k + degree) == 0) continue;
    out.mutable_block(k) =
        m.block(target.offset(k + degree), source.offset(k), target.dim(k + degree), source.dim(k));
  }
  return out;
}

Vector GradedMap::apply_flat(const Vector& x) const {
  if (x.size() != source_.total_dim()) throw InvariantError("apply_flat: vector size mismatch");
  return flatten() * x;
}

GradedMap operator+(GradedMap a, const GradedMap& b) { return a += b; }
GradedMap operator-(GradedMap a, const GradedMap& b) { return a -= b; }
GradedMap operator*(double c, GradedMap a) { return a *= c; }

GradedMap operator*(GradedMap a, double c) { return a *= c; }

GradedMap compose(const GradedMap& f, const GradedMap& g) {
  if (g.target() != f.source()) throw InvariantError("compose: middle spaces differ");
  GradedMap out(g.source(), f.target(), f.degree() + g.degree());
  for (int k : g.source().degrees()) {
    const int mid = k + g.degree();
    if (g.target().dim(mid) == 0) continue;
    if (f.target().dim(mid + f.degree()) == 0) continue;
    const Matrix prod = f.block(mid) * g.block(k);
    if (prod.size() > 0) out.set_block(k, prod);
  }
  return out;
}

GradedMap operator*(const GradedMap& f, const GradedMap& g) { return compose(f, g); }

int koszul_sign(std::span<const int> a, std::span<const int> b) {
  long sa = 0, sb = 0;
  for (int d : a) sa += d;
  for (int d : b) sb += d;
  return ((sa % 2) != 0 && (sb % 2) != 0) ? -1 : 1;
}

int koszul_permutation_sign(std::span<const int> degrees, std::span<const int> perm) {
  // Sort by bubble swaps; each transposition of adjacent symbols of degrees
  // p, q contributes (-1)^{pq}.
  std::vector<int> order(perm.begin(), perm.end());
  const std::size_t n = order.size();
  if (degrees.size() != n) throw InvariantError("koszul_permutation_sign: size mismatch");
  int sign = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j + 1 < n - i; ++j) {
      if (order[j] > order[j + 1]) {
        const int p = degrees[static_cast<std::size_t>(order[j])];
        const int q = degrees[static_cast<std::size_t>(order[j + 1])];
        if ((p % 2 != 0) && (q % 2 != 0)) sign = -sign;
        std::swap(order[j], order[j + 1]);
      }
    }
  }
  return sign;
}

int desuspension_sign(std::span<const int> degrees) {
  const long n = static_cast<long>(degrees.size());
  long s = 0;
  for (long i = 0; i < n; ++i) s += static_cast<long>(degrees[static_cast<std::size_t>(i)]) * (n - 1 - i);
  return (s % 2 != 0) ? -1 : 1;
}

Matrix parity_matrix(const GradedVectorSpace& V) {
  Matrix P = Matrix::Zero(V.total_dim(), V.total_dim());
  for (int d : V.degrees()) {
    const double s = (((d % 2) + 2) % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < V.dim(d); ++i) P(V.offset(d) + i, V.offset(d) + i) = s;
  }
  return P;
}

DirectSum::DirectSum(std::vector<GradedVectorSpace> parts) : parts_(std::move(parts)) {
  std::map<int, int> dims;
  for (const auto& p : parts_)
    for (int d : p.degrees()) dims[d] += p.dim(d);
  total_ = GradedVectorSpace(dims);
}

int DirectSum::offset_in_degree(int part, int degree) const {
  int off = 0;
  for (int p = 0; p < part; ++p) off += parts_[static_cast<std::size_t>(p)].dim(degree);
  return off;
}

GradedMap DirectSum::embed(const GradedMap& f, int i, int j) const {
  if (f.source() != part(j) || f.target() != part(i))
    throw InvariantError("DirectSum::embed: map does not match the requested parts");
  GradedMap out(total_, total_, f.degree());
  for (int k : f.source().degrees()) {
    const int kd = k + f.degree();
    if (part(i).dim(kd) == 0) continue;
    Matrix& blk = out.mutable_block(k);
    blk.block(offset_in_degree(i, kd), offset_in_degree(j, k), part(i).dim(kd), part(j).dim(k)) =
        f.block(k);
  }
  return out;
}

GradedMap DirectSum::extract(const GradedMap& F, int i, int j) const {
  if (F.source() != total_ || F.target() != total_)
    throw InvariantError("DirectSum::extract: map is not an endomorphism of the total space");
  GradedMap out(part(j), part(i), F.degree());
  for (int k : part(j).degrees()) {
    const int kd = k + F.degree();
    if (part(i).dim(kd) == 0) continue;
    if (total_.dim(k) == 0 || total_.dim(kd) == 0) continue;
    const Matrix blk = F.block(k);
    if (blk.size() == 0) continue;
    out.mutable_block(k) =
        blk.block(offset_in_degree(i, kd), offset_in_degree(j, k), part(i).dim(kd), part(j).dim(k));
  }
  return out;
}

}  // namespace holo
