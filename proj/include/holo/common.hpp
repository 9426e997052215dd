// Shared small utilities: deterministic RNG, stable summation, float formatting.
//
// Everything downstream (quadrature, report writers, test data generators) is
// required to be bit-reproducible for a fixed seed, so random numbers and
// accumulation orders are pinned here once instead of per call site.

#ifndef HOLO_COMMON_HPP
#define HOLO_COMMON_HPP

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace holo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Error classes. SchemaError/AccuracyError/InvariantError map onto the CLI
// exit codes 2/3/4; NonSmoothPoint signals a quadrature node sitting on a
// max-tie of the cube-to-simplex projection (callers retry with a jitter).
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AccuracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonSmoothPoint : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic uniform generator. mt19937_64 has a fully specified sequence;
// the double conversion below avoids std::uniform_real_distribution, whose
// output is implementation defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform()  // in [0, 1)
  {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi)  // inclusive bounds
  {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Pairwise summation in index order: deterministic and more accurate than a
// running sum for long quadrature node lists.
double pairwise_sum(std::span<const double> values);
Matrix pairwise_sum(const std::vector<Matrix>& values);

// Fixed float formatting used by every report writer ("%.17g" keeps the
// round-trip exact; reports must be byte-identical across runs).
std::string format_double(double x);

}  // namespace holo

#endif
