// Iterated-integral transport of polynomial superconnection forms over
// simplices, integrating along the cubical path family of simplex_geometry.
//
// For one argument list (a_1, ..., a_n) and a simplex dimension k the engine
// computes the time-ordered integral over the n-simplex of the dt-components
// of the pulled-back forms, wedges the leftover dx-components with the graded
// product of the coefficients, integrates the top dx-part over the (k-1)-cube
// and applies a fixed orientation sign depending only on (k, n).  Holonomy is
// the sum of those terms with all arguments equal; convergence is certified
// by a factorial tail bound computed from the integrated size of the
// integrand, never by eyeballing term decay.
//
// The t-integrals are exact: for fixed cube parameters x the integrand is a
// piecewise polynomial in t on the breakpoint grid of the path family, and the
// time-ordered recursion stays inside that space.  Only the final x-integral
// is numerical (per-order Gauss-Legendre on monotone sectors of the cube).

#ifndef HOLO_ITERATED_INTEGRALS_HPP
#define HOLO_ITERATED_INTEGRALS_HPP

#include <vector>

#include "holo/graded.hpp"
#include "holo/poly_forms.hpp"
#include "holo/simplex_geometry.hpp"

namespace holo {

struct TransportConfig {
  int max_n = 8;              // hard cap on the number of series terms
  double tol = 1e-8;          // certified truncation tolerance for series
  int quad_order = 8;         // Gauss-Legendre points per cube axis
  bool subdivide = true;      // split t-cells at branch-crossing times
  unsigned long long jitter_seed = 0x9e3779b97f4a7c15ull;  // retry seed
  int max_simplex_dim = 4;    // supported simplex dimensions
};

struct TransportDiagnostics {
  int n_used = 0;                 // highest series term actually computed
  double truncation_bound = 0.0;  // certified bound on the dropped tail
  double growth_constant = 0.0;   // largest integrated integrand size seen
};

// Matrix with exterior-form coefficients in the dx-generators: component
// comp[mask] multiplies the wedge of the dx_i with bit i-1 set in mask.
// Missing (zero-size) components are zero.
struct ExteriorMatrix {
  int dim = 0;
  int num_x = 0;
  std::vector<Matrix> comp;

  static ExteriorMatrix zero(int dim, int num_x);
  static ExteriorMatrix unit(int dim, int num_x);

  bool component_set(unsigned mask) const;
  Matrix component(unsigned mask) const;  // zero matrix when unset
  ExteriorMatrix& accumulate(double scale, const ExteriorMatrix& other);
  bool is_zero(double tol = 0.0) const;
  // Sum of Frobenius norms over components; submultiplicative under wedge.
  double size_bound() const;
};

// Sign from sorting dx_S dx_T into dx_{S|T}; masks must be disjoint.
int exterior_reorder_sign(unsigned s_mask, unsigned t_mask);

// Graded product: (A dx_S)(B dx_T) = sign(S,T) A * (P B P)^{|S|} dx_{S|T},
// where P is the parity involution of the flattened grading.
ExteriorMatrix exterior_wedge(const ExteriorMatrix& a, const ExteriorMatrix& b,
                              const Matrix& parity);

// Time-ordered term psi-bar_n(s a_1, ..., s a_n) over the k-simplex: every
// argument must be a polynomial form on the k-simplex over the same space,
// homogeneous in total (form + internal) degree.
GradedMap transport_term(const std::vector<PolyForm>& args, int k,
                         const TransportConfig& cfg = {});

// Full holonomy series  sum_{n>=1} transport_term(omega, ..., omega)  on the
// flattened space; throws AccuracyError when the certified tail bound cannot
// reach cfg.tol within cfg.max_n terms.  The form may be degree-inhomogeneous
// (used for chains of bundles packed into one direct sum).
Matrix holonomy_series_flat(const PolyForm& omega, int k,
                            const TransportConfig& cfg = {},
                            TransportDiagnostics* diag = nullptr);

// Degree-homogeneous wrapper: requires omega of total degree 1 and returns
// the series as a graded map of degree 1 - k.  Entries of the flat result
// outside that degree must be quadrature noise; a sizeable remainder raises
// InvariantError.
GradedMap holonomy_series(const PolyForm& omega, int k,
                          const TransportConfig& cfg = {},
                          TransportDiagnostics* diag = nullptr);

// Pointwise integrand B_1(t_1) ^ ... ^ B_n(t_n) at fixed cube parameters x,
// where B_i is the dt-first coefficient of the pullback of a_i along the path
// family.  Times on a breakpoint are retried with a deterministic jitter.
ExteriorMatrix transport_integrand(const std::vector<PolyForm>& args, int k,
                                   const CubePoint& x, const std::vector<double>& ts,
                                   const TransportConfig& cfg = {});

// Iterated-integral transport of the 1-form part of omega along a piecewise
// linear path inside the k-simplex (identity plus the full series).
Matrix path_transport(const PolyForm& omega, const PiecewiseLinearPath& path,
                      const TransportConfig& cfg = {},
                      TransportDiagnostics* diag = nullptr);

// Orientation sign applied to the n-th time-ordered term over the k-simplex.
int transport_term_sign(int k, int n);

// Nodes and weights of Gauss-Legendre quadrature on [0, 1].
void gauss_legendre_unit(int order, std::vector<double>& nodes,
                         std::vector<double>& weights);

}  // namespace holo

#endif
