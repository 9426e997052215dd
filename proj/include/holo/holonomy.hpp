// Holonomy of flat graded superconnections over simplicial complexes:
// per-simplex transport operators, their assembly into a homotopy
// representation, transport of morphism chains through block-triangular
// superconnections, and flat-connection data pulled back from Lie algebra
// representations.

#ifndef HOLO_HOLONOMY_HPP
#define HOLO_HOLONOMY_HPP

#include <map>
#include <vector>

#include "holo/iterated_integrals.hpp"
#include "holo/poly_forms.hpp"
#include "holo/simplicial_reps.hpp"

namespace holo {

// A flat superconnection form on the model k-simplex for every nondegenerate
// simplex, compatible with the face inclusions.
struct FormValuedComplex {
  FiniteSimplicialSet X;
  GradedVectorSpace space;
  std::map<SimplexTuple, PolyForm> forms;
};

// Largest coefficient of  form(d_i s) - pullback(form(s), coface i)  over all
// simplices and faces.
double face_compatibility_residual(const FormValuedComplex& c);
// Largest flatness defect  d(omega) + omega ^ omega  over all simplices.
double flatness_residual(const FormValuedComplex& c);
// Throws InvariantError when either residual exceeds tol, or when a form is
// missing, lives on the wrong space, or is not of total degree 1.
void validate_form_complex(const FormValuedComplex& c, double tol = 1e-8);

// Transport operator of a single flat form on the model k-simplex:
// k = 0 evaluates the (degree-1) coefficient, k = 1 returns identity plus the
// transport series, k >= 2 returns the series alone (degree 1 - k).
GradedMap hol_object(const PolyForm& omega, int k, const TransportConfig& cfg = {});

// Transport operators for every simplex; edges receive identity plus the
// series, degenerate simplices keep their unital defaults.
SimplicialRep integrate_rep(const FormValuedComplex& c, const TransportConfig& cfg = {});

// A chain of connections omega^0..omega^n on one model k-simplex joined by
// connecting forms eta^1..eta^n, eta^i mapping the i-th bundle into the
// (i-1)-st.  Connections are endomorphism forms over the individual parts;
// connecting forms are stored over the direct sum, supported in their
// off-diagonal block.
struct MorphismChainDatum {
  MorphismChainDatum(int simplex_dim, DirectSum bundles)
      : k(simplex_dim), sum(std::move(bundles)) {}

  int k;
  DirectSum sum;                      // V_0, ..., V_n
  std::vector<PolyForm> connections;  // over sum.part(i), total degree 1
  std::vector<PolyForm> connecting;   // over sum.total(), block (i-1, i), homogeneous
};

// Convenience: a form over the direct sum with a single block (i, j), built
// from endomorphism-shaped data.
PolyForm embed_endo_form(const DirectSum& sum, int i, const PolyForm& form);
// One term  coeff * t^e dt_I  with coeff : part(j) -> part(i).
PolyForm block_form_term(const DirectSum& sum, int i, int j, int coord_dim,
                         const FormIndex& I, const Exponents& e, const GradedMap& coeff);

// The block-triangular total connection  sum_i omega^i + sum_i eta^i  over
// the direct sum; validates block support.
PolyForm assemble_chain(const MorphismChainDatum& d);

// Transport through the assembled connection, restricted to the corner block
// V_n -> V_0; the n-linear piece in the connecting forms.  Degree is
// sum |eta^i| - n - k + 1.  On a 0-simplex only n = 1 survives (evaluation).
GradedMap hol_morphism_chain(const MorphismChainDatum& d, const TransportConfig& cfg = {});

// Finite-dimensional Lie algebra by structure constants:
// bracket[c](a, b) is the e_c coefficient of [e_a, e_b].
struct LieAlgebra {
  int dim = 0;
  std::vector<Matrix> bracket;

  Vector bracket_of(const Vector& x, const Vector& y) const;  // coefficients column
  // Largest violation of antisymmetry or the Jacobi identity.
  double jacobi_residual() const;
};

// Cochains with operator coefficients on the exterior algebra of the Lie
// algebra are stored as constant PolyForms whose "coordinates" are the dual
// generators theta^1..theta^dim (all exponents zero).
PolyForm ce_differential(const LieAlgebra& g, const PolyForm& c);
// Largest coefficient of  d_CE(omega) + omega ^ omega.
double ce_mc_residual(const LieAlgebra& g, const PolyForm& omega);

// Flatness defect of a Lie-algebra valued 1-form with scalar components
// theta[a]:  d theta^c + sum_{a<b} bracket[c](a,b) theta^a ^ theta^b.
double lie_flatness_residual(const LieAlgebra& g, const std::vector<PolyForm>& theta);

// Representation data: a differential on V and operators for the basis
// multivectors e_{a1} ^ ... ^ e_{aj} (strictly increasing 1-based keys),
// R on a j-multivector having degree 1 - j.
struct LieRepData {
  GradedVectorSpace space;
  GradedMap differential;                  // degree 1
  std::map<FormIndex, GradedMap> multi;    // R_j values on basis multivectors
};

// The corresponding operator-valued cochain  differential + sum R theta^key.
PolyForm lie_rep_to_ce(const LieRepData& rep, const LieAlgebra& g);

// Substitutes the scalar component forms theta[a] (1-forms on a simplex) into
// the cochain of `rep`, giving a superconnection form on the simplex.
PolyForm pullback_lie_algebra_simplex(const LieRepData& rep, const LieAlgebra& g,
                                      const std::vector<PolyForm>& theta,
                                      double flatness_tol = 1e-9,
                                      double rep_tol = 1e-8);

}  // namespace holo

#endif
