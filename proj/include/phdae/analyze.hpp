#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "phdae/structures.hpp"

namespace phdae {

struct Pencil {
  Matrix e, a;  // lambda*E - A, square
};

Pencil pencil_of(const ExtendedHDAE& sys);
Pencil pencil_of(const DHSystem& dh);
Pencil pencil_of(const MonotoneAnnihilatorSystem& sys);

struct RegularityCertificate {
  bool regular = false;
  double best_smin_rel = 0.0;       // max over shifts of smallest relative sv
  double shift_used = 0.0;          // witness shift for regularity
  std::vector<Index> wong_dims;     // dims of the Wong sequence {0} subset ...
  std::optional<Vector> common_kernel;  // common right kernel vector, if any
};

RegularityCertificate regularity(const Pencil& p, const TolerancePolicy& tol = {});

struct EigenvalueInfo {
  std::complex<double> value;
  Index algebraic = 0;
  Index geometric = 0;
  bool on_imaginary_axis = false;
};

struct IndexReport {
  bool regular = false;
  Index nu = 0;  // differentiation index
  std::vector<EigenvalueInfo> finite_eigenvalues;
  Index infinite_block_dim = 0;
  double decision_margin = 0.0;  // min ratio (kept sv / threshold); large = safe
  bool borderline = false;       // a rank decision fell close to the threshold
};

IndexReport index(const Pencil& p, const TolerancePolicy& tol = {});

// Orthogonal staircase for regular pencils of index at most two.
struct Index2Staircase {
  Matrix u, v;  // orthogonal: U^T E V = e_form, U^T A V = a_form
  Index n1 = 0, n2 = 0, n3 = 0, n4 = 0;  // n4 == n1
  Matrix e_form, a_form;
  double residual_e = 0.0, residual_a = 0.0;
};

Index2Staircase index2_staircase(const Pencil& p, const TolerancePolicy& tol = {});

// Implicit ODE governing the dynamic variables of the staircase plus the
// solved algebraic variables.
struct ReducedOde {
  Matrix e, a;          // E22, A22 - A23 A33^{-1} A32
  Matrix x3_of_x2;      // x3 = x3_of_x2 * x2
  Index n_zero = 0;     // leading variables fixed to zero (x1)
  Index n_dependent = 0;  // trailing variables determined by x2, xdot2 (x4)
};

ReducedOde reduced_ode(const Index2Staircase& st, const TolerancePolicy& tol = {});

enum class DHVariant { WithQ, QIdentity, Lossless };

const char* dh_variant_name(DHVariant v);
std::optional<DHVariant> parse_dh_variant(const std::string& name);

struct DHVerdict {
  DHVariant variant = DHVariant::WithQ;
  bool equivalent = false;
  std::vector<std::string> failed_conditions;
  IndexReport index_report;
};

DHVerdict check_dh_equivalence(const Pencil& p, DHVariant variant,
                               const TolerancePolicy& tol = {});

// Canonical form with E33 > 0 and A33 = J33 - R33 for pencils passing the
// Q-identity test. U, V are invertible (generally not orthogonal).
struct DHCanonical {
  Matrix u, v;
  Index n1 = 0, n2 = 0, n3 = 0, n4 = 0;
  Matrix e_form, a_form;
  Matrix e33, j33, r33;
  double residual_e = 0.0, residual_a = 0.0;
  std::vector<std::string> warnings;
};

DHCanonical dh_canonicalize(const Pencil& p, const TolerancePolicy& tol = {});

struct StructuredIndexLaw {
  Index nu = 0;
  bool p_singular = false;
  bool law_holds = false;  // nu <= 2 and (nu == 2 implies rank P < n)
};

StructuredIndexLaw verify_structured_index_law(const ExtendedHDAE& sys,
                                               const TolerancePolicy& tol = {});

}  // namespace phdae
