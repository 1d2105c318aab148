#pragma once

#include <string>
#include <vector>

#include "phdae/structures.hpp"

namespace phdae {

// Condensed forms for structured pairs and extended systems. Every result
// carries its transformation matrices plus residuals of the transformed
// input against the idealized block pattern; correctness is certified by
// those residuals, not by construction.

struct LagrangeCondensed {
  Matrix v, w;  // invertible: V^{-1} P W = p_form, V^T S W = s_form
  Index m1 = 0, m2 = 0, m3 = 0, m4 = 0, n5 = 0;
  Matrix p_form, s_form;
  double residual_p = 0.0, residual_s = 0.0;
  std::vector<std::string> warnings;

  Index rank_p() const { return m1 + m2 + m3; }
};

// Orthogonal-only staircase: m1 and m2 stay merged into one block.
struct LagrangeStaircase {
  Matrix v, w;  // orthogonal: V^T P W = p_form, V^T S W = s_form
  Index m12 = 0, m3 = 0, m4 = 0, n5 = 0;
  Matrix p_form, s_form;
  double residual_p = 0.0, residual_s = 0.0;
  std::vector<std::string> warnings;
};

struct DiracCondensed {
  Matrix u, v;  // invertible: U^T K V = k_form, U^T L V^{-T} = l_form
  Index l1 = 0, l3 = 0, l4 = 0, n5 = 0;
  Matrix k_form, l_form;
  double residual_k = 0.0, residual_l = 0.0;
  std::vector<std::string> warnings;

  Index rank_k() const { return 2 * l1 + l3; }
};

struct DiracStaircase {
  Matrix u, v;  // orthogonal: U^T K V = k_form, U^T L V = l_form
  Index l1 = 0, l3 = 0, l4 = 0, n5 = 0;
  Matrix k_form, l_form;
  double residual_k = 0.0, residual_l = 0.0;
  std::vector<std::string> warnings;
};

enum class ExtendedVariant { LagrangeFirst, DiracFirst, Monotone };

const char* extended_variant_name(ExtendedVariant v);

// Condensed extended system. For the Lagrange/Dirac variants the four forms
// are (K,L,P,S)-hat; for the monotone variant they are (C,D,P,S)-hat.
struct ExtendedCondensed {
  ExtendedVariant variant = ExtendedVariant::LagrangeFirst;
  Matrix u, v, w;  // invertible transformations per the structured equivalence
  Index n1 = 0, n2 = 0;
  Matrix a_form, b_form, p_form, s_form;  // a=K or C, b=L or D
  double residual_a = 0.0, residual_b = 0.0;
  double residual_p = 0.0, residual_s = 0.0;
  std::vector<std::string> warnings;
};

// Reduced system read off an ExtendedCondensed plus its constraint block.
struct ReducedSystem {
  ExtendedVariant variant;
  Matrix k, l, p, s;        // (C, D, P, S) for the monotone variant
  Matrix constraint;        // lagrange-first: z2 = K21 zdot1 (K21);
                            // dirac-first: z2 = 0 (empty);
                            // monotone: forcing S12, zdot2 = 0
  std::string constraint_kind;
};

LagrangeCondensed lagrange_condense(const LagrangePair& pair,
                                    const TolerancePolicy& tol = {});

LagrangeStaircase lagrange_staircase_orth(const LagrangePair& pair,
                                          const TolerancePolicy& tol = {});

DiracCondensed dirac_condense(const DiracPair& pair,
                              const TolerancePolicy& tol = {});

DiracStaircase dirac_staircase_orth(const DiracPair& pair,
                                    const TolerancePolicy& tol = {});

ExtendedCondensed extended_condense(const ExtendedHDAE& sys,
                                    ExtendedVariant variant,
                                    const TolerancePolicy& tol = {});

ExtendedCondensed monotone_condense(const MonotoneAnnihilatorSystem& sys,
                                    const TolerancePolicy& tol = {});

ReducedSystem extract_reduced(const ExtendedCondensed& cond);

}  // namespace phdae
