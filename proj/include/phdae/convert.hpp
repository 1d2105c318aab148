#pragma once

#include <string>
#include <vector>

#include "phdae/structures.hpp"

namespace phdae {

// Implicit linear system e * xdot = a * x. Square in the generic case;
// degenerate compositions can produce more equations than unknowns.
struct ImplicitSystem {
  Matrix e, a;
};

// True iff the stacked rows [E | A] of both systems span the same row space.
bool same_system_row_space(const ImplicitSystem& lhs, const ImplicitSystem& rhs,
                           const TolerancePolicy& tol = {});

// x-representation M K xdot = N S^T x obtained from the maximal annihilator
// [M N] of [L; -P^T]; the annihilator rows are orthonormal.
struct XRepresentation {
  ImplicitSystem system;
  Matrix m, n;
};

XRepresentation to_x_representation(const ExtendedHDAE& sys,
                                    const TolerancePolicy& tol = {});

// K xdot = L Q x with Q = S P^{-1} symmetric; requires P invertible.
struct KLQForm {
  Matrix k, l, q;
};
KLQForm to_klq(const ExtendedHDAE& sys, const TolerancePolicy& tol = {});

// xdot = J Q x with J = K^{-1} L skew and Q = S P^{-1} symmetric.
struct PoissonForm {
  Matrix j, q;
};
PoissonForm to_poisson(const ExtendedHDAE& sys, const TolerancePolicy& tol = {});

// (P^T J) xdot = S^T x with J = L^{-1} K skew; requires L invertible.
struct GradientForm {
  Matrix j;  // L^{-1} K
  ImplicitSystem system;
};
GradientForm to_gradient(const ExtendedHDAE& sys, const TolerancePolicy& tol = {});

// J xdot = Q x with J = L^{-1} K and Q = S P^{-1}; requires L and P invertible.
struct SymplecticForm {
  Matrix j, q;
};
SymplecticForm to_symplectic(const ExtendedHDAE& sys,
                             const TolerancePolicy& tol = {});

// Adjoint system P^T K^T vdot = S^T L^T v.
ImplicitSystem adjoint(const ExtendedHDAE& sys);

// (C, D, P, S) = (I, J - R, E, Q); requires a valid square DH system.
MonotoneAnnihilatorSystem dh_to_monotone(const DHSystem& dh,
                                         const TolerancePolicy& tol = {});

// Multiplier-extended system in the variables (x1, x2, e2) where x2 = 0 is
// the Lagrange algebraic constraint and e2 acts as its multiplier.
struct MultiplierSystem {
  ImplicitSystem extended;  // (n + n2) x (n + n2)
  Index n1 = 0, n2 = 0;     // state splits; multipliers are the last n2 vars
  Matrix v, w;              // x = V (x1; x2), z = W (z1; z2)
};

MultiplierSystem with_multipliers(const ExtendedHDAE& sys,
                                  const TolerancePolicy& tol = {});

// Eliminates algebraic variables (zero columns in e) from an implicit system
// by annihilating their a-columns; returns the reduced system in the
// remaining variables given by keep indices.
ImplicitSystem eliminate_variables(const ImplicitSystem& sys,
                                   Index first_eliminated, Index count,
                                   const TolerancePolicy& tol = {});

// A subspace of pairs (flow, effort) in image representation; columns of
// [top; bottom] are an orthonormal basis.
struct PairedSubspace {
  Matrix top, bottom;

  Index dim() const { return top.cols(); }
  Index flow_dim() const { return top.rows(); }
  Index effort_dim() const { return bottom.rows(); }
};

PairedSubspace make_subspace(const Matrix& top, const Matrix& bottom,
                             const TolerancePolicy& tol = {},
                             double scale_floor = 0.0);
PairedSubspace subspace_of(const DiracPair& dp, const TolerancePolicy& tol = {});
PairedSubspace subspace_of(const LagrangePair& lp, const TolerancePolicy& tol = {});
PairedSubspace subspace_of(const MonotonePair& mp, const TolerancePolicy& tol = {});

// Kernel representation [K | L] with ker [K L] = subspace (orthonormal rows).
Matrix kernel_representation(const PairedSubspace& sub,
                             const TolerancePolicy& tol = {});

// Monotonicity data of a paired subspace.
struct MonotoneCertificate {
  Index dim = 0;
  double pairing_min_eig = 0.0;  // min eigenvalue of the symmetrized pairing
};
MonotoneCertificate monotone_certificate(const PairedSubspace& sub);

// Composition D o L over the shared efforts: {(f, x) | exists e with
// (f, e) in D and (e, x) in L}. Result pairs live in X x X.
PairedSubspace compose_dirac_lagrange(const DiracPair& dp,
                                      const LagrangePair& lp,
                                      const TolerancePolicy& tol = {});

// The implicit DAE {(-xdot, x) in sub}.
ImplicitSystem dynamics_of(const PairedSubspace& sub,
                           const TolerancePolicy& tol = {});

// Composition of two maximally monotone subspaces over trailing shared
// blocks: elements ((fa, f), (ea, e)) of a and ((fb, g), (eb, h)) of b with
// g = -f and h = e. Shared block sizes are given explicitly.
PairedSubspace compose_monotone(const PairedSubspace& a, const PairedSubspace& b,
                                Index shared_flows, Index shared_efforts,
                                const TolerancePolicy& tol = {});

// Pull-back {(f, A^T g) | (A f, g) in m} and push-forward
// {(A f, g) | (f, A^T g) in m} of a monotone subspace along a linear map.
PairedSubspace pullback(const Matrix& a_map, const PairedSubspace& m,
                        const TolerancePolicy& tol = {});
PairedSubspace pushforward(const Matrix& a_map, const PairedSubspace& m,
                           const TolerancePolicy& tol = {});

}  // namespace phdae
