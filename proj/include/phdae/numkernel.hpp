#pragma once

#include "phdae/matrix.hpp"

namespace phdae {

// Dense rank-revealing primitives. Everything here is a pure function of its
// inputs; all rank decisions go through the TolerancePolicy.

struct SvdResult {
  Matrix u;        // m x m orthogonal
  Vector sigma;    // min(m,n), descending
  Matrix v;        // n x n orthogonal
};

SvdResult svd(const Matrix& a);

// Numerical rank: singular values above tol.rank_threshold. scale_floor, when
// positive, floors the reference scale; staircase algorithms pass the norm of
// the full matrix a block was cut from so that noise-sized blocks read as
// rank zero.
Index rank_tol(const Matrix& a, const TolerancePolicy& tol = {},
               double scale_floor = 0.0);

// Orthonormal rows Z with Z*b = 0 and row count = rows(b) - rank(b).
Matrix left_annihilator(const Matrix& b, const TolerancePolicy& tol = {},
                        double scale_floor = 0.0);

// Orthonormal columns spanning ker(b): b*Z = 0, cols = cols(b) - rank(b).
Matrix right_nullspace(const Matrix& b, const TolerancePolicy& tol = {},
                       double scale_floor = 0.0);

// Orthonormal columns spanning the column space of b (rank many).
Matrix column_space(const Matrix& b, const TolerancePolicy& tol = {},
                    double scale_floor = 0.0);

// a = v * [core; 0] with v orthogonal and core of full row rank.
struct FullRankDecomposition {
  Matrix v;     // m x m orthogonal
  Matrix core;  // r x n, full row rank
};
FullRankDecomposition full_rank_decomposition(const Matrix& a,
                                              const TolerancePolicy& tol = {});

// Congruence T^T * s * T = diag(I_p, -I_q, 0_z) for symmetric s.
struct SignatureForm {
  Matrix t;  // invertible
  Index p = 0, q = 0, z = 0;
};
SignatureForm symmetric_congruence_signature(const Matrix& s,
                                             const TolerancePolicy& tol = {},
                                             double scale_floor = 0.0);

// Congruence T^T * l * T = [[0, I_l], [-I_l, 0]] (+) 0 for skew-symmetric l.
struct SkewCanonicalForm {
  Matrix t;  // invertible
  Index pairs = 0;  // l, with 2*l = rank
};
SkewCanonicalForm skew_congruence_canonical(const Matrix& l,
                                            const TolerancePolicy& tol = {},
                                            double scale_floor = 0.0);

// Solves A^T X + X A = -C for X (Kronecker linear system; sizes stay small).
Matrix solve_lyapunov(const Matrix& a, const Matrix& c);

// Positive definite X with -A^T X - X A >= 0, valid whenever the spectrum of
// A lies in the closed left half plane with semisimple imaginary eigenvalues.
// Throws SpectrumViolation otherwise.
Matrix solve_lyapunov_inequality(const Matrix& a,
                                 const TolerancePolicy& tol = {});

// Invertible x with x*[stacked b] = [0; I]: rows of the top block annihilate
// b, bottom rows form a left inverse. b must have full column rank.
Matrix left_inverse_completion(const Matrix& b, const TolerancePolicy& tol = {});

// Invertible y with [wide b]*y = [0, I]; b must have full row rank.
Matrix right_inverse_completion(const Matrix& b, const TolerancePolicy& tol = {});

}  // namespace phdae
