#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phdae/matrix.hpp"

namespace phdae {

// Image representation x = P z, e = S z of a Lagrange structure,
// generalized symmetry P^T S = S^T P.
struct LagrangePair {
  Matrix p, s;  // n x m
};

// Kernel representation K f + L e = 0 of a Dirac structure,
// generalized skew-symmetry K L^T + L K^T = 0.
struct DiracPair {
  Matrix k, l;  // l x n
};

// Image representation (f, e) = (N^T v, M^T v) of a maximally monotone
// subspace, M N^T + N M^T >= 0, rank [N M] = n.
struct MonotonePair {
  Matrix m, n;  // n x n
};

// E zdot = (J - R) Q z with J skew, R symmetric PSD, E^T Q symmetric.
struct DHSystem {
  Matrix e, j, r, q;  // e, q: l x n; j, r: l x l
};

// K P zdot = L S z composed from a Dirac pair (K, L) and Lagrange pair (P, S).
struct ExtendedHDAE {
  Matrix k, l, p, s;  // n x n
};

// C P zdot = D S z where [C D] is a maximal annihilator of a monotone pair.
struct MonotoneAnnihilatorSystem {
  Matrix c, d, p, s;  // n x n
};

enum class SystemKind {
  Lagrange,
  Dirac,
  Monotone,
  DH,
  Extended,
  MonotoneAnnihilator,
};

const char* system_kind_name(SystemKind k);
std::optional<SystemKind> parse_system_kind(const std::string& name);

struct StructureCheck {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool ok = true;
};

struct ValidationReport {
  SystemKind kind;
  bool valid = true;
  std::vector<StructureCheck> checks;
  // extra attributes, e.g. "nonnegative" for Lagrange pairs
  std::vector<std::pair<std::string, bool>> attributes;

  std::vector<StructureCheck> violations() const;
  void add(const std::string& name, double residual, double threshold);
  void add_rank(const std::string& name, Index got, Index want);
};

ValidationReport validate(const LagrangePair& lp, const TolerancePolicy& tol = {});
ValidationReport validate(const DiracPair& dp, const TolerancePolicy& tol = {});
ValidationReport validate(const MonotonePair& mp, const TolerancePolicy& tol = {});
ValidationReport validate(const DHSystem& dh, const TolerancePolicy& tol = {});
ValidationReport validate(const ExtendedHDAE& sys, const TolerancePolicy& tol = {});
ValidationReport validate(const MonotoneAnnihilatorSystem& sys,
                          const TolerancePolicy& tol = {});

void require_valid(const ValidationReport& report, Errc errc);

// r = skew + sym, exact split.
struct SymSkewSplit {
  Matrix skew, sym;
};
SymSkewSplit split_sym_skew(const Matrix& r);

enum class Frame { Z, X, E };

// Quadratic Hamiltonian of a Lagrange pair in the chosen frame:
//   z: 1/2 z^T S^T P z,  x: 1/2 x^T S P^{-1} x,  e: 1/2 e^T P S^{-1} e.
// Frames x and e require P resp. S invertible (rank decision).
double hamiltonian(const LagrangePair& lp, const Vector& v, Frame frame,
                   const TolerancePolicy& tol = {});
// Same with (P, S) = (E, Q).
double hamiltonian(const DHSystem& dh, const Vector& v, Frame frame,
                   const TolerancePolicy& tol = {});
double hamiltonian(const ExtendedHDAE& sys, const Vector& v, Frame frame,
                   const TolerancePolicy& tol = {});

// d/dt H along E zdot = (J-R) Q z, evaluated algebraically: -(Qz)^T R (Qz).
double energy_rate(const DHSystem& dh, const Vector& z);

}  // namespace phdae
