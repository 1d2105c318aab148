#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace phdae {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Error taxonomy shared by all modules. The CLI maps these onto exit codes.
enum class Errc {
  InvalidInput,
  DimensionMismatch,
  NotSymmetric,
  NotSkewSymmetric,
  NotLagrange,
  NotDirac,
  NotMonotone,
  NotAnnihilator,
  NotStructured,
  NotRegular,
  NotEquivalent,
  IndexTooHigh,
  SingularFrame,
  SingularP,
  SingularK,
  SingularL,
  SpectrumViolation,
  IncompatibleDimensions,
  InvalidParameters,
  RankAmbiguous,
};

struct Error : std::runtime_error {
  Errc code;
  Error(Errc c, const std::string& what) : std::runtime_error(what), code(c) {}
};

const char* errc_name(Errc c);

// Tolerance policy used for every rank and structure decision.
// rank_rel is relative to the largest singular value; a non-positive value
// selects the default max(rows,cols)*eps.
struct TolerancePolicy {
  double rank_rel = 0.0;
  double structure_tol = 1e-10;  // relative to the matrix norm
  double cluster_tol = 1e-8;     // eigenvalue grouping, relative

  double rank_threshold(Index rows, Index cols, double sigma_max) const;
  // Absolute threshold for symmetry/PSD residual checks on a matrix of
  // the given norm. max(1, scale) avoids a vanishing threshold at zero.
  double structure_threshold(double scale) const {
    return structure_tol * (scale < 1.0 ? 1.0 : scale);
  }
};

inline bool is_finite(const Matrix& a) { return a.allFinite(); }

void require_finite(const Matrix& a, const char* name = "matrix");

inline Matrix sym_part(const Matrix& a) { return 0.5 * (a + a.transpose()); }
inline Matrix skew_part(const Matrix& a) { return 0.5 * (a - a.transpose()); }

inline double sym_residual(const Matrix& a) {
  return (a - a.transpose()).norm();
}
inline double skew_residual(const Matrix& a) {
  return (a + a.transpose()).norm();
}

// Smallest eigenvalue of the symmetric part; the PSD test is
// min_eig >= -structure_threshold(norm).
double min_sym_eigenvalue(const Matrix& a);

// Stack/concatenate helpers that tolerate empty blocks.
Matrix vstack(const Matrix& top, const Matrix& bottom);
Matrix hstack(const Matrix& left, const Matrix& right);

}  // namespace phdae
