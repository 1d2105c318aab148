#include "phdae/numkernel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

namespace phdae {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
// Floored rank decisions treat anything below kFloorSafety * n * eps times
// the parent scale as noise; matches the c <= 100 residual model.
constexpr double kFloorSafety = 100.0;
}

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::NotSkewSymmetric: return "NotSkewSymmetric";
    case Errc::NotLagrange: return "NotLagrange";
    case Errc::NotDirac: return "NotDirac";
    case Errc::NotMonotone: return "NotMonotone";
    case Errc::NotAnnihilator: return "NotAnnihilator";
    case Errc::NotStructured: return "NotStructured";
    case Errc::NotRegular: return "NotRegular";
    case Errc::NotEquivalent: return "NotEquivalent";
    case Errc::IndexTooHigh: return "IndexTooHigh";
    case Errc::SingularFrame: return "SingularFrame";
    case Errc::SingularP: return "SingularP";
    case Errc::SingularK: return "SingularK";
    case Errc::SingularL: return "SingularL";
    case Errc::SpectrumViolation: return "SpectrumViolation";
    case Errc::IncompatibleDimensions: return "IncompatibleDimensions";
    case Errc::InvalidParameters: return "InvalidParameters";
    case Errc::RankAmbiguous: return "RankAmbiguous";
  }
  return "Unknown";
}

double TolerancePolicy::rank_threshold(Index rows, Index cols,
                                       double sigma_max) const {
  const double rel =
      rank_rel > 0.0 ? rank_rel
                     : static_cast<double>(std::max<Index>({rows, cols, 1})) * kEps;
  return rel * sigma_max;
}

void require_finite(const Matrix& a, const char* name) {
  if (!a.allFinite())
    throw Error(Errc::InvalidInput,
                std::string(name) + " contains non-finite entries");
}

double min_sym_eigenvalue(const Matrix& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym_part(a));
  return es.eigenvalues().minCoeff();
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

Matrix hstack(const Matrix& left, const Matrix& right) {
  if (left.cols() == 0) return right;
  if (right.cols() == 0) return left;
  Matrix out(left.rows(), left.cols() + right.cols());
  out.leftCols(left.cols()) = left;
  out.rightCols(right.cols()) = right;
  return out;
}

SvdResult svd(const Matrix& a) {
  require_finite(a);
  if (a.rows() == 0 || a.cols() == 0) {
    return {Matrix::Identity(a.rows(), a.rows()), Vector::Zero(0),
            Matrix::Identity(a.cols(), a.cols())};
  }
  Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

namespace {

Index rank_from_sigma(const Vector& sigma, Index rows, Index cols,
                      const TolerancePolicy& tol, double scale_floor = 0.0) {
  if (sigma.size() == 0) return 0;
  const double thresh = tol.rank_threshold(
      rows, cols, std::max(sigma(0), kFloorSafety * scale_floor));
  Index r = 0;
  while (r < sigma.size() && sigma(r) > thresh) ++r;
  return r;
}

}  // namespace

Index rank_tol(const Matrix& a, const TolerancePolicy& tol,
               double scale_floor) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  SvdResult s = svd(a);
  return rank_from_sigma(s.sigma, a.rows(), a.cols(), tol, scale_floor);
}

Matrix left_annihilator(const Matrix& b, const TolerancePolicy& tol,
                        double scale_floor) {
  if (b.rows() == 0) return Matrix(0, 0);
  if (b.cols() == 0) return Matrix::Identity(b.rows(), b.rows());
  SvdResult s = svd(b);
  Index r = rank_from_sigma(s.sigma, b.rows(), b.cols(), tol, scale_floor);
  return s.u.rightCols(b.rows() - r).transpose();
}

Matrix right_nullspace(const Matrix& b, const TolerancePolicy& tol,
                       double scale_floor) {
  if (b.cols() == 0) return Matrix(0, 0);
  if (b.rows() == 0) return Matrix::Identity(b.cols(), b.cols());
  SvdResult s = svd(b);
  Index r = rank_from_sigma(s.sigma, b.rows(), b.cols(), tol, scale_floor);
  return s.v.rightCols(b.cols() - r);
}

Matrix column_space(const Matrix& b, const TolerancePolicy& tol,
                    double scale_floor) {
  if (b.rows() == 0 || b.cols() == 0) return Matrix(b.rows(), 0);
  SvdResult s = svd(b);
  Index r = rank_from_sigma(s.sigma, b.rows(), b.cols(), tol, scale_floor);
  return s.u.leftCols(r);
}

FullRankDecomposition full_rank_decomposition(const Matrix& a,
                                              const TolerancePolicy& tol) {
  if (a.rows() == 0 || a.cols() == 0) {
    return {Matrix::Identity(a.rows(), a.rows()), Matrix(0, a.cols())};
  }
  SvdResult s = svd(a);
  Index r = rank_from_sigma(s.sigma, a.rows(), a.cols(), tol);
  Matrix core = s.sigma.head(r).asDiagonal() * s.v.leftCols(r).transpose();
  return {s.u, core};
}

SignatureForm symmetric_congruence_signature(const Matrix& s,
                                             const TolerancePolicy& tol,
                                             double scale_floor) {
  require_finite(s);
  if (s.rows() != s.cols())
    throw Error(Errc::DimensionMismatch, "signature input must be square");
  const Index n = s.rows();
  if (n == 0) return {Matrix(0, 0), 0, 0, 0};
  if (sym_residual(s) > tol.structure_threshold(s.norm()))
    throw Error(Errc::NotSymmetric, "matrix is not symmetric within tolerance");

  Eigen::SelfAdjointEigenSolver<Matrix> es(sym_part(s));
  const Vector lam = es.eigenvalues();
  const Matrix q = es.eigenvectors();
  const double thresh = tol.rank_threshold(
      n, n, std::max(lam.cwiseAbs().maxCoeff(), kFloorSafety * scale_floor));

  std::vector<Index> pos, neg, zer;
  for (Index i = 0; i < n; ++i) {
    if (lam(i) > thresh) pos.push_back(i);
    else if (lam(i) < -thresh) neg.push_back(i);
    else zer.push_back(i);
  }
  // Positive block first (descending magnitude), then negative, then kernel.
  std::sort(pos.begin(), pos.end(), [&](Index a, Index b) { return lam(a) > lam(b); });
  std::sort(neg.begin(), neg.end(), [&](Index a, Index b) { return lam(a) < lam(b); });

  SignatureForm out;
  out.p = static_cast<Index>(pos.size());
  out.q = static_cast<Index>(neg.size());
  out.z = static_cast<Index>(zer.size());
  out.t.resize(n, n);
  Index col = 0;
  for (Index i : pos) out.t.col(col++) = q.col(i) / std::sqrt(lam(i));
  for (Index i : neg) out.t.col(col++) = q.col(i) / std::sqrt(-lam(i));
  for (Index i : zer) out.t.col(col++) = q.col(i);
  return out;
}

SkewCanonicalForm skew_congruence_canonical(const Matrix& l,
                                            const TolerancePolicy& tol,
                                            double scale_floor) {
  require_finite(l);
  if (l.rows() != l.cols())
    throw Error(Errc::DimensionMismatch, "skew canonical input must be square");
  const Index n = l.rows();
  if (n == 0) return {Matrix(0, 0), 0};
  if (skew_residual(l) > tol.structure_threshold(l.norm()))
    throw Error(Errc::NotSkewSymmetric,
                "matrix is not skew-symmetric within tolerance");

  // Orthogonal Schur form of a skew-symmetric matrix is block diagonal with
  // 2x2 blocks [[0, b], [-b, 0]]; the |b| are the nonzero singular values.
  const Matrix a = skew_part(l);
  Eigen::RealSchur<Matrix> schur(n);
  schur.compute(a, true);
  Matrix t = schur.matrixT();
  Matrix q = schur.matrixU();

  const double sig_max = a.norm() == 0.0 ? 0.0 : svd(a).sigma(0);
  const double thresh =
      tol.rank_threshold(n, n, std::max(sig_max, kFloorSafety * scale_floor));

  std::vector<Index> first, second, zero_cols;
  std::vector<double> scale(n, 1.0);
  Index i = 0;
  while (i < n) {
    const double sub = (i + 1 < n) ? t(i + 1, i) : 0.0;
    if (i + 1 < n && std::abs(sub) > thresh) {
      const double b = t(i, i + 1);
      const double s = 1.0 / std::sqrt(std::abs(b));
      scale[i] = s;
      scale[i + 1] = s;
      if (b > 0) {
        first.push_back(i);
        second.push_back(i + 1);
      } else {
        first.push_back(i + 1);
        second.push_back(i);
      }
      i += 2;
    } else {
      zero_cols.push_back(i);
      i += 1;
    }
  }

  SkewCanonicalForm out;
  out.pairs = static_cast<Index>(first.size());
  out.t.resize(n, n);
  Index col = 0;
  for (Index j : first) out.t.col(col++) = q.col(j) * scale[j];
  for (Index j : second) out.t.col(col++) = q.col(j) * scale[j];
  for (Index j : zero_cols) out.t.col(col++) = q.col(j);
  return out;
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& c) {
  const Index n = a.rows();
  if (a.cols() != n || c.rows() != n || c.cols() != n)
    throw Error(Errc::DimensionMismatch, "lyapunov: dimension mismatch");
  if (n == 0) return Matrix(0, 0);
  // (I (x) A^T + A^T (x) I) vec(X) = -vec(C)
  Matrix at = a.transpose();
  Matrix big = Matrix::Zero(n * n, n * n);
  for (Index j = 0; j < n; ++j)
    big.block(j * n, j * n, n, n) += at;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      for (Index k = 0; k < n; ++k)
        big(j * n + i, k * n + i) += at(j, k);
  Vector rhs(n * n);
  for (Index j = 0; j < n; ++j) rhs.segment(j * n, n) = -c.col(j);
  Vector x = big.partialPivLu().solve(rhs);
  Matrix out(n, n);
  for (Index j = 0; j < n; ++j) out.col(j) = x.segment(j * n, n);
  return sym_part(out);
}

namespace {

using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

// Swap the diagonal entries k, k+1 of a complex Schur form by a unitary
// similarity, updating u alongside.
void schur_swap(ComplexMatrix& t, ComplexMatrix& u, Index k) {
  const Complex a = t(k, k), b = t(k, k + 1), d = t(k + 1, k + 1);
  Complex v0 = b, v1 = d - a;
  const double nrm = std::sqrt(std::norm(v0) + std::norm(v1));
  if (nrm < 1e-300) return;
  v0 /= nrm;
  v1 /= nrm;
  ComplexMatrix g(2, 2);
  g << v0, -std::conj(v1), v1, std::conj(v0);
  t.middleCols(k, 2) = t.middleCols(k, 2) * g;
  t.middleRows(k, 2) = g.adjoint() * t.middleRows(k, 2);
  u.middleCols(k, 2) = u.middleCols(k, 2) * g;
  t(k + 1, k) = Complex(0, 0);
}

// Reorders the complex Schur form so that entries with cls==0 come first.
// cls is evaluated on the (moving) diagonal entries.
template <typename Classifier>
void schur_order(ComplexMatrix& t, ComplexMatrix& u, Classifier cls) {
  const Index n = t.rows();
  for (Index pass = 0; pass < n; ++pass) {
    bool moved = false;
    for (Index k = 0; k + 1 < n; ++k) {
      if (cls(t(k, k)) == 1 && cls(t(k + 1, k + 1)) == 0) {
        schur_swap(t, u, k);
        moved = true;
      }
    }
    if (!moved) break;
  }
}

// Real orthonormal basis of the column span of a conjugate-closed complex
// basis; the span has real dimension equal to the complex dimension.
Matrix real_basis(const ComplexMatrix& w, const TolerancePolicy& tol) {
  const Index n = w.rows();
  const Index k = w.cols();
  if (k == 0) return Matrix(n, 0);
  Matrix stacked(n, 2 * k);
  stacked.leftCols(k) = w.real();
  stacked.rightCols(k) = w.imag();
  SvdResult s = svd(stacked);
  Index r = rank_from_sigma(s.sigma, n, 2 * k, tol);
  if (r != k)
    throw Error(Errc::RankAmbiguous,
                "invariant subspace is not conjugate-closed within tolerance");
  return s.u.leftCols(k);
}

}  // namespace

Matrix solve_lyapunov_inequality(const Matrix& a, const TolerancePolicy& tol) {
  require_finite(a);
  if (a.rows() != a.cols())
    throw Error(Errc::DimensionMismatch, "lyapunov inequality: square input required");
  const Index n = a.rows();
  if (n == 0) return Matrix(0, 0);

  const double scale = std::max(1.0, a.norm());
  const double band = tol.cluster_tol * scale;

  ComplexMatrix ac = a.cast<Complex>();
  Eigen::ComplexSchur<ComplexMatrix> schur(ac, true);
  ComplexMatrix t = schur.matrixT();
  ComplexMatrix u = schur.matrixU();

  for (Index i = 0; i < n; ++i) {
    if (t(i, i).real() > band)
      throw Error(Errc::SpectrumViolation,
                  "eigenvalue in the open right half plane");
  }
  auto is_imaginary = [band](Complex lam) { return std::abs(lam.real()) <= band; };

  // Stable invariant subspace: stable eigenvalues first.
  ComplexMatrix ts = t, us = u;
  schur_order(ts, us, [&](Complex lam) { return is_imaginary(lam) ? 1 : 0; });
  Index n_stable = 0;
  while (n_stable < n && !is_imaginary(ts(n_stable, n_stable))) ++n_stable;
  const Index n_imag = n - n_stable;

  Matrix x_total;
  if (n_imag == 0) {
    return solve_lyapunov(a, Matrix::Identity(n, n));
  }

  Matrix v_stable = real_basis(us.leftCols(n_stable), tol);

  // Imaginary-axis invariant subspace: those eigenvalues first.
  ComplexMatrix ti = t, ui = u;
  schur_order(ti, ui, [&](Complex lam) { return is_imaginary(lam) ? 0 : 1; });
  Matrix v_imag = real_basis(ui.leftCols(n_imag), tol);

  Matrix z = hstack(v_stable, v_imag);
  Eigen::PartialPivLU<Matrix> zlu(z);
  Matrix a_s = v_stable.transpose() * a * v_stable;
  Matrix a_i = v_imag.transpose() * a * v_imag;

  // Stable part: classical Lyapunov equation with right-hand side -I.
  Matrix x_s = n_stable > 0
                   ? solve_lyapunov(a_s, Matrix::Identity(n_stable, n_stable))
                   : Matrix(0, 0);

  // Imaginary part: a real similarity taking a_i to block-skew form exists
  // because the eigenvalues are semisimple. Its inverse Gram matrix is the
  // certificate.
  Matrix x_i;
  {
    Eigen::EigenSolver<Matrix> es(a_i);
    if (es.info() != Eigen::Success)
      throw Error(Errc::SpectrumViolation, "eigensolver failed on imaginary part");
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    Matrix z2(n_imag, n_imag);
    Index col = 0;
    Index i = 0;
    while (i < n_imag) {
      if (vals(i).imag() == 0.0) {
        // real eigenvalue on the imaginary axis, i.e. ~0: real eigenvector
        z2.col(col++) = vecs.col(i).real();
        i += 1;
      } else {
        // conjugate pair stored consecutively; keep the real/imag span
        z2.col(col++) = vecs.col(i).real();
        z2.col(col++) = vecs.col(i).imag();
        i += 2;
      }
    }
    if (col != n_imag)
      throw Error(Errc::SpectrumViolation,
                  "could not pair imaginary eigenvalues");
    Eigen::JacobiSVD<Matrix> z2svd(z2);
    const double cond = z2svd.singularValues()(0) /
                        std::max(z2svd.singularValues()(n_imag - 1), 1e-300);
    if (!(cond < 1e12))
      throw Error(Errc::SpectrumViolation,
                  "imaginary eigenvalues are not semisimple within tolerance");
    Matrix z2inv = z2.partialPivLu().inverse();
    x_i = z2inv.transpose() * z2inv;
  }

  Matrix d = Matrix::Zero(n, n);
  if (n_stable > 0) d.topLeftCorner(n_stable, n_stable) = x_s;
  d.bottomRightCorner(n_imag, n_imag) = x_i;
  Matrix zinv = zlu.inverse();
  x_total = sym_part(zinv.transpose() * d * zinv);

  // Certify before returning.
  if (min_sym_eigenvalue(x_total) <= 0)
    throw Error(Errc::SpectrumViolation, "certificate X is not positive definite");
  return x_total;
}

Matrix left_inverse_completion(const Matrix& b, const TolerancePolicy& tol) {
  const Index m = b.rows(), k = b.cols();
  SvdResult s = svd(b);
  Index r = rank_from_sigma(s.sigma, m, k, tol);
  if (r != k)
    throw Error(Errc::InvalidInput, "left_inverse_completion: rank-deficient input");
  Matrix x(m, m);
  x.topRows(m - k) = s.u.rightCols(m - k).transpose();
  x.bottomRows(k) = s.v * s.sigma.head(k).cwiseInverse().asDiagonal() *
                    s.u.leftCols(k).transpose();
  return x;
}

Matrix right_inverse_completion(const Matrix& b, const TolerancePolicy& tol) {
  const Index k = b.rows(), n = b.cols();
  SvdResult s = svd(b);
  Index r = rank_from_sigma(s.sigma, k, n, tol);
  if (r != k)
    throw Error(Errc::InvalidInput, "right_inverse_completion: rank-deficient input");
  Matrix y(n, n);
  y.leftCols(n - k) = s.v.rightCols(n - k);
  y.rightCols(k) = s.v.leftCols(k) * s.sigma.head(k).cwiseInverse().asDiagonal() *
                   s.u.transpose();
  return y;
}

}  // namespace phdae
