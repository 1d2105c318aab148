#include "phdae/analyze.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

#include "phdae/numkernel.hpp"

namespace phdae {

namespace {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

void require_square_pencil(const Pencil& p) {
  require_finite(p.e, "E");
  require_finite(p.a, "A");
  if (p.e.rows() != p.e.cols() || p.a.rows() != p.a.cols() ||
      p.e.rows() != p.a.rows())
    throw Error(Errc::DimensionMismatch, "pencil must be square with equal sizes");
}

double pencil_scale(const Pencil& p) {
  return std::max({1.0, p.e.norm(), p.a.norm()});
}

Index complex_rank(const ComplexMatrix& m, const TolerancePolicy& tol,
                   double scale_floor = 0.0) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<ComplexMatrix> dec(m);
  const Vector sigma = dec.singularValues();
  const double thresh = tol.rank_threshold(
      m.rows(), m.cols(), std::max(sigma(0), 100.0 * scale_floor));
  Index r = 0;
  while (r < sigma.size() && sigma(r) > thresh) ++r;
  return r;
}

// Tracks how close rank decisions come to their thresholds.
struct MarginTracker {
  double margin = std::numeric_limits<double>::infinity();
  void observe(const Matrix& m, const TolerancePolicy& tol,
               double scale_floor = 0.0) {
    if (m.rows() == 0 || m.cols() == 0) return;
    SvdResult s = svd(m);
    const double thresh = tol.rank_threshold(
        m.rows(), m.cols(), std::max(s.sigma(0), 100.0 * scale_floor));
    for (Index i = 0; i < s.sigma.size(); ++i)
      if (s.sigma(i) > thresh)
        margin = std::min(margin, s.sigma(i) / thresh);
  }
};

}  // namespace

Pencil pencil_of(const ExtendedHDAE& sys) { return {sys.k * sys.p, sys.l * sys.s}; }
Pencil pencil_of(const DHSystem& dh) { return {dh.e, (dh.j - dh.r) * dh.q}; }
Pencil pencil_of(const MonotoneAnnihilatorSystem& sys) {
  return {sys.c * sys.p, sys.d * sys.s};
}

RegularityCertificate regularity(const Pencil& p, const TolerancePolicy& tol) {
  require_square_pencil(p);
  const Index n = p.e.rows();
  RegularityCertificate cert;
  if (n == 0) {
    cert.regular = true;  // empty pencil has det == 1 by convention
    cert.best_smin_rel = 1.0;
    return cert;
  }

  // det(lambda E - A) is a polynomial of degree <= n: if it vanishes at n+1
  // distinct shifts it vanishes identically. Shifts are drawn from a fixed
  // seed so reports are reproducible.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull ^ static_cast<uint64_t>(n));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double spread = std::max(1.0, p.a.norm() / std::max(1.0, p.e.norm()));

  for (Index trial = 0; trial < n + 1; ++trial) {
    const double shift = gauss(rng) * spread;
    Matrix m = shift * p.e - p.a;
    SvdResult s = svd(m);
    const double rel = s.sigma(n - 1) / std::max(s.sigma(0), 1e-300);
    if (rel > cert.best_smin_rel) {
      cert.best_smin_rel = rel;
      cert.shift_used = shift;
    }
    if (rank_tol(m, tol, m.norm()) == n) {
      cert.regular = true;
      break;
    }
  }

  // Wong sequence dimensions, also used as a deflating-subspace certificate.
  {
    Matrix basis(n, 0);
    cert.wong_dims.push_back(0);
    for (Index it = 0; it <= n; ++it) {
      const double scale = pencil_scale(p);
      Matrix img = column_space(p.a * basis, tol, scale);
      Matrix proj = p.e - img * (img.transpose() * p.e);
      Matrix next = right_nullspace(proj, tol, scale);
      if (next.cols() == basis.cols()) break;
      basis = next;
      cert.wong_dims.push_back(basis.cols());
    }
  }

  if (!cert.regular) {
    Matrix stacked = vstack(p.e, p.a);
    if (rank_tol(stacked, tol) < n) {
      Matrix ker = right_nullspace(stacked, tol);
      cert.common_kernel = Vector(ker.col(0));
    }
  }
  return cert;
}

IndexReport index(const Pencil& p, const TolerancePolicy& tol) {
  require_square_pencil(p);
  const Index n = p.e.rows();
  IndexReport rep;
  RegularityCertificate cert = regularity(p, tol);
  rep.regular = cert.regular;
  if (!cert.regular)
    throw Error(Errc::NotRegular, "pencil is singular; index undefined");
  if (n == 0) {
    rep.nu = 0;
    return rep;
  }

  MarginTracker margins;

  // Wong sequence W_0 = {0}, W_{k+1} = E^{-1}(A W_k); the index is the first
  // k with W_{k+1} = W_k and W_nu spans the infinite deflating subspace.
  const double scale = pencil_scale(p);
  Matrix w_basis(n, 0);
  Index nu = 0;
  for (Index it = 0; it <= n + 1; ++it) {
    Matrix img = column_space(p.a * w_basis, tol, scale);
    Matrix proj = p.e - img * (img.transpose() * p.e);
    margins.observe(proj, tol, scale);
    Matrix next = right_nullspace(proj, tol, scale);
    if (next.cols() == w_basis.cols()) break;
    w_basis = next;
    nu = it + 1;
  }
  rep.nu = nu;
  rep.infinite_block_dim = w_basis.cols();

  // Finite deflating subspace via the other Wong sequence:
  // V_0 = R^n, V_{k+1} = A^{-1}(E V_k).
  Matrix v_basis = Matrix::Identity(n, n);
  for (Index it = 0; it <= n + 1; ++it) {
    Matrix img = column_space(p.e * v_basis, tol, scale);
    Matrix proj = p.a - img * (img.transpose() * p.a);
    margins.observe(proj, tol, scale);
    Matrix next = right_nullspace(proj, tol, scale);
    if (next.cols() == v_basis.cols()) break;
    v_basis = next;
  }
  const Index nf = v_basis.cols();

  if (nf + rep.infinite_block_dim != n)
    throw Error(Errc::RankAmbiguous,
                "deflating subspace dimensions do not add up; rank decisions "
                "ambiguous");

  if (nf > 0) {
    // Restrict the pencil to the finite deflating subspace and solve the
    // resulting dense eigenproblem.
    Matrix q = column_space(p.e * v_basis, tol, scale);
    if (q.cols() != nf)
      throw Error(Errc::RankAmbiguous, "E restricted to finite subspace lost rank");
    Matrix er = q.transpose() * p.e * v_basis;
    Matrix ar = q.transpose() * p.a * v_basis;
    Matrix t = er.partialPivLu().solve(ar);

    Eigen::EigenSolver<Matrix> es(t);
    if (es.info() != Eigen::Success)
      throw Error(Errc::InvalidInput, "eigensolver failed");
    std::vector<Complex> vals(es.eigenvalues().data(),
                              es.eigenvalues().data() + nf);

    const double tscale = std::max(1.0, t.norm());
    const double cluster = tol.cluster_tol * tscale;
    // A perturbed Jordan block of size k scatters its eigenvalue over a disc
    // of radius ~ eps^(1/k); group with an eps^(1/4) radius so blocks up to
    // the relevant sizes coalesce, then let the (robust) kernel-power ranks
    // decide defectiveness.
    const double gather =
        std::max(cluster, std::pow(kMachineEps, 0.25) * tscale);

    std::vector<bool> taken(vals.size(), false);
    for (size_t i = 0; i < vals.size(); ++i) {
      if (taken[i]) continue;
      std::vector<size_t> members{i};
      taken[i] = true;
      bool grew = true;
      while (grew) {
        grew = false;
        for (size_t j = 0; j < vals.size(); ++j) {
          if (taken[j]) continue;
          for (size_t m : members) {
            if (std::abs(vals[j] - vals[m]) <= gather) {
              members.push_back(j);
              taken[j] = true;
              grew = true;
              break;
            }
          }
        }
      }
      Complex mean(0, 0);
      for (size_t m : members) mean += vals[m];
      mean /= static_cast<double>(members.size());
      // Collapse conjugate-symmetric clusters onto the axes.
      if (std::abs(mean.imag()) <= gather) mean = Complex(mean.real(), 0.0);
      if (std::abs(mean.real()) <= cluster) mean = Complex(0.0, mean.imag());

      EigenvalueInfo info;
      info.value = mean;
      info.algebraic = static_cast<Index>(members.size());
      ComplexMatrix shifted =
          t.cast<Complex>() - mean * ComplexMatrix::Identity(nf, nf);
      info.geometric = nf - complex_rank(shifted, tol, tscale);
      info.on_imaginary_axis = mean.real() == 0.0 ||
                               std::abs(mean.real()) <= cluster;
      rep.finite_eigenvalues.push_back(info);
    }
  }

  rep.decision_margin = margins.margin;
  rep.borderline = rep.decision_margin < 1e3;
  return rep;
}

Index2Staircase index2_staircase(const Pencil& p, const TolerancePolicy& tol) {
  require_square_pencil(p);
  const Index n = p.e.rows();

  RegularityCertificate cert = regularity(p, tol);
  if (!cert.regular) throw Error(Errc::NotRegular, "pencil is singular");

  Index2Staircase out;

  // Step 1: SVD of E.
  const double scale = pencil_scale(p);
  SvdResult se = svd(p.e);
  const Index r = rank_tol(p.e, tol, scale);
  Matrix u = se.u, v = se.v;
  Matrix a_cur = u.transpose() * p.a * v;

  // Step 2: SVD of the trailing A block.
  Matrix a22 = a_cur.block(r, r, n - r, n - r);
  SvdResult s2 = svd(a22);
  const Index n3 = rank_tol(a22, tol, scale);
  if (n - r > 0) {
    u.rightCols(n - r) = u.rightCols(n - r) * s2.u;
    v.rightCols(n - r) = v.rightCols(n - r) * s2.v;
  }
  a_cur = u.transpose() * p.a * v;

  const Index n1 = n - r - n3;
  if (n1 > r)
    throw Error(Errc::NotRegular, "pencil is singular (kernel block too large)");
  const Index n2 = r - n1;
  out.n1 = n1;
  out.n2 = n2;
  out.n3 = n3;
  out.n4 = n1;

  // Step 3: compress the coupling blocks A13 (columns) and A31 (rows).
  if (n1 > 0) {
    Matrix a13 = a_cur.block(0, r + n3, r, n1);
    if (rank_tol(a13, tol, scale) != n1)
      throw Error(Errc::NotRegular, "A13 rank deficient; pencil singular");
    SvdResult s13 = svd(a13);
    u.leftCols(r) = u.leftCols(r) * s13.u;
    if (n1 > 0) v.rightCols(n1) = v.rightCols(n1) * s13.v;

    Matrix a31 = (u.transpose() * p.a * v).block(r + n3, 0, n1, r);
    if (rank_tol(a31, tol, scale) != n1)
      throw Error(Errc::NotRegular, "A31 rank deficient; pencil singular");
    SvdResult s31 = svd(a31);
    u.rightCols(n1) = u.rightCols(n1) * s31.u;
    v.leftCols(r) = v.leftCols(r) * s31.v;
  }

  out.u = u;
  out.v = v;
  Matrix e_tr = u.transpose() * p.e * v;
  Matrix a_tr = u.transpose() * p.a * v;

  // E22 invertible iff the index is at most two.
  Matrix e22 = e_tr.block(n1, n1, n2, n2);
  if (rank_tol(e22, tol, scale) != n2)
    throw Error(Errc::IndexTooHigh,
                "E22 is singular: the pencil has index greater than two");

  out.e_form = Matrix::Zero(n, n);
  out.e_form.topLeftCorner(r, r) = e_tr.topLeftCorner(r, r);
  out.a_form = Matrix::Zero(n, n);
  // A keeps: full first block row, [A21 A22 A23], [A31 A32 A33], [A41].
  out.a_form.topRows(n1) = a_tr.topRows(n1);
  out.a_form.block(n1, 0, n2, r + n3) = a_tr.block(n1, 0, n2, r + n3);
  out.a_form.block(r, 0, n3, r + n3) = a_tr.block(r, 0, n3, r + n3);
  out.a_form.block(r + n3, 0, n1, n1) = a_tr.block(r + n3, 0, n1, n1);

  out.residual_e = (e_tr - out.e_form).norm();
  out.residual_a = (a_tr - out.a_form).norm();
  return out;
}

ReducedOde reduced_ode(const Index2Staircase& st, const TolerancePolicy& tol) {
  ReducedOde out;
  const Index n1 = st.n1, n2 = st.n2, n3 = st.n3;
  Matrix e22 = st.e_form.block(n1, n1, n2, n2);
  Matrix a22 = st.a_form.block(n1, n1, n2, n2);
  Matrix a23 = st.a_form.block(n1, n1 + n2, n2, n3);
  Matrix a32 = st.a_form.block(n1 + n2, n1, n3, n2);
  Matrix a33 = st.a_form.block(n1 + n2, n1 + n2, n3, n3);
  if (n3 > 0 && rank_tol(a33, tol, st.a_form.norm()) != n3)
    throw Error(Errc::RankAmbiguous, "A33 is numerically singular");
  Matrix a33_inv_a32 =
      n3 > 0 ? Matrix(a33.partialPivLu().solve(a32)) : Matrix(0, n2);
  out.e = e22;
  out.a = a22 - a23 * a33_inv_a32;
  out.x3_of_x2 = -a33_inv_a32;
  out.n_zero = n1;
  out.n_dependent = st.n4;
  return out;
}

const char* dh_variant_name(DHVariant v) {
  switch (v) {
    case DHVariant::WithQ: return "with-q";
    case DHVariant::QIdentity: return "q-identity";
    case DHVariant::Lossless: return "lossless";
  }
  return "unknown";
}

std::optional<DHVariant> parse_dh_variant(const std::string& name) {
  if (name == "with-q") return DHVariant::WithQ;
  if (name == "q-identity") return DHVariant::QIdentity;
  if (name == "lossless") return DHVariant::Lossless;
  return std::nullopt;
}

namespace {

// Largest Jordan block of eigenvalue mu in t, from kernel growth of powers.
Index max_partial_multiplicity(const Matrix& t, Complex mu, Index algebraic,
                               const TolerancePolicy& tol) {
  const Index nf = t.rows();
  ComplexMatrix shifted =
      t.cast<Complex>() - mu * ComplexMatrix::Identity(nf, nf);
  ComplexMatrix power = ComplexMatrix::Identity(nf, nf);
  Index prev_dim = 0;
  const double base = std::max(1.0, shifted.norm());
  double floor_k = 1.0;
  for (Index k = 1; k <= algebraic + 1; ++k) {
    power *= shifted;
    floor_k *= base;
    Index dim = nf - complex_rank(power, tol, floor_k);
    if (dim == prev_dim) return k - 1;
    prev_dim = dim;
    if (dim >= algebraic) return k;
  }
  return algebraic;
}

}  // namespace

DHVerdict check_dh_equivalence(const Pencil& p, DHVariant variant,
                               const TolerancePolicy& tol) {
  DHVerdict verdict;
  verdict.variant = variant;
  verdict.index_report = index(p, tol);  // throws NotRegular for singular input
  const IndexReport& rep = verdict.index_report;

  const double cluster = tol.cluster_tol * pencil_scale(p);

  if (rep.nu > 2) verdict.failed_conditions.push_back("index exceeds two");

  // Recompute the restricted matrix for partial multiplicities of zero when
  // required; reuse the eigen data gathered by index().
  for (const auto& ev : rep.finite_eigenvalues) {
    const bool on_axis = ev.on_imaginary_axis;
    const bool is_zero = on_axis && std::abs(ev.value.imag()) <= cluster;
    const bool semisimple = ev.algebraic == ev.geometric;

    switch (variant) {
      case DHVariant::WithQ:
        if (ev.value.real() > cluster)
          verdict.failed_conditions.push_back(
              "eigenvalue in open right half plane");
        if (on_axis && !is_zero && !semisimple)
          verdict.failed_conditions.push_back(
              "nonzero imaginary eigenvalue not semisimple");
        break;
      case DHVariant::QIdentity:
        if (ev.value.real() > cluster)
          verdict.failed_conditions.push_back(
              "eigenvalue in open right half plane");
        if (on_axis && !semisimple)
          verdict.failed_conditions.push_back(
              "imaginary-axis eigenvalue not semisimple");
        break;
      case DHVariant::Lossless:
        if (!on_axis)
          verdict.failed_conditions.push_back("eigenvalue off imaginary axis");
        else if (!semisimple)
          verdict.failed_conditions.push_back(
              "imaginary-axis eigenvalue not semisimple");
        break;
    }
  }

  if (variant == DHVariant::WithQ) {
    // partial multiplicities of the zero eigenvalue at most two
    for (const auto& ev : rep.finite_eigenvalues) {
      if (!(ev.on_imaginary_axis && std::abs(ev.value.imag()) <= cluster))
        continue;
      if (ev.algebraic == ev.geometric) continue;  // semisimple, mult 1
      // Rebuild the finite restriction to measure Jordan block sizes.
      const double scale = pencil_scale(p);
      Matrix v_basis = Matrix::Identity(p.e.rows(), p.e.cols());
      for (Index it = 0; it <= p.e.rows() + 1; ++it) {
        Matrix img = column_space(p.e * v_basis, tol, scale);
        Matrix proj = p.a - img * (img.transpose() * p.a);
        Matrix next = right_nullspace(proj, tol, scale);
        if (next.cols() == v_basis.cols()) break;
        v_basis = next;
      }
      Matrix q = column_space(p.e * v_basis, tol, scale);
      Matrix er = q.transpose() * p.e * v_basis;
      Matrix ar = q.transpose() * p.a * v_basis;
      Matrix t = er.partialPivLu().solve(ar);
      if (max_partial_multiplicity(t, ev.value, ev.algebraic, tol) > 2)
        verdict.failed_conditions.push_back(
            "partial multiplicity of zero eigenvalue exceeds two");
    }
  }

  // Deduplicate repeated failure strings.
  std::sort(verdict.failed_conditions.begin(), verdict.failed_conditions.end());
  verdict.failed_conditions.erase(
      std::unique(verdict.failed_conditions.begin(),
                  verdict.failed_conditions.end()),
      verdict.failed_conditions.end());
  verdict.equivalent = verdict.failed_conditions.empty();
  return verdict;
}

namespace {

// Block bookkeeping for the elimination chain in dh_canonicalize. Maintains
// e = U^T E V, a = U^T A V under row/column updates.
struct BlockOps {
  Matrix e, a, u, v;
  std::vector<Index> offset, size;

  BlockOps(const Matrix& e0, const Matrix& a0, const Matrix& u0,
           const Matrix& v0, std::vector<Index> sizes)
      : e(e0), a(a0), u(u0), v(v0), size(std::move(sizes)) {
    offset.resize(size.size());
    Index o = 0;
    for (size_t i = 0; i < size.size(); ++i) {
      offset[i] = o;
      o += size[i];
    }
  }

  Matrix eblk(int i, int j) const {
    return e.block(offset[i], offset[j], size[i], size[j]);
  }
  Matrix ablk(int i, int j) const {
    return a.block(offset[i], offset[j], size[i], size[j]);
  }

  // row_i += X * row_k
  void row_update(int i, int k, const Matrix& x) {
    if (size[i] == 0 || size[k] == 0) return;
    e.middleRows(offset[i], size[i]) += x * e.middleRows(offset[k], size[k]);
    a.middleRows(offset[i], size[i]) += x * a.middleRows(offset[k], size[k]);
    u.middleCols(offset[i], size[i]) +=
        u.middleCols(offset[k], size[k]) * x.transpose();
  }
  // col_j += col_k * X
  void col_update(int j, int k, const Matrix& x) {
    if (size[j] == 0 || size[k] == 0) return;
    e.middleCols(offset[j], size[j]) += e.middleCols(offset[k], size[k]) * x;
    a.middleCols(offset[j], size[j]) += a.middleCols(offset[k], size[k]) * x;
    v.middleCols(offset[j], size[j]) += v.middleCols(offset[k], size[k]) * x;
  }
  // row_i = M * row_i
  void row_scale(int i, const Matrix& m) {
    if (size[i] == 0) return;
    e.middleRows(offset[i], size[i]) = m * e.middleRows(offset[i], size[i]);
    a.middleRows(offset[i], size[i]) = m * a.middleRows(offset[i], size[i]);
    u.middleCols(offset[i], size[i]) =
        u.middleCols(offset[i], size[i]) * m.transpose();
  }
  // col_j = col_j * M
  void col_scale(int j, const Matrix& m) {
    if (size[j] == 0) return;
    e.middleCols(offset[j], size[j]) = e.middleCols(offset[j], size[j]) * m;
    a.middleCols(offset[j], size[j]) = a.middleCols(offset[j], size[j]) * m;
    v.middleCols(offset[j], size[j]) = v.middleCols(offset[j], size[j]) * m;
  }
};

}  // namespace

DHCanonical dh_canonicalize(const Pencil& p, const TolerancePolicy& tol) {
  DHVerdict verdict = check_dh_equivalence(p, DHVariant::QIdentity, tol);
  if (!verdict.equivalent) {
    std::string msg = "pencil not equivalent to a dissipative Hamiltonian "
                      "pencil with Q = I:";
    for (const auto& f : verdict.failed_conditions) msg += " [" + f + "]";
    throw Error(Errc::NotEquivalent, msg);
  }

  const Index n = p.e.rows();
  Index2Staircase st = index2_staircase(p, tol);
  BlockOps ops(st.e_form, st.a_form, st.u, st.v,
               {st.n1, st.n2, st.n3, st.n4});

  // Normalize the two coupling identities and A33.
  ops.col_scale(3, ops.ablk(0, 3).partialPivLu().inverse());
  ops.row_scale(3, ops.ablk(3, 0).partialPivLu().inverse());
  // Clear the remaining entries of the first block row of A via column 3.
  for (int j : {0, 1, 2}) ops.col_update(j, 3, -ops.ablk(0, j));
  // Clear A21, A31 via row 3.
  ops.row_update(1, 3, -ops.ablk(1, 0));
  ops.row_update(2, 3, -ops.ablk(2, 0));
  // Decouple the ODE block from the algebraic block.
  if (st.n3 > 0) {
    Matrix a33_inv = ops.ablk(2, 2).partialPivLu().inverse();
    ops.row_update(1, 2, -ops.ablk(1, 2) * a33_inv);
    ops.col_update(1, 2, -a33_inv * ops.ablk(2, 1));
    ops.row_scale(2, a33_inv);
  }
  // Clean E: eliminate E12, E21 and scale E22 to identity.
  if (st.n2 > 0) {
    Matrix e22_inv = ops.eblk(1, 1).partialPivLu().inverse();
    ops.row_update(0, 1, -ops.eblk(0, 1) * e22_inv);
    ops.col_update(1, 3, -ops.ablk(0, 1));  // repair A(1,2)
    ops.col_update(0, 1, -e22_inv * ops.eblk(1, 0));
    ops.row_update(1, 3, -ops.ablk(1, 0));  // repair A(2,1)
    ops.row_scale(1, e22_inv);
  }
  // Sign convention: A(4,1) = -I and A(3,3) = -I after the final split.
  ops.row_scale(3, -Matrix::Identity(st.n4, st.n4));
  ops.row_scale(2, -Matrix::Identity(st.n3, st.n3));

  // Echelon split of the leading E block.
  Matrix e11 = ops.eblk(0, 0);
  SvdResult se = svd(e11);
  const Index nh1 = rank_tol(e11, tol, ops.e.norm());
  const Index nh2 = st.n1 - nh1;
  if (st.n1 > 0) {
    Matrix m(st.n1, st.n1);
    if (nh1 > 0)
      m.topRows(nh1) = se.sigma.head(nh1).cwiseInverse().asDiagonal() *
                       se.u.leftCols(nh1).transpose();
    if (nh2 > 0) m.bottomRows(nh2) = se.u.rightCols(nh2).transpose();
    Matrix minv(st.n1, st.n1);
    if (nh1 > 0) minv.leftCols(nh1) = se.u.leftCols(nh1) * se.sigma.head(nh1).asDiagonal();
    if (nh2 > 0) minv.rightCols(nh2) = se.u.rightCols(nh2);
    ops.row_scale(0, m);
    ops.col_scale(0, se.v);
    ops.row_scale(3, se.v.transpose());
    ops.col_scale(3, minv);
  }

  DHCanonical out;
  out.n1 = nh1;
  out.n2 = nh2;
  out.n3 = st.n2;  // dynamic block
  out.n4 = st.n3;  // purely algebraic block
  out.warnings = verdict.index_report.borderline
                     ? std::vector<std::string>{"borderline rank decision"}
                     : std::vector<std::string>{};

  // Lyapunov certificate on the dynamic block.
  const Index b3_off = st.n1, b3 = st.n2;
  Matrix a33_tilde = ops.a.block(b3_off, b3_off, b3, b3);
  Matrix x = solve_lyapunov_inequality(a33_tilde, tol);
  ops.row_scale(1, x);

  out.u = ops.u;
  out.v = ops.v;
  out.e33 = ops.e.block(b3_off, b3_off, b3, b3);
  Matrix a33 = ops.a.block(b3_off, b3_off, b3, b3);
  out.j33 = skew_part(a33);
  out.r33 = -sym_part(a33);

  // Idealized pattern over blocks (nh1, nh2, n3, n4, nh1, nh2).
  const Index sizes[6] = {nh1, nh2, out.n3, out.n4, nh1, nh2};
  Index off[6];
  Index o = 0;
  for (int i = 0; i < 6; ++i) {
    off[i] = o;
    o += sizes[i];
  }
  out.e_form = Matrix::Zero(n, n);
  out.e_form.block(off[0], off[0], nh1, nh1) = Matrix::Identity(nh1, nh1);
  out.e_form.block(off[2], off[2], out.n3, out.n3) = out.e33;
  out.a_form = Matrix::Zero(n, n);
  out.a_form.block(off[0], off[4], nh1, nh1) = Matrix::Identity(nh1, nh1);
  out.a_form.block(off[1], off[5], nh2, nh2) = Matrix::Identity(nh2, nh2);
  out.a_form.block(off[2], off[2], out.n3, out.n3) = a33;
  out.a_form.block(off[3], off[3], out.n4, out.n4) =
      -Matrix::Identity(out.n4, out.n4);
  out.a_form.block(off[4], off[0], nh1, nh1) = -Matrix::Identity(nh1, nh1);
  out.a_form.block(off[5], off[1], nh2, nh2) = -Matrix::Identity(nh2, nh2);

  out.residual_e = (out.u.transpose() * p.e * out.v - out.e_form).norm();
  out.residual_a = (out.u.transpose() * p.a * out.v - out.a_form).norm();
  return out;
}

StructuredIndexLaw verify_structured_index_law(const ExtendedHDAE& sys,
                                               const TolerancePolicy& tol) {
  require_valid(validate(sys, tol), Errc::NotStructured);
  StructuredIndexLaw law;
  IndexReport rep = index(pencil_of(sys), tol);
  law.nu = rep.nu;
  law.p_singular = rank_tol(sys.p, tol, sys.p.norm()) < sys.p.rows();
  law.law_holds = rep.nu <= 2 && (rep.nu < 2 || law.p_singular);
  return law;
}

}  // namespace phdae
