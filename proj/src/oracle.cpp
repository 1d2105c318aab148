#include "phdae/oracle.hpp"

#include <cmath>

#include "phdae/numkernel.hpp"

namespace phdae::oracle {

Index shuffle_index(const Pencil& p, const TolerancePolicy& tol) {
  RegularityCertificate cert = regularity(p, tol);
  if (!cert.regular) throw Error(Errc::NotRegular, "pencil is singular");
  const Index n = p.e.rows();
  Matrix e = p.e, a = p.a;
  const double scale = std::max(p.e.norm(), p.a.norm());
  for (Index count = 0; count <= n + 1; ++count) {
    if (rank_tol(e, tol, scale) == n) return count;
    // Row-compress E; the zero rows carry purely algebraic equations whose
    // derivative replaces them.
    SvdResult s = svd(e);
    const Index r = rank_tol(e, tol, scale);
    Matrix e1 = s.u.transpose() * e;
    Matrix a1 = s.u.transpose() * a;
    Matrix e_next(n, n), a_next(n, n);
    e_next.topRows(r) = e1.topRows(r);
    e_next.bottomRows(n - r) = a1.bottomRows(n - r);
    a_next.topRows(r) = a1.topRows(r);
    a_next.bottomRows(n - r).setZero();
    e = e_next;
    a = a_next;
  }
  throw Error(Errc::RankAmbiguous, "shuffle algorithm failed to terminate");
}

LagrangeBlockPrediction predicted_lagrange_blocks(const LagrangePair& pair,
                                                  const TolerancePolicy& tol) {
  LagrangeBlockPrediction out;
  const Matrix& p = pair.p;
  const Matrix& s = pair.s;
  const Index rank_p = rank_tol(p, tol, p.norm());

  Matrix gram = sym_part(s.transpose() * p);
  const double pair_scale = std::max(1.0, p.norm()) * std::max(1.0, s.norm());
  if (gram.rows() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram);
    const Vector lam = es.eigenvalues();
    const double thresh = tol.rank_threshold(
        gram.rows(), gram.cols(),
        std::max(lam.size() > 0 ? lam.cwiseAbs().maxCoeff() : 0.0, pair_scale));
    for (Index i = 0; i < lam.size(); ++i) {
      if (lam(i) > thresh) ++out.m1;
      else if (lam(i) < -thresh) ++out.m2;
    }
  }
  out.m3 = rank_p - out.m1 - out.m2;

  // m4: the effort directions reachable from ker P. The state transform
  // cancels (W on the right, full-rank V^T on the left), so the rank is an
  // equivalence invariant of the pair.
  out.m4 = rank_tol(s * right_nullspace(p, tol), tol, s.norm());
  // n5 is reduction-dependent for non-maximal pairs; this reproduces the
  // condensation's value through an independent orthogonal probe.
  out.n5 =
      rank_tol(left_annihilator(p, tol) * s, tol, s.norm()) - out.m4;
  return out;
}

DiracBlockPrediction predicted_dirac_blocks(const DiracPair& pair,
                                            const TolerancePolicy& tol) {
  DiracBlockPrediction out;
  const Matrix& k = pair.k;
  const Matrix& l = pair.l;
  const Index rank_k = rank_tol(k, tol, k.norm());
  const double pair_scale = std::max(1.0, k.norm()) * std::max(1.0, l.norm());
  const Index rank_klt = rank_tol(k * l.transpose(), tol, pair_scale);
  out.l1 = rank_klt / 2;
  out.l3 = rank_k - 2 * out.l1;
  // l4: L restricted to the equation cokernel of K; the row transform U
  // cancels, making the rank an equivalence invariant.
  out.l4 = rank_tol(left_annihilator(k, tol) * l, tol, l.norm());
  // n5 via the columns L reaches from ker K (reduction-covariant, see the
  // Lagrange case).
  out.n5 = rank_tol(l * right_nullspace(k, tol), tol, l.norm()) - out.l4;
  return out;
}

Matrix random_gaussian(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.gauss();
  return m;
}

Matrix random_orthogonal(Index n, Rng& rng) {
  if (n == 0) return Matrix(0, 0);
  Eigen::HouseholderQR<Matrix> qr(random_gaussian(n, n, rng));
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  return q;
}

Matrix random_well_conditioned(Index n, Rng& rng, double spread) {
  if (n == 0) return Matrix(0, 0);
  Vector d(n);
  for (Index i = 0; i < n; ++i) d(i) = rng.uniform(1.0 / spread, spread);
  return random_orthogonal(n, rng) * d.asDiagonal() * random_orthogonal(n, rng);
}

Matrix random_symmetric(Index n, Rng& rng) {
  return sym_part(random_gaussian(n, n, rng));
}

Matrix random_skew(Index n, Rng& rng) {
  return skew_part(random_gaussian(n, n, rng));
}

Matrix random_psd(Index n, Index rank, Rng& rng) {
  if (rank <= 0) return Matrix::Zero(n, n);
  Matrix g = random_gaussian(n, std::min(rank, n), rng);
  return g * g.transpose();
}

LagrangePair random_lagrange(const LagrangeShape& sh, Rng& rng) {
  const Index core = sh.m1 + sh.m2 + sh.m3;
  const Index rows = core + sh.m4 + sh.n5 + sh.extra_rows;
  const Index cols = core + sh.m4 + sh.extra_cols;
  Matrix pc = Matrix::Zero(rows, cols);
  pc.topLeftCorner(core, core) = Matrix::Identity(core, core);
  Matrix sc = Matrix::Zero(rows, cols);
  sc.topLeftCorner(sh.m1, sh.m1) = Matrix::Identity(sh.m1, sh.m1);
  sc.block(sh.m1, sh.m1, sh.m2, sh.m2) = -Matrix::Identity(sh.m2, sh.m2);
  sc.block(core, core, sh.m4, sh.m4) = Matrix::Identity(sh.m4, sh.m4);
  if (sh.n5 > 0) {
    // random full-row-rank block over the first three column groups
    Matrix s5 = random_gaussian(sh.n5, core, rng);
    sc.block(core + sh.m4, 0, sh.n5, core) = s5;
  }
  Matrix v = random_well_conditioned(rows, rng);
  Matrix w = random_well_conditioned(cols, rng);
  LagrangePair out;
  out.p = v * pc * w;
  out.s = v.transpose().partialPivLu().solve(sc * w);
  return out;
}

LagrangePair random_lagrange(Index n, Rng& rng) {
  LagrangeShape sh;
  sh.m4 = rng.pick(0, n / 2);
  const Index core = n - sh.m4;
  sh.m1 = rng.pick(0, core);
  sh.m2 = rng.pick(0, core - sh.m1);
  sh.m3 = core - sh.m1 - sh.m2;
  return random_lagrange(sh, rng);
}

DiracPair random_dirac(const DiracShape& sh, Rng& rng) {
  const Index core = 2 * sh.l1 + sh.l3;
  const Index rows = core + sh.l4 + sh.extra_rows;
  const Index cols = core + sh.l4 + sh.n5 + sh.extra_cols;
  Matrix kc = Matrix::Zero(rows, cols);
  kc.topLeftCorner(core, core) = Matrix::Identity(core, core);
  Matrix lc = Matrix::Zero(rows, cols);
  lc.block(0, sh.l1, sh.l1, sh.l1) = Matrix::Identity(sh.l1, sh.l1);
  lc.block(sh.l1, 0, sh.l1, sh.l1) = -Matrix::Identity(sh.l1, sh.l1);
  lc.block(core, core, sh.l4, sh.l4) = Matrix::Identity(sh.l4, sh.l4);
  if (sh.n5 > 0)
    lc.block(0, core + sh.l4, core, sh.n5) = random_gaussian(core, sh.n5, rng);
  Matrix u = random_well_conditioned(rows, rng);
  Matrix v = random_well_conditioned(cols, rng);
  DiracPair out;
  out.k = u.transpose() * kc * v;
  out.l = u.transpose() * lc * v.partialPivLu().inverse().transpose();
  return out;
}

DiracPair random_dirac(Index n, Rng& rng) {
  DiracShape sh;
  sh.l4 = rng.pick(0, n / 2);
  const Index core = n - sh.l4;
  sh.l1 = rng.pick(0, core / 2);
  sh.l3 = core - 2 * sh.l1;
  return random_dirac(sh, rng);
}

MonotonePair random_monotone(Index n, Rng& rng) {
  const Index n1 = rng.pick(0, n);
  Matrix mc = Matrix::Identity(n, n);
  if (n1 > 0)
    mc.topLeftCorner(n1, n1) =
        random_skew(n1, rng) + random_psd(n1, rng.pick(0, n1), rng);
  Matrix nc = Matrix::Zero(n, n);
  nc.topLeftCorner(n1, n1) = Matrix::Identity(n1, n1);
  Matrix h = random_well_conditioned(n, rng);
  Matrix theta = random_well_conditioned(n, rng);
  MonotonePair out;
  out.n = h.transpose() * nc * theta;
  out.m = h.transpose() * mc * theta.partialPivLu().inverse().transpose();
  return out;
}

DHSystem random_dh(Index n, Rng& rng) {
  DHSystem out;
  Matrix u = random_orthogonal(n, rng);
  Matrix v = random_orthogonal(n, rng);
  Vector d1(n), d2(n);
  const Index rank_e = rng.pick(0, n);
  for (Index i = 0; i < n; ++i) {
    d1(i) = i < rank_e ? rng.uniform(0.3, 2.0) : 0.0;
    d2(i) = rng.uniform(-2.0, 2.0);
  }
  out.e = u.transpose() * d1.asDiagonal() * v;
  out.q = u.transpose() * d2.asDiagonal() * v;
  out.j = random_skew(n, rng);
  out.r = random_psd(n, rng.pick(0, n), rng);
  return out;
}

ExtendedHDAE random_extended_regular(Index n, Rng& rng) {
  // Assemble block-diagonal canonical seeds of known index, then wrap in a
  // random structured equivalence.
  Matrix k = Matrix::Zero(n, n), l = Matrix::Zero(n, n);
  Matrix p = Matrix::Zero(n, n), s = Matrix::Zero(n, n);
  Index at = 0;
  while (at < n) {
    const Index left = n - at;
    const int choice = static_cast<int>(rng.pick(0, 3));
    if (choice == 0 || left == 1) {
      // ODE block: K = I, L skew, P = I, S symmetric
      const Index b = rng.pick(1, left);
      k.block(at, at, b, b) = Matrix::Identity(b, b);
      l.block(at, at, b, b) = random_skew(b, rng);
      p.block(at, at, b, b) = Matrix::Identity(b, b);
      s.block(at, at, b, b) = random_symmetric(b, rng);
      // keep lambda*P - S regular on this block: shift S away from having a
      // common kernel with P (P = I, always fine)
      at += b;
    } else if (choice == 1) {
      // Dirac algebraic constraint: K = 0, L = I, P = I, S = I; index 1
      const Index b = rng.pick(1, left);
      l.block(at, at, b, b) = Matrix::Identity(b, b);
      p.block(at, at, b, b) = Matrix::Identity(b, b);
      s.block(at, at, b, b) = Matrix::Identity(b, b);
      at += b;
    } else if (choice == 2) {
      // Lagrange algebraic constraint: K = I, L skew invertible, P = 0,
      // S = I; index 1 (block 2a pattern)
      if (left < 2) continue;
      const Index half = rng.pick(1, left / 2);
      const Index b = 2 * half;
      k.block(at, at, b, b) = Matrix::Identity(b, b);
      l.block(at, at + half, half, half) = Matrix::Identity(half, half);
      l.block(at + half, at, half, half) = -Matrix::Identity(half, half);
      s.block(at, at, b, b) = Matrix::Identity(b, b);
      at += b;
    } else {
      // Index-two chain from a singular Lagrange structure
      if (left < 2) continue;
      const Index half = rng.pick(1, left / 2);
      const Index b = 2 * half;
      k.block(at, at, b, b) = Matrix::Identity(b, b);
      l.block(at, at + half, half, half) = Matrix::Identity(half, half);
      l.block(at + half, at, half, half) = -Matrix::Identity(half, half);
      p.block(at, at, half, half) = Matrix::Identity(half, half);
      s.block(at, at, b, b) = Matrix::Identity(b, b);
      at += b;
    }
  }
  ExtendedHDAE seed{k, l, p, s};
  return random_equivalence(seed, rng);
}

MonotoneAnnihilatorSystem random_monotone_annihilator(Index n, Rng& rng) {
  for (int attempt = 0; attempt < 32; ++attempt) {
    MonotonePair mp = random_monotone(n, rng);
    Matrix stacked = vstack(mp.n.transpose(), mp.m.transpose());
    Matrix cd = left_annihilator(stacked);
    MonotoneAnnihilatorSystem sys;
    sys.c = cd.leftCols(n);
    sys.d = cd.rightCols(n);
    LagrangeShape sh;
    sh.m4 = rng.pick(0, n / 2);
    const Index core = n - sh.m4;
    sh.m1 = core;  // definite core keeps things well scaled
    LagrangePair lp = random_lagrange(sh, rng);
    sys.p = lp.p;
    sys.s = lp.s;
    if (regularity(pencil_of(sys)).regular) return sys;
  }
  throw Error(Errc::InvalidInput,
              "failed to draw a regular monotone-annihilator system");
}

ExtendedHDAE random_equivalence(const ExtendedHDAE& sys, Rng& rng) {
  const Index n = sys.k.rows();
  Matrix u = random_well_conditioned(n, rng);
  Matrix v = random_well_conditioned(n, rng);
  Matrix w = random_well_conditioned(n, rng);
  Matrix vinv_t = v.partialPivLu().inverse().transpose();
  ExtendedHDAE out;
  out.k = u.transpose() * sys.k * v;
  out.l = u.transpose() * sys.l * vinv_t;
  out.p = v.partialPivLu().solve(sys.p * w);
  out.s = v.transpose() * sys.s * w;
  return out;
}

LagrangePair random_equivalence(const LagrangePair& pair, Rng& rng) {
  Matrix v = random_well_conditioned(pair.p.rows(), rng);
  Matrix w = random_well_conditioned(pair.p.cols(), rng);
  LagrangePair out;
  out.p = v * pair.p * w;
  out.s = v.transpose().partialPivLu().solve(pair.s * w);
  return out;
}

DiracPair random_equivalence(const DiracPair& pair, Rng& rng) {
  Matrix u = random_well_conditioned(pair.k.rows(), rng);
  Matrix v = random_well_conditioned(pair.k.cols(), rng);
  DiracPair out;
  out.k = u.transpose() * pair.k * v;
  out.l = u.transpose() * pair.l * v.partialPivLu().inverse().transpose();
  return out;
}

}  // namespace phdae::oracle
