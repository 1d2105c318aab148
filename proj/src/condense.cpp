#include "phdae/condense.hpp"

#include <cmath>

#include "phdae/numkernel.hpp"

namespace phdae {

namespace {

constexpr double kCondWarn = 1e8;

void warn_condition(std::vector<std::string>& warnings, const char* what,
                    const Vector& diag) {
  if (diag.size() == 0) return;
  const double cmax = diag.cwiseAbs().maxCoeff();
  const double cmin = diag.cwiseAbs().minCoeff();
  if (cmin <= 0.0 || cmax / cmin > kCondWarn)
    warnings.push_back(std::string("ill-conditioned diagonal inversion in ") +
                       what);
}

void warn_condition_mat(std::vector<std::string>& warnings, const char* what,
                        const Matrix& m) {
  if (m.rows() == 0) return;
  Eigen::JacobiSVD<Matrix> dec(m);
  const double smin = dec.singularValues().minCoeff();
  const double smax = dec.singularValues().maxCoeff();
  if (smin <= 0.0 || smax / smin > kCondWarn)
    warnings.push_back(std::string("ill-conditioned block inversion in ") + what);
}

// Shared steps 1-2 of the Lagrange condensation: orthogonal V, W with
//   V^T P W = [[Pd, 0, 0], [0, 0, 0], [0, 0, 0]]          (Pd diagonal > 0)
//   V^T S W = [[S11, 0, 0], [S21, S22d, 0], [S31, 0, 0]]  (S22d diagonal > 0)
// row blocks (r, m4, n-r-m4), column blocks (r, m4, m-r-m4).
struct LagrangeStage2 {
  Matrix v, w;        // orthogonal
  Matrix p_cur, s_cur;
  Index r = 0, m4 = 0;
};

LagrangeStage2 lagrange_stage2(const Matrix& p, const Matrix& s,
                               const TolerancePolicy& tol) {
  const Index n = p.rows(), m = p.cols();
  LagrangeStage2 st;

  SvdResult sp = svd(p);
  st.r = rank_tol(p, tol, p.norm());
  st.v = sp.u;
  st.w = sp.v;
  st.p_cur = st.v.transpose() * p * st.w;
  st.s_cur = st.v.transpose() * s * st.w;

  const Index nr = n - st.r, mr = m - st.r;
  Matrix s22 = st.s_cur.block(st.r, st.r, nr, mr);
  SvdResult s2 = svd(s22);
  st.m4 = rank_tol(s22, tol, st.s_cur.norm());
  if (nr > 0) st.v.rightCols(nr) = st.v.rightCols(nr) * s2.u;
  if (mr > 0) st.w.rightCols(mr) = st.w.rightCols(mr) * s2.v;
  st.p_cur = st.v.transpose() * p * st.w;
  st.s_cur = st.v.transpose() * s * st.w;
  return st;
}

double pattern_residual(const Matrix& transformed, const Matrix& form) {
  return (transformed - form).norm();
}

}  // namespace

const char* extended_variant_name(ExtendedVariant v) {
  switch (v) {
    case ExtendedVariant::LagrangeFirst: return "lagrange-first";
    case ExtendedVariant::DiracFirst: return "dirac-first";
    case ExtendedVariant::Monotone: return "monotone";
  }
  return "unknown";
}

LagrangeCondensed lagrange_condense(const LagrangePair& pair,
                                    const TolerancePolicy& tol) {
  const Matrix& p = pair.p;
  const Matrix& s = pair.s;
  {
    ValidationReport rep;
    rep.kind = SystemKind::Lagrange;
    const double thresh =
        tol.structure_threshold(std::max(1.0, p.norm() * std::max(1.0, s.norm())));
    rep.add("P^T S symmetric", (p.transpose() * s - s.transpose() * p).norm(),
            thresh);
    require_valid(rep, Errc::NotLagrange);
  }
  const Index n = p.rows(), m = p.cols();

  LagrangeCondensed out;
  LagrangeStage2 st = lagrange_stage2(p, s, tol);
  const Index r = st.r, m4 = st.m4;

  Matrix v = st.v, w = st.w;

  // Step 3: normalize the diagonal blocks and clear S21 by a column update.
  // Only diagonal matrices are inverted here.
  Vector pd = st.p_cur.diagonal().head(r);
  Vector s22d = st.s_cur.block(r, r, m4, m4).diagonal();
  warn_condition(out.warnings, "lagrange step 3 (P11)", pd);
  warn_condition(out.warnings, "lagrange step 3 (S22)", s22d);

  Matrix s21 = st.s_cur.block(r, 0, m4, r);

  // V3 = diag(P11, S22^{-T}, I), W3 = [[I,0,0],[-S22^{-1} S21, I, 0],[0,0,I]]
  Matrix v3 = Matrix::Identity(n, n);
  v3.topLeftCorner(r, r) = st.p_cur.topLeftCorner(r, r);
  for (Index i = 0; i < m4; ++i) v3(r + i, r + i) = 1.0 / s22d(i);
  Matrix w3 = Matrix::Identity(m, m);
  if (m4 > 0 && r > 0)
    w3.block(r, 0, m4, r) = -(s22d.cwiseInverse().asDiagonal() * s21);

  v = v * v3;
  w = w * w3;

  Matrix p_cur = v.partialPivLu().solve(p * w);
  Matrix s_cur = v.transpose() * s * w;

  // Step 4: signature of the symmetric core and full rank decomposition of
  // the fifth block row.
  Matrix core = sym_part(s_cur.topLeftCorner(r, r));
  SignatureForm sig = symmetric_congruence_signature(core, tol, s_cur.norm());
  out.m1 = sig.p;
  out.m2 = sig.q;
  out.m3 = sig.z;
  out.m4 = m4;
  warn_condition_mat(out.warnings, "lagrange step 4 (signature)", sig.t);

  const Index rest_rows = n - r - m4;
  Matrix s31 = s_cur.block(r + m4, 0, rest_rows, r);
  Matrix g = s31 * sig.t;
  SvdResult gs = svd(g);
  out.n5 = rank_tol(g, tol, s_cur.norm() * std::max(1.0, sig.t.norm()));
  Matrix s5 = gs.v.leftCols(out.n5).transpose();  // orthonormal rows
  // v4 block for the fifth rows: rows = [Sigma^{-1} Ur^T; Uperp^T]
  Matrix v4rest = Matrix::Identity(rest_rows, rest_rows);
  if (rest_rows > 0) {
    Matrix v4rest_t(rest_rows, rest_rows);
    if (out.n5 > 0)
      v4rest_t.topRows(out.n5) =
          gs.sigma.head(out.n5).cwiseInverse().asDiagonal() *
          gs.u.leftCols(out.n5).transpose();
    if (rest_rows - out.n5 > 0)
      v4rest_t.bottomRows(rest_rows - out.n5) =
          gs.u.rightCols(rest_rows - out.n5).transpose();
    v4rest = v4rest_t.transpose();
  }

  Matrix v4 = Matrix::Identity(n, n);
  v4.topLeftCorner(r, r) = sig.t;
  if (rest_rows > 0) v4.bottomRightCorner(rest_rows, rest_rows) = v4rest;
  Matrix w4 = Matrix::Identity(m, m);
  w4.topLeftCorner(r, r) = sig.t;

  out.v = v * v4;
  out.w = w * w4;

  // Idealized canonical pattern.
  out.p_form = Matrix::Zero(n, m);
  out.p_form.topLeftCorner(r, r) = Matrix::Identity(r, r);
  out.s_form = Matrix::Zero(n, m);
  out.s_form.topLeftCorner(out.m1, out.m1) = Matrix::Identity(out.m1, out.m1);
  out.s_form.block(out.m1, out.m1, out.m2, out.m2) =
      -Matrix::Identity(out.m2, out.m2);
  out.s_form.block(r, r, m4, m4) = Matrix::Identity(m4, m4);
  if (out.n5 > 0) out.s_form.block(r + m4, 0, out.n5, r) = s5;

  out.residual_p =
      pattern_residual(out.v.partialPivLu().solve(p * out.w), out.p_form);
  out.residual_s = pattern_residual(out.v.transpose() * s * out.w, out.s_form);
  return out;
}

LagrangeStaircase lagrange_staircase_orth(const LagrangePair& pair,
                                          const TolerancePolicy& tol) {
  const Matrix& p = pair.p;
  const Matrix& s = pair.s;
  {
    ValidationReport rep;
    rep.kind = SystemKind::Lagrange;
    const double thresh =
        tol.structure_threshold(std::max(1.0, p.norm() * std::max(1.0, s.norm())));
    rep.add("P^T S symmetric", (p.transpose() * s - s.transpose() * p).norm(),
            thresh);
    require_valid(rep, Errc::NotLagrange);
  }
  const Index n = p.rows(), m = p.cols();

  LagrangeStaircase out;
  LagrangeStage2 st = lagrange_stage2(p, s, tol);
  const Index r = st.r, m4 = st.m4;
  out.m4 = m4;

  Matrix v = st.v, w = st.w;

  // Resolve the invertible S11 block by an orthogonal SVD step.
  Matrix s11 = st.s_cur.topLeftCorner(r, r);
  SvdResult s3 = svd(s11);
  out.m12 = rank_tol(s11, tol, st.s_cur.norm());
  out.m3 = r - out.m12;
  if (r > 0) {
    v.leftCols(r) = v.leftCols(r) * s3.u;
    w.leftCols(r) = w.leftCols(r) * s3.v;
  }

  // Row-compress the fifth block rows ([S41 S42]) orthogonally.
  const Index rest_rows = n - r - m4;
  Matrix s_cur = v.transpose() * s * w;
  Matrix s31 = s_cur.block(r + m4, 0, rest_rows, r);
  SvdResult g = svd(s31);
  out.n5 = rank_tol(s31, tol, s_cur.norm());
  if (rest_rows > 0)
    v.rightCols(rest_rows) = v.rightCols(rest_rows) * g.u;

  out.v = v;
  out.w = w;

  Matrix p_tr = v.transpose() * p * w;
  Matrix s_tr = v.transpose() * s * w;

  // Pattern: free blocks copied from the transform, structural zeros imposed.
  out.p_form = Matrix::Zero(n, m);
  out.p_form.topLeftCorner(out.m12, out.m12) = p_tr.topLeftCorner(out.m12, out.m12);
  out.p_form.block(out.m12, 0, out.m3, out.m12) =
      p_tr.block(out.m12, 0, out.m3, out.m12);
  out.p_form.block(out.m12, out.m12, out.m3, out.m3) =
      p_tr.block(out.m12, out.m12, out.m3, out.m3);
  out.s_form = Matrix::Zero(n, m);
  out.s_form.topLeftCorner(out.m12, out.m12) = s_tr.topLeftCorner(out.m12, out.m12);
  out.s_form.block(r, 0, m4, r + m4) = s_tr.block(r, 0, m4, r + m4);
  if (out.n5 > 0)
    out.s_form.block(r + m4, 0, out.n5, r) = s_tr.block(r + m4, 0, out.n5, r);

  out.residual_p = pattern_residual(p_tr, out.p_form);
  out.residual_s = pattern_residual(s_tr, out.s_form);
  return out;
}

namespace {

// Shared steps 1-2 of the Dirac condensation (orthogonal):
//   U^T K V = [[Kd, 0, 0], [0,0,0], [0,0,0]]
//   U^T L V = [[L11, L12, L13], [0, L22d, 0], [0, 0, 0]]
// row blocks (r, l4, l-r-l4), column blocks (r, l4, n-r-l4).
struct DiracStage2 {
  Matrix u, v;  // orthogonal
  Matrix k_cur, l_cur;
  Index r = 0, l4 = 0;
};

DiracStage2 dirac_stage2(const Matrix& k, const Matrix& l,
                         const TolerancePolicy& tol, double scale_floor = 0.0) {
  const Index rows = k.rows(), n = k.cols();
  DiracStage2 st;
  SvdResult sk = svd(k);
  st.r = rank_tol(k, tol, std::max(scale_floor, k.norm()));
  st.u = sk.u;
  st.v = sk.v;
  st.k_cur = st.u.transpose() * k * st.v;
  st.l_cur = st.u.transpose() * l * st.v;

  const Index lr = rows - st.r, nr = n - st.r;
  Matrix l22 = st.l_cur.block(st.r, st.r, lr, nr);
  SvdResult s2 = svd(l22);
  st.l4 = rank_tol(l22, tol, std::max(scale_floor, st.l_cur.norm()));
  if (lr > 0) st.u.rightCols(lr) = st.u.rightCols(lr) * s2.u;
  if (nr > 0) st.v.rightCols(nr) = st.v.rightCols(nr) * s2.v;
  st.k_cur = st.u.transpose() * k * st.v;
  st.l_cur = st.u.transpose() * l * st.v;
  return st;
}

}  // namespace

DiracCondensed dirac_condense(const DiracPair& pair, const TolerancePolicy& tol) {
  const Matrix& k = pair.k;
  const Matrix& l = pair.l;
  {
    ValidationReport rep;
    rep.kind = SystemKind::Dirac;
    const double thresh =
        tol.structure_threshold(std::max(1.0, k.norm() * std::max(1.0, l.norm())));
    rep.add("K L^T + L K^T = 0",
            (k * l.transpose() + l * k.transpose()).norm(), thresh);
    require_valid(rep, Errc::NotDirac);
  }
  const Index rows = k.rows(), n = k.cols();

  DiracCondensed out;
  DiracStage2 st = dirac_stage2(k, l, tol);
  const Index r = st.r, l4 = st.l4;
  out.l4 = l4;

  Matrix u = st.u, v = st.v;

  // Step 3: clear L12 by a row update and scale K11, L22 to identities.
  Vector kd = st.k_cur.diagonal().head(r);
  Vector l22d = st.l_cur.block(r, r, l4, l4).diagonal();
  warn_condition(out.warnings, "dirac step 3 (K11)", kd);
  warn_condition(out.warnings, "dirac step 3 (L22)", l22d);
  Matrix l12 = st.l_cur.block(0, r, r, l4);

  // U3^T = [[I, -L12 L22^{-1}, 0], [0, L22^{-1}, 0], [0, 0, I]]
  Matrix u3t = Matrix::Identity(rows, rows);
  if (r > 0 && l4 > 0)
    u3t.block(0, r, r, l4) = -l12 * l22d.cwiseInverse().asDiagonal();
  for (Index i = 0; i < l4; ++i) u3t(r + i, r + i) = 1.0 / l22d(i);
  Matrix v3 = Matrix::Identity(n, n);
  for (Index i = 0; i < r; ++i) v3(i, i) = 1.0 / kd(i);

  u = st.u * u3t.transpose();
  v = v * v3;

  Matrix l_cur = u.transpose() * l * v.partialPivLu().inverse().transpose();

  // Step 4: skew canonical form of L11 and column compression of L13.
  Matrix core = skew_part(l_cur.topLeftCorner(r, r));
  SkewCanonicalForm skc = skew_congruence_canonical(core, tol, l_cur.norm());
  out.l1 = skc.pairs;
  out.l3 = r - 2 * skc.pairs;
  warn_condition_mat(out.warnings, "dirac step 4 (skew form)", skc.t);

  const Index rest_cols = n - r - l4;
  Matrix l13 = skc.t.transpose() * l_cur.block(0, r + l4, r, rest_cols);
  SvdResult gs = svd(l13);
  out.n5 = rank_tol(l13, tol, l_cur.norm() * std::max(1.0, skc.t.norm()));
  Matrix stack = gs.u.leftCols(out.n5);  // orthonormal columns [L15; L25; L35]

  // v4 for the trailing columns: (V4)^{-T} = [Br Sigma_r^{-1}, Bperp]
  // so that L13 * that = [stack, 0]; hence V4 = [Br Sigma_r, Bperp] block.
  Matrix v4rest = Matrix::Identity(rest_cols, rest_cols);
  if (rest_cols > 0) {
    Matrix m(rest_cols, rest_cols);
    if (out.n5 > 0)
      m.leftCols(out.n5) = gs.v.leftCols(out.n5) * gs.sigma.head(out.n5).asDiagonal();
    if (rest_cols - out.n5 > 0)
      m.rightCols(rest_cols - out.n5) = gs.v.rightCols(rest_cols - out.n5);
    v4rest = m;
  }

  Matrix u4 = Matrix::Identity(rows, rows);
  u4.topLeftCorner(r, r) = skc.t;
  Matrix v4 = Matrix::Identity(n, n);
  v4.topLeftCorner(r, r) =
      skc.t.transpose().partialPivLu().solve(Matrix::Identity(r, r));
  if (rest_cols > 0) v4.bottomRightCorner(rest_cols, rest_cols) = v4rest;

  out.u = u * u4;
  out.v = v * v4;

  const Index l1 = out.l1, l3 = out.l3, n5 = out.n5;
  out.k_form = Matrix::Zero(rows, n);
  out.k_form.topLeftCorner(r, r) = Matrix::Identity(r, r);
  out.l_form = Matrix::Zero(rows, n);
  out.l_form.block(0, l1, l1, l1) = Matrix::Identity(l1, l1);
  out.l_form.block(l1, 0, l1, l1) = -Matrix::Identity(l1, l1);
  out.l_form.block(r, r, l4, l4) = Matrix::Identity(l4, l4);
  if (n5 > 0) out.l_form.block(0, r + l4, r, n5) = stack;
  (void)l3;

  Matrix vinv_t = out.v.partialPivLu().inverse().transpose();
  out.residual_k = pattern_residual(out.u.transpose() * k * out.v, out.k_form);
  out.residual_l = pattern_residual(out.u.transpose() * l * vinv_t, out.l_form);
  return out;
}

DiracStaircase dirac_staircase_orth(const DiracPair& pair,
                                    const TolerancePolicy& tol) {
  const Matrix& k = pair.k;
  const Matrix& l = pair.l;
  {
    ValidationReport rep;
    rep.kind = SystemKind::Dirac;
    const double thresh =
        tol.structure_threshold(std::max(1.0, k.norm() * std::max(1.0, l.norm())));
    rep.add("K L^T + L K^T = 0",
            (k * l.transpose() + l * k.transpose()).norm(), thresh);
    require_valid(rep, Errc::NotDirac);
  }
  const Index rows = k.rows(), n = k.cols();

  DiracStaircase out;
  DiracStage2 st = dirac_stage2(k, l, tol);
  const Index r = st.r, l4 = st.l4;
  out.l4 = l4;

  Matrix u = st.u, v = st.v;

  Matrix l11 = st.l_cur.topLeftCorner(r, r);
  SvdResult s3 = svd(l11);
  Index twol1 = rank_tol(l11, tol, st.l_cur.norm());
  if (twol1 % 2 != 0) {
    out.warnings.push_back(
        "odd numerical rank of the L11 core; flooring to an even pair count");
    twol1 -= 1;
  }
  out.l1 = twol1 / 2;
  out.l3 = r - twol1;
  if (r > 0) {
    u.leftCols(r) = u.leftCols(r) * s3.u;
    v.leftCols(r) = v.leftCols(r) * s3.v;
  }

  // Column-compress L13 orthogonally.
  const Index rest_cols = n - r - l4;
  Matrix l_cur = u.transpose() * l * v;
  Matrix l13 = l_cur.block(0, r + l4, r, rest_cols);
  SvdResult g = svd(l13);
  out.n5 = rank_tol(l13, tol, l_cur.norm());
  if (rest_cols > 0) v.rightCols(rest_cols) = v.rightCols(rest_cols) * g.v;

  out.u = u;
  out.v = v;

  Matrix k_tr = u.transpose() * k * v;
  Matrix l_tr = u.transpose() * l * v;

  const Index t = twol1;
  out.k_form = Matrix::Zero(rows, n);
  out.k_form.topLeftCorner(t, t) = k_tr.topLeftCorner(t, t);
  out.k_form.block(0, t, t, out.l3) = k_tr.block(0, t, t, out.l3);
  out.k_form.block(t, t, out.l3, out.l3) = k_tr.block(t, t, out.l3, out.l3);
  out.l_form = Matrix::Zero(rows, n);
  out.l_form.topLeftCorner(t, t) = l_tr.topLeftCorner(t, t);
  out.l_form.block(0, r, r, l4) = l_tr.block(0, r, r, l4);
  out.l_form.block(r, r, l4, l4) = l_tr.block(r, r, l4, l4);
  if (out.n5 > 0)
    out.l_form.block(0, r + l4, r, out.n5) = l_tr.block(0, r + l4, r, out.n5);

  out.residual_k = pattern_residual(k_tr, out.k_form);
  out.residual_l = pattern_residual(l_tr, out.l_form);
  return out;
}

ExtendedCondensed extended_condense(const ExtendedHDAE& sys,
                                    ExtendedVariant variant,
                                    const TolerancePolicy& tol) {
  require_valid(validate(sys, tol), Errc::NotStructured);
  const Index n = sys.k.rows();

  ExtendedCondensed out;
  out.variant = variant;

  if (variant == ExtendedVariant::LagrangeFirst) {
    LagrangeCondensed lc = lagrange_condense({sys.p, sys.s}, tol);
    const Index n1 = lc.rank_p();
    const Index n2 = lc.m4;
    if (n1 + n2 != n || lc.n5 != 0)
      throw Error(Errc::NotRegular,
                  "pencil lambda*P - S is singular; lambda*KP - LS cannot be "
                  "regular");
    out.n1 = n1;
    out.n2 = n2;
    out.warnings = lc.warnings;

    Matrix v = lc.v, w = lc.w;
    Matrix vinv_t = v.partialPivLu().inverse().transpose();
    Matrix k_cur = sys.k * v;
    Matrix l_cur = sys.l * vinv_t;

    // [L12; L22] must have full column rank by regularity.
    Matrix b = l_cur.rightCols(n2);
    if (n2 > 0 && rank_tol(b, tol, l_cur.norm()) != n2)
      throw Error(Errc::NotRegular,
                  "trailing columns of L are rank deficient; pencil singular");
    Matrix x = n2 > 0 ? left_inverse_completion(b, tol) : Matrix::Identity(n, n);
    Matrix u_t = x;  // U^T
    k_cur = u_t * k_cur;
    l_cur = u_t * l_cur;

    // Clear L21 with V3 = [[I, L21^T], [0, I]]; P and S patterns survive with
    // the compensating column update W2 on the Lagrange side.
    Matrix l21 = l_cur.block(n1, 0, n2, n1);
    Matrix v3 = Matrix::Identity(n, n);
    if (n1 > 0 && n2 > 0) v3.block(0, n1, n1, n2) = l21.transpose();
    Matrix v3inv_t = Matrix::Identity(n, n);
    if (n1 > 0 && n2 > 0) v3inv_t.block(n1, 0, n2, n1) = -l21;

    k_cur = k_cur * v3;
    l_cur = l_cur * v3inv_t;

    Matrix s11 = lc.s_form.topLeftCorner(n1, n1);
    Matrix w2 = Matrix::Identity(n, n);
    if (n1 > 0 && n2 > 0) w2.block(n1, 0, n2, n1) = -l21 * s11;

    out.u = u_t.transpose();
    out.v = v * v3;
    out.w = w * w2;

    out.a_form = k_cur;  // K hat: full blocks
    out.b_form = Matrix::Identity(n, n);
    out.b_form.topLeftCorner(n1, n1) = l_cur.topLeftCorner(n1, n1);
    out.p_form = Matrix::Zero(n, n);
    out.p_form.topLeftCorner(n1, n1) = Matrix::Identity(n1, n1);
    out.s_form = Matrix::Identity(n, n);
    out.s_form.topLeftCorner(n1, n1) = s11;

    Matrix vinv_t2 = out.v.partialPivLu().inverse().transpose();
    out.residual_a =
        pattern_residual(out.u.transpose() * sys.k * out.v, out.a_form);
    out.residual_b =
        pattern_residual(out.u.transpose() * sys.l * vinv_t2, out.b_form);
    out.residual_p = pattern_residual(
        out.v.partialPivLu().solve(sys.p * out.w), out.p_form);
    out.residual_s =
        pattern_residual(out.v.transpose() * sys.s * out.w, out.s_form);
    return out;
  }

  if (variant == ExtendedVariant::DiracFirst) {
    DiracCondensed dc = dirac_condense({sys.k, sys.l}, tol);
    const Index n1 = dc.rank_k();
    const Index n2 = dc.l4;
    if (n1 + n2 != n || dc.n5 != 0)
      throw Error(Errc::NotRegular,
                  "pencil lambda*K - L is singular; lambda*KP - LS cannot be "
                  "regular");
    out.n1 = n1;
    out.n2 = n2;
    out.warnings = dc.warnings;

    Matrix u = dc.u, v = dc.v;
    Matrix p_cur = v.partialPivLu().solve(sys.p);
    Matrix s_cur = v.transpose() * sys.s;

    // [S21 S22] must have full row rank by regularity.
    Matrix bottom = s_cur.bottomRows(n2);
    if (n2 > 0 && rank_tol(bottom, tol, s_cur.norm()) != n2)
      throw Error(Errc::NotRegular,
                  "trailing rows of S are rank deficient; pencil singular");
    Matrix w2 =
        n2 > 0 ? right_inverse_completion(bottom, tol) : Matrix::Identity(n, n);
    p_cur = p_cur * w2;
    s_cur = s_cur * w2;

    // Clear S12 with V3 = [[I, 0], [-S12^T, I]]; L picks up L11*S12 in its
    // (1,2) block which the row update U3 removes again.
    Matrix s12 = s_cur.block(0, n1, n1, n2);
    Matrix v3 = Matrix::Identity(n, n);
    if (n1 > 0 && n2 > 0) v3.block(n1, 0, n2, n1) = -s12.transpose();
    Matrix l11 = dc.l_form.topLeftCorner(n1, n1);
    Matrix u3 = Matrix::Identity(n, n);
    if (n1 > 0 && n2 > 0) u3.block(n1, 0, n2, n1) = -(l11 * s12).transpose();

    out.u = u * u3;
    out.v = v * v3;
    out.w = w2;

    Matrix s11 = s_cur.topLeftCorner(n1, n1);
    out.a_form = Matrix::Zero(n, n);  // K hat
    out.a_form.topLeftCorner(n1, n1) = Matrix::Identity(n1, n1);
    out.b_form = Matrix::Identity(n, n);  // L hat
    out.b_form.topLeftCorner(n1, n1) = l11;
    out.p_form = out.v.partialPivLu().solve(sys.p * out.w);
    out.s_form = Matrix::Identity(n, n);
    out.s_form.topLeftCorner(n1, n1) = s11;

    Matrix vinv_t = out.v.partialPivLu().inverse().transpose();
    out.residual_a =
        pattern_residual(out.u.transpose() * sys.k * out.v, out.a_form);
    out.residual_b =
        pattern_residual(out.u.transpose() * sys.l * vinv_t, out.b_form);
    out.residual_p = 0.0;  // P hat carries no structural zeros here
    out.residual_s =
        pattern_residual(out.v.transpose() * sys.s * out.w, out.s_form);
    return out;
  }

  throw Error(Errc::InvalidInput,
              "use monotone_condense for the monotone variant");
}

ExtendedCondensed monotone_condense(const MonotoneAnnihilatorSystem& sys,
                                    const TolerancePolicy& tol) {
  ValidationReport rep = validate(sys, tol);
  require_valid(rep, Errc::NotAnnihilator);
  const Index n = sys.c.rows();

  // Recover a generating monotone pair from ker [C D].
  Matrix z = right_nullspace(hstack(sys.c, sys.d), tol);
  if (z.cols() != n)
    throw Error(Errc::NotAnnihilator, "[C D] is not a maximal annihilator");
  Matrix nmat = z.topRows(n).transpose();     // N
  Matrix mmat = z.bottomRows(n).transpose();  // M

  ExtendedCondensed out;
  out.variant = ExtendedVariant::Monotone;

  // Condense (N, M) like (K, L) with steps 1-3 only. The pair transforms as
  // N -> H^T N Theta, M -> H^T M Theta^{-T}; the state transform is
  // V = Theta^{-T}. Both blocks were cut from the orthonormal kernel basis,
  // so rank decisions are floored by its scale.
  DiracStage2 st = dirac_stage2(nmat, mmat, tol, z.norm());
  const Index n1 = st.r;
  const Index n2 = st.l4;
  if (n1 + n2 != n)
    throw Error(Errc::NotAnnihilator,
                "generating pair is not maximal: rank [N M] < n");
  out.n1 = n1;
  out.n2 = n2;

  Vector nd = st.k_cur.diagonal().head(n1);
  Vector m22d = st.l_cur.block(n1, n1, n2, n2).diagonal();
  warn_condition(out.warnings, "monotone step 3 (N11)", nd);
  warn_condition(out.warnings, "monotone step 3 (M22)", m22d);
  Matrix m12 = st.l_cur.block(0, n1, n1, n2);

  Matrix h3t = Matrix::Identity(n, n);
  if (n1 > 0 && n2 > 0)
    h3t.block(0, n1, n1, n2) = -m12 * m22d.cwiseInverse().asDiagonal();
  for (Index i = 0; i < n2; ++i) h3t(n1 + i, n1 + i) = 1.0 / m22d(i);
  Matrix theta3 = Matrix::Identity(n, n);
  for (Index i = 0; i < n1; ++i) theta3(i, i) = 1.0 / nd(i);

  Matrix theta = st.v * theta3;
  Matrix h_t = h3t * st.u.transpose();

  Matrix n_hat = h_t * nmat * theta;
  Matrix theta_inv_t = theta.partialPivLu().inverse().transpose();
  Matrix m_hat = h_t * mmat * theta_inv_t;
  Matrix m11 = m_hat.topLeftCorner(n1, n1);

  // Canonical annihilator of the transformed pair.
  Matrix c_hat = Matrix::Identity(n, n);
  c_hat.topLeftCorner(n1, n1) = -m11.transpose();
  Matrix d_hat = Matrix::Zero(n, n);
  d_hat.topLeftCorner(n1, n1) = Matrix::Identity(n1, n1);

  // State transform and Lagrange side.
  Matrix v = theta_inv_t;
  Matrix p_cur = v.partialPivLu().solve(sys.p);
  Matrix s_cur = v.transpose() * sys.s;

  Matrix bottom = p_cur.bottomRows(n2);
  if (n2 > 0 && rank_tol(bottom, tol, p_cur.norm()) != n2)
    throw Error(Errc::NotRegular,
                "trailing rows of P are rank deficient; pencil singular");
  Matrix w =
      n2 > 0 ? right_inverse_completion(bottom, tol) : Matrix::Identity(n, n);
  p_cur = p_cur * w;
  s_cur = s_cur * w;

  out.v = v;
  out.w = w;

  // U relates the input annihilator to the canonical one:
  // U^T [C V, D V^{-T}] = [C hat, D hat].
  Matrix vinv_t = theta;  // (theta^{-T})^{-T} = theta
  Matrix lhs = hstack(sys.c * v, sys.d * vinv_t);
  Matrix rhs = hstack(c_hat, d_hat);
  // lhs has full row rank n; solve U^T = rhs * lhs^+ via normal equations.
  Matrix gram = lhs * lhs.transpose();
  Matrix u_t = gram.ldlt().solve(lhs * rhs.transpose()).transpose();
  out.u = u_t.transpose();

  out.a_form = c_hat;
  out.b_form = d_hat;
  out.p_form = Matrix::Zero(n, n);
  out.p_form.topLeftCorner(n1, n1) = p_cur.topLeftCorner(n1, n1);
  out.p_form.block(0, n1, n1, n2) = p_cur.block(0, n1, n1, n2);
  out.p_form.bottomRightCorner(n2, n2) = Matrix::Identity(n2, n2);
  out.s_form = s_cur;

  out.residual_a = pattern_residual(u_t * sys.c * v, c_hat);
  out.residual_b = pattern_residual(u_t * sys.d * vinv_t, d_hat);
  out.residual_p = pattern_residual(p_cur, out.p_form);
  out.residual_s = 0.0;  // S hat carries no structural zeros
  return out;
}

ReducedSystem extract_reduced(const ExtendedCondensed& cond) {
  ReducedSystem out;
  out.variant = cond.variant;
  const Index n1 = cond.n1, n2 = cond.n2;
  switch (cond.variant) {
    case ExtendedVariant::LagrangeFirst:
      out.k = cond.a_form.topLeftCorner(n1, n1);
      out.l = cond.b_form.topLeftCorner(n1, n1);
      out.p = Matrix::Identity(n1, n1);
      out.s = cond.s_form.topLeftCorner(n1, n1);
      out.constraint = cond.a_form.block(n1, 0, n2, n1);  // K21
      out.constraint_kind = "z2 = K21 * zdot1";
      break;
    case ExtendedVariant::DiracFirst:
      out.k = Matrix::Identity(n1, n1);
      out.l = cond.b_form.topLeftCorner(n1, n1);
      out.p = cond.p_form.topLeftCorner(n1, n1);
      out.s = cond.s_form.topLeftCorner(n1, n1);
      out.constraint = Matrix(0, 0);
      out.constraint_kind = "z2 = 0";
      break;
    case ExtendedVariant::Monotone:
      out.k = cond.a_form.topLeftCorner(n1, n1);  // C11
      out.l = Matrix::Identity(n1, n1);           // D bar
      out.p = cond.p_form.topLeftCorner(n1, n1);
      out.s = cond.s_form.topLeftCorner(n1, n1);
      out.constraint = cond.s_form.block(0, n1, n1, n2);  // forcing S12
      out.constraint_kind = "zdot2 = 0";
      break;
  }
  return out;
}

}  // namespace phdae
