#include "phdae/convert.hpp"

#include <cmath>

#include "phdae/condense.hpp"
#include "phdae/numkernel.hpp"

namespace phdae {

namespace {

void require_invertible(const Matrix& m, const char* name, Errc errc,
                        const TolerancePolicy& tol) {
  if (m.rows() != m.cols() || rank_tol(m, tol, m.norm()) != m.rows())
    throw Error(errc, std::string(name) + " is singular");
}

Matrix inv(const Matrix& m) { return m.partialPivLu().inverse(); }

}  // namespace

bool same_system_row_space(const ImplicitSystem& lhs, const ImplicitSystem& rhs,
                           const TolerancePolicy& tol) {
  if (lhs.e.cols() != rhs.e.cols() || lhs.a.cols() != rhs.a.cols()) return false;
  Matrix l = hstack(lhs.e, lhs.a);
  Matrix r = hstack(rhs.e, rhs.a);
  const double scale = std::max(l.norm(), r.norm());
  if (scale == 0.0) return true;
  Index rl = rank_tol(l, tol);
  Index rr = rank_tol(r, tol);
  return rl == rr && rank_tol(vstack(l, r), tol) == rl;
}

XRepresentation to_x_representation(const ExtendedHDAE& sys,
                                    const TolerancePolicy& tol) {
  require_valid(validate(sys, tol), Errc::NotStructured);
  const Index n = sys.k.rows();
  Matrix stacked = vstack(sys.l, -sys.p.transpose());  // 2n x n
  Matrix ann = left_annihilator(stacked, tol);
  XRepresentation out;
  out.m = ann.leftCols(n);
  out.n = ann.rightCols(n);
  out.system.e = out.m * sys.k;
  out.system.a = out.n * sys.s.transpose();
  return out;
}

KLQForm to_klq(const ExtendedHDAE& sys, const TolerancePolicy& tol) {
  require_valid(validate(sys, tol), Errc::NotStructured);
  require_invertible(sys.p, "P", Errc::SingularP, tol);
  KLQForm out;
  out.k = sys.k;
  out.l = sys.l;
  out.q = sys.s * inv(sys.p);
  return out;
}

PoissonForm to_poisson(const ExtendedHDAE& sys, const TolerancePolicy& tol) {
  require_valid(validate(sys, tol), Errc::NotStructured);
  require_invertible(sys.k, "K", Errc::SingularK, tol);
  require_invertible(sys.p, "P", Errc::SingularP, tol);
  PoissonForm out;
  out.j = inv(sys.k) * sys.l;
  out.q = sys.s * inv(sys.p);
  return out;
}

GradientForm to_gradient(const ExtendedHDAE& sys, const TolerancePolicy& tol) {
  require_valid(validate(sys, tol), Errc::NotStructured);
  require_invertible(sys.l, "L", Errc::SingularL, tol);
  GradientForm out;
  out.j = inv(sys.l) * sys.k;  // skew
  out.system.e = sys.p.transpose() * out.j;
  out.system.a = sys.s.transpose();
  return out;
}

SymplecticForm to_symplectic(const ExtendedHDAE& sys,
                             const TolerancePolicy& tol) {
  require_valid(validate(sys, tol), Errc::NotStructured);
  require_invertible(sys.l, "L", Errc::SingularL, tol);
  require_invertible(sys.p, "P", Errc::SingularP, tol);
  SymplecticForm out;
  out.j = inv(sys.l) * sys.k;
  out.q = sys.s * inv(sys.p);
  return out;
}

ImplicitSystem adjoint(const ExtendedHDAE& sys) {
  return {sys.p.transpose() * sys.k.transpose(),
          sys.s.transpose() * sys.l.transpose()};
}

MonotoneAnnihilatorSystem dh_to_monotone(const DHSystem& dh,
                                         const TolerancePolicy& tol) {
  require_valid(validate(dh, tol), Errc::NotStructured);
  if (dh.e.rows() != dh.e.cols())
    throw Error(Errc::DimensionMismatch,
                "dh_to_monotone requires a square system");
  const Index n = dh.e.rows();
  MonotoneAnnihilatorSystem out;
  out.c = Matrix::Identity(n, n);
  out.d = dh.j - dh.r;
  out.p = dh.e;
  out.s = dh.q;
  return out;
}

MultiplierSystem with_multipliers(const ExtendedHDAE& sys,
                                  const TolerancePolicy& tol) {
  require_valid(validate(sys, tol), Errc::NotStructured);
  LagrangeCondensed lc = lagrange_condense({sys.p, sys.s}, tol);
  const Index n = sys.k.rows();
  const Index n1 = lc.rank_p();
  const Index n2 = lc.m4;
  if (n1 + n2 != n || lc.n5 != 0)
    throw Error(Errc::NotRegular, "Lagrange pair is not maximal");

  Matrix k_t = sys.k * lc.v;
  Matrix l_t = sys.l * lc.v.partialPivLu().inverse().transpose();
  Matrix s11 = lc.s_form.topLeftCorner(n1, n1);

  MultiplierSystem out;
  out.n1 = n1;
  out.n2 = n2;
  out.v = lc.v;
  out.w = lc.w;

  const Index ext = n + n2;
  out.extended.e = Matrix::Zero(ext, ext);
  out.extended.e.block(0, 0, n, n) = k_t;
  out.extended.a = Matrix::Zero(ext, ext);
  out.extended.a.block(0, 0, n1, n1) = l_t.topLeftCorner(n1, n1) * s11;
  out.extended.a.block(n1, 0, n2, n1) = l_t.block(n1, 0, n2, n1) * s11;
  out.extended.a.block(0, n, n1, n2) = l_t.block(0, n1, n1, n2);
  out.extended.a.block(n1, n, n2, n2) = l_t.block(n1, n1, n2, n2);
  out.extended.a.block(n, n1, n2, n2) = Matrix::Identity(n2, n2);
  return out;
}

ImplicitSystem eliminate_variables(const ImplicitSystem& sys,
                                   Index first_eliminated, Index count,
                                   const TolerancePolicy& tol) {
  if (count == 0) return sys;
  Matrix e_cols = sys.e.middleCols(first_eliminated, count);
  if (e_cols.norm() > tol.structure_threshold(sys.e.norm()))
    throw Error(Errc::InvalidInput,
                "eliminate_variables: variables are not purely algebraic");
  Matrix ann = left_annihilator(sys.a.middleCols(first_eliminated, count), tol);
  const Index keep = sys.e.cols() - count;
  ImplicitSystem out;
  Matrix e_keep(sys.e.rows(), keep);
  Matrix a_keep(sys.a.rows(), keep);
  Index c = 0;
  for (Index j = 0; j < sys.e.cols(); ++j) {
    if (j >= first_eliminated && j < first_eliminated + count) continue;
    e_keep.col(c) = sys.e.col(j);
    a_keep.col(c) = sys.a.col(j);
    ++c;
  }
  out.e = ann * e_keep;
  out.a = ann * a_keep;
  return out;
}

PairedSubspace make_subspace(const Matrix& top, const Matrix& bottom,
                             const TolerancePolicy& tol, double scale_floor) {
  if (top.cols() != bottom.cols())
    throw Error(Errc::DimensionMismatch, "subspace blocks disagree on columns");
  Matrix stacked = vstack(top, bottom);
  Matrix basis = column_space(stacked, tol, scale_floor);
  PairedSubspace out;
  out.top = basis.topRows(top.rows());
  out.bottom = basis.bottomRows(bottom.rows());
  return out;
}

PairedSubspace subspace_of(const DiracPair& dp, const TolerancePolicy& tol) {
  // D = Img [L^T; K^T] as pairs (f, e)
  return make_subspace(dp.l.transpose(), dp.k.transpose(), tol);
}

PairedSubspace subspace_of(const LagrangePair& lp, const TolerancePolicy& tol) {
  // L as pairs (x, e) = (P z, S z)
  return make_subspace(lp.p, lp.s, tol);
}

PairedSubspace subspace_of(const MonotonePair& mp, const TolerancePolicy& tol) {
  // M = Img [N^T; M^T] as pairs (f, e)
  return make_subspace(mp.n.transpose(), mp.m.transpose(), tol);
}

Matrix kernel_representation(const PairedSubspace& sub,
                             const TolerancePolicy& tol) {
  return left_annihilator(vstack(sub.top, sub.bottom), tol);
}

MonotoneCertificate monotone_certificate(const PairedSubspace& sub) {
  MonotoneCertificate cert;
  cert.dim = sub.dim();
  if (sub.dim() == 0) return cert;
  Matrix pairing = sub.bottom.transpose() * sub.top;
  cert.pairing_min_eig = min_sym_eigenvalue(pairing + pairing.transpose()) / 2.0;
  return cert;
}

PairedSubspace compose_dirac_lagrange(const DiracPair& dp,
                                      const LagrangePair& lp,
                                      const TolerancePolicy& tol) {
  if (dp.k.cols() != lp.s.rows())
    throw Error(Errc::IncompatibleDimensions,
                "Dirac and Lagrange ambient dimensions differ");
  // (f, e) = (L^T v, K^T v), (x, e) = (P z, S z); shared effort K^T v = S z.
  Matrix coupling = hstack(dp.k.transpose(), -lp.s);
  Matrix ker = right_nullspace(coupling, tol);
  const Index nv = dp.k.rows();
  Matrix alpha = ker.topRows(nv);
  Matrix beta = ker.bottomRows(ker.rows() - nv);
  return make_subspace(dp.l.transpose() * alpha, lp.p * beta, tol,
                       std::max(dp.l.norm(), lp.p.norm()));
}

ImplicitSystem dynamics_of(const PairedSubspace& sub,
                           const TolerancePolicy& tol) {
  Matrix ann = kernel_representation(sub, tol);
  ImplicitSystem out;
  out.e = ann.leftCols(sub.flow_dim());
  out.a = ann.rightCols(sub.effort_dim());
  return out;
}

PairedSubspace compose_monotone(const PairedSubspace& a, const PairedSubspace& b,
                                Index shared_flows, Index shared_efforts,
                                const TolerancePolicy& tol) {
  if (a.flow_dim() < shared_flows || b.flow_dim() < shared_flows ||
      a.effort_dim() < shared_efforts || b.effort_dim() < shared_efforts)
    throw Error(Errc::IncompatibleDimensions, "shared blocks exceed ambient");
  const Index fa = a.flow_dim() - shared_flows;
  const Index fb = b.flow_dim() - shared_flows;
  const Index ea = a.effort_dim() - shared_efforts;
  const Index eb = b.effort_dim() - shared_efforts;

  Matrix a_shf = a.top.bottomRows(shared_flows);
  Matrix b_shf = b.top.bottomRows(shared_flows);
  Matrix a_she = a.bottom.bottomRows(shared_efforts);
  Matrix b_she = b.bottom.bottomRows(shared_efforts);

  // f_b-shared = -f_a-shared, e_b-shared = e_a-shared
  Matrix coupling(shared_flows + shared_efforts, a.dim() + b.dim());
  coupling.topRows(shared_flows) = hstack(a_shf, b_shf);
  coupling.bottomRows(shared_efforts) = hstack(a_she, -b_she);
  Matrix ker = right_nullspace(coupling, tol);
  Matrix alpha = ker.topRows(a.dim());
  Matrix beta = ker.bottomRows(b.dim());

  Matrix top = vstack(a.top.topRows(fa) * alpha, b.top.topRows(fb) * beta);
  Matrix bottom =
      vstack(a.bottom.topRows(ea) * alpha, b.bottom.topRows(eb) * beta);
  return make_subspace(top, bottom, tol, 1.0);
}

PairedSubspace pullback(const Matrix& a_map, const PairedSubspace& m,
                        const TolerancePolicy& tol) {
  if (a_map.rows() != m.flow_dim())
    throw Error(Errc::IncompatibleDimensions, "map codomain != subspace flows");
  // (f, A^T g): A f = top w, g = bottom w
  Matrix coupling = hstack(a_map, -m.top);
  Matrix ker = right_nullspace(coupling, tol);
  Matrix fv = ker.topRows(a_map.cols());
  Matrix wv = ker.bottomRows(m.dim());
  return make_subspace(fv, a_map.transpose() * (m.bottom * wv), tol,
                       std::max(1.0, a_map.norm()));
}

PairedSubspace pushforward(const Matrix& a_map, const PairedSubspace& m,
                           const TolerancePolicy& tol) {
  if (a_map.cols() != m.flow_dim())
    throw Error(Errc::IncompatibleDimensions, "map domain != subspace flows");
  // (A f, g): f = top w, A^T g = bottom w
  Matrix coupling = hstack(m.bottom, -a_map.transpose());
  Matrix ker = right_nullspace(coupling, tol);
  Matrix wv = ker.topRows(m.dim());
  Matrix gv = ker.bottomRows(a_map.rows());
  return make_subspace(a_map * (m.top * wv), gv, tol,
                       std::max(1.0, a_map.norm()));
}

}  // namespace phdae
