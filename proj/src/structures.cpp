#include "phdae/structures.hpp"

#include <cmath>

#include "phdae/numkernel.hpp"

namespace phdae {

const char* system_kind_name(SystemKind k) {
  switch (k) {
    case SystemKind::Lagrange: return "lagrange";
    case SystemKind::Dirac: return "dirac";
    case SystemKind::Monotone: return "monotone";
    case SystemKind::DH: return "dh";
    case SystemKind::Extended: return "extended";
    case SystemKind::MonotoneAnnihilator: return "monotone-annihilator";
  }
  return "unknown";
}

std::optional<SystemKind> parse_system_kind(const std::string& name) {
  if (name == "lagrange") return SystemKind::Lagrange;
  if (name == "dirac") return SystemKind::Dirac;
  if (name == "monotone") return SystemKind::Monotone;
  if (name == "dh") return SystemKind::DH;
  if (name == "extended") return SystemKind::Extended;
  if (name == "monotone-annihilator") return SystemKind::MonotoneAnnihilator;
  return std::nullopt;
}

std::vector<StructureCheck> ValidationReport::violations() const {
  std::vector<StructureCheck> out;
  for (const auto& c : checks)
    if (!c.ok) out.push_back(c);
  return out;
}

void ValidationReport::add(const std::string& name, double residual,
                           double threshold) {
  StructureCheck c{name, residual, threshold, residual <= threshold};
  valid = valid && c.ok;
  checks.push_back(std::move(c));
}

void ValidationReport::add_rank(const std::string& name, Index got, Index want) {
  StructureCheck c{name, static_cast<double>(want - got),
                   0.0, got == want};
  valid = valid && c.ok;
  checks.push_back(std::move(c));
}

namespace {

double pair_scale(const Matrix& a, const Matrix& b) {
  return std::max(1.0, a.norm() * std::max(1.0, b.norm()));
}

void check_lagrange_into(ValidationReport& rep, const Matrix& p, const Matrix& s,
                         const TolerancePolicy& tol, const std::string& prefix) {
  if (p.rows() != s.rows() || p.cols() != s.cols())
    throw Error(Errc::DimensionMismatch, "Lagrange pair: P and S sizes differ");
  const double thresh = tol.structure_threshold(pair_scale(p, s));
  rep.add(prefix + "P^T S symmetric",
          (p.transpose() * s - s.transpose() * p).norm(), thresh);
  if (p.rows() == p.cols()) {
    Matrix stacked = vstack(p, s);
    rep.add_rank(prefix + "rank [P; S] = n",
                 rank_tol(stacked, tol, stacked.norm()), p.cols());
  }
}

void check_dirac_into(ValidationReport& rep, const Matrix& k, const Matrix& l,
                      const TolerancePolicy& tol, const std::string& prefix) {
  if (k.rows() != l.rows() || k.cols() != l.cols())
    throw Error(Errc::DimensionMismatch, "Dirac pair: K and L sizes differ");
  const double thresh = tol.structure_threshold(pair_scale(k, l));
  rep.add(prefix + "K L^T + L K^T = 0",
          (k * l.transpose() + l * k.transpose()).norm(), thresh);
  if (k.rows() == k.cols()) {
    Matrix wide = hstack(k, l);
    rep.add_rank(prefix + "rank [K, L] = n",
                 rank_tol(wide, tol, wide.norm()), k.rows());
  }
}

}  // namespace

ValidationReport validate(const LagrangePair& lp, const TolerancePolicy& tol) {
  require_finite(lp.p, "P");
  require_finite(lp.s, "S");
  ValidationReport rep;
  rep.kind = SystemKind::Lagrange;
  check_lagrange_into(rep, lp.p, lp.s, tol, "");
  const double nonneg =
      min_sym_eigenvalue(lp.s.transpose() * lp.p);
  rep.attributes.emplace_back(
      "nonnegative", nonneg >= -tol.structure_threshold(pair_scale(lp.p, lp.s)));
  return rep;
}

ValidationReport validate(const DiracPair& dp, const TolerancePolicy& tol) {
  require_finite(dp.k, "K");
  require_finite(dp.l, "L");
  ValidationReport rep;
  rep.kind = SystemKind::Dirac;
  check_dirac_into(rep, dp.k, dp.l, tol, "");
  return rep;
}

ValidationReport validate(const MonotonePair& mp, const TolerancePolicy& tol) {
  require_finite(mp.m, "M");
  require_finite(mp.n, "N");
  if (mp.m.rows() != mp.m.cols() || mp.n.rows() != mp.n.cols() ||
      mp.m.rows() != mp.n.rows())
    throw Error(Errc::DimensionMismatch, "monotone pair must be square n x n");
  ValidationReport rep;
  rep.kind = SystemKind::Monotone;
  const double thresh = tol.structure_threshold(pair_scale(mp.m, mp.n));
  const double mineig =
      min_sym_eigenvalue(mp.m * mp.n.transpose() + mp.n * mp.m.transpose());
  rep.add("M N^T + N M^T PSD", std::max(0.0, -mineig), thresh);
  Matrix nm = hstack(mp.n, mp.m);
  rep.add_rank("rank [N, M] = n", rank_tol(nm, tol, nm.norm()), mp.m.rows());
  return rep;
}

ValidationReport validate(const DHSystem& dh, const TolerancePolicy& tol) {
  require_finite(dh.e, "E");
  require_finite(dh.j, "J");
  require_finite(dh.r, "R");
  require_finite(dh.q, "Q");
  const Index l = dh.e.rows(), n = dh.e.cols();
  if (dh.q.rows() != l || dh.q.cols() != n || dh.j.rows() != l ||
      dh.j.cols() != l || dh.r.rows() != l || dh.r.cols() != l)
    throw Error(Errc::DimensionMismatch,
                "dh system: E,Q must be l x n and J,R must be l x l");
  ValidationReport rep;
  rep.kind = SystemKind::DH;
  rep.add("J skew-symmetric", skew_residual(dh.j),
          tol.structure_threshold(dh.j.norm()));
  rep.add("R symmetric", sym_residual(dh.r),
          tol.structure_threshold(dh.r.norm()));
  rep.add("R PSD", std::max(0.0, -min_sym_eigenvalue(dh.r)),
          tol.structure_threshold(dh.r.norm()));
  rep.add("E^T Q symmetric",
          (dh.e.transpose() * dh.q - dh.q.transpose() * dh.e).norm(),
          tol.structure_threshold(pair_scale(dh.e, dh.q)));
  return rep;
}

ValidationReport validate(const ExtendedHDAE& sys, const TolerancePolicy& tol) {
  require_finite(sys.k, "K");
  require_finite(sys.l, "L");
  require_finite(sys.p, "P");
  require_finite(sys.s, "S");
  const Index n = sys.k.rows();
  if (sys.k.cols() != n || sys.l.rows() != n || sys.l.cols() != n ||
      sys.p.rows() != n || sys.p.cols() != n || sys.s.rows() != n ||
      sys.s.cols() != n)
    throw Error(Errc::DimensionMismatch, "extended system: all blocks n x n");
  ValidationReport rep;
  rep.kind = SystemKind::Extended;
  check_dirac_into(rep, sys.k, sys.l, tol, "");
  check_lagrange_into(rep, sys.p, sys.s, tol, "");
  return rep;
}

ValidationReport validate(const MonotoneAnnihilatorSystem& sys,
                          const TolerancePolicy& tol) {
  require_finite(sys.c, "C");
  require_finite(sys.d, "D");
  require_finite(sys.p, "P");
  require_finite(sys.s, "S");
  const Index n = sys.c.rows();
  if (sys.c.cols() != n || sys.d.rows() != n || sys.d.cols() != n ||
      sys.p.rows() != n || sys.p.cols() != n || sys.s.rows() != n ||
      sys.s.cols() != n)
    throw Error(Errc::DimensionMismatch,
                "monotone-annihilator system: all blocks n x n");
  ValidationReport rep;
  rep.kind = SystemKind::MonotoneAnnihilator;
  Matrix cd = hstack(sys.c, sys.d);
  rep.add_rank("rank [C, D] = n", rank_tol(cd, tol, cd.norm()), n);
  // ker [C D] must be the image of a monotone pair: the pairing e^T f is
  // PSD on the kernel.
  Matrix z = right_nullspace(hstack(sys.c, sys.d), tol);
  if (z.cols() == n) {
    Matrix f = z.topRows(n);
    Matrix e = z.bottomRows(n);
    const double mineig =
        min_sym_eigenvalue(e.transpose() * f + f.transpose() * e);
    rep.add("kernel pairing PSD", std::max(0.0, -mineig),
            tol.structure_threshold(1.0));
  }
  check_lagrange_into(rep, sys.p, sys.s, tol, "");
  return rep;
}

void require_valid(const ValidationReport& report, Errc errc) {
  if (report.valid) return;
  std::string msg = std::string(system_kind_name(report.kind)) +
                    " structure invalid:";
  for (const auto& v : report.violations()) msg += " [" + v.name + "]";
  throw Error(errc, msg);
}

SymSkewSplit split_sym_skew(const Matrix& r) {
  if (r.rows() != r.cols())
    throw Error(Errc::DimensionMismatch, "split_sym_skew: square input required");
  return {skew_part(r), sym_part(r)};
}

namespace {

double hamiltonian_ps(const Matrix& p, const Matrix& s, const Vector& v,
                      Frame frame, const TolerancePolicy& tol) {
  switch (frame) {
    case Frame::Z: {
      if (v.size() != p.cols())
        throw Error(Errc::DimensionMismatch, "hamiltonian: z has wrong length");
      return 0.5 * v.dot(s.transpose() * (p * v));
    }
    case Frame::X: {
      if (p.rows() != p.cols() || rank_tol(p, tol) != p.rows())
        throw Error(Errc::SingularFrame, "frame x requires invertible P");
      if (v.size() != p.rows())
        throw Error(Errc::DimensionMismatch, "hamiltonian: x has wrong length");
      Vector z = p.partialPivLu().solve(v);
      return 0.5 * v.dot(s * z);
    }
    case Frame::E: {
      if (s.rows() != s.cols() || rank_tol(s, tol) != s.rows())
        throw Error(Errc::SingularFrame, "frame e requires invertible S");
      if (v.size() != s.rows())
        throw Error(Errc::DimensionMismatch, "hamiltonian: e has wrong length");
      Vector z = s.partialPivLu().solve(v);
      return 0.5 * v.dot(p * z);
    }
  }
  throw Error(Errc::InvalidInput, "unknown frame");
}

}  // namespace

double hamiltonian(const LagrangePair& lp, const Vector& v, Frame frame,
                   const TolerancePolicy& tol) {
  return hamiltonian_ps(lp.p, lp.s, v, frame, tol);
}

double hamiltonian(const DHSystem& dh, const Vector& v, Frame frame,
                   const TolerancePolicy& tol) {
  return hamiltonian_ps(dh.e, dh.q, v, frame, tol);
}

double hamiltonian(const ExtendedHDAE& sys, const Vector& v, Frame frame,
                   const TolerancePolicy& tol) {
  return hamiltonian_ps(sys.p, sys.s, v, frame, tol);
}

double energy_rate(const DHSystem& dh, const Vector& z) {
  if (z.size() != dh.q.cols())
    throw Error(Errc::DimensionMismatch, "energy_rate: z has wrong length");
  Vector qz = dh.q * z;
  return -qz.dot(dh.r * qz);
}

}  // namespace phdae
