#include "phdae/models.hpp"

#include <cmath>

#include "phdae/numkernel.hpp"

namespace phdae {

namespace {

double param(const std::map<std::string, double>& params, const std::string& key,
             double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Index iparam(const std::map<std::string, double>& params, const std::string& key,
             Index fallback) {
  const double v = param(params, key, static_cast<double>(fallback));
  if (v < 0 || v != std::floor(v))
    throw Error(Errc::InvalidParameters, key + " must be a nonnegative integer");
  return static_cast<Index>(v);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0))
    throw Error(Errc::InvalidParameters,
                std::string(name) + " must be strictly positive");
}

Matrix msd_structure() {
  Matrix j(2, 2);
  j << 0, 1, -1, 0;
  return j;
}

Model build_msd(const std::map<std::string, double>& params) {
  const double m = param(params, "m", 1.0);
  const double k = param(params, "k", 1.0);
  const double d = param(params, "d", 1.0);
  const Index limit = iparam(params, "limit", 0);
  if (d < 0.0) throw Error(Errc::InvalidParameters, "d must be nonnegative");

  Model out;
  out.kind = "msd";
  DHSystem dh;
  dh.j = msd_structure();
  dh.r = Matrix::Zero(2, 2);
  dh.r(1, 1) = d;
  switch (limit) {
    case 0:  // coordinates (q, p)
      require_positive(m, "m");
      require_positive(k, "k");
      dh.e = Matrix::Identity(2, 2);
      dh.q = Vector{{k, 1.0 / m}}.asDiagonal();
      out.facts.expected_index = 0;
      break;
    case 1:  // m -> 0, coordinates (q, v)
      require_positive(k, "k");
      dh.e = Vector{{1.0, 0.0}}.asDiagonal();
      dh.q = Vector{{k, 1.0}}.asDiagonal();
      out.facts.expected_index = d != 0.0 ? 1 : 2;
      out.facts.hamiltonian_free_vars = {1};
      out.facts.note = "mass-to-zero limit; H = k q^2 / 2";
      break;
    case 2:  // k -> inf, coordinates (F, p)
      require_positive(m, "m");
      dh.e = Vector{{0.0, 1.0}}.asDiagonal();
      dh.q = Vector{{1.0, 1.0 / m}}.asDiagonal();
      out.facts.expected_index = 2;
      out.facts.hamiltonian_free_vars = {0};
      out.facts.note = "stiffness-to-infinity limit; H = p^2 / (2m)";
      break;
    case 3:  // both limits, coordinates (F, v)
      dh.e = Matrix::Zero(2, 2);
      dh.q = Matrix::Identity(2, 2);
      out.facts.expected_index = 1;
      out.facts.hamiltonian_free_vars = {0, 1};
      out.facts.note = "both limits; zero Hamiltonian, single solution";
      break;
    default:
      throw Error(Errc::InvalidParameters, "limit must be one of 0,1,2,3");
  }
  out.dh = dh;
  return out;
}

Model build_two_mass(const std::map<std::string, double>& params) {
  const double m1 = param(params, "m1", 1.0);
  const double m2 = param(params, "m2", 2.0);
  require_positive(m1, "m1");
  require_positive(m2, "m2");
  const double msum = m1 + m2;

  Model out;
  out.kind = "two-mass";
  ExtendedHDAE sys;
  sys.p = Matrix::Zero(4, 4);
  sys.p << 0, 1, 0, 0,
           0, 1, 0, 0,
           0, 0, 1, m1 / msum,
           0, 0, -1, m2 / msum;
  sys.s = Matrix::Zero(4, 4);
  sys.s << 1, 0, 0, 0,
           -1, 0, 0, 0,
           0, 0, 1.0 / m1, 1.0 / msum,
           0, 0, -1.0 / m2, 1.0 / msum;
  sys.k = Matrix::Zero(4, 4);
  sys.k(0, 0) = 1;
  sys.k(1, 1) = 1;
  sys.k(2, 2) = 1;
  sys.l = Matrix::Zero(4, 4);
  sys.l(0, 2) = 1;
  sys.l(1, 3) = 1;
  sys.l(2, 0) = -1;
  sys.l(3, 3) = 1;
  out.extended = sys;
  out.facts.expected_index = 2;
  out.facts.hamiltonian_free_vars = {0, 1};
  out.facts.note =
      "rigid two-mass limit: Lagrange constraint z3 = 0, Dirac constraint "
      "z4 = 0; H = kinetic energy only";
  return out;
}

Model build_rlc(const std::map<std::string, double>& params) {
  const double c = param(params, "c", 1.0);
  const double l = param(params, "l", 1.0);
  const double g = param(params, "g", 1.0);
  require_positive(c, "c");
  require_positive(l, "l");
  require_positive(g, "g");

  // Two non-ground nodes; capacitor and source at node 1, conductor at
  // node 2, inductor between the nodes. State (V1, V2, I_L, I_S).
  Matrix dc(2, 1), dl(2, 1), dr(2, 1), ds(2, 1);
  dc << 1, 0;
  dl << 1, -1;
  dr << 0, 1;
  ds << 1, 0;

  Model out;
  out.kind = "rlc";
  DHSystem dh;
  dh.e = Matrix::Zero(4, 4);
  dh.e.topLeftCorner(2, 2) = dc * c * dc.transpose();
  dh.e(2, 2) = l;
  Matrix rhs = Matrix::Zero(4, 4);
  rhs.topLeftCorner(2, 2) = -dr * g * dr.transpose();
  rhs.block(0, 2, 2, 1) = -dl;
  rhs.block(0, 3, 2, 1) = -ds;
  rhs.block(2, 0, 1, 2) = dl.transpose();
  rhs.block(3, 0, 1, 2) = ds.transpose();
  dh.j = skew_part(rhs);
  dh.r = -sym_part(rhs);
  dh.q = Matrix::Identity(4, 4);
  out.dh = dh;
  out.facts.hamiltonian_free_vars = {3};  // source current
  out.facts.note = "H = V^T Dc C Dc^T V / 2 + I_L^T L I_L / 2";
  return out;
}

Model build_lc(const std::map<std::string, double>& params) {
  const double c1 = param(params, "c1", 1.0);
  const double c2 = param(params, "c2", 2.0);
  const double l = param(params, "l", 1.0);
  require_positive(c1, "c1");
  require_positive(c2, "c2");
  require_positive(l, "l");

  // One non-ground node, two capacitors in parallel plus one inductor:
  // K is singular because of the parallel capacitors.
  Matrix d(1, 3);
  d << 1, 1, 1;
  Matrix dc = d.leftCols(2);
  Matrix dl = d.rightCols(1);
  Matrix f = left_annihilator(d.transpose());  // 2 x 3, ker F = Img D^T
  Matrix fc = f.leftCols(2);
  Matrix fl = f.rightCols(1);

  Model out;
  out.kind = "lc";
  ExtendedHDAE sys;
  sys.k = Matrix::Zero(3, 3);
  sys.k.block(0, 0, 1, 2) = dc;
  sys.k.block(1, 2, 2, 1) = fl;
  sys.l = Matrix::Zero(3, 3);
  sys.l.block(0, 2, 1, 1) = dl;
  sys.l.block(1, 0, 2, 2) = fc;
  sys.p = Matrix::Identity(3, 3);
  sys.s = Vector{{1.0 / c1, 1.0 / c2, 1.0 / l}}.asDiagonal();
  out.extended = sys;
  out.facts.note =
      "LC loop with parallel capacitors; singular K from the interconnection";
  return out;
}

Model build_stokes(const std::map<std::string, double>& params) {
  const Index n = iparam(params, "n", 5);
  const double nu = param(params, "nu", 1.0);
  if (n < 2) throw Error(Errc::InvalidParameters, "n must be at least 2");
  require_positive(nu, "nu");
  const double h = 1.0 / static_cast<double>(n);

  const Index nv = n, np = n - 1;
  Matrix mass = h * Matrix::Identity(nv, nv);
  Matrix lap = Matrix::Zero(nv, nv);
  for (Index i = 0; i < nv; ++i) {
    lap(i, i) = 2.0;
    if (i > 0) lap(i, i - 1) = -1.0;
    if (i + 1 < nv) lap(i, i + 1) = -1.0;
  }
  lap *= nu / h;
  Matrix grad = Matrix::Zero(nv, np);
  for (Index j = 0; j < np; ++j) {
    grad(j, j) = -1.0 / h;
    grad(j + 1, j) = 1.0 / h;
  }

  Model out;
  out.kind = "stokes";
  DHSystem dh;
  const Index total = nv + np;
  dh.e = Matrix::Zero(total, total);
  dh.e.topLeftCorner(nv, nv) = mass;
  dh.j = Matrix::Zero(total, total);
  dh.j.block(0, nv, nv, np) = grad;
  dh.j.block(nv, 0, np, nv) = -grad.transpose();
  dh.r = Matrix::Zero(total, total);
  dh.r.topLeftCorner(nv, nv) = lap;
  dh.q = Matrix::Identity(total, total);
  out.dh = dh;
  for (Index j = 0; j < np; ++j) out.facts.hamiltonian_free_vars.push_back(nv + j);
  out.facts.expected_index = 2;
  out.facts.note = "semi-discrete Stokes; H excludes the pressure variables";
  return out;
}

Model build_gas(const std::map<std::string, double>& params) {
  const Index np = iparam(params, "np", 3);
  const Index nq = iparam(params, "nq", 3);
  const Index nl = iparam(params, "nl", 1);
  const double d = param(params, "d", 0.5);
  if (np < 1 || nq < 1) throw Error(Errc::InvalidParameters, "np, nq >= 1");
  if (d < 0.0) throw Error(Errc::InvalidParameters, "d must be nonnegative");
  const double h = 1.0 / static_cast<double>(std::max(np, nq));

  Matrix m1 = h * Matrix::Identity(np, np);
  Matrix m2 = h * Matrix::Identity(nq, nq);
  Matrix g = Matrix::Zero(np, nq);
  for (Index i = 0; i < np; ++i) {
    if (i < nq) g(i, i) = 1.0 / h;
    if (i + 1 < nq) g(i, i + 1) = -1.0 / h;
  }
  // Constraint coupling rows; the fixture uses nl uniform rows, the block
  // pattern is what matters.
  Matrix kmat = Matrix::Ones(nl, nq);

  Model out;
  out.kind = "gas";
  const Index total = np + nq + nl;
  DHSystem dh;
  dh.e = Matrix::Zero(total, total);
  dh.e.topLeftCorner(np, np) = m1;
  dh.e.block(np, np, nq, nq) = m2;
  dh.j = Matrix::Zero(total, total);
  dh.j.block(0, np, np, nq) = -g;
  dh.j.block(np, 0, nq, np) = g.transpose();
  dh.j.block(np, np + nq, nq, nl) = kmat.transpose();
  dh.j.block(np + nq, np, nl, nq) = -kmat;
  dh.r = Matrix::Zero(total, total);
  dh.r.block(np, np, nq, nq) = d * Matrix::Identity(nq, nq);
  dh.q = Matrix::Identity(total, total);
  out.dh = dh;
  for (Index i = 0; i < nl; ++i)
    out.facts.hamiltonian_free_vars.push_back(np + nq + i);
  out.facts.note = "gas network; H excludes the Lagrange multiplier";
  return out;
}

Model build_mechanical(const std::map<std::string, double>& params) {
  const Index nq = iparam(params, "nq", 2);
  const Index ng = iparam(params, "ng", 1);
  const double d = param(params, "d", 0.1);
  const double w = param(params, "w", 1.0);
  if (nq < 1) throw Error(Errc::InvalidParameters, "nq >= 1");
  if (ng > nq) throw Error(Errc::InvalidParameters, "ng <= nq required");
  if (d < 0.0) throw Error(Errc::InvalidParameters, "d must be nonnegative");
  require_positive(w, "w");

  Matrix mass = Matrix::Identity(nq, nq);
  Matrix damp = d * Matrix::Identity(nq, nq);
  Matrix stiff = w * Matrix::Identity(nq, nq);
  Matrix g = Matrix::Zero(ng, nq);
  for (Index i = 0; i < ng; ++i) {
    g(i, i) = 1.0;
    if (i + 1 < nq) g(i, i + 1) = -1.0;
  }

  Model out;
  out.kind = "mechanical";
  const Index total = 2 * nq + ng;
  DHSystem dh;
  dh.e = Matrix::Zero(total, total);
  dh.e.topLeftCorner(nq, nq) = mass;
  dh.e.block(nq, nq, nq, nq) = Matrix::Identity(nq, nq);
  dh.j = Matrix::Zero(total, total);
  dh.j.block(0, nq, nq, nq) = -Matrix::Identity(nq, nq);
  dh.j.block(nq, 0, nq, nq) = Matrix::Identity(nq, nq);
  dh.j.block(0, 2 * nq, nq, ng) = g.transpose();
  dh.j.block(2 * nq, 0, ng, nq) = -g;
  dh.r = Matrix::Zero(total, total);
  dh.r.topLeftCorner(nq, nq) = damp;
  dh.q = Matrix::Identity(total, total);
  dh.q.block(nq, nq, nq, nq) = stiff;
  out.dh = dh;
  for (Index i = 0; i < ng; ++i)
    out.facts.hamiltonian_free_vars.push_back(2 * nq + i);
  out.facts.note = "constrained mechanical system; H excludes the multiplier";
  return out;
}

}  // namespace

Pencil Model::pencil() const {
  if (dh) return pencil_of(*dh);
  if (extended) return pencil_of(*extended);
  throw Error(Errc::InvalidInput, "model holds no system");
}

std::vector<std::string> model_kinds() {
  return {"rlc", "lc", "stokes", "gas", "mechanical", "msd", "two-mass"};
}

Model build_model(const std::string& kind,
                  const std::map<std::string, double>& params) {
  Model out;
  if (kind == "msd") out = build_msd(params);
  else if (kind == "two-mass") out = build_two_mass(params);
  else if (kind == "rlc") out = build_rlc(params);
  else if (kind == "lc") out = build_lc(params);
  else if (kind == "stokes") out = build_stokes(params);
  else if (kind == "gas") out = build_gas(params);
  else if (kind == "mechanical") out = build_mechanical(params);
  else
    throw Error(Errc::InvalidParameters, "unknown model kind: " + kind);

  // Every fixture must validate against its structure class.
  if (out.dh) require_valid(validate(*out.dh), Errc::NotStructured);
  if (out.extended) require_valid(validate(*out.extended), Errc::NotStructured);
  return out;
}

std::vector<FourBlockRep> four_block_representations(
    Index n1, Index n2, const Matrix& e33, const Matrix& a33, Index n4,
    const TolerancePolicy& tol) {
  if (e33.rows() != e33.cols() || a33.rows() != a33.cols() ||
      e33.rows() != a33.rows())
    throw Error(Errc::DimensionMismatch, "e33/a33 must be square, equal size");
  if (skew_residual(a33) > tol.structure_threshold(a33.norm()))
    throw Error(Errc::InvalidParameters,
                "a33 must be skew-symmetric (lossless case)");
  if (min_sym_eigenvalue(e33) <= 0)
    throw Error(Errc::InvalidParameters, "e33 must be positive definite");
  const Index n3 = e33.rows();

  auto pair_skew = [](Index k) {
    Matrix j = Matrix::Zero(2 * k, 2 * k);
    j.topRightCorner(k, k) = Matrix::Identity(k, k);
    j.bottomLeftCorner(k, k) = -Matrix::Identity(k, k);
    return j;
  };

  std::vector<FourBlockRep> out;
  {
    FourBlockRep rep;
    rep.label = "block1";
    rep.sys.k = Matrix::Identity(2 * n1, 2 * n1);
    rep.sys.l = pair_skew(n1);
    rep.sys.p = Matrix::Zero(2 * n1, 2 * n1);
    rep.sys.p.topLeftCorner(n1, n1) = Matrix::Identity(n1, n1);
    rep.sys.s = Matrix::Identity(2 * n1, 2 * n1);
    rep.block_e = rep.sys.p;
    rep.block_a = rep.sys.l;
    rep.hamiltonian_note = "H = z1^T z1 / 2, zero along solutions";
    out.push_back(rep);

    FourBlockRep red = rep;
    red.label = "block1-index-reduced";
    red.sys.k = Matrix::Zero(2 * n1, 2 * n1);
    red.block_e = Matrix::Zero(2 * n1, 2 * n1);
    red.hamiltonian_note = "index-reduced; Hamiltonian unchanged";
    out.push_back(red);
  }
  {
    FourBlockRep rep;
    rep.label = "block2a";
    rep.sys.k = Matrix::Identity(2 * n2, 2 * n2);
    rep.sys.l = pair_skew(n2);
    rep.sys.p = Matrix::Zero(2 * n2, 2 * n2);
    rep.sys.s = Matrix::Identity(2 * n2, 2 * n2);
    rep.block_e = Matrix::Zero(2 * n2, 2 * n2);
    rep.block_a = rep.sys.l;
    rep.hamiltonian_note = "H = 0";
    out.push_back(rep);

    FourBlockRep rep_b = rep;
    rep_b.label = "block2b";
    rep_b.sys.k = Matrix::Zero(2 * n2, 2 * n2);
    out.push_back(rep_b);
  }
  {
    FourBlockRep rep;
    rep.label = "block3";
    rep.sys.k = Matrix::Identity(n3, n3);
    rep.sys.p = e33;
    rep.sys.l = a33;
    rep.sys.s = Matrix::Identity(n3, n3);
    rep.block_e = e33;
    rep.block_a = a33;
    rep.hamiltonian_note = "H = z3^T E33 z3 / 2";
    out.push_back(rep);
  }
  {
    FourBlockRep rep;
    rep.label = "block4";
    rep.sys.k = Matrix::Zero(n4, n4);
    rep.sys.p = Matrix::Identity(n4, n4);
    rep.sys.l = Matrix::Identity(n4, n4);
    rep.sys.s = Matrix::Identity(n4, n4);
    rep.block_e = Matrix::Zero(n4, n4);
    rep.block_a = Matrix::Identity(n4, n4);
    rep.hamiltonian_note = "H = z4^T z4 / 2, zero along solutions";
    out.push_back(rep);
  }

  for (const auto& rep : out) {
    require_valid(validate(rep.sys, tol), Errc::NotStructured);
    Pencil p = pencil_of(rep.sys);
    if ((p.e - rep.block_e).norm() > tol.structure_threshold(rep.block_e.norm()) ||
        (p.a - rep.block_a).norm() > tol.structure_threshold(rep.block_a.norm()))
      throw Error(Errc::InvalidInput, "block representation mismatch");
  }
  return out;
}

}  // namespace phdae
