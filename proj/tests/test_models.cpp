#include <doctest.h>

#include "phdae/analyze.hpp"
#include "phdae/models.hpp"
#include "phdae/numkernel.hpp"

using namespace phdae;

TEST_CASE("two-mass fixture reproduces the worked matrices") {
  const double m1 = 1.0, m2 = 2.0, ms = m1 + m2;
  Model tm = build_model("two-mass", {{"m1", m1}, {"m2", m2}});
  REQUIRE(tm.extended.has_value());
  const ExtendedHDAE& sys = *tm.extended;

  Matrix kp_expected(4, 4);
  kp_expected << 0, 1, 0, 0,
                 0, 1, 0, 0,
                 0, 0, 1, m1 / ms,
                 0, 0, 0, 0;
  Matrix ls_expected(4, 4);
  ls_expected << 0, 0, 1.0 / m1, 1.0 / ms,
                 0, 0, -1.0 / m2, 1.0 / ms,
                 -1, 0, 0, 0,
                 0, 0, -1.0 / m2, 1.0 / ms;
  CHECK((sys.k * sys.p - kp_expected).norm() <= 1e-15);
  CHECK((sys.l * sys.s - ls_expected).norm() <= 1e-15);

  // structure classes
  CHECK(validate(sys).valid);
  CHECK(rank_tol(sys.p) == 3);  // singular Lagrange structure
  CHECK(rank_tol(sys.k) == 3);  // singular Dirac structure

  // limiting Hamiltonian: kinetic energy of the combined mass only
  Vector z4 = Vector::Zero(4);
  z4(3) = 1.0;
  CHECK(hamiltonian(sys, z4, Frame::Z) == doctest::Approx(1.0 / (2.0 * ms)));
  Vector z3 = Vector::Zero(4);
  z3(2) = 1.0;
  CHECK(hamiltonian(sys, z3, Frame::Z) ==
        doctest::Approx(0.5 * (1.0 / m1 + 1.0 / m2)));
  // H does not involve the first two coordinates
  for (Index i : tm.facts.hamiltonian_free_vars) {
    Vector z = Vector::Zero(4);
    z(i) = 1.0;
    CHECK(std::abs(hamiltonian(sys, z, Frame::Z)) < 1e-15);
  }

  CHECK(index(tm.pencil()).nu == 2);
}

TEST_CASE("msd fixture limits") {
  CHECK(index(build_model("msd", {}).pencil()).nu == 0);
  CHECK(index(build_model("msd", {{"limit", 1}, {"d", 1.0}}).pencil()).nu == 1);
  CHECK(index(build_model("msd", {{"limit", 1}, {"d", 0.0}}).pencil()).nu == 2);
  CHECK(index(build_model("msd", {{"limit", 2}, {"d", 0.7}}).pencil()).nu == 2);
  CHECK(index(build_model("msd", {{"limit", 3}}).pencil()).nu == 1);
  CHECK_THROWS_AS(build_model("msd", {{"limit", 7}}), Error);
  CHECK_THROWS_AS(build_model("msd", {{"m", -1.0}}), Error);
}

TEST_CASE("rlc fixture") {
  Model rlc = build_model("rlc", {{"c", 2.0}, {"l", 3.0}, {"g", 0.5}});
  REQUIRE(rlc.dh.has_value());
  CHECK(validate(*rlc.dh).valid);
  // E = E^T >= 0 and the Hamiltonian ignores the source current exactly
  CHECK(sym_residual(rlc.dh->e) == 0.0);
  CHECK(min_sym_eigenvalue(rlc.dh->e) >= 0.0);
  Matrix gram = rlc.dh->e.transpose() * rlc.dh->q;
  for (Index i : rlc.facts.hamiltonian_free_vars) {
    CHECK(gram.row(i).norm() == 0.0);
    CHECK(gram.col(i).norm() == 0.0);
  }
  // regular pencil of index at most two
  IndexReport rep = index(rlc.pencil());
  CHECK(rep.nu <= 2);
}

TEST_CASE("lc fixture: singular K from parallel capacitors") {
  Model lc = build_model("lc", {});
  REQUIRE(lc.extended.has_value());
  CHECK(validate(*lc.extended).valid);
  CHECK(rank_tol(lc.extended->k) < lc.extended->k.rows());
  CHECK(regularity(lc.pencil()).regular);
  CHECK(index(lc.pencil()).nu >= 1);
}

TEST_CASE("stokes fixture") {
  Model st = build_model("stokes", {{"n", 6}});
  REQUIRE(st.dh.has_value());
  CHECK(validate(*st.dh).valid);
  CHECK(index(st.pencil()).nu == 2);
  // H excludes the pressure variables
  Matrix gram = st.dh->e.transpose() * st.dh->q;
  for (Index i : st.facts.hamiltonian_free_vars) {
    CHECK(gram.row(i).norm() == 0.0);
    CHECK(gram.col(i).norm() == 0.0);
  }
}

TEST_CASE("gas fixture") {
  Model gas = build_model("gas", {{"np", 4}, {"nq", 4}, {"nl", 2}});
  REQUIRE(gas.dh.has_value());
  CHECK(validate(*gas.dh).valid);
  // multiplier variables carry no energy
  Matrix gram = gas.dh->e.transpose() * gas.dh->q;
  for (Index i : gas.facts.hamiltonian_free_vars) {
    CHECK(gram.row(i).norm() == 0.0);
  }
}

TEST_CASE("mechanical fixture") {
  Model mech = build_model("mechanical", {{"nq", 3}, {"ng", 1}});
  REQUIRE(mech.dh.has_value());
  CHECK(validate(*mech.dh).valid);
  IndexReport rep = index(mech.pencil());
  CHECK(rep.nu <= 2);

  // without constraints the pencil has index at most one
  Model unconstrained = build_model("mechanical", {{"nq", 2}, {"ng", 0}});
  CHECK(index(unconstrained.pencil()).nu <= 1);
}

TEST_CASE("four block representations") {
  Matrix e33 = Matrix::Identity(2, 2) * 1.5;
  Matrix a33(2, 2);
  a33 << 0, 2, -2, 0;
  auto reps = four_block_representations(2, 1, e33, a33, 3);
  REQUIRE(reps.size() == 6);
  for (const auto& rep : reps) {
    CHECK(validate(rep.sys).valid);
    Pencil p = pencil_of(rep.sys);
    CHECK((p.e - rep.block_e).norm() < 1e-13);
    CHECK((p.a - rep.block_a).norm() < 1e-13);
  }
  // block 3 Hamiltonian: H = z^T E33 z / 2
  const auto& block3 = reps[4];
  Vector z(2);
  z << 1, 1;
  CHECK(hamiltonian(block3.sys, z, Frame::Z) ==
        doctest::Approx(0.5 * z.dot(e33 * z)));
  // block 1 and its index-reduced variant share the Hamiltonian, which
  // vanishes along solutions (z1 = 0)
  Vector z1 = Vector::Zero(4);
  z1(2) = 3.0;  // a z5-coordinate
  CHECK(hamiltonian(reps[0].sys, z1, Frame::Z) == doctest::Approx(0.0));
  CHECK(hamiltonian(reps[1].sys, z1, Frame::Z) == doctest::Approx(0.0));

  // dissipative a33 is rejected
  Matrix bad = a33;
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(four_block_representations(1, 1, e33, bad, 1), Error);
}

TEST_CASE("unknown model kind") {
  CHECK_THROWS_AS(build_model("frobnicator", {}), Error);
}
