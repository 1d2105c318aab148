#include <doctest.h>

#include "phdae/condense.hpp"
#include "phdae/models.hpp"
#include "phdae/numkernel.hpp"
#include "phdae/oracle.hpp"

using namespace phdae;

TEST_CASE("shuffle index on canonical pencils") {
  CHECK(oracle::shuffle_index({Matrix::Identity(3, 3),
                               Matrix::Identity(3, 3)}) == 0);
  CHECK(oracle::shuffle_index({Matrix::Zero(2, 2), Matrix::Identity(2, 2)}) ==
        1);
  Matrix n2(2, 2);
  n2 << 0, 1, 0, 0;
  CHECK(oracle::shuffle_index({n2, Matrix::Identity(2, 2)}) == 2);
  CHECK_THROWS_AS(oracle::shuffle_index({Matrix::Zero(1, 1), Matrix::Zero(1, 1)}),
                  Error);
}

TEST_CASE("shuffle index on the msd limit") {
  Model m = build_model("msd", {{"d", 0.0}, {"limit", 1}});
  Pencil p = m.pencil();
  CHECK(oracle::shuffle_index(p) == 2);
  Model md = build_model("msd", {{"d", 1.0}, {"limit", 1}});
  CHECK(oracle::shuffle_index(md.pencil()) == 1);
}

TEST_CASE("predicted block sizes on canonical pairs") {
  SUBCASE("identity lagrange") {
    auto pred = oracle::predicted_lagrange_blocks(
        {Matrix::Identity(3, 3), Matrix::Identity(3, 3)});
    CHECK(pred.m1 == 3);
    CHECK(pred.m2 + pred.m3 + pred.m4 + pred.n5 == 0);
  }
  SUBCASE("pure m4") {
    auto pred = oracle::predicted_lagrange_blocks(
        {Matrix::Zero(1, 1), Matrix::Identity(1, 1)});
    CHECK(pred.m4 == 1);
  }
  SUBCASE("invariant sizes recover the generated shapes") {
    // For non-maximal pairs only m1..m4 (resp. l1, l3, l4) are equivalence
    // invariants; the n5/dead-block split depends on the representative.
    oracle::Rng rng(51);
    for (int t = 0; t < 60; ++t) {
      oracle::LagrangeShape sh;
      sh.m1 = rng.pick(0, 3);
      sh.m2 = rng.pick(0, 2);
      sh.m3 = rng.pick(0, 2);
      sh.m4 = rng.pick(0, 2);
      sh.n5 = rng.pick(0, 2);
      sh.extra_rows = rng.pick(0, 1);
      sh.extra_cols = rng.pick(0, 1);
      if (sh.n5 > sh.m1 + sh.m2 + sh.m3) continue;  // S5 needs full row rank
      LagrangePair lp = oracle::random_lagrange(sh, rng);
      auto pred = oracle::predicted_lagrange_blocks(lp);
      CHECK(pred.m1 == sh.m1);
      CHECK(pred.m2 == sh.m2);
      CHECK(pred.m3 == sh.m3);
      CHECK(pred.m4 == sh.m4);
      // n5 must still agree with the condensation on the same input
      LagrangeCondensed lc = lagrange_condense(lp);
      CHECK(pred.n5 == lc.n5);
    }
  }
  SUBCASE("dirac invariant sizes recover the generated shapes") {
    oracle::Rng rng(52);
    for (int t = 0; t < 60; ++t) {
      oracle::DiracShape sh;
      sh.l1 = rng.pick(0, 2);
      sh.l3 = rng.pick(0, 2);
      sh.l4 = rng.pick(0, 2);
      sh.n5 = rng.pick(0, 2);
      sh.extra_rows = rng.pick(0, 1);
      sh.extra_cols = rng.pick(0, 1);
      if (sh.n5 > 2 * sh.l1 + sh.l3) continue;  // stack needs full column rank
      DiracPair dp = oracle::random_dirac(sh, rng);
      auto pred = oracle::predicted_dirac_blocks(dp);
      CHECK(pred.l1 == sh.l1);
      CHECK(pred.l3 == sh.l3);
      CHECK(pred.l4 == sh.l4);
      DiracCondensed dc = dirac_condense(dp);
      CHECK(pred.n5 == dc.n5);
    }
  }
}

TEST_CASE("generators produce valid structures to machine precision") {
  oracle::Rng rng(53);
  SUBCASE("dirac residual") {
    DiracPair dp = oracle::random_dirac(4, rng);
    CHECK((dp.k * dp.l.transpose() + dp.l * dp.k.transpose()).norm() <= 1e-13);
  }
  SUBCASE("empty dh system") {
    DHSystem dh = oracle::random_dh(0, rng);
    CHECK(validate(dh).valid);
  }
  SUBCASE("regular extended systems") {
    for (int t = 0; t < 30; ++t) {
      Index n = rng.pick(1, 9);
      ExtendedHDAE sys = oracle::random_extended_regular(n, rng);
      CHECK(validate(sys).valid);
      CHECK(regularity(pencil_of(sys)).regular);
    }
  }
  SUBCASE("monotone pairs") {
    for (int t = 0; t < 20; ++t) {
      MonotonePair mp = oracle::random_monotone(rng.pick(0, 8), rng);
      CHECK(validate(mp).valid);
    }
  }
  SUBCASE("reproducibility") {
    oracle::Rng a(99), b(99);
    Matrix ma = oracle::random_gaussian(3, 3, a);
    Matrix mb = oracle::random_gaussian(3, 3, b);
    CHECK((ma - mb).norm() == 0.0);
  }
}
