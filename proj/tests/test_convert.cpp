#include <doctest.h>

#include "phdae/analyze.hpp"
#include "phdae/convert.hpp"
#include "phdae/models.hpp"
#include "phdae/numkernel.hpp"
#include "phdae/oracle.hpp"

using namespace phdae;

namespace {
Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}
const Matrix kJ2 = mat2(0, 1, -1, 0);

ExtendedHDAE example_b() {
  return {Matrix::Identity(2, 2), kJ2, Matrix(Vector{{1.0, 0.0}}.asDiagonal()),
          Matrix::Identity(2, 2)};
}
}  // namespace

TEST_CASE("x-representation reproduces the worked examples") {
  SUBCASE("half-singular P") {
    // K = I, L = [[0,1],[-1,0]], P = diag(1,0), S = I
    //   -> [[0,0],[0,1]] xdot = [[0,1],[-1,0]] x   up to row scaling
    XRepresentation x = to_x_representation(example_b());
    ImplicitSystem target{mat2(0, 0, 0, 1), kJ2};
    CHECK(same_system_row_space(x.system, target));
    // annihilator property M L = N P^T
    CHECK((x.m * example_b().l - x.n * example_b().p.transpose()).norm() <
          1e-12);
  }
  SUBCASE("K = 0, L = I, P = I, S = I gives 0 = x") {
    ExtendedHDAE sys{Matrix::Zero(1, 1), Matrix::Identity(1, 1),
                     Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
    XRepresentation x = to_x_representation(sys);
    ImplicitSystem target{Matrix::Zero(1, 1), Matrix::Identity(1, 1)};
    CHECK(same_system_row_space(x.system, target));
  }
  SUBCASE("K = 0, L = I, P = 0, S = I gives 0 = x") {
    ExtendedHDAE sys{Matrix::Zero(1, 1), Matrix::Identity(1, 1),
                     Matrix::Zero(1, 1), Matrix::Identity(1, 1)};
    XRepresentation x = to_x_representation(sys);
    ImplicitSystem target{Matrix::Zero(1, 1), Matrix::Identity(1, 1)};
    CHECK(same_system_row_space(x.system, target));
  }
  SUBCASE("K = 0, L = J2, P = I, S = I gives 0 = J2 x") {
    ExtendedHDAE sys{Matrix::Zero(2, 2), kJ2, Matrix::Identity(2, 2),
                     Matrix::Identity(2, 2)};
    XRepresentation x = to_x_representation(sys);
    ImplicitSystem target{Matrix::Zero(2, 2), kJ2};
    CHECK(same_system_row_space(x.system, target));
  }
  SUBCASE("ML = NP^T on random systems") {
    oracle::Rng rng(41);
    for (int t = 0; t < 25; ++t) {
      ExtendedHDAE sys = oracle::random_extended_regular(rng.pick(1, 9), rng);
      XRepresentation x = to_x_representation(sys);
      const double scale = std::max({1.0, sys.l.norm(), sys.p.norm()});
      CHECK((x.m * sys.l - x.n * sys.p.transpose()).norm() < 1e-12 * scale);
    }
  }
  SUBCASE("x-representation pencil matches z-representation for invertible P") {
    oracle::Rng rng(42);
    for (int t = 0; t < 15; ++t) {
      Index n = rng.pick(1, 7);
      ExtendedHDAE sys = oracle::random_extended_regular(n, rng);
      if (rank_tol(sys.p) != n) continue;
      XRepresentation x = to_x_representation(sys);
      // M invertible when P is
      CHECK(rank_tol(x.m) == n);
      // same Weierstrass data: index and finite eigenvalue count agree
      IndexReport a = index(pencil_of(sys));
      IndexReport b = index(Pencil{x.system.e, x.system.a});
      CHECK(a.nu == b.nu);
      CHECK(a.infinite_block_dim == b.infinite_block_dim);
    }
  }
}

TEST_CASE("invertible-case forms") {
  SUBCASE("klq trivial") {
    ExtendedHDAE sys{Matrix::Identity(2, 2), kJ2, Matrix::Identity(2, 2),
                     Matrix::Identity(2, 2)};
    KLQForm f = to_klq(sys);
    CHECK((f.q - Matrix::Identity(2, 2)).norm() < 1e-14);
  }
  SUBCASE("klq scaling") {
    ExtendedHDAE sys{Matrix::Identity(2, 2), kJ2,
                     Matrix(2.0 * Matrix::Identity(2, 2)),
                     Matrix::Identity(2, 2)};
    KLQForm f = to_klq(sys);
    CHECK((f.q - 0.5 * Matrix::Identity(2, 2)).norm() < 1e-14);
  }
  SUBCASE("q symmetric on random pairs with invertible P") {
    oracle::Rng rng(43);
    for (int t = 0; t < 20; ++t) {
      Index n = rng.pick(1, 8);
      oracle::LagrangeShape sh;
      sh.m1 = rng.pick(0, n);
      sh.m2 = n - sh.m1;
      LagrangePair lp = oracle::random_lagrange(sh, rng);
      DiracPair dp = oracle::random_dirac(n, rng);
      ExtendedHDAE sys{dp.k, dp.l, lp.p, lp.s};
      KLQForm f = to_klq(sys);
      CHECK(sym_residual(f.q) < 1e-9 * std::max(1.0, f.q.norm()));
    }
  }
  SUBCASE("poisson: msd lossless") {
    const double k = 2.0, m = 4.0;
    ExtendedHDAE sys{Matrix::Identity(2, 2), kJ2, Matrix::Identity(2, 2),
                     Matrix(Vector{{k, 1.0 / m}}.asDiagonal())};
    PoissonForm f = to_poisson(sys);
    CHECK((f.j - kJ2).norm() < 1e-14);
    CHECK((f.q - Matrix(Vector{{k, 1.0 / m}}.asDiagonal())).norm() < 1e-14);
  }
  SUBCASE("gradient and symplectic") {
    // harmonic oscillator k = m = 1: J = L^{-1} K = [[0,-1],[1,0]], Q = I
    ExtendedHDAE sys{Matrix::Identity(2, 2), kJ2, Matrix::Identity(2, 2),
                     Matrix::Identity(2, 2)};
    GradientForm g = to_gradient(sys);
    CHECK((g.j - mat2(0, -1, 1, 0)).norm() < 1e-14);
    CHECK(skew_residual(g.j) < 1e-14);
    SymplecticForm sp = to_symplectic(sys);
    CHECK((sp.j - mat2(0, -1, 1, 0)).norm() < 1e-14);
    CHECK((sp.q - Matrix::Identity(2, 2)).norm() < 1e-14);
    // the gradient system is row-space equivalent to the x-representation
    XRepresentation x = to_x_representation(sys);
    CHECK(same_system_row_space(g.system, x.system));
  }
  SUBCASE("singular gates") {
    ExtendedHDAE sys = example_b();  // P singular
    CHECK_THROWS_AS(to_klq(sys), Error);
    CHECK_THROWS_AS(to_poisson(sys), Error);
    ExtendedHDAE sing_l{Matrix::Zero(1, 1), Matrix::Identity(1, 1),
                        Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
    std::swap(sing_l.k, sing_l.l);  // K = I, L = 0
    CHECK_THROWS_AS(to_gradient(sing_l), Error);
  }
}

TEST_CASE("adjoint") {
  SUBCASE("example values") {
    ImplicitSystem a = adjoint(example_b());
    CHECK((a.e - Matrix(Vector{{1.0, 0.0}}.asDiagonal())).norm() < 1e-15);
    CHECK((a.a - mat2(0, -1, 1, 0)).norm() < 1e-15);
  }
  SUBCASE("involution at the pencil level") {
    oracle::Rng rng(44);
    for (int t = 0; t < 10; ++t) {
      ExtendedHDAE sys = oracle::random_extended_regular(rng.pick(1, 6), rng);
      ImplicitSystem once = adjoint(sys);
      // adjoint of the adjoint: transpose twice
      ImplicitSystem twice{once.e.transpose().transpose(),
                           once.a.transpose().transpose()};
      Pencil orig = pencil_of(sys);
      CHECK((twice.e - orig.e.transpose().transpose()).norm() >= 0);  // shape
      // (P^T K^T)^T = K P: the adjoint pencil transposed equals the original
      CHECK((once.e.transpose() - orig.e).norm() < 1e-14);
      CHECK((once.a.transpose() - orig.a).norm() < 1e-14);
    }
  }
}

TEST_CASE("dh to monotone bridge") {
  SUBCASE("plain resistive identity") {
    DHSystem dh{Matrix::Identity(2, 2), Matrix::Zero(2, 2),
                Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
    MonotoneAnnihilatorSystem sys = dh_to_monotone(dh);
    CHECK((sys.c - Matrix::Identity(2, 2)).norm() == 0.0);
    CHECK((sys.d + Matrix::Identity(2, 2)).norm() == 0.0);
    CHECK(validate(sys).valid);
  }
  SUBCASE("msd: identical pencil") {
    DHSystem dh{Matrix::Identity(2, 2), kJ2,
                Matrix(Vector{{0.0, 0.5}}.asDiagonal()),
                Matrix(Vector{{2.0, 1.0}}.asDiagonal())};
    REQUIRE(validate(dh).valid);
    MonotoneAnnihilatorSystem sys = dh_to_monotone(dh);
    CHECK(validate(sys).valid);
    Pencil a = pencil_of(dh);
    Pencil b = pencil_of(sys);
    CHECK((a.e - b.e).norm() < 1e-14);
    CHECK((a.a - b.a).norm() < 1e-14);
  }
  SUBCASE("invalid dh rejected") {
    DHSystem dh{Matrix::Identity(1, 1), Matrix::Zero(1, 1),
                -Matrix::Identity(1, 1), Matrix::Identity(1, 1)};
    CHECK_THROWS_AS(dh_to_monotone(dh), Error);
  }
}

TEST_CASE("multiplier extension") {
  SUBCASE("invertible P: no multipliers") {
    ExtendedHDAE sys{Matrix::Identity(2, 2), kJ2, Matrix::Identity(2, 2),
                     Matrix::Identity(2, 2)};
    MultiplierSystem m = with_multipliers(sys);
    CHECK(m.n2 == 0);
    CHECK(m.extended.e.rows() == 2);
    // pencil-equivalent to K P zdot = L S z
    IndexReport a = index(pencil_of(sys));
    IndexReport b = index(Pencil{m.extended.e, m.extended.a});
    CHECK(a.nu == b.nu);
  }
  SUBCASE("half-singular P: one multiplier, elimination recovers the x-form") {
    ExtendedHDAE sys = example_b();
    MultiplierSystem m = with_multipliers(sys);
    CHECK(m.n1 == 1);
    CHECK(m.n2 == 1);
    CHECK(m.extended.e.rows() == 3);
    // eliminate the multiplier e2 (an algebraic variable), then map the
    // remaining coordinates back through V
    ImplicitSystem reduced = eliminate_variables(m.extended, m.n1 + m.n2, m.n2);
    ImplicitSystem in_x{reduced.e * m.v.partialPivLu().inverse(),
                        reduced.a * m.v.partialPivLu().inverse()};
    XRepresentation x = to_x_representation(sys);
    CHECK(same_system_row_space(in_x, x.system));
  }
  SUBCASE("two-mass: multipliers carry no energy") {
    Model tm = build_model("two-mass", {});
    MultiplierSystem m = with_multipliers(*tm.extended);
    CHECK(m.n2 == 1);
    // H in the z1 coordinates only: the multiplier column of S-hat vanishes
    // by construction of the condensed Lagrange pair; checked through the
    // block sizes here
    CHECK(m.n1 == 3);
  }
}

TEST_CASE("compositions") {
  SUBCASE("dirac graph composed with lagrange graph is graph of J*Q") {
    oracle::Rng rng(45);
    Matrix j = oracle::random_skew(3, rng);
    Matrix q = oracle::random_symmetric(3, rng);
    // D = {(J e, e)}: K f + L e = 0 with K = I, L = -J
    DiracPair dp{Matrix::Identity(3, 3), Matrix(-j)};
    LagrangePair lp{Matrix::Identity(3, 3), q};
    PairedSubspace comp = compose_dirac_lagrange(dp, lp);
    PairedSubspace target = make_subspace(j * q, Matrix::Identity(3, 3));
    // same subspace: kernel representation annihilates the other basis
    Matrix ann = kernel_representation(comp);
    CHECK((ann * vstack(target.top, target.bottom)).norm() < 1e-12);
    CHECK(comp.dim() == 3);
  }
  SUBCASE("degenerate composition: D o L is the origin") {
    // P = 0, S = 1, K = 1, L = 0
    DiracPair dp{Matrix::Identity(1, 1), Matrix::Zero(1, 1)};
    LagrangePair lp{Matrix::Zero(1, 1), Matrix::Identity(1, 1)};
    PairedSubspace comp = compose_dirac_lagrange(dp, lp);
    CHECK(comp.dim() == 0);
    ImplicitSystem dyn = dynamics_of(comp);
    // xdot = x = 0
    ImplicitSystem target{Matrix(2, 1), Matrix(2, 1)};
    target.e << 1, 0;
    target.a << 0, 1;
    CHECK(same_system_row_space(dyn, target));
  }
  SUBCASE("pairing vanishes on dirac-lagrange compositions") {
    oracle::Rng rng(46);
    for (int t = 0; t < 10; ++t) {
      Index n = rng.pick(1, 6);
      DiracPair dp = oracle::random_dirac(n, rng);
      // e^T f = 0 for all (f, e) in D
      PairedSubspace d = subspace_of(dp);
      MonotoneCertificate cert = monotone_certificate(d);
      CHECK(std::abs(cert.pairing_min_eig) < 1e-12);
    }
  }
  SUBCASE("identity self-composition of a monotone subspace") {
    oracle::Rng rng(47);
    MonotonePair mp = oracle::random_monotone(3, rng);
    PairedSubspace sub = subspace_of(mp);
    // mirror: (f, e) with flows negated pairs with the original over the full
    // shared block
    PairedSubspace mirror = make_subspace(Matrix(-sub.top), sub.bottom);
    PairedSubspace comp = compose_monotone(sub, mirror, 3, 3);
    CHECK(comp.dim() == 0);  // all variables shared, nothing kept
  }
}

TEST_CASE("pullback and pushforward") {
  oracle::Rng rng(48);
  SUBCASE("identity map leaves the subspace unchanged") {
    MonotonePair mp = oracle::random_monotone(4, rng);
    PairedSubspace sub = subspace_of(mp);
    PairedSubspace pulled = pullback(Matrix::Identity(4, 4), sub);
    Matrix ann = kernel_representation(pulled);
    CHECK((ann * vstack(sub.top, sub.bottom)).norm() < 1e-11);
  }
  SUBCASE("zero map: pull-back is F x {0}") {
    MonotonePair graph_i{Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
    PairedSubspace sub = subspace_of(graph_i);
    PairedSubspace pulled = pullback(Matrix::Zero(2, 3), sub);
    CHECK(pulled.dim() == 3);
    CHECK(pulled.bottom.norm() < 1e-13);
  }
  SUBCASE("monotonicity preserved along random maps") {
    for (int t = 0; t < 20; ++t) {
      Index nf = rng.pick(1, 5), ng = rng.pick(1, 5);
      Matrix a = oracle::random_gaussian(ng, nf, rng);
      PairedSubspace m = subspace_of(oracle::random_monotone(ng, rng));
      MonotoneCertificate cert = monotone_certificate(pullback(a, m));
      CHECK(cert.dim == nf);
      CHECK(cert.pairing_min_eig > -1e-10);
      PairedSubspace mf = subspace_of(oracle::random_monotone(nf, rng));
      MonotoneCertificate cert2 = monotone_certificate(pushforward(a, mf));
      CHECK(cert2.dim == ng);
      CHECK(cert2.pairing_min_eig > -1e-10);
    }
  }
}

TEST_CASE("annihilator invertibility equivalences") {
  oracle::Rng rng(63);
  for (int t = 0; t < 25; ++t) {
    ExtendedHDAE sys = oracle::random_extended_regular(rng.pick(1, 8), rng);
    const Index n = sys.k.rows();
    XRepresentation x = to_x_representation(sys);
    // P invertible <=> M invertible; L invertible <=> N invertible
    CHECK((rank_tol(sys.p, {}, sys.p.norm()) == n) ==
          (rank_tol(x.m, {}, std::max(1.0, x.m.norm())) == n));
    CHECK((rank_tol(sys.l, {}, sys.l.norm()) == n) ==
          (rank_tol(x.n, {}, std::max(1.0, x.n.norm())) == n));
  }
}
