#include "phdae/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phdae/condense.hpp"
#include "phdae/convert.hpp"
#include "phdae/numkernel.hpp"
#include "phdae/oracle.hpp"

namespace phdae {

namespace {

using oracle::Rng;

struct Tally {
  int failures = 0;
  double worst = 0.0;
  std::ostringstream detail;

  void residual(double r, double limit, const char* what) {
    worst = std::max(worst, r);
    if (!(r <= limit)) {
      ++failures;
      if (failures <= 4) detail << what << " residual " << r << "; ";
    }
  }
  void check(bool ok, const char* what) {
    if (!ok) {
      ++failures;
      if (failures <= 4) detail << what << "; ";
    }
  }
  void threw(const char* where, const std::exception& e) {
    ++failures;
    if (failures <= 4) detail << where << " threw: " << e.what() << "; ";
  }
};

BatteryResult finish(const char* name, int trials, Tally& t) {
  BatteryResult out;
  out.name = name;
  out.trials = trials;
  out.failures = t.failures;
  out.worst = t.worst;
  out.passed = t.failures == 0;
  out.detail = t.detail.str();
  return out;
}

double input_scale(const Matrix& a, const Matrix& b) {
  return std::max({1.0, a.norm(), b.norm()});
}

}  // namespace

BatteryResult battery_condense_residuals(uint64_t seed, int trials, Index max_n,
                                         double res_tol, int equiv_trials) {
  Rng rng(seed);
  Tally t;
  TolerancePolicy tol;

  for (int trial = 0; trial < trials; ++trial) {
    const Index n = rng.pick(1, max_n);

    try {  // Lagrange pair (occasionally rectangular)
      LagrangePair lp;
      if (trial % 5 == 0) {
        oracle::LagrangeShape sh;
        sh.m1 = rng.pick(0, n / 2);
        sh.m2 = rng.pick(0, n / 4);
        sh.m3 = rng.pick(0, n / 4);
        sh.m4 = rng.pick(0, n / 4);
        sh.n5 = rng.pick(0, n / 4);
        sh.extra_rows = rng.pick(0, 2);
        sh.extra_cols = rng.pick(0, 2);
        lp = oracle::random_lagrange(sh, rng);
      } else {
        lp = oracle::random_lagrange(n, rng);
      }
      const double scale = input_scale(lp.p, lp.s);
      LagrangeCondensed lc = lagrange_condense(lp, tol);
      t.residual(lc.residual_p, res_tol * scale, "lagrange P");
      t.residual(lc.residual_s, res_tol * scale, "lagrange S");
      oracle::LagrangeBlockPrediction pred =
          oracle::predicted_lagrange_blocks(lp, tol);
      t.check(pred.m1 == lc.m1 && pred.m2 == lc.m2 && pred.m3 == lc.m3 &&
                  pred.m4 == lc.m4 && pred.n5 == lc.n5,
              "lagrange blocks vs oracle");

      LagrangeStaircase ls = lagrange_staircase_orth(lp, tol);
      t.residual(ls.residual_p, res_tol * scale, "lagrange staircase P");
      t.residual(ls.residual_s, res_tol * scale, "lagrange staircase S");
      t.check(ls.m12 == lc.m1 + lc.m2 && ls.m3 == lc.m3 && ls.m4 == lc.m4 &&
                  ls.n5 == lc.n5,
              "staircase blocks vs condensed blocks");

      const bool maximal =
          lp.p.rows() == lp.p.cols() &&
          rank_tol(vstack(lp.p, lp.s), tol) == lp.p.cols();
      for (int e = 0; e < equiv_trials; ++e) {
        LagrangePair lp2 = oracle::random_equivalence(lp, rng);
        LagrangeCondensed lc2 = lagrange_condense(lp2, tol);
        t.check(lc2.m1 == lc.m1 && lc2.m2 == lc.m2 && lc2.m3 == lc.m3 &&
                    lc2.m4 == lc.m4,
                "lagrange block invariance");
        // the n5/dead-block split is only invariant for maximal pairs
        if (maximal) t.check(lc2.n5 == lc.n5, "lagrange n5 invariance");
      }
    } catch (const std::exception& e) {
      t.threw("lagrange trial", e);
    }

    try {  // Dirac pair
      DiracPair dp = oracle::random_dirac(n, rng);
      const double scale = input_scale(dp.k, dp.l);
      DiracCondensed dc = dirac_condense(dp, tol);
      t.residual(dc.residual_k, res_tol * scale, "dirac K");
      t.residual(dc.residual_l, res_tol * scale, "dirac L");
      oracle::DiracBlockPrediction pred = oracle::predicted_dirac_blocks(dp, tol);
      t.check(pred.l1 == dc.l1 && pred.l3 == dc.l3 && pred.l4 == dc.l4 &&
                  pred.n5 == dc.n5,
              "dirac blocks vs oracle");

      DiracStaircase ds = dirac_staircase_orth(dp, tol);
      t.residual(ds.residual_k, res_tol * scale, "dirac staircase K");
      t.residual(ds.residual_l, res_tol * scale, "dirac staircase L");
      t.check(ds.l1 == dc.l1 && ds.l3 == dc.l3 && ds.l4 == dc.l4 &&
                  ds.n5 == dc.n5,
              "dirac staircase blocks");

      for (int e = 0; e < equiv_trials; ++e) {
        DiracPair dp2 = oracle::random_equivalence(dp, rng);
        DiracCondensed dc2 = dirac_condense(dp2, tol);
        t.check(dc2.l1 == dc.l1 && dc2.l3 == dc.l3 && dc2.l4 == dc.l4 &&
                    dc2.n5 == dc.n5,
                "dirac block invariance");
      }
    } catch (const std::exception& e) {
      t.threw("dirac trial", e);
    }

    try {  // Extended system, both variants
      ExtendedHDAE sys = oracle::random_extended_regular(n, rng);
      const double scale =
          std::max(input_scale(sys.k, sys.l), input_scale(sys.p, sys.s));
      ExtendedCondensed el =
          extended_condense(sys, ExtendedVariant::LagrangeFirst, tol);
      t.residual(el.residual_a, res_tol * scale, "ext-lagrange K");
      t.residual(el.residual_b, res_tol * scale, "ext-lagrange L");
      t.residual(el.residual_p, res_tol * scale, "ext-lagrange P");
      t.residual(el.residual_s, res_tol * scale, "ext-lagrange S");
      // claimed sub-block structure
      Matrix l11 = el.b_form.topLeftCorner(el.n1, el.n1);
      Matrix k11 = el.a_form.topLeftCorner(el.n1, el.n1);
      t.residual((k11 * l11.transpose() + l11 * k11.transpose()).norm(),
                 res_tol * scale * scale, "ext-lagrange K11 L11 pair");
      ReducedSystem red = extract_reduced(el);
      t.check(validate(DiracPair{red.k, red.l}, tol).valid,
              "reduced (K,L) is a Dirac pair");

      ExtendedCondensed ed =
          extended_condense(sys, ExtendedVariant::DiracFirst, tol);
      t.residual(ed.residual_a, res_tol * scale, "ext-dirac K");
      t.residual(ed.residual_b, res_tol * scale, "ext-dirac L");
      t.residual(ed.residual_s, res_tol * scale, "ext-dirac S");
      Matrix l11d = ed.b_form.topLeftCorner(ed.n1, ed.n1);
      t.residual(skew_residual(l11d), res_tol * scale, "ext-dirac L11 skew");
      ReducedSystem redd = extract_reduced(ed);
      t.check(validate(LagrangePair{redd.p, redd.s}, tol).valid,
              "reduced (P,S) is a Lagrange pair");

      for (int e = 0; e < std::min(equiv_trials, 3); ++e) {
        ExtendedHDAE sys2 = oracle::random_equivalence(sys, rng);
        ExtendedCondensed el2 =
            extended_condense(sys2, ExtendedVariant::LagrangeFirst, tol);
        t.check(el2.n1 == el.n1 && el2.n2 == el.n2,
                "extended lagrange-first block invariance");
        ExtendedCondensed ed2 =
            extended_condense(sys2, ExtendedVariant::DiracFirst, tol);
        t.check(ed2.n1 == ed.n1 && ed2.n2 == ed.n2,
                "extended dirac-first block invariance");
      }
    } catch (const std::exception& e) {
      t.threw("extended trial", e);
    }

    try {  // Monotone-annihilator system
      MonotoneAnnihilatorSystem sys = oracle::random_monotone_annihilator(n, rng);
      const double scale =
          std::max(input_scale(sys.c, sys.d), input_scale(sys.p, sys.s));
      ExtendedCondensed mc = monotone_condense(sys, tol);
      t.residual(mc.residual_a, res_tol * scale, "monotone C");
      t.residual(mc.residual_b, res_tol * scale, "monotone D");
      t.residual(mc.residual_p, res_tol * scale, "monotone P");
      Matrix c11 = mc.a_form.topLeftCorner(mc.n1, mc.n1);
      t.check(min_sym_eigenvalue(c11) <= res_tol * scale,
              "monotone C11 has dissipative symmetric part");
      t.check(mc.n2 == sys.c.rows() -
                          rank_tol(sys.d, tol, hstack(sys.c, sys.d).norm()),
              "monotone n2 = n - rank D");
    } catch (const std::exception& e) {
      t.threw("monotone trial", e);
    }
  }
  return finish("condensed-form residuals and block invariance",
                trials * (1 + 1 + 1 + 1), t);
}

BatteryResult battery_index_law(uint64_t seed, int trials, Index max_n) {
  Rng rng(seed);
  Tally t;
  TolerancePolicy tol;
  for (int trial = 0; trial < trials; ++trial) {
    const Index n = rng.pick(1, max_n);
    try {
      ExtendedHDAE sys = oracle::random_extended_regular(n, rng);
      StructuredIndexLaw law = verify_structured_index_law(sys, tol);
      t.check(law.nu <= 2, "index at most two");
      t.check(law.nu < 2 || law.p_singular, "index two only with singular P");
      t.check(law.law_holds, "law verdict");
    } catch (const std::exception& e) {
      t.threw("index law trial", e);
    }
  }
  return finish("structured index law", trials, t);
}

BatteryResult battery_dual_oracle(uint64_t seed, int trials, Index max_n) {
  Rng rng(seed);
  Tally t;
  TolerancePolicy tol;
  for (int trial = 0; trial < trials; ++trial) {
    const Index n = rng.pick(1, max_n);
    Pencil p;
    if (trial % 2 == 0) {
      p = pencil_of(oracle::random_extended_regular(n, rng));
    } else {
      // unstructured regular pencil with a nilpotent tail of random depth
      const Index n_inf = rng.pick(0, n);
      Matrix e = Matrix::Zero(n, n), a = Matrix::Zero(n, n);
      const Index nf = n - n_inf;
      e.topLeftCorner(nf, nf) = Matrix::Identity(nf, nf);
      a.topLeftCorner(nf, nf) = oracle::random_gaussian(nf, nf, rng);
      for (Index i = 0; i < n_inf; ++i) {
        a(nf + i, nf + i) = 1.0;
        if (i + 1 < n_inf && rng.uniform(0.0, 1.0) < 0.5)
          e(nf + i, nf + i + 1) = 1.0;  // grow a Jordan chain at infinity
      }
      Matrix u = oracle::random_well_conditioned(n, rng);
      Matrix w = oracle::random_well_conditioned(n, rng);
      p.e = u.transpose() * e * w;
      p.a = u.transpose() * a * w;
    }
    try {
      IndexReport rep = index(p, tol);
      Index shuffled = oracle::shuffle_index(p, tol);
      t.check(rep.nu == shuffled, "wong index == shuffle index");
    } catch (const std::exception& e) {
      t.threw("dual oracle trial", e);
    }
  }
  return finish("dual-oracle index agreement", trials, t);
}

BatteryResult battery_dissipation(uint64_t seed, int systems, int states,
                                  double dis_tol) {
  Rng rng(seed);
  Tally t;
  for (int sy = 0; sy < systems; ++sy) {
    const Index n = rng.pick(1, 12);
    DHSystem dh = oracle::random_dh(n, rng);
    t.check(validate(dh).valid, "random dh valid");
    const double rn = std::max(1.0, dh.r.norm());
    for (int st = 0; st < states; ++st) {
      Vector z = oracle::random_gaussian(n, 1, rng);
      const double rate = energy_rate(dh, z);
      t.residual(std::max(0.0, rate), dis_tol * z.squaredNorm() * rn,
                 "energy rate positive excess");
    }
  }
  return finish("algebraic dissipation", systems * states, t);
}

BatteryResult battery_monotone_closure(uint64_t seed, int trials,
                                       double psd_tol) {
  Rng rng(seed);
  Tally t;
  TolerancePolicy tol;
  for (int trial = 0; trial < trials; ++trial) {
    const Index own_a = rng.pick(1, 4);
    const Index own_b = rng.pick(1, 4);
    const Index shared = rng.pick(1, 3);

    MonotonePair mp_a = oracle::random_monotone(own_a + shared, rng);
    MonotonePair mp_b = oracle::random_monotone(own_b + shared, rng);
    PairedSubspace sub_a = subspace_of(mp_a, tol);
    PairedSubspace sub_b = subspace_of(mp_b, tol);

    PairedSubspace comp = compose_monotone(sub_a, sub_b, shared, shared, tol);
    MonotoneCertificate cert = monotone_certificate(comp);
    t.check(cert.dim == own_a + own_b, "composition dimension");
    t.residual(std::max(0.0, -cert.pairing_min_eig), psd_tol,
               "composition monotone pairing");

    // pull-back and push-forward along random (possibly rank-deficient) maps
    const Index nf = rng.pick(1, 5);
    const Index ng = rng.pick(1, 5);
    Matrix a_map = oracle::random_gaussian(ng, nf, rng);
    if (rng.uniform(0.0, 1.0) < 0.3 && std::min(nf, ng) > 1)
      a_map.col(0).setZero();
    MonotonePair mg = oracle::random_monotone(ng, rng);
    PairedSubspace pulled = pullback(a_map, subspace_of(mg, tol), tol);
    MonotoneCertificate pc = monotone_certificate(pulled);
    t.check(pc.dim == nf, "pullback dimension");
    t.residual(std::max(0.0, -pc.pairing_min_eig), psd_tol,
               "pullback monotone pairing");

    MonotonePair mf = oracle::random_monotone(nf, rng);
    PairedSubspace pushed = pushforward(a_map, subspace_of(mf, tol), tol);
    MonotoneCertificate fc = monotone_certificate(pushed);
    t.check(fc.dim == ng, "pushforward dimension");
    t.residual(std::max(0.0, -fc.pairing_min_eig), psd_tol,
               "pushforward monotone pairing");
  }
  return finish("maximal-monotone closure", trials * 3, t);
}

BatteryResult battery_frame_consistency(uint64_t seed, int trials,
                                        double rel_tol) {
  Rng rng(seed);
  Tally t;
  TolerancePolicy tol;
  for (int trial = 0; trial < trials; ++trial) {
    const Index n = rng.pick(1, 10);

    {  // invertible P: H^z(z) = H^x(Pz)
      oracle::LagrangeShape sh;
      sh.m1 = rng.pick(0, n);
      sh.m2 = rng.pick(0, n - sh.m1);
      sh.m3 = n - sh.m1 - sh.m2;
      LagrangePair lp = oracle::random_lagrange(sh, rng);
      Vector z = oracle::random_gaussian(n, 1, rng);
      const double hz = hamiltonian(lp, z, Frame::Z, tol);
      const double hx = hamiltonian(lp, Vector(lp.p * z), Frame::X, tol);
      const double scale = std::max(1.0, std::abs(hz));
      t.residual(std::abs(hz - hx) / scale, rel_tol, "H^z vs H^x");
    }
    {  // invertible S: H^z(z) = H^e(Sz)
      oracle::LagrangeShape sh;
      sh.m1 = rng.pick(0, n);
      sh.m2 = n - sh.m1;  // signature core, S invertible
      LagrangePair lp = oracle::random_lagrange(sh, rng);
      Vector z = oracle::random_gaussian(n, 1, rng);
      const double hz = hamiltonian(lp, z, Frame::Z, tol);
      const double he = hamiltonian(lp, Vector(lp.s * z), Frame::E, tol);
      const double scale = std::max(1.0, std::abs(hz));
      t.residual(std::abs(hz - he) / scale, rel_tol, "H^z vs H^e");
    }
  }
  return finish("hamiltonian frame consistency", trials * 2, t);
}

std::vector<BatteryResult> run_selftest(uint64_t seed, int trials) {
  std::vector<BatteryResult> out;
  out.push_back(battery_condense_residuals(seed, trials, 12, 1e-10, 3));
  out.push_back(battery_index_law(seed + 1, trials * 2, 10));
  out.push_back(battery_dual_oracle(seed + 2, trials * 2, 10));
  out.push_back(battery_dissipation(seed + 3, trials, 10, 1e-12));
  out.push_back(battery_monotone_closure(seed + 4, trials, 1e-10));
  out.push_back(battery_frame_consistency(seed + 5, trials, 1e-12));
  return out;
}

}  // namespace phdae
