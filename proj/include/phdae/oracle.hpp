#pragma once

#include <random>

#include "phdae/analyze.hpp"
#include "phdae/structures.hpp"

namespace phdae::oracle {

// Independent brute-force implementations used by tests and the selftest
// battery to certify the primary algorithms.

// Differentiation index via the shuffle algorithm: row-compress E,
// differentiate the algebraic equations, repeat.
Index shuffle_index(const Pencil& p, const TolerancePolicy& tol = {});

// Block sizes predicted from rank identities, independent of the
// condensation path:
//   m1, m2 = inertia of sym(S^T P); m1+m2+m3 = rank P;
//   m4 = rank(S ker(P)); n5 from the dead-row count, which pairs
//   coker P against coker S through the canonical X* x X duality.
struct LagrangeBlockPrediction {
  Index m1 = 0, m2 = 0, m3 = 0, m4 = 0, n5 = 0;
};
LagrangeBlockPrediction predicted_lagrange_blocks(const LagrangePair& pair,
                                                  const TolerancePolicy& tol = {});

// 2*l1 = rank(K L^T); 2*l1 + l3 = rank K; l4 = rank(ann(K) L); n5 from the
// dead-column count, pairing ker K against ker L.
struct DiracBlockPrediction {
  Index l1 = 0, l3 = 0, l4 = 0, n5 = 0;
};
DiracBlockPrediction predicted_dirac_blocks(const DiracPair& pair,
                                            const TolerancePolicy& tol = {});

// Seeded, reproducible generators. All outputs satisfy their structure
// class to machine precision by construction.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  double gauss() { return gauss_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  Index pick(Index lo, Index hi) {  // inclusive bounds
    return std::uniform_int_distribution<Index>(lo, hi)(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

Matrix random_gaussian(Index rows, Index cols, Rng& rng);
Matrix random_orthogonal(Index n, Rng& rng);
// Orthogonal * diagonal(spread range) * orthogonal: invertible and
// well-conditioned, suitable for structured equivalence trials.
Matrix random_well_conditioned(Index n, Rng& rng, double spread = 2.0);
Matrix random_symmetric(Index n, Rng& rng);
Matrix random_skew(Index n, Rng& rng);
Matrix random_psd(Index n, Index rank, Rng& rng);

struct LagrangeShape {
  Index m1 = 0, m2 = 0, m3 = 0, m4 = 0, n5 = 0, extra_rows = 0, extra_cols = 0;
};
LagrangePair random_lagrange(const LagrangeShape& shape, Rng& rng);
LagrangePair random_lagrange(Index n, Rng& rng);  // random square shape

struct DiracShape {
  Index l1 = 0, l3 = 0, l4 = 0, n5 = 0, extra_rows = 0, extra_cols = 0;
};
DiracPair random_dirac(const DiracShape& shape, Rng& rng);
DiracPair random_dirac(Index n, Rng& rng);

MonotonePair random_monotone(Index n, Rng& rng);
DHSystem random_dh(Index n, Rng& rng);

// Regular by construction: block-diagonal combination of canonical seeds of
// known index, wrapped in a random structured equivalence.
ExtendedHDAE random_extended_regular(Index n, Rng& rng);

MonotoneAnnihilatorSystem random_monotone_annihilator(Index n, Rng& rng);

// Applies the structured equivalence (U, V, W) with fresh random
// well-conditioned factors; preserves validity and all block sizes.
ExtendedHDAE random_equivalence(const ExtendedHDAE& sys, Rng& rng);
LagrangePair random_equivalence(const LagrangePair& pair, Rng& rng);
DiracPair random_equivalence(const DiracPair& pair, Rng& rng);

}  // namespace phdae::oracle
