#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phdae/matrix.hpp"

namespace phdae {

// Randomized property batteries shared by `phdae selftest` and the
// acceptance suite. Each battery is seeded and reproducible.
struct BatteryResult {
  std::string name;
  bool passed = false;
  int trials = 0;
  int failures = 0;
  double worst = 0.0;  // worst observed residual / margin, battery-specific
  std::string detail;
};

// Canonical-pattern residuals <= res_tol * ||input|| for random instances of
// every condensed form, plus block-size invariance under equiv_trials random
// structured equivalences per instance.
BatteryResult battery_condense_residuals(uint64_t seed, int trials, Index max_n,
                                         double res_tol, int equiv_trials);

// Index <= 2 for random regular extended systems; index 2 implies singular P.
BatteryResult battery_index_law(uint64_t seed, int trials, Index max_n);

// Wong-sequence index equals shuffle-algorithm index on random regular
// pencils (drawn from structured and unstructured families).
BatteryResult battery_dual_oracle(uint64_t seed, int trials, Index max_n);

// energy_rate <= dis_tol * ||z||^2 * ||R|| for random valid DH systems.
BatteryResult battery_dissipation(uint64_t seed, int systems, int states,
                                  double dis_tol);

// Compositions, pull-backs and push-forwards of maximally monotone subspaces
// stay maximally monotone: full dimension, pairing >= -psd_tol.
BatteryResult battery_monotone_closure(uint64_t seed, int trials,
                                       double psd_tol);

// H^z(z) = H^x(Pz) = H^e(Sz) within rel_tol for invertible P resp. S.
BatteryResult battery_frame_consistency(uint64_t seed, int trials,
                                        double rel_tol);

std::vector<BatteryResult> run_selftest(uint64_t seed, int trials);

}  // namespace phdae
