#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "phdae/analyze.hpp"
#include "phdae/structures.hpp"

namespace phdae {

// Physical example fixtures. Each build validates against its structure
// class and records the facts the fixture is expected to reproduce.
struct ModelFacts {
  std::optional<Index> expected_index;
  std::vector<Index> hamiltonian_free_vars;  // state indices absent from H
  std::string note;
};

struct Model {
  std::string kind;
  std::optional<DHSystem> dh;
  std::optional<ExtendedHDAE> extended;
  ModelFacts facts;

  Pencil pencil() const;
};

// kinds: rlc | lc | stokes | gas | mechanical | msd | two-mass.
// Parameters are per kind; unknown parameters raise InvalidParameters.
// msd takes {m, k, d, limit} with limit 0 = none, 1 = mass to zero,
// 2 = stiffness to infinity, 3 = both.
Model build_model(const std::string& kind,
                  const std::map<std::string, double>& params = {});

std::vector<std::string> model_kinds();

// The four canonical pencil blocks written as extended quadruples
// K P zdot = L S z (lossless case: a33 must be skew-symmetric).
struct FourBlockRep {
  std::string label;
  ExtendedHDAE sys;
  Matrix block_e, block_a;  // the pencil block this quadruple realizes
  std::string hamiltonian_note;
};

std::vector<FourBlockRep> four_block_representations(
    Index n1, Index n2, const Matrix& e33, const Matrix& a33, Index n4,
    const TolerancePolicy& tol = {});

}  // namespace phdae
