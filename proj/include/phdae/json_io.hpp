#pragma once

#include <json.hpp>
#include <map>
#include <string>

#include "phdae/analyze.hpp"
#include "phdae/condense.hpp"
#include "phdae/structures.hpp"

namespace phdae {

inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

// Serializes with every numeric field printed to 17 significant digits so
// reruns produce byte-identical reports.
std::string dump_json_fixed(const Json& j, int indent = 2);

// Dense "array real general" Matrix Market files.
Matrix read_matrix_market(const std::string& path);
void write_matrix_market(const Matrix& m, const std::string& path);

// On-disk system description: a JSON envelope with inline matrices, or a
// manifest naming one Matrix Market file per matrix.
struct SystemFile {
  std::string kind;
  std::map<std::string, Matrix> matrices;
  std::map<std::string, double> parameters;
  TolerancePolicy tol;
};

SystemFile load_system_file(const std::string& path);
void save_system_file(const SystemFile& file, const std::string& path);

const Matrix& need_matrix(const SystemFile& f, const std::string& name);

LagrangePair as_lagrange(const SystemFile& f);
DiracPair as_dirac(const SystemFile& f);
MonotonePair as_monotone(const SystemFile& f);
DHSystem as_dh(const SystemFile& f);
ExtendedHDAE as_extended(const SystemFile& f);
MonotoneAnnihilatorSystem as_monotone_annihilator(const SystemFile& f);
// Accepts kind "pencil"/"implicit" directly and derives the pencil from the
// structured kinds.
Pencil as_pencil(const SystemFile& f);

Json to_json(const TolerancePolicy& tol);
Json to_json(const ValidationReport& rep);
Json to_json(const RegularityCertificate& cert);
Json to_json(const IndexReport& rep);
Json to_json(const DHVerdict& verdict);
Json to_json(const LagrangeCondensed& c);
Json to_json(const LagrangeStaircase& c);
Json to_json(const DiracCondensed& c);
Json to_json(const DiracStaircase& c);
Json to_json(const ExtendedCondensed& c);
Json to_json(const Index2Staircase& c);
Json to_json(const DHCanonical& c);

}  // namespace phdae
