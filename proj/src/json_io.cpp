#include "phdae/json_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace phdae {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix matrix_from_json(const Json& j) {
  if (j.is_array()) {  // bare nested array
    const Index rows = static_cast<Index>(j.size());
    const Index cols = rows > 0 ? static_cast<Index>(j.at(0).size()) : 0;
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      if (static_cast<Index>(j.at(i).size()) != cols)
        throw Error(Errc::InvalidInput, "ragged matrix rows in JSON");
      for (Index c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
    }
    return m;
  }
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  const Json& data = j.at("data");
  if (static_cast<Index>(data.size()) != rows)
    throw Error(Errc::InvalidInput, "matrix row count mismatch in JSON");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (static_cast<Index>(data.at(i).size()) != cols)
      throw Error(Errc::InvalidInput, "matrix column count mismatch in JSON");
    for (Index c = 0; c < cols; ++c) m(i, c) = data.at(i).at(c).get<double>();
  }
  require_finite(m, "JSON matrix");
  return m;
}

namespace {

void dump_fixed(const Json& j, std::string& out, int indent, int depth) {
  const std::string pad(static_cast<size_t>(indent * depth), ' ');
  const std::string pad_in(static_cast<size_t>(indent * (depth + 1)), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + Json(it.key()).dump() + ": ";
        dump_fixed(it.value(), out, indent, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Flat arrays of numbers go on one line.
      bool all_scalar = true;
      for (const auto& v : j)
        if (v.is_structured()) all_scalar = false;
      if (all_scalar) {
        out += "[";
        bool first = true;
        for (const auto& v : j) {
          if (!first) out += ", ";
          first = false;
          dump_fixed(v, out, indent, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_fixed(v, out, indent, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", j.get<double>());
      out += buf;
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_json_fixed(const Json& j, int indent) {
  std::string out;
  dump_fixed(j, out, indent, 0);
  out += "\n";
  return out;
}

Matrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidInput, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw Error(Errc::InvalidInput, "empty Matrix Market file: " + path);
  if (line.rfind("%%MatrixMarket", 0) != 0 ||
      line.find("array") == std::string::npos ||
      line.find("real") == std::string::npos)
    throw Error(Errc::InvalidInput,
                "expected '%%MatrixMarket matrix array real general' in " + path);
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream header(line);
  Index rows = 0, cols = 0;
  if (!(header >> rows >> cols))
    throw Error(Errc::InvalidInput, "bad size line in " + path);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      double v;
      if (!(in >> v))
        throw Error(Errc::InvalidInput, "truncated Matrix Market file: " + path);
      m(i, j) = v;
    }
  require_finite(m, "Matrix Market matrix");
  return m;
}

void write_matrix_market(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::InvalidInput, "cannot write " + path);
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  char buf[64];
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g\n", m(i, j));
      out << buf;
    }
}

SystemFile load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidInput, "cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(Errc::InvalidInput, "JSON parse error in " + path + ": " + e.what());
  }
  SystemFile f;
  f.kind = j.value("kind", std::string{});
  if (f.kind.empty())
    throw Error(Errc::InvalidInput, "system file missing \"kind\": " + path);

  if (j.contains("matrices")) {
    for (auto it = j["matrices"].begin(); it != j["matrices"].end(); ++it)
      f.matrices[it.key()] = matrix_from_json(it.value());
  }
  if (j.contains("matrix_files")) {
    const auto dir = std::filesystem::path(path).parent_path();
    for (auto it = j["matrix_files"].begin(); it != j["matrix_files"].end(); ++it)
      f.matrices[it.key()] =
          read_matrix_market((dir / it.value().get<std::string>()).string());
  }
  if (j.contains("parameters")) {
    for (auto it = j["parameters"].begin(); it != j["parameters"].end(); ++it)
      f.parameters[it.key()] = it.value().get<double>();
  }
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    if (t.contains("relative_rank_tol"))
      f.tol.rank_rel = t["relative_rank_tol"].get<double>();
    if (t.contains("structure_tol"))
      f.tol.structure_tol = t["structure_tol"].get<double>();
    if (t.contains("cluster_tol"))
      f.tol.cluster_tol = t["cluster_tol"].get<double>();
  }
  return f;
}

void save_system_file(const SystemFile& f, const std::string& path) {
  Json j;
  j["kind"] = f.kind;
  Json mats = Json::object();
  for (const auto& [name, m] : f.matrices) mats[name] = matrix_to_json(m);
  j["matrices"] = std::move(mats);
  if (!f.parameters.empty()) {
    Json params = Json::object();
    for (const auto& [name, v] : f.parameters) params[name] = v;
    j["parameters"] = std::move(params);
  }
  std::ofstream out(path);
  if (!out) throw Error(Errc::InvalidInput, "cannot write " + path);
  out << dump_json_fixed(j);
}

const Matrix& need_matrix(const SystemFile& f, const std::string& name) {
  auto it = f.matrices.find(name);
  if (it == f.matrices.end())
    throw Error(Errc::InvalidInput,
                "system file is missing matrix \"" + name + "\"");
  return it->second;
}

LagrangePair as_lagrange(const SystemFile& f) {
  return {need_matrix(f, "P"), need_matrix(f, "S")};
}
DiracPair as_dirac(const SystemFile& f) {
  return {need_matrix(f, "K"), need_matrix(f, "L")};
}
MonotonePair as_monotone(const SystemFile& f) {
  return {need_matrix(f, "M"), need_matrix(f, "N")};
}
DHSystem as_dh(const SystemFile& f) {
  return {need_matrix(f, "E"), need_matrix(f, "J"), need_matrix(f, "R"),
          need_matrix(f, "Q")};
}
ExtendedHDAE as_extended(const SystemFile& f) {
  return {need_matrix(f, "K"), need_matrix(f, "L"), need_matrix(f, "P"),
          need_matrix(f, "S")};
}
MonotoneAnnihilatorSystem as_monotone_annihilator(const SystemFile& f) {
  return {need_matrix(f, "C"), need_matrix(f, "D"), need_matrix(f, "P"),
          need_matrix(f, "S")};
}

Pencil as_pencil(const SystemFile& f) {
  if (f.kind == "pencil" || f.kind == "implicit")
    return {need_matrix(f, "E"), need_matrix(f, "A")};
  if (f.kind == "dh") return pencil_of(as_dh(f));
  if (f.kind == "extended") return pencil_of(as_extended(f));
  if (f.kind == "monotone-annihilator")
    return pencil_of(as_monotone_annihilator(f));
  throw Error(Errc::InvalidInput,
              "cannot derive a pencil from kind \"" + f.kind + "\"");
}

Json to_json(const TolerancePolicy& tol) {
  return Json{{"relative_rank_tol",
               tol.rank_rel > 0 ? Json(tol.rank_rel) : Json("auto")},
              {"structure_tol", tol.structure_tol},
              {"cluster_tol", tol.cluster_tol}};
}

Json to_json(const ValidationReport& rep) {
  Json checks = Json::array();
  for (const auto& c : rep.checks)
    checks.push_back(Json{{"name", c.name},
                          {"residual", c.residual},
                          {"threshold", c.threshold},
                          {"ok", c.ok}});
  Json attrs = Json::object();
  for (const auto& [k, v] : rep.attributes) attrs[k] = v;
  return Json{{"kind", system_kind_name(rep.kind)},
              {"valid", rep.valid},
              {"checks", std::move(checks)},
              {"attributes", std::move(attrs)}};
}

Json to_json(const RegularityCertificate& cert) {
  Json j{{"regular", cert.regular},
         {"best_smin_rel", cert.best_smin_rel},
         {"shift_used", cert.shift_used},
         {"wong_dims", cert.wong_dims}};
  if (cert.common_kernel) {
    Json v = Json::array();
    for (Index i = 0; i < cert.common_kernel->size(); ++i)
      v.push_back((*cert.common_kernel)(i));
    j["common_kernel"] = std::move(v);
  }
  return j;
}

Json to_json(const IndexReport& rep) {
  Json eigs = Json::array();
  for (const auto& ev : rep.finite_eigenvalues)
    eigs.push_back(Json{{"re", ev.value.real()},
                        {"im", ev.value.imag()},
                        {"algebraic", ev.algebraic},
                        {"geometric", ev.geometric},
                        {"on_imaginary_axis", ev.on_imaginary_axis}});
  return Json{{"regular", rep.regular},
              {"index", rep.nu},
              {"finite_eigenvalues", std::move(eigs)},
              {"infinite_block_dim", rep.infinite_block_dim},
              {"decision_margin", rep.decision_margin},
              {"borderline", rep.borderline}};
}

Json to_json(const DHVerdict& verdict) {
  return Json{{"variant", dh_variant_name(verdict.variant)},
              {"equivalent", verdict.equivalent},
              {"failed_conditions", verdict.failed_conditions},
              {"index_report", to_json(verdict.index_report)}};
}

namespace {
Json condensed_common(const char* form, std::initializer_list<std::pair<const char*, Index>> blocks,
                      std::initializer_list<std::pair<const char*, double>> residuals,
                      const std::vector<std::string>& warnings) {
  Json j{{"form", form}};
  Json b = Json::object();
  for (const auto& [k, v] : blocks) b[k] = v;
  j["block_sizes"] = std::move(b);
  Json r = Json::object();
  for (const auto& [k, v] : residuals) r[k] = v;
  j["residuals"] = std::move(r);
  j["warnings"] = warnings;
  return j;
}
}  // namespace

Json to_json(const LagrangeCondensed& c) {
  Json j = condensed_common("lagrange",
                            {{"m1", c.m1}, {"m2", c.m2}, {"m3", c.m3},
                             {"m4", c.m4}, {"n5", c.n5}},
                            {{"P", c.residual_p}, {"S", c.residual_s}},
                            c.warnings);
  j["V"] = matrix_to_json(c.v);
  j["W"] = matrix_to_json(c.w);
  j["P_form"] = matrix_to_json(c.p_form);
  j["S_form"] = matrix_to_json(c.s_form);
  return j;
}

Json to_json(const LagrangeStaircase& c) {
  Json j = condensed_common("lagrange-staircase",
                            {{"m1_plus_m2", c.m12}, {"m3", c.m3},
                             {"m4", c.m4}, {"n5", c.n5}},
                            {{"P", c.residual_p}, {"S", c.residual_s}},
                            c.warnings);
  j["V"] = matrix_to_json(c.v);
  j["W"] = matrix_to_json(c.w);
  j["P_form"] = matrix_to_json(c.p_form);
  j["S_form"] = matrix_to_json(c.s_form);
  return j;
}

Json to_json(const DiracCondensed& c) {
  Json j = condensed_common("dirac",
                            {{"l1", c.l1}, {"l3", c.l3}, {"l4", c.l4},
                             {"n5", c.n5}},
                            {{"K", c.residual_k}, {"L", c.residual_l}},
                            c.warnings);
  j["U"] = matrix_to_json(c.u);
  j["V"] = matrix_to_json(c.v);
  j["K_form"] = matrix_to_json(c.k_form);
  j["L_form"] = matrix_to_json(c.l_form);
  return j;
}

Json to_json(const DiracStaircase& c) {
  Json j = condensed_common("dirac-staircase",
                            {{"l1", c.l1}, {"l3", c.l3}, {"l4", c.l4},
                             {"n5", c.n5}},
                            {{"K", c.residual_k}, {"L", c.residual_l}},
                            c.warnings);
  j["U"] = matrix_to_json(c.u);
  j["V"] = matrix_to_json(c.v);
  j["K_form"] = matrix_to_json(c.k_form);
  j["L_form"] = matrix_to_json(c.l_form);
  return j;
}

Json to_json(const ExtendedCondensed& c) {
  const bool monotone = c.variant == ExtendedVariant::Monotone;
  Json j = condensed_common(
      extended_variant_name(c.variant), {{"n1", c.n1}, {"n2", c.n2}},
      {{monotone ? "C" : "K", c.residual_a},
       {monotone ? "D" : "L", c.residual_b},
       {"P", c.residual_p},
       {"S", c.residual_s}},
      c.warnings);
  j["U"] = matrix_to_json(c.u);
  j["V"] = matrix_to_json(c.v);
  j["W"] = matrix_to_json(c.w);
  j[monotone ? "C_form" : "K_form"] = matrix_to_json(c.a_form);
  j[monotone ? "D_form" : "L_form"] = matrix_to_json(c.b_form);
  j["P_form"] = matrix_to_json(c.p_form);
  j["S_form"] = matrix_to_json(c.s_form);
  return j;
}

Json to_json(const Index2Staircase& c) {
  Json j = condensed_common("index2-staircase",
                            {{"n1", c.n1}, {"n2", c.n2}, {"n3", c.n3},
                             {"n4", c.n4}},
                            {{"E", c.residual_e}, {"A", c.residual_a}}, {});
  j["U"] = matrix_to_json(c.u);
  j["V"] = matrix_to_json(c.v);
  j["E_form"] = matrix_to_json(c.e_form);
  j["A_form"] = matrix_to_json(c.a_form);
  return j;
}

Json to_json(const DHCanonical& c) {
  Json j = condensed_common("dh-canonical",
                            {{"n1", c.n1}, {"n2", c.n2}, {"n3", c.n3},
                             {"n4", c.n4}},
                            {{"E", c.residual_e}, {"A", c.residual_a}},
                            c.warnings);
  j["U"] = matrix_to_json(c.u);
  j["V"] = matrix_to_json(c.v);
  j["E_form"] = matrix_to_json(c.e_form);
  j["A_form"] = matrix_to_json(c.a_form);
  j["E33"] = matrix_to_json(c.e33);
  j["J33"] = matrix_to_json(c.j33);
  j["R33"] = matrix_to_json(c.r33);
  return j;
}

}  // namespace phdae
