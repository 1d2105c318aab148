#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "phdae/convert.hpp"
#include "phdae/json_io.hpp"
#include "phdae/models.hpp"
#include "phdae/numkernel.hpp"
#include "phdae/selftest.hpp"

namespace {

using namespace phdae;

enum ExitCode : int {
  kOk = 0,
  kNegative = 1,
  kNumericalFailure = 2,
  kUsage = 3,
};

struct Options {
  double tol_override = 0.0;
  bool json = false;
};

TolerancePolicy effective_tol(const SystemFile& f, const Options& opt) {
  TolerancePolicy tol = f.tol;
  if (opt.tol_override > 0.0) tol.rank_rel = opt.tol_override;
  return tol;
}

void emit(const Json& report, const Options& opt, const std::string& human) {
  if (opt.json) {
    std::cout << dump_json_fixed(report);
  } else {
    std::cout << human;
  }
}

Json envelope(const std::string& tool, const TolerancePolicy& tol) {
  return Json{{"tool", tool},
              {"tool_version", kToolVersion},
              {"tolerances", to_json(tol)}};
}

std::string format_matrix(const Matrix& m, const std::string& name) {
  std::ostringstream os;
  os << name << " (" << m.rows() << "x" << m.cols() << "):\n";
  for (Index i = 0; i < m.rows(); ++i) {
    os << "  ";
    for (Index j = 0; j < m.cols(); ++j) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "% .6g", m(i, j));
      os << buf << (j + 1 < m.cols() ? " " : "");
    }
    os << "\n";
  }
  return os.str();
}

int run_validate(const std::string& path, const Options& opt) {
  SystemFile f = load_system_file(path);
  TolerancePolicy tol = effective_tol(f, opt);
  auto kind = parse_system_kind(f.kind);
  if (!kind)
    throw Error(Errc::InvalidInput, "kind \"" + f.kind + "\" is not validatable");

  ValidationReport rep;
  switch (*kind) {
    case SystemKind::Lagrange: rep = validate(as_lagrange(f), tol); break;
    case SystemKind::Dirac: rep = validate(as_dirac(f), tol); break;
    case SystemKind::Monotone: rep = validate(as_monotone(f), tol); break;
    case SystemKind::DH: rep = validate(as_dh(f), tol); break;
    case SystemKind::Extended: rep = validate(as_extended(f), tol); break;
    case SystemKind::MonotoneAnnihilator:
      rep = validate(as_monotone_annihilator(f), tol);
      break;
  }

  Json j = envelope("validate", tol);
  j["report"] = to_json(rep);
  j["verdict"] = rep.valid ? "valid" : "invalid";

  std::ostringstream human;
  human << f.kind << " system: " << (rep.valid ? "VALID" : "INVALID") << "\n";
  for (const auto& c : rep.checks) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "  [%s] %-34s residual %.3e (tol %.3e)\n",
                  c.ok ? "ok" : "VIOLATED", c.name.c_str(), c.residual,
                  c.threshold);
    human << buf;
  }
  for (const auto& [k, v] : rep.attributes)
    human << "  attribute " << k << ": " << (v ? "yes" : "no") << "\n";
  emit(j, opt, human.str());
  return rep.valid ? kOk : kNegative;
}

int run_condense(const std::string& path, const std::string& form,
                 const Options& opt) {
  SystemFile f = load_system_file(path);
  TolerancePolicy tol = effective_tol(f, opt);
  Json j = envelope("condense", tol);
  std::ostringstream human;

  if (form == "lagrange") {
    LagrangeCondensed c = lagrange_condense(as_lagrange(f), tol);
    j["result"] = to_json(c);
    human << "lagrange condensed form: m1=" << c.m1 << " m2=" << c.m2
          << " m3=" << c.m3 << " m4=" << c.m4 << " n5=" << c.n5
          << "  residuals P " << c.residual_p << ", S " << c.residual_s << "\n"
          << format_matrix(c.p_form, "P_form") << format_matrix(c.s_form, "S_form");
  } else if (form == "lagrange-staircase") {
    LagrangeStaircase c = lagrange_staircase_orth(as_lagrange(f), tol);
    j["result"] = to_json(c);
    human << "orthogonal lagrange staircase: m1+m2=" << c.m12 << " m3=" << c.m3
          << " m4=" << c.m4 << " n5=" << c.n5 << "\n";
  } else if (form == "dirac") {
    DiracCondensed c = dirac_condense(as_dirac(f), tol);
    j["result"] = to_json(c);
    human << "dirac condensed form: l1=" << c.l1 << " l3=" << c.l3
          << " l4=" << c.l4 << " n5=" << c.n5 << "  residuals K "
          << c.residual_k << ", L " << c.residual_l << "\n"
          << format_matrix(c.k_form, "K_form") << format_matrix(c.l_form, "L_form");
  } else if (form == "dirac-staircase") {
    DiracStaircase c = dirac_staircase_orth(as_dirac(f), tol);
    j["result"] = to_json(c);
    human << "orthogonal dirac staircase: l1=" << c.l1 << " l3=" << c.l3
          << " l4=" << c.l4 << " n5=" << c.n5 << "\n";
  } else if (form == "extended-lagrange" || form == "extended-dirac") {
    ExtendedCondensed c = extended_condense(
        as_extended(f),
        form == "extended-lagrange" ? ExtendedVariant::LagrangeFirst
                                    : ExtendedVariant::DiracFirst,
        tol);
    j["result"] = to_json(c);
    human << extended_variant_name(c.variant) << " condensed form: n1=" << c.n1
          << " n2=" << c.n2 << "\n"
          << format_matrix(c.a_form, "K_form") << format_matrix(c.b_form, "L_form")
          << format_matrix(c.p_form, "P_form") << format_matrix(c.s_form, "S_form");
  } else if (form == "monotone") {
    ExtendedCondensed c = monotone_condense(as_monotone_annihilator(f), tol);
    j["result"] = to_json(c);
    human << "monotone condensed form: n1=" << c.n1 << " n2=" << c.n2 << "\n"
          << format_matrix(c.a_form, "C_form") << format_matrix(c.b_form, "D_form")
          << format_matrix(c.p_form, "P_form") << format_matrix(c.s_form, "S_form");
  } else if (form == "index2-staircase") {
    Index2Staircase c = index2_staircase(as_pencil(f), tol);
    j["result"] = to_json(c);
    human << "index-2 staircase: n1=" << c.n1 << " n2=" << c.n2
          << " n3=" << c.n3 << " n4=" << c.n4 << "\n"
          << format_matrix(c.e_form, "E_form") << format_matrix(c.a_form, "A_form");
  } else if (form == "dh-canonical") {
    DHCanonical c = dh_canonicalize(as_pencil(f), tol);
    j["result"] = to_json(c);
    human << "dh canonical form: n1=" << c.n1 << " n2=" << c.n2
          << " n3=" << c.n3 << " n4=" << c.n4 << "\n"
          << format_matrix(c.e33, "E33") << format_matrix(c.j33, "J33")
          << format_matrix(c.r33, "R33");
  } else {
    throw CLI::ValidationError("unknown --form " + form);
  }
  j["verdict"] = "ok";
  emit(j, opt, human.str());
  return kOk;
}

int run_index(const std::string& path, const Options& opt) {
  SystemFile f = load_system_file(path);
  TolerancePolicy tol = effective_tol(f, opt);
  Pencil p = as_pencil(f);
  RegularityCertificate cert = regularity(p, tol);
  Json j = envelope("index", tol);
  j["regularity"] = to_json(cert);
  if (!cert.regular) {
    j["verdict"] = "singular";
    emit(j, opt, "pencil is SINGULAR\n");
    return kNegative;
  }
  IndexReport rep = index(p, tol);
  j["report"] = to_json(rep);
  j["verdict"] = "ok";

  std::ostringstream human;
  human << "regular pencil, differentiation index " << rep.nu << "\n";
  human << "infinite block dimension " << rep.infinite_block_dim << "\n";
  for (const auto& ev : rep.finite_eigenvalues) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "  eigenvalue % .6g %+.6gi  alg %lld geom %lld%s\n",
                  ev.value.real(), ev.value.imag(),
                  static_cast<long long>(ev.algebraic),
                  static_cast<long long>(ev.geometric),
                  ev.on_imaginary_axis ? "  (imaginary axis)" : "");
    human << buf;
  }
  if (rep.borderline)
    human << "  warning: rank decision margin " << rep.decision_margin << "\n";
  emit(j, opt, human.str());
  return kOk;
}

int run_check(const std::string& path, const std::string& variant_name,
              const Options& opt) {
  SystemFile f = load_system_file(path);
  TolerancePolicy tol = effective_tol(f, opt);
  auto variant = parse_dh_variant(variant_name);
  if (!variant) throw CLI::ValidationError("unknown --variant " + variant_name);
  DHVerdict verdict = check_dh_equivalence(as_pencil(f), *variant, tol);
  Json j = envelope("check", tol);
  j["report"] = to_json(verdict);
  j["verdict"] = verdict.equivalent ? "equivalent" : "not-equivalent";

  std::ostringstream human;
  human << "variant " << dh_variant_name(*variant) << ": "
        << (verdict.equivalent ? "EQUIVALENT" : "NOT EQUIVALENT") << "\n";
  for (const auto& fc : verdict.failed_conditions)
    human << "  failed: " << fc << "\n";
  emit(j, opt, human.str());
  return verdict.equivalent ? kOk : kNegative;
}

int run_convert(const std::string& path, const std::string& to,
                const std::string& out_path, const Options& opt) {
  SystemFile f = load_system_file(path);
  TolerancePolicy tol = effective_tol(f, opt);
  Json j = envelope("convert", tol);
  j["to"] = to;
  std::ostringstream human;
  SystemFile out_file;

  if (to == "monotone") {
    MonotoneAnnihilatorSystem sys = dh_to_monotone(as_dh(f), tol);
    j["C"] = matrix_to_json(sys.c);
    j["D"] = matrix_to_json(sys.d);
    j["P"] = matrix_to_json(sys.p);
    j["S"] = matrix_to_json(sys.s);
    out_file.kind = "monotone-annihilator";
    out_file.matrices = {{"C", sys.c}, {"D", sys.d}, {"P", sys.p}, {"S", sys.s}};
    human << format_matrix(sys.c, "C") << format_matrix(sys.d, "D")
          << format_matrix(sys.p, "P") << format_matrix(sys.s, "S");
  } else {
    ExtendedHDAE sys = as_extended(f);
    if (to == "x") {
      XRepresentation x = to_x_representation(sys, tol);
      j["E"] = matrix_to_json(x.system.e);
      j["A"] = matrix_to_json(x.system.a);
      j["M"] = matrix_to_json(x.m);
      j["N"] = matrix_to_json(x.n);
      out_file.kind = "implicit";
      out_file.matrices = {{"E", x.system.e}, {"A", x.system.a}};
      human << format_matrix(x.system.e, "E = M K")
            << format_matrix(x.system.a, "A = N S^T");
    } else if (to == "klq") {
      KLQForm k = to_klq(sys, tol);
      j["K"] = matrix_to_json(k.k);
      j["L"] = matrix_to_json(k.l);
      j["Q"] = matrix_to_json(k.q);
      out_file.kind = "implicit";
      out_file.matrices = {{"E", k.k}, {"A", Matrix(k.l * k.q)}};
      human << format_matrix(k.k, "K") << format_matrix(k.l, "L")
            << format_matrix(k.q, "Q = S P^{-1}");
    } else if (to == "poisson") {
      PoissonForm p = to_poisson(sys, tol);
      j["J"] = matrix_to_json(p.j);
      j["Q"] = matrix_to_json(p.q);
      out_file.kind = "implicit";
      out_file.matrices = {{"E", Matrix::Identity(p.j.rows(), p.j.cols())},
                           {"A", Matrix(p.j * p.q)}};
      human << format_matrix(p.j, "J = K^{-1} L")
            << format_matrix(p.q, "Q = S P^{-1}");
    } else if (to == "gradient") {
      GradientForm g = to_gradient(sys, tol);
      j["J"] = matrix_to_json(g.j);
      j["E"] = matrix_to_json(g.system.e);
      j["A"] = matrix_to_json(g.system.a);
      out_file.kind = "implicit";
      out_file.matrices = {{"E", g.system.e}, {"A", g.system.a}};
      human << format_matrix(g.system.e, "P^T J")
            << format_matrix(g.system.a, "S^T");
    } else if (to == "symplectic") {
      SymplecticForm s = to_symplectic(sys, tol);
      j["J"] = matrix_to_json(s.j);
      j["Q"] = matrix_to_json(s.q);
      out_file.kind = "implicit";
      out_file.matrices = {{"E", s.j}, {"A", s.q}};
      human << format_matrix(s.j, "J = L^{-1} K")
            << format_matrix(s.q, "Q = S P^{-1}");
    } else if (to == "adjoint") {
      ImplicitSystem a = adjoint(sys);
      j["E"] = matrix_to_json(a.e);
      j["A"] = matrix_to_json(a.a);
      out_file.kind = "implicit";
      out_file.matrices = {{"E", a.e}, {"A", a.a}};
      human << format_matrix(a.e, "P^T K^T") << format_matrix(a.a, "S^T L^T");
    } else if (to == "multipliers") {
      MultiplierSystem m = with_multipliers(sys, tol);
      j["E"] = matrix_to_json(m.extended.e);
      j["A"] = matrix_to_json(m.extended.a);
      j["n1"] = m.n1;
      j["n2"] = m.n2;
      j["multiplier_vars"] =
          Json{{"first", m.n1 + m.n2}, {"count", m.n2}};
      out_file.kind = "implicit";
      out_file.matrices = {{"E", m.extended.e}, {"A", m.extended.a}};
      human << "variables: x1 (" << m.n1 << "), x2 (" << m.n2
            << "), multipliers e2 (" << m.n2 << ")\n"
            << format_matrix(m.extended.e, "E_ext")
            << format_matrix(m.extended.a, "A_ext");
    } else {
      throw CLI::ValidationError("unknown --to " + to);
    }
  }
  j["verdict"] = "ok";
  if (!out_path.empty()) save_system_file(out_file, out_path);
  emit(j, opt, human.str());
  return kOk;
}

int run_hamiltonian(const std::string& path, const std::string& at,
                    const std::string& frame_name, const Options& opt) {
  SystemFile f = load_system_file(path);
  TolerancePolicy tol = effective_tol(f, opt);

  std::ifstream in(at);
  if (!in) throw Error(Errc::InvalidInput, "cannot open " + at);
  Json vj;
  in >> vj;
  Json arr = vj.is_object() ? (vj.contains("vector") ? vj["vector"] : vj["data"])
                            : vj;
  Vector z(arr.size());
  for (Index i = 0; i < z.size(); ++i) {
    const Json& e = arr.at(i);
    z(i) = e.is_array() ? e.at(0).get<double>() : e.get<double>();
  }

  Frame frame;
  if (frame_name == "z") frame = Frame::Z;
  else if (frame_name == "x") frame = Frame::X;
  else if (frame_name == "e") frame = Frame::E;
  else throw CLI::ValidationError("unknown --frame " + frame_name);

  double h = 0.0;
  if (f.kind == "dh") h = hamiltonian(as_dh(f), z, frame, tol);
  else if (f.kind == "extended") h = hamiltonian(as_extended(f), z, frame, tol);
  else if (f.kind == "lagrange") h = hamiltonian(as_lagrange(f), z, frame, tol);
  else
    throw Error(Errc::InvalidInput,
                "hamiltonian needs a lagrange, dh or extended system");

  Json j = envelope("hamiltonian", tol);
  j["frame"] = frame_name;
  j["value"] = h;
  j["verdict"] = "ok";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "H^%s = %.17g\n", frame_name.c_str(), h);
  emit(j, opt, buf);
  return kOk;
}

int run_model(const std::string& kind,
              const std::vector<std::string>& params_kv,
              const std::string& out_path, const Options& opt) {
  std::map<std::string, double> params;
  for (const auto& kv : params_kv) {
    auto pos = kv.find('=');
    if (pos == std::string::npos)
      throw CLI::ValidationError("--param expects name=value, got " + kv);
    params[kv.substr(0, pos)] = std::stod(kv.substr(pos + 1));
  }
  Model model = build_model(kind, params);

  SystemFile out_file;
  if (model.dh) {
    out_file.kind = "dh";
    out_file.matrices = {{"E", model.dh->e},
                         {"J", model.dh->j},
                         {"R", model.dh->r},
                         {"Q", model.dh->q}};
  } else {
    out_file.kind = "extended";
    out_file.matrices = {{"K", model.extended->k},
                         {"L", model.extended->l},
                         {"P", model.extended->p},
                         {"S", model.extended->s}};
  }
  out_file.parameters = params;
  if (!out_path.empty()) save_system_file(out_file, out_path);

  Json j = envelope("model", {});
  j["kind"] = kind;
  j["system_kind"] = out_file.kind;
  Json facts;
  if (model.facts.expected_index)
    facts["expected_index"] = *model.facts.expected_index;
  facts["hamiltonian_free_vars"] = model.facts.hamiltonian_free_vars;
  facts["note"] = model.facts.note;
  j["facts"] = std::move(facts);
  j["verdict"] = "ok";

  std::ostringstream human;
  human << "model " << kind << " -> " << out_file.kind << " system";
  if (!out_path.empty()) human << " written to " << out_path;
  human << "\n";
  if (model.facts.expected_index)
    human << "  expected index: " << *model.facts.expected_index << "\n";
  if (!model.facts.note.empty()) human << "  " << model.facts.note << "\n";
  for (const auto& [name, m] : out_file.matrices)
    human << format_matrix(m, name);
  emit(j, opt, human.str());
  return kOk;
}

int run_selftest_cmd(uint64_t seed, int trials, const Options& opt) {
  std::vector<BatteryResult> results = run_selftest(seed, trials);
  bool all = true;
  Json batteries = Json::array();
  std::ostringstream human;
  for (const auto& r : results) {
    all = all && r.passed;
    batteries.push_back(Json{{"name", r.name},
                             {"passed", r.passed},
                             {"trials", r.trials},
                             {"failures", r.failures},
                             {"worst", r.worst},
                             {"detail", r.detail}});
    char buf[200];
    std::snprintf(buf, sizeof(buf), "[%s] %-46s trials %-5d worst %.3e\n",
                  r.passed ? "PASS" : "FAIL", r.name.c_str(), r.trials,
                  r.worst);
    human << buf;
    if (!r.passed) human << "       " << r.detail << "\n";
  }
  Json j = envelope("selftest", {});
  j["seed"] = seed;
  j["trials"] = trials;
  j["batteries"] = std::move(batteries);
  j["verdict"] = all ? "pass" : "fail";
  emit(j, opt, human.str());
  return all ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured analysis of dissipative Hamiltonian "
               "differential-algebraic systems"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--tol", opt.tol_override,
                 "override the relative rank tolerance");
  app.add_flag("--json", opt.json, "emit machine-readable JSON reports");

  std::string file, form = "lagrange", variant = "with-q", to = "x";
  std::string at, frame = "z", out_path, model_kind;
  std::vector<std::string> params;
  uint64_t seed = 42;
  int trials = 25;

  auto* v = app.add_subcommand("validate", "validate a structured system file");
  v->add_option("file", file)->required();

  auto* c = app.add_subcommand("condense", "compute a condensed form");
  c->add_option("file", file)->required();
  c->add_option("--form", form,
                "lagrange|lagrange-staircase|dirac|dirac-staircase|"
                "extended-lagrange|extended-dirac|monotone|index2-staircase|"
                "dh-canonical");

  auto* i = app.add_subcommand("index", "regularity and differentiation index");
  i->add_option("file", file)->required();

  auto* ch = app.add_subcommand("check",
                                "dissipative-Hamiltonian equivalence check");
  ch->add_option("file", file)->required();
  ch->add_option("--variant", variant, "with-q|q-identity|lossless");

  auto* cv = app.add_subcommand("convert", "translate between representations");
  cv->add_option("file", file)->required();
  cv->add_option("--to", to,
                 "x|klq|poisson|gradient|symplectic|adjoint|monotone|multipliers");
  cv->add_option("--out", out_path, "write the converted system to a file");

  auto* h = app.add_subcommand("hamiltonian", "evaluate the Hamiltonian");
  h->add_option("file", file)->required();
  h->add_option("--at", at, "vector file")->required();
  h->add_option("--frame", frame, "z|x|e");

  auto* m = app.add_subcommand("model", "build a physical example fixture");
  m->add_option("kind", model_kind, "rlc|lc|stokes|gas|mechanical|msd|two-mass")
      ->required();
  m->add_option("--param", params, "model parameter name=value");
  m->add_option("--out", out_path, "write the system to a file");

  auto* st = app.add_subcommand("selftest", "run the randomized property suite");
  st->add_option("--seed", seed);
  st->add_option("--trials", trials);

  try {
    app.parse(argc, argv);
    if (v->parsed()) return run_validate(file, opt);
    if (c->parsed()) return run_condense(file, form, opt);
    if (i->parsed()) return run_index(file, opt);
    if (ch->parsed()) return run_check(file, variant, opt);
    if (cv->parsed()) return run_convert(file, to, out_path, opt);
    if (h->parsed()) return run_hamiltonian(file, at, frame, opt);
    if (m->parsed()) return run_model(model_kind, params, out_path, opt);
    if (st->parsed()) return run_selftest_cmd(seed, trials, opt);
    return kUsage;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << errc_name(e.code) << "]: " << e.what() << "\n";
    switch (e.code) {
      case Errc::RankAmbiguous:
        return kNumericalFailure;
      case Errc::InvalidInput:
      case Errc::InvalidParameters:
      case Errc::DimensionMismatch:
        return kUsage;
      default:
        return kNegative;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
}
