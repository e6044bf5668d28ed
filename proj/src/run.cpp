#include "dirac_gap/run.hpp"

#include "dirac_gap/convergence.hpp"
#include "dirac_gap/minmax_solver.hpp"
#include "dirac_gap/shooting_oracle.hpp"
#include "dirac_gap/verification.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace dirac_gap {

namespace {

constexpr const char* kCommands[] = {"spectrum", "oracle", "verify", "converge-eps", "converge-mesh", "pollution-demo"};

OutputFormat format_from_string(const std::string& s) {
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  throw ConfigError("output.format must be 'json' or 'csv', got '" + s + "'");
}

SpaceDim parse_dim(const std::string& s) {
  if (s == "3" || s == "3d") return SpaceDim::ThreeD;
  if (s == "2" || s == "2d") return SpaceDim::TwoD;
  throw ConfigError("dim must be 3 or 2, got '" + s + "'");
}

PotentialKind parse_kind(const std::string& s) {
  for (auto k : {PotentialKind::Coulomb, PotentialKind::Truncated, PotentialKind::Scaled, PotentialKind::CoulombStep})
    if (s == to_string(k)) return k;
  throw ConfigError("kind must be coulomb|truncated|scaled|coulomb_step, got '" + s + "'");
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

void print_table(std::ostream& os, const std::vector<std::string>& head, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    width[c] = head[c].size();
    for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      os << cells[c];
      if (c + 1 < cells.size()) os << std::string(width[c] - cells[c].size() + 2, ' ');
    }
    os << '\n';
  };
  line(head);
  for (const auto& r : rows) line(r);
}

Sector default_sector(const RunConfig& cfg) {
  return make_sector(cfg.spec.dim, cfg.kappa.value_or(-critical_coupling(cfg.spec.dim)));
}

SpectrumOptions spectrum_options(const RunConfig& cfg) {
  SpectrumOptions o;
  o.coupling_max = cfg.coupling_max;
  o.k_max = cfg.k_max;
  o.root.tol = cfg.tol;
  o.gauss_order = cfg.gauss;
  o.threads = cfg.threads;
  return o;
}

bool is_single_mesh_command(Command c) {
  return c == Command::Spectrum || c == Command::ConvergeEps || c == Command::PollutionDemo;
}

}  // namespace

const char* to_string(Command c) { return kCommands[static_cast<int>(c)]; }

Command command_from_string(const std::string& s) {
  for (int i = 0; i < 6; ++i)
    if (s == kCommands[i]) return static_cast<Command>(i);
  throw ConfigError("command must be one of spectrum|oracle|verify|converge-eps|converge-mesh|pollution-demo, got '" +
                    s + "'");
}

Json run_config_to_json(const RunConfig& cfg) {
  Json meshes = Json::array();
  for (const auto& m : cfg.meshes) meshes.push_back(mesh_to_json(m));
  Json j{{"command", to_string(cfg.command)},
         {"spec", potential_to_json(cfg.spec)},
         {"meshes", meshes},
         {"coupling_max", cfg.coupling_max},
         {"k_max", cfg.k_max},
         {"tol", cfg.tol},
         {"output", Json{{"path", cfg.output_path}, {"format", cfg.format == OutputFormat::Json ? "json" : "csv"}}},
         {"seed", cfg.seed},
         {"threads", cfg.threads},
         {"gauss", cfg.gauss},
         {"eps", cfg.eps_ladder},
         {"kappa", cfg.kappa ? Json(*cfg.kappa) : Json(nullptr)},
         {"k", cfg.k},
         {"count", cfg.count},
         {"r0", cfg.r0},
         {"dof", cfg.dof},
         {"threshold", cfg.threshold},
         {"reproducible", cfg.reproducible}};
  return j;
}

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  RunConfig c;
  auto get = [&](const char* key, auto& dst) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(dst);
    } catch (const Json::exception&) {
      throw ConfigError(std::string("config: field '") + key + "' has the wrong type");
    }
  };
  for (const auto& [k, v] : j.items()) {
    static const std::vector<std::string> known{"command", "spec",  "meshes", "mesh",  "coupling_max", "k_max",
                                                "tol",     "output", "seed",  "threads", "gauss",      "eps",
                                                "kappa",   "k",      "count", "r0",    "dof",          "threshold",
                                                "reproducible"};
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("config: unknown field '" + k + "'");
  }
  try {
    if (j.contains("command")) c.command = command_from_string(j.at("command").get<std::string>());
    if (j.contains("spec")) c.spec = potential_from_json(j.at("spec"));
    if (j.contains("mesh")) c.meshes.push_back(mesh_from_json(j.at("mesh")));
    if (j.contains("meshes"))
      for (const auto& m : j.at("meshes")) c.meshes.push_back(mesh_from_json(m));
    if (j.contains("output")) {
      const auto& o = j.at("output");
      if (o.contains("path")) c.output_path = o.at("path").get<std::string>();
      if (o.contains("format")) c.format = format_from_string(o.at("format").get<std::string>());
    }
    if (j.contains("kappa") && !j.at("kappa").is_null()) c.kappa = j.at("kappa").get<double>();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  get("coupling_max", c.coupling_max);
  get("k_max", c.k_max);
  get("tol", c.tol);
  get("seed", c.seed);
  get("threads", c.threads);
  get("gauss", c.gauss);
  get("eps", c.eps_ladder);
  get("k", c.k);
  get("count", c.count);
  get("r0", c.r0);
  get("dof", c.dof);
  get("threshold", c.threshold);
  get("reproducible", c.reproducible);
  return c;
}

std::vector<MeshParams> effective_meshes(const RunConfig& cfg) {
  if (!cfg.meshes.empty()) return cfg.meshes;
  if (cfg.command == Command::PollutionDemo) return {pollution_mesh(cfg.dof)};
  if (cfg.command == Command::Spectrum || cfg.command == Command::ConvergeEps) return {AlgebraicMeshParams{}};
  return {};
}

void validate(const RunConfig& cfg) {
  if (const auto adm = check_admissible(cfg.spec); !adm) throw ConfigError("spec: " + adm.violation);
  const double cmin = critical_coupling(cfg.spec.dim);
  if (!(cfg.coupling_max >= cmin)) throw ConfigError("kappa_max: must be >= " + fmt("%g", cmin));
  if (cfg.k_max < 1) throw ConfigError("k_max: must be >= 1");
  if (!(cfg.tol > 0.0 && cfg.tol <= 1e-3)) throw ConfigError("tol: must lie in (0, 1e-3]");
  if (cfg.threads < 1) throw ConfigError("threads: must be >= 1");
  if (cfg.gauss < 4 || cfg.gauss > 64) throw ConfigError("gauss: must lie in [4, 64]");
  if (cfg.k < 1) throw ConfigError("k: must be >= 1");
  if (cfg.count < 1) throw ConfigError("count: must be >= 1");
  if (!(cfg.r0 > 0.0 && cfg.r0 <= 1e-6)) throw ConfigError("r0: must lie in (0, 1e-6]");
  if (!(cfg.threshold > 0.0)) throw ConfigError("threshold: must be > 0");
  if (cfg.kappa) {
    try {
      make_sector(cfg.spec.dim, *cfg.kappa);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("kappa: ") + e.what());
    }
  }
  const auto meshes = effective_meshes(cfg);
  std::vector<RadialMesh> built;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    try {
      built.emplace_back(meshes[i]);
    } catch (const std::exception& e) {
      throw ConfigError("mesh[" + std::to_string(i) + "]: " + e.what());
    }
  }
  if (is_single_mesh_command(cfg.command) && meshes.size() != 1)
    throw ConfigError(std::string("mesh: ") + to_string(cfg.command) + " takes exactly one --mesh");
  switch (cfg.command) {
    case Command::ConvergeMesh:
      if (meshes.size() < 3) throw ConfigError("mesh: converge-mesh needs a ladder of at least 3 nested meshes");
      for (std::size_t i = 1; i < built.size(); ++i)
        if (!mesh_nested(built[i - 1], built[i]))
          throw ConfigError("mesh[" + std::to_string(i) + "]: does not contain mesh[" + std::to_string(i - 1) + "]");
      break;
    case Command::ConvergeEps:
      if (cfg.eps_ladder.empty()) throw ConfigError("eps: converge-eps needs an eps ladder");
      for (std::size_t i = 0; i < cfg.eps_ladder.size(); ++i) {
        if (!(cfg.eps_ladder[i] > 0.0)) throw ConfigError("eps: entries must be > 0");
        if (i > 0 && !(cfg.eps_ladder[i] < cfg.eps_ladder[i - 1])) throw ConfigError("eps: ladder must be strictly decreasing");
      }
      break;
    case Command::Oracle:
    case Command::PollutionDemo:
      if (cfg.spec.kind != PotentialKind::Coulomb || cfg.spec.cutoff)
        throw ConfigError(std::string("kind: ") + to_string(cfg.command) + " supports the exact Coulomb potential only");
      if (cfg.kappa && cfg.spec.nu > std::abs(*cfg.kappa)) throw ConfigError("kappa: nu must not exceed |kappa|");
      if (cfg.command == Command::PollutionDemo && built.front().dof() > 400)
        throw ConfigError("dof: pollution-demo is limited to 400 dof");
      break;
    default: break;
  }
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  std::ostringstream artifact;
  std::vector<std::string> head;
  std::vector<std::vector<std::string>> rows;
  int status = exit_code::ok;
  const bool json = cfg.format == OutputFormat::Json;
  const auto meshes = effective_meshes(cfg);

  switch (cfg.command) {
    case Command::Spectrum: {
      auto rep = spectrum(cfg.spec, meshes.front(), spectrum_options(cfg));
      if (cfg.reproducible) rep.walltime_s = 0.0;
      if (json)
        artifact << report_to_json(rep).dump(2) << '\n';
      else
        write_spectrum_csv(artifact, rep);
      head = {"kappa", "k", "E", "bracket", "residual", "degeneracy"};
      for (const auto& l : rep.levels)
        rows.push_back({fmt("%g", l.sector.coupling), std::to_string(l.k_in_sector), fmt("%.12f", l.energy),
                        fmt("%.1e", l.bracket_width), fmt("%.1e", l.residual), std::to_string(l.sector.degeneracy)});
      break;
    }
    case Command::Oracle: {
      std::vector<Sector> sectors;
      if (cfg.kappa)
        sectors.push_back(make_sector(cfg.spec.dim, *cfg.kappa));
      else
        for (const auto& s : enumerate_sectors(cfg.spec.dim, cfg.coupling_max))
          if (cfg.spec.nu <= std::abs(s.coupling)) sectors.push_back(s);
      ShootingConfig sc;
      sc.r0 = cfg.r0;
      std::vector<OracleLevel> levels;
      for (const auto& s : sectors)
        for (const auto& l : oracle_levels(s, cfg.spec.nu, sc, cfg.count)) levels.push_back(l);
      if (json)
        artifact << oracle_to_json(cfg.spec.dim, cfg.spec.nu, levels).dump(2) << '\n';
      else
        write_oracle_csv(artifact, levels);
      head = {"kappa", "n", "E", "residual"};
      for (const auto& l : levels)
        rows.push_back({fmt("%g", l.sector.coupling), std::to_string(l.n_index), fmt("%.12f", l.energy),
                        fmt("%.1e", l.wronskian_residual)});
      break;
    }
    case Command::Verify: {
      SuiteOptions so;
      so.seed = cfg.seed;
      const auto checks = run_verification_suite(so);
      if (json)
        artifact << verdict_to_json(checks).dump(2) << '\n';
      else
        write_verdict_csv(artifact, checks);
      head = {"check", "pass", "worst", "config"};
      for (const auto& c : checks) {
        rows.push_back({c.name, c.pass ? "PASS" : "FAIL", fmt("%.3e", c.worst), c.config});
        if (!c.pass) status = exit_code::verification;
      }
      break;
    }
    case Command::ConvergeEps: {
      const auto t = truncation_convergence(cfg.spec, cfg.eps_ladder, meshes.front(), spectrum_options(cfg));
      if (json)
        artifact << truncation_to_json(t).dump(2) << '\n';
      else
        write_truncation_csv(artifact, t);
      head = {"eps", "lambda1", "gap_to_untruncated"};
      bool nonneg = true;
      for (const auto& r : t.rows) {
        rows.push_back({fmt("%g", r.eps), fmt("%.12f", r.lambda1), fmt("%.3e", r.lambda1 - t.lambda1_exact)});
        nonneg = nonneg && r.lambda1 >= 0.0;
      }
      rows.push_back({"inf", fmt("%.12f", t.lambda1_exact), "0"});
      if (!t.non_increasing || !t.bounded_below || !nonneg) status = exit_code::verification;
      break;
    }
    case Command::ConvergeMesh: {
      RootOptions root;
      root.tol = cfg.tol;
      const auto c = converge_mesh(cfg.spec, default_sector(cfg), cfg.k, meshes, root, cfg.gauss);
      if (json)
        artifact << mesh_convergence_to_json(c).dump(2) << '\n';
      else
        write_mesh_convergence_csv(artifact, c);
      head = {"dof", "lambda", "decrement"};
      for (const auto& r : c.rows) rows.push_back({std::to_string(r.dof), fmt("%.12f", r.lambda), fmt("%.3e", r.decrement)});
      if (c.extrapolated) rows.push_back({"extrap.", fmt("%.12f", *c.extrapolated), "(informational)"});
      if (!c.non_increasing) status = exit_code::verification;
      break;
    }
    case Command::PollutionDemo: {
      const auto rep = pollution_demo(default_sector(cfg), cfg.spec.nu, meshes.front(), cfg.threshold, cfg.k_max);
      if (json)
        artifact << pollution_to_json(rep).dump(2) << '\n';
      else
        write_pollution_csv(artifact, rep);
      head = {"set", "count", "levels"};
      auto list = [](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size() && i < 8; ++i) s += (i ? " " : "") + fmt("%.6f", v[i]);
        if (v.size() > 8) s += " ...";
        return s;
      };
      rows.push_back({"naive", std::to_string(rep.naive_levels.size()), list(rep.naive_levels)});
      rows.push_back({"oracle", std::to_string(rep.oracle_levels.size()), list(rep.oracle_levels)});
      rows.push_back({"spurious", std::to_string(rep.spurious.size()), list(rep.spurious)});
      rows.push_back({"minmax", std::to_string(rep.minmax_levels.size()), list(rep.minmax_levels)});
      break;
    }
  }

  std::ostream* table = &out;
  if (cfg.output_path.empty()) {
    out << artifact.str();
    table = &log;
  } else {
    std::ofstream f(cfg.output_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + cfg.output_path + "'");
    f << artifact.str();
    if (!f) throw std::runtime_error("failed writing output file '" + cfg.output_path + "'");
  }
  print_table(*table, head, rows);
  return status;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& log) {
  CLI::App app{"dirac-gap: gap eigenvalues of radial Dirac-Coulomb operators by the min-max method"};
  app.footer(
      "Commands: spectrum | oracle | verify | converge-eps | converge-mesh | pollution-demo\n"
      "Mesh syntax: algebraic:rmax=200,n=8000,p=6  or  geometric:rmin=1e-8,rmax=200,n=16000\n"
      "CSV columns (--out csv):\n"
      "  spectrum        E,kappa,k,copy            one row per degenerate copy\n"
      "  oracle          sector,n_index,E,residual\n"
      "  verify          name,pass,worst\n"
      "  converge-eps    eps,lambda1,gap_to_untruncated   final row eps=inf is the untruncated level\n"
      "  converge-mesh   dof,lambda,decrement\n"
      "  pollution-demo  set,E                     set is naive|oracle|spurious|minmax\n"
      "Exit codes: 0 ok, 1 computation failed, 2 config error, 3 verification failed");

  std::string command, dim, kind, out_format, config_path, output;
  double nu = 0, height = 0, radius = 0, cutoff = 0, kappa = 0, tol = 0, coupling_max = 0, r0 = 0, threshold = 0;
  int k_max = 0, threads = 0, gauss = 0, k = 0, count = 0, dof = 0;
  std::uint64_t seed = 0;
  std::vector<double> eps;
  std::vector<std::string> mesh;

  auto* o_command = app.add_option("command", command, "Command to run");
  auto* o_config = app.add_option("--config", config_path, "Serialized RunConfig (JSON); flags override its fields");
  auto* o_dim = app.add_option("--dim", dim, "Space dimension: 3 or 2");
  auto* o_nu = app.add_option("--nu", nu, "Coulomb coupling nu");
  auto* o_kind = app.add_option("--kind", kind, "coulomb | truncated | scaled | coulomb_step");
  auto* o_eps = app.add_option("--eps", eps, "Truncation/scaling eps; a decreasing ladder for converge-eps")->delimiter(',');
  auto* o_height = app.add_option("--height", height, "Step height (coulomb_step)");
  auto* o_radius = app.add_option("--radius", radius, "Step radius (coulomb_step)");
  auto* o_cutoff = app.add_option("--cutoff", cutoff, "Extra truncation V >= -1/cutoff on any kind");
  auto* o_kmax_c = app.add_option("--kappa-max", coupling_max, "Largest |kappa| of the sectors solved");
  auto* o_kmax = app.add_option("--k-max", k_max, "Levels per sector");
  auto* o_kappa = app.add_option("--kappa", kappa, "Single sector (oracle, converge-mesh, pollution-demo)");
  auto* o_k = app.add_option("--k", k, "Level index within the sector (converge-mesh)");
  auto* o_mesh = app.add_option("--mesh", mesh, "Mesh spec; repeat for a converge-mesh ladder");
  auto* o_tol = app.add_option("--tol", tol, "Root tolerance in E");
  auto* o_out = app.add_option("--out", out_format, "Artifact format: json | csv");
  auto* o_output = app.add_option("--output", output, "Artifact path (default: stdout, table to stderr)");
  auto* o_seed = app.add_option("--seed", seed, "Seed for the verification trial families");
  auto* o_threads = app.add_option("--threads", threads, "Worker threads for sector solves")->envname("DIRAC_GAP_THREADS");
  auto* o_gauss = app.add_option("--gauss", gauss, "Gauss points per quadrature cell");
  auto* o_count = app.add_option("--count", count, "Oracle levels per sector");
  auto* o_r0 = app.add_option("--r0", r0, "Oracle inner start radius");
  auto* o_dof = app.add_option("--dof", dof, "pollution-demo dof (default mesh)");
  auto* o_threshold = app.add_option("--threshold", threshold, "pollution-demo spurious distance");
  auto* o_repro = app.add_flag("--reproducible", "Write walltime_s = 0 so identical runs give identical bytes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    log << "config error: " << e.what() << '\n';
    return exit_code::config;
  }

  RunConfig cfg;
  try {
    if (o_config->count()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("config: cannot open '" + config_path + "'");
      Json j;
      try {
        j = Json::parse(f);
      } catch (const Json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
      }
      cfg = run_config_from_json(j);
    }
    if (o_command->count()) cfg.command = command_from_string(command);
    else if (!o_config->count()) throw ConfigError("command: missing (spectrum|oracle|verify|converge-eps|converge-mesh|pollution-demo)");
    if (o_dim->count()) cfg.spec.dim = parse_dim(dim);
    if (o_nu->count()) cfg.spec.nu = nu;
    if (o_kind->count()) cfg.spec.kind = parse_kind(kind);
    if (o_eps->count()) {
      if (cfg.command == Command::ConvergeEps) {
        cfg.eps_ladder = eps;
      } else {
        if (eps.size() != 1) throw ConfigError("eps: " + std::string(to_string(cfg.command)) + " takes a single eps");
        cfg.spec.eps = eps.front();
      }
    } else if (o_kind->count() && cfg.spec.kind == PotentialKind::Scaled) {
      throw ConfigError("eps: required for kind scaled");
    } else if (o_kind->count() && cfg.spec.kind == PotentialKind::Truncated) {
      cfg.spec.eps = std::numeric_limits<double>::infinity();
    }
    if (o_height->count()) cfg.spec.height = height;
    if (o_radius->count()) cfg.spec.radius = radius;
    if (o_cutoff->count()) cfg.spec.cutoff = cutoff;
    if (o_kmax_c->count()) cfg.coupling_max = coupling_max;
    if (o_kmax->count()) cfg.k_max = k_max;
    if (o_kappa->count()) cfg.kappa = kappa;
    if (o_k->count()) cfg.k = k;
    if (o_mesh->count()) {
      cfg.meshes.clear();
      for (const auto& m : mesh) {
        try {
          cfg.meshes.push_back(parse_mesh_params(m));
        } catch (const std::exception& e) {
          throw ConfigError(std::string("mesh: ") + e.what());
        }
      }
    }
    if (o_tol->count()) cfg.tol = tol;
    if (o_out->count()) cfg.format = format_from_string(out_format);
    if (o_output->count()) cfg.output_path = output;
    if (o_seed->count()) cfg.seed = seed;
    if (o_threads->count()) cfg.threads = threads;
    if (o_gauss->count()) cfg.gauss = gauss;
    if (o_count->count()) cfg.count = count;
    if (o_r0->count()) cfg.r0 = r0;
    if (o_dof->count()) cfg.dof = dof;
    if (o_threshold->count()) cfg.threshold = threshold;
    if (o_repro->count()) cfg.reproducible = true;
    validate(cfg);
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << '\n';
    return exit_code::config;
  }

  try {
    return run(cfg, out, log);
  } catch (const std::exception& e) {
    log << "computation failed: " << e.what() << '\n';
    return exit_code::computation;
  }
}

}  // namespace dirac_gap
