#include "commands.hpp"

#include "uflow/apps.hpp"
#include "uflow/flows.hpp"
#include "uflow/io.hpp"
#include "uflow/orbits.hpp"
#include "uflow/parallel.hpp"

#include "oracles.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

namespace uflow::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitIntegrity = 3;

int effective_jobs(int jobs_flag) {
  if (const char* env = std::getenv("UFLOW_JOBS")) {
    const int j = std::atoi(env);
    if (j > 0) return j;
  }
  return jobs_flag > 0 ? jobs_flag : 1;
}

flows::StepSizeRule rule_from_json(const json& j) {
  if (j.is_null()) return flows::StepSizeRule::armijo();
  if (j.contains("armijo")) {
    const json& a = j.at("armijo");
    return flows::StepSizeRule::armijo(a.value("alpha0", 0.1),
                                       a.value("max_halvings", 40));
  }
  if (j.contains("fixed"))
    return flows::StepSizeRule::fixed(j.at("fixed").value("alpha", 0.01));
  if (j.contains("analytic")) return flows::StepSizeRule::analytic_local();
  throw std::invalid_argument(
      "malformed input: rule must be one of \"armijo\", \"fixed\", \"analytic\"");
}

struct FlowConfig {
  flows::QualityFunction qf;
  flows::StepSizeRule rule;
  flows::FlowOptions flow;
  int restarts = 20;
  std::uint64_t seed = 0;
  std::optional<UnitaryMatrix> init_u;
  std::optional<UnitaryMatrix> init_v;
};

ComplexMatrix load_ref(const json& j, const fs::path& base) {
  return j.is_string() ? io::read_matrix_file(base / j.get<std::string>())
                       : io::matrix_from_json(j);
}

FlowConfig parse_flow_config(const fs::path& path) {
  const json cfg = io::read_json_file(path);
  const fs::path base = path.parent_path();
  if (!cfg.contains("kind"))
    throw std::invalid_argument("malformed input: config needs \"kind\"");
  const std::string kind = cfg.at("kind").get<std::string>();

  FlowConfig out;
  bool needs_restriction = false;
  if (kind == "U1" || kind == "U1K") out.qf.kind = flows::QfKind::U1;
  else if (kind == "U2" || kind == "U2K") out.qf.kind = flows::QfKind::U2;
  else if (kind == "U3" || kind == "U3K") out.qf.kind = flows::QfKind::U3;
  else if (kind == "U1C") out.qf.kind = flows::QfKind::U1C;
  else if (kind == "U2C") out.qf.kind = flows::QfKind::U2C;
  else if (kind == "U3C") out.qf.kind = flows::QfKind::U3C;
  else
    throw std::invalid_argument("malformed input: unknown kind \"" + kind + "\"");
  needs_restriction = kind.size() == 3 && kind.back() == 'K';

  if (!cfg.contains("A"))
    throw std::invalid_argument("malformed input: config needs \"A\"");
  if (!cfg.contains("C"))
    throw std::invalid_argument("malformed input: config needs \"C\"");
  out.qf.A = load_ref(cfg.at("A"), base);
  out.qf.C = load_ref(cfg.at("C"), base);
  if (cfg.contains("D")) out.qf.D = load_ref(cfg.at("D"), base);
  if (cfg.contains("E")) out.qf.E = load_ref(cfg.at("E"), base);
  out.qf.lambda0 = cfg.value("lambda0", 1.0);

  if (cfg.contains("restriction"))
    out.qf.restriction =
        io::subalgebra_from_json(cfg.at("restriction"), out.qf.A.rows(), base);
  else if (needs_restriction)
    throw std::invalid_argument("malformed input: kind \"" + kind +
                                "\" needs \"restriction\"");

  out.rule = rule_from_json(cfg.contains("rule") ? cfg.at("rule") : json());
  out.flow.grad_tol = cfg.value("grad_tol", 0.0);
  out.flow.max_iter = cfg.value("max_iter", 100000);
  out.restarts = cfg.value("restarts", 20);
  out.seed = cfg.value("seed", std::uint64_t(0));

  if (cfg.contains("init")) out.init_u = load_ref(cfg.at("init"), base);
  if (cfg.contains("init2")) out.init_v = load_ref(cfg.at("init2"), base);
  if (out.qf.kind == flows::QfKind::U3 && out.init_u && !out.init_v)
    throw std::invalid_argument(
        "malformed input: kind \"U3\" with \"init\" needs second init \"init2\"");

  try {
    out.qf.validate();
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("malformed input: ") + e.what());
  }
  return out;
}

void write_flow_trace(const fs::path& path, const flows::FlowTrace& trace) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(trace.size());
  for (const auto& r : trace)
    rows.push_back({std::to_string(r.k), io::format_g17(r.f),
                    io::format_g17(r.grad_norm), io::format_g17(r.alpha),
                    io::format_g17(r.unitarity_defect)});
  io::write_csv(path, {"k", "f", "grad_norm", "alpha", "unitarity_defect"},
                rows);
}

int cmd_flow(const std::string& config, const std::string& out,
             const std::string& trace_path, int jobs) {
  const FlowConfig cfg = parse_flow_config(config);

  flows::FlowResult best;
  if (cfg.init_u) {
    flows::FlowOptions fo = cfg.flow;
    fo.record_trace = true;
    best = flows::run_flow(cfg.qf, cfg.rule, *cfg.init_u,
                           cfg.init_v ? &*cfg.init_v : nullptr, fo);
  } else {
    flows::RestartOptions ro;
    ro.restarts = cfg.restarts;
    ro.seed = cfg.seed;
    ro.jobs = effective_jobs(jobs);
    ro.rule = cfg.rule;
    ro.flow = cfg.flow;
    best = flows::run_best_of(cfg.qf, ro);
    // Re-run the winning restart alone to record its trace; runs are
    // deterministic per seed so this reproduces the same iterates.
    flows::FlowOptions fo = cfg.flow;
    fo.record_trace = true;
    std::mt19937_64 rng(best.restart_seed);
    auto draw = [&]() {
      return cfg.qf.restriction
                 ? lie::random_subgroup_element(*cfg.qf.restriction, rng)
                 : haar_random_unitary(cfg.qf.dim(), rng);
    };
    const UnitaryMatrix u0 = draw();
    if (cfg.qf.two_sided()) {
      const UnitaryMatrix v0 = draw();
      const auto rerun = flows::run_flow(cfg.qf, cfg.rule, u0, &v0, fo);
      best.trace = rerun.trace;
    } else {
      const auto rerun = flows::run_flow(cfg.qf, cfg.rule, u0, nullptr, fo);
      best.trace = rerun.trace;
    }
  }

  json res{{"final_f", best.f},
           {"converged", best.converged},
           {"iterations", best.iterations},
           {"best_restart_seed", best.restart_seed},
           {"final_grad_norm", best.final_grad_norm},
           {"max_unitarity_defect", best.max_unitarity_defect}};
  if (cfg.qf.kind == flows::QfKind::U2C)
    res["constraint_residual"] = best.constraint_residual;
  io::write_json_file(out, res);
  write_flow_trace(trace_path, best.trace);
  return best.converged ? kExitOk : kExitNotConverged;
}

int cmd_dbflow(const std::string& config, const std::string& out,
               const std::string& trace_path, int jobs) {
  const json cfg = io::read_json_file(config);
  const fs::path base = fs::path(config).parent_path();
  const std::string kind = cfg.value("kind", "U1P");
  if (kind != "U1P" && kind != "U1KP")
    throw std::invalid_argument("malformed input: dbflow kind must be U1P or U1KP");
  if (!cfg.contains("A") || !cfg.contains("C"))
    throw std::invalid_argument("malformed input: dbflow config needs \"A\" and \"C\"");
  const ComplexMatrix a = load_ref(cfg.at("A"), base);
  const ComplexMatrix c = load_ref(cfg.at("C"), base);

  std::optional<lie::SubalgebraBasis> restriction;
  if (kind == "U1KP") {
    if (!cfg.contains("restriction"))
      throw std::invalid_argument("malformed input: U1KP needs \"restriction\"");
    restriction = io::subalgebra_from_json(cfg.at("restriction"), a.rows(), base);
  }

  orbits::OrbitRestartOptions ro;
  ro.rule = rule_from_json(cfg.contains("rule") ? cfg.at("rule") : json());
  ro.flow.tol = cfg.value("tol", 0.0);
  ro.flow.max_iter = cfg.value("max_iter", 100000);
  ro.restarts = cfg.value("restarts", 20);
  ro.seed = cfg.value("seed", std::uint64_t(0));
  ro.jobs = effective_jobs(jobs);

  orbits::OrbitFlowResult best = orbits::run_best_of(a, c, ro, restriction);
  {
    orbits::OrbitFlowOptions fo = ro.flow;
    fo.record_trace = true;
    std::mt19937_64 rng(best.restart_seed);
    const UnitaryMatrix w0 =
        restriction ? lie::random_subgroup_element(*restriction, rng)
                    : haar_random_unitary(a.rows(), rng);
    const auto rerun =
        orbits::run_double_bracket(a, c, ro.rule, fo, restriction, w0);
    best.trace = rerun.trace;
  }

  json res{{"final_f", best.f},
           {"converged", best.converged},
           {"iterations", best.iterations},
           {"best_restart_seed", best.restart_seed},
           {"final_grad_norm", best.final_grad_norm},
           {"max_spectrum_drift", best.max_spectrum_drift}};
  io::write_json_file(out, res);

  std::vector<std::vector<std::string>> rows;
  rows.reserve(best.trace.size());
  for (const auto& r : best.trace)
    rows.push_back({std::to_string(r.k), io::format_g17(r.f),
                    io::format_g17(r.grad_norm), io::format_g17(r.alpha),
                    io::format_g17(r.unitarity_defect),
                    io::format_g17(r.spectrum_drift)});
  io::write_csv(trace_path,
                {"k", "f", "grad_norm", "alpha", "unitarity_defect",
                 "spectrum_drift"},
                rows);
  return best.converged ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const std::string& family_name, double s_min, double s_max,
              int steps, int restarts, std::uint64_t seed,
              const std::string& out, int jobs) {
  if (steps < 1) throw std::invalid_argument("malformed input: steps must be >= 1");
  if (s_min < 0.0 || s_max > 1.0 || s_min > s_max)
    throw std::invalid_argument(
        "malformed input: need 0 <= smin <= smax <= 1");
  const apps::SweepFamily family = apps::family_from_name(family_name);

  std::vector<double> grid(steps);
  for (int i = 0; i < steps; ++i)
    grid[i] = steps == 1
                  ? s_min
                  : s_min + (s_max - s_min) * double(i) / double(steps - 1);

  apps::Rank1Options opts;
  opts.restarts = restarts;
  opts.seed = seed;
  opts.jobs = effective_jobs(jobs);
  const auto rows = apps::entanglement_sweep(family, grid, opts);

  std::vector<std::vector<std::string>> cells;
  cells.reserve(rows.size());
  bool all_converged = true;
  for (const auto& r : rows) {
    all_converged = all_converged && r.converged;
    cells.push_back({io::format_g17(r.s), io::format_g17(r.overlap),
                     io::format_g17(r.delta), io::format_g17(r.measure_value),
                     std::to_string(r.restarts_used),
                     r.converged ? "1" : "0"});
  }
  io::write_csv(out,
                {"s", "overlap", "delta", "measureI_value", "restarts_used",
                 "converged"},
                cells);
  return all_converged ? kExitOk : kExitNotConverged;
}

int cmd_reversibility(const std::string& spec_path, const std::string& mode,
                      std::optional<double> tau, int restarts,
                      std::uint64_t seed, const std::string& out, int jobs) {
  const apps::HamiltonianSpec spec =
      io::hamiltonian_from_json(io::read_json_file(spec_path));
  apps::ReversibilityOptions opts;
  opts.restarts = restarts;
  opts.seed = seed;
  opts.jobs = effective_jobs(jobs);

  json res;
  bool converged = false;
  if (mode == "joint") {
    const auto r = apps::joint_reversibility(spec, opts);
    res = json{{"mode", "joint"},
               {"min_value", r.min_value},
               {"reversible", r.reversible},
               {"K", io::matrix_to_json(r.K)}};
    converged = r.converged;
  } else if (mode == "pointwise") {
    if (!tau)
      throw std::invalid_argument(
          "malformed input: \"pointwise\" needs --tau");
    const auto r = apps::pointwise_reversibility(spec, *tau, opts);
    res = json{{"mode", "pointwise"},
               {"tau", *tau},
               {"min_value", r.min_value},
               {"reversible", r.reversible_at_tau},
               {"K1", io::matrix_to_json(r.K1)},
               {"K2", io::matrix_to_json(r.K2)}};
    converged = r.converged;
  } else {
    throw std::invalid_argument(
        "malformed input: mode must be \"joint\" or \"pointwise\"");
  }
  io::write_json_file(out, res);
  return converged ? kExitOk : kExitNotConverged;
}

int cmd_rank1(const std::string& tensor_path, int restarts, std::uint64_t seed,
              const std::string& out, bool with_oracle, int jobs) {
  const Tensor t = io::read_tensor_file(tensor_path);
  apps::Rank1Options opts;
  opts.restarts = restarts;
  opts.seed = seed;
  opts.jobs = effective_jobs(jobs);
  const Rank1Result r = apps::best_rank1(t, opts);

  json factors = json::array();
  for (const auto& f : r.factors) {
    ComplexMatrix col = f;
    factors.push_back(io::matrix_to_json(col));
  }
  json res{{"coefficient_re", r.coefficient.real()},
           {"coefficient_im", r.coefficient.imag()},
           {"overlap", r.overlap},
           {"residual_sq", r.residual_sq},
           {"converged", r.converged},
           {"iterations", r.iterations},
           {"factors", factors}};

  if (with_oracle) {
    // Alternating power method alongside the flow, best over the same
    // number of random restarts plus the unfolding-SVD start.
    oracles::HopmOptions ho;
    Rank1Result best = oracles::hopm(t, ho);
    ho.init = oracles::HopmInit::Random;
    for (int i = 0; i < restarts; ++i) {
      ho.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
      const Rank1Result cand = oracles::hopm(t, ho);
      if (cand.overlap > best.overlap) best = cand;
    }
    res["oracle"] = json{{"overlap", best.overlap},
                         {"residual_sq", best.residual_sq},
                         {"abs_diff", std::abs(best.overlap - r.overlap)}};
  }
  io::write_json_file(out, res);
  return r.converged ? kExitOk : kExitNotConverged;
}

int cmd_controllability(const std::string& gens_path, const std::string& out) {
  const json j = io::read_json_file(gens_path);
  const fs::path base = fs::path(gens_path).parent_path();
  if (!j.contains("generators") || !j.at("generators").is_array() ||
      j.at("generators").empty())
    throw std::invalid_argument(
        "malformed input: need a non-empty \"generators\" array");
  std::vector<AlgebraElement> gens;
  for (const auto& g : j.at("generators")) gens.push_back(load_ref(g, base));
  const auto res = lie::lie_closure(gens);
  io::write_json_file(out, json{{"dimension", res.dimension},
                                {"full", res.controllable}});
  return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Riemannian gradient flows on the unitary group and its "
               "subgroups: transfer optimisation, double-bracket flows, "
               "entanglement distance, rank-1 tensor approximation, local "
               "reversibility and controllability tests"};
  app.require_subcommand(1);
  int jobs = 1;
  app.add_option("--jobs", jobs, "parallel workers (UFLOW_JOBS overrides)");

  std::string config;

  auto* flow = app.add_subcommand("flow", "run a group-level gradient flow");
  flow->add_option("--config", config, "flow config JSON")->required();
  std::string flow_out = "flow_result.json", flow_trace = "flow_trace.csv";
  flow->add_option("--out", flow_out, "result JSON path");
  flow->add_option("--trace", flow_trace, "trace CSV path");

  auto* dbf = app.add_subcommand("dbflow", "run a double-bracket orbit flow");
  std::string db_config, db_out = "dbflow_result.json",
                         db_trace = "dbflow_trace.csv";
  dbf->add_option("--config", db_config, "dbflow config JSON")->required();
  dbf->add_option("--out", db_out, "result JSON path");
  dbf->add_option("--trace", db_trace, "trace CSV path");

  auto* sweep = app.add_subcommand("sweep", "entanglement distance sweep");
  std::string family = "3q", sweep_out = "sweep.csv";
  double s_min = 0.0, s_max = 1.0;
  int steps = 21, restarts = 20;
  std::uint64_t seed = 0;
  sweep->add_option("--family", family, "3q or 4q");
  sweep->add_option("--smin", s_min, "lower end of the s grid");
  sweep->add_option("--smax", s_max, "upper end of the s grid");
  sweep->add_option("--steps", steps, "number of grid points");
  sweep->add_option("--restarts", restarts, "Haar restarts per point");
  sweep->add_option("--seed", seed, "base RNG seed");
  sweep->add_option("--out", sweep_out, "output CSV path");

  auto* rev = app.add_subcommand("reversibility", "local time-reversal test");
  std::string rev_spec, rev_mode = "joint", rev_out = "reversibility.json";
  double tau = 0.0;
  int rev_restarts = 20;
  std::uint64_t rev_seed = 0;
  rev->add_option("--spec", rev_spec, "Hamiltonian spec JSON")->required();
  rev->add_option("--mode", rev_mode, "joint or pointwise");
  auto* tau_opt = rev->add_option("--tau", tau, "evolution time (pointwise mode)");
  rev->add_option("--restarts", rev_restarts, "Haar restarts");
  rev->add_option("--seed", rev_seed, "base RNG seed");
  rev->add_option("--out", rev_out, "output JSON path");

  auto* rank1 = app.add_subcommand("rank1", "best rank-1 tensor approximation");
  std::string r1_tensor, r1_out = "rank1.json";
  int r1_restarts = 20;
  std::uint64_t r1_seed = 0;
  bool r1_oracle = false;
  rank1->add_option("--tensor", r1_tensor, "tensor JSON")->required();
  rank1->add_option("--restarts", r1_restarts, "Haar restarts");
  rank1->add_option("--seed", r1_seed, "base RNG seed");
  rank1->add_option("--out", r1_out, "output JSON path");
  rank1->add_flag("--oracle", r1_oracle, "also run the power-method oracle");

  auto* ctrl = app.add_subcommand("controllability", "Lie closure rank test");
  std::string ctrl_gens, ctrl_out = "controllability.json";
  ctrl->add_option("--generators", ctrl_gens, "generator list JSON")->required();
  ctrl->add_option("--out", ctrl_out, "output JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*flow) return cmd_flow(config, flow_out, flow_trace, jobs);
    if (*dbf) return cmd_dbflow(db_config, db_out, db_trace, jobs);
    if (*sweep)
      return cmd_sweep(family, s_min, s_max, steps, restarts, seed, sweep_out,
                       jobs);
    if (*rev)
      return cmd_reversibility(rev_spec, rev_mode,
                               tau_opt->count() > 0
                                   ? std::optional<double>(tau)
                                   : std::nullopt,
                               rev_restarts, rev_seed, rev_out, jobs);
    if (*rank1)
      return cmd_rank1(r1_tensor, r1_restarts, r1_seed, r1_out, r1_oracle,
                       jobs);
    if (*ctrl) return cmd_controllability(ctrl_gens, ctrl_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "integrity error: " << e.what() << "\n";
    return kExitIntegrity;
  }
  return kExitInput;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("uflow");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

} // namespace uflow::cli
