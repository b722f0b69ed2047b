#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vimflow/io.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace vimflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiverged = 2;
constexpr int kExitMaxIters = 3;
constexpr int kExitBadInput = 4;

int status_exit_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return kExitOk;
    case SolveStatus::MaxIters: return kExitMaxIters;
    case SolveStatus::Diverged:
    case SolveStatus::NonFinite: return kExitDiverged;
  }
  return kExitBadInput;
}

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads <= 0) {
    if (const char* env = std::getenv("VIMFLOW_THREADS")) threads = std::atoi(env);
  }
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::string direction;
  std::string neumann;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_out) {
  cmd->add_option("--config", o.config_path, "problem configuration file")->required();
  auto* out = cmd->add_option("--out", o.out_dir, "output directory");
  if (need_out) out->required();
  cmd->add_option("--direction", o.direction, "override correction direction (x1|x2|x3)");
  cmd->add_option("--neumann", o.neumann, "override Neumann trace (viscous|full)");
  cmd->add_option("--threads", o.threads, "worker thread count (or VIMFLOW_THREADS)");
}

RunConfig load(const CommonOpts& o) {
  RunConfig cfg = read_config(o.config_path);
  if (!o.direction.empty()) {
    if (o.direction == "x1") cfg.iter.direction = Axis::X1;
    else if (o.direction == "x2") cfg.iter.direction = Axis::X2;
    else if (o.direction == "x3") cfg.iter.direction = Axis::X3;
    else throw IoError("--direction must be x1, x2 or x3");
  }
  if (!o.neumann.empty()) {
    if (o.neumann == "viscous") cfg.iter.neumann_form = NeumannForm::Viscous;
    else if (o.neumann == "full") cfg.iter.neumann_form = NeumannForm::Full;
    else throw IoError("--neumann must be viscous or full");
  }
  return cfg;
}

void write_state(const FlowState& s, const fs::path& dir) {
  const char* un[3] = {"u1.csv", "u2.csv", "u3.csv"};
  for (int i = 0; i < 3; ++i) write_field_csv(s.u.component(i), (dir / un[i]).string());
  if (s.w) {
    const char* wn[3] = {"w1.csv", "w2.csv", "w3.csv"};
    for (int i = 0; i < 3; ++i) write_field_csv(s.w->component(i), (dir / wn[i]).string());
  }
  write_field_csv(s.p, (dir / "p.csv").string());
}

void write_run_outputs(const RunConfig& cfg, const std::string& command,
                       const FlowState& s, const ConvergenceReport& rep,
                       const fs::path& dir) {
  fs::create_directories(dir);
  write_state(s, dir);
  write_report(rep, (dir / "report.ndjson").string());
  RunManifest m;
  m.config_hash = config_hash(cfg.raw_text);
  m.grid = cfg.prob.grid;
  m.command = command;
  m.status = status_name(rep.status);
  m.iterations = rep.iterations;
  if (!rep.records.empty()) {
    const auto& last = rep.records.back();
    m.final_d_u = last.d_u;
    m.final_d_w = last.d_w ? *last.d_w : 0.0;
    m.final_d_p = last.d_p;
  }
  write_manifest(m, (dir / "manifest.json").string());
}

int run_solve(const CommonOpts& o) {
  const RunConfig cfg = load(o);
  const DiscreteForcing forcing = realize_forcing(cfg.prob);
  auto [state, rep] = iterate(initial_state(cfg.prob), cfg.prob, forcing, cfg.iter);
  write_run_outputs(cfg, "solve", state, rep, o.out_dir);
  std::cout << "status: " << status_name(rep.status) << " after " << rep.iterations
            << " iterations\n";
  if (!rep.records.empty()) {
    const auto& last = rep.records.back();
    std::cout << "final increment: d_u=" << last.d_u << " d_p=" << last.d_p;
    if (last.d_w) std::cout << " d_w=" << *last.d_w;
    std::cout << "\n";
  }
  return status_exit_code(rep.status);
}

int run_contraction(const CommonOpts& o) {
  const RunConfig cfg = load(o);
  const DiscreteForcing forcing = realize_forcing(cfg.prob);
  auto [state, rep] = iterate(initial_state(cfg.prob), cfg.prob, forcing, cfg.iter);
  if (!o.out_dir.empty()) write_run_outputs(cfg, "contraction", state, rep, o.out_dir);
  std::cout << "status: " << status_name(rep.status) << " after " << rep.iterations
            << " iterations\n";
  for (const auto& r : rep.records)
    if (r.gamma) std::cout << "n=" << r.n << " gamma=" << *r.gamma << "\n";
  try {
    std::cout << "contraction estimate: "
              << estimate_contraction(rep, cfg.iter.divergence_window) << "\n";
  } catch (const InsufficientDataError&) {
    std::cout << "contraction estimate: unavailable (too few iterations)\n";
  }
  return status_exit_code(rep.status);
}

int run_mms(const CommonOpts& o, const std::string& mode) {
  const RunConfig cfg = load(o);
  if (!cfg.mms) throw IoError("mms requires a [case] section in the config");
  const ManufacturedCase& mc = *cfg.mms;
  const bool symbolic = mode == "symbolic";
  if (!symbolic && mode != "discrete")
    throw IoError("--mode must be discrete or symbolic");

  SymbolicForcing sym;
  if (symbolic) sym = manufacture_symbolic(mc);

  fs::create_directories(o.out_dir);
  std::ofstream table(fs::path(o.out_dir) / "orders.txt");
  std::vector<double> errors;
  int worst_exit = kExitOk;
  for (const GridSpec& g : grid_ladder(mc)) {
    const ProblemSpec prob = problem_from_case(mc, g, symbolic ? &sym : nullptr);
    DiscreteForcing forcing;
    if (symbolic) forcing = realize_forcing(prob);
    else forcing = manufacture_discrete(mc, g);
    // the ladder seeds each rung from the sampled exact fields; the run then
    // relaxes to the discrete fixed point and the remaining error is pure
    // truncation
    auto [state, rep] = iterate(exact_state(mc, g), prob, forcing, cfg.iter);
    const ErrorReport err = error_report(state, mc, g);
    errors.push_back(err.max_l2());
    table << "grid " << g.n1 << "x" << g.n2 << "x" << g.n3 << "x" << g.nt << " status "
          << status_name(rep.status) << " iters " << rep.iterations << " err_l2 "
          << err.max_l2() << " err_linf " << err.max_linf() << "\n";
    std::cout << "grid " << g.n1 << "x" << g.n2 << "x" << g.n3 << "x" << g.nt << ": "
              << status_name(rep.status) << ", max L2 error " << err.max_l2() << "\n";
    worst_exit = std::max(worst_exit, status_exit_code(rep.status));
  }
  bool all_positive = true;
  for (double e : errors) all_positive = all_positive && e > 0.0;
  if (errors.size() >= 2 && all_positive) {
    const auto orders = observed_order(errors);
    table << "orders";
    std::cout << "observed orders:";
    for (double p : orders) {
      table << " " << p;
      std::cout << " " << p;
    }
    table << "\n";
    std::cout << "\n";
  } else if (errors.size() >= 2) {
    table << "orders exact\n";
    std::cout << "observed orders: exact (zero error)\n";
  }
  return worst_exit;
}

int run_multipliers() {
  const MultiplierIdentification id = identify_multipliers();
  auto show = [](const char* name, double value, const MultiplierWitness& w) {
    std::cout << name << " = " << value << "\n";
    for (const auto& c : w.checks)
      std::cout << "  [" << (c.pass ? "ok" : "FAIL") << "] " << c.condition
                << " (max violation " << c.max_violation << ")\n";
  };
  show("lambda", id.lambda, id.lambda_witness);
  show("mu", id.mu, id.mu_witness);
  return (id.lambda_witness.all_pass && id.mu_witness.all_pass) ? kExitOk : kExitBadInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational iteration solver for incompressible and micropolar flow"};
  app.require_subcommand(1);

  CommonOpts solve_opts, mms_opts, contraction_opts;
  std::string mms_mode = "discrete";

  auto* solve = app.add_subcommand("solve", "iterate a configured problem");
  add_common(solve, solve_opts, true);

  auto* mms = app.add_subcommand("mms", "manufactured-solution verification ladder");
  add_common(mms, mms_opts, true);
  mms->add_option("--mode", mms_mode, "forcing construction: discrete|symbolic");

  auto* contraction =
      app.add_subcommand("contraction", "report successive-difference ratios");
  add_common(contraction, contraction_opts, false);

  auto* multipliers =
      app.add_subcommand("multipliers", "verify the correctional multipliers");
  int mult_threads = 0;
  multipliers->add_option("--threads", mult_threads, "worker thread count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      set_threads(solve_opts.threads);
      return run_solve(solve_opts);
    }
    if (mms->parsed()) {
      set_threads(mms_opts.threads);
      return run_mms(mms_opts, mms_mode);
    }
    if (contraction->parsed()) {
      set_threads(contraction_opts.threads);
      return run_contraction(contraction_opts);
    }
    if (multipliers->parsed()) {
      set_threads(mult_threads);
      return run_multipliers();
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
