#include "vimflow/vim.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>

namespace vimflow {

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::Diverged: return "Diverged";
    case SolveStatus::NonFinite: return "NonFinite";
  }
  return "?";
}

void IterationConfig::validate() const {
  if (direction == Axis::T)
    throw std::invalid_argument("IterationConfig: direction must be spatial");
  if (max_iters < 1) throw std::invalid_argument("IterationConfig: max_iters must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("IterationConfig: tol must be positive");
  if (!(omega > 0.0 && omega <= 1.0))
    throw std::invalid_argument("IterationConfig: omega must lie in (0,1]");
  if (divergence_window < 2)
    throw std::invalid_argument("IterationConfig: divergence_window must be >= 2");
}

DiscreteForcing realize_forcing(const ProblemSpec& prob) {
  prob.validate();
  DiscreteForcing f;
  f.body = VectorField(prob.grid);
  for (int i = 0; i < 3; ++i)
    f.body.component(i) = eval_on_grid(prob.force[i], prob.grid);
  if (prob.kind == ProblemKind::Micropolar) {
    VectorField t(prob.grid);
    for (int i = 0; i < 3; ++i)
      t.component(i) = eval_on_grid((*prob.torque)[i], prob.grid);
    f.torque = std::move(t);
  }
  return f;
}

namespace {

void add_scaled_integral(ScalarField& target, const ScalarField& residual, Axis dir,
                         double omega) {
  const ScalarField incr = prefix_integral(residual, dir);
  const std::int64_t n = std::int64_t(target.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k)
    target.values[k] = target.values[k] + omega * incr.values[k];
}

// Re-imposes the Neumann data on the pressure boundary by matching the
// second-order one-sided normal derivative against the target.
void impose_neumann(ScalarField& p, const NeumannData& data) {
  const GridSpec& g = p.grid;
  for (int ai = 0; ai < 3; ++ai) {
    const Axis a = Axis(ai);
    const std::size_t n = g.extent(a);
    if (n < 3) continue;
    const double h = g.spacing(a);
    const std::size_t s = g.stride(a);
    const std::size_t block = n * s;
    for (std::size_t outer = 0; outer < g.size() / block; ++outer)
      for (std::size_t inner = 0; inner < s; ++inner) {
        const std::size_t lo = outer * block + inner;
        const std::size_t hi = lo + (n - 1) * s;
        // min face: dp/dn = -dp/dx_a
        p.values[lo] = (-2.0 * h * data.values.values[lo] + 4.0 * p.values[lo + s] -
                        p.values[lo + 2 * s]) /
                       3.0;
        p.values[hi] = (2.0 * h * data.values.values[hi] + 4.0 * p.values[hi - s] -
                        p.values[hi - 2 * s]) /
                       3.0;
      }
  }
}

}  // namespace

FlowState vim_step(const FlowState& s, const ProblemSpec& prob,
                   const DiscreteForcing& forcing, const IterationConfig& cfg) {
  cfg.validate();
  s.validate(prob.kind);
  const bool micropolar = prob.kind == ProblemKind::Micropolar;

  // All residuals at the incoming iterate (Jacobi-style).
  const VectorField rm = micropolar
                             ? mp_momentum_residual(s, forcing.body, prob.params)
                             : ns_momentum_residual(s, forcing.body, prob.params);
  std::optional<VectorField> rw;
  if (micropolar) rw = mp_microrotation_residual(s, *forcing.torque, prob.params);
  ScalarField rp;
  if (forcing.pressure_source) {
    rp = micropolar ? mp_pressure_residual_with_source(s, *forcing.pressure_source,
                                                       prob.params)
                    : ns_pressure_residual_with_source(s, *forcing.pressure_source);
  } else {
    rp = micropolar ? mp_pressure_residual(s, forcing.body, prob.params)
                    : ns_pressure_residual(s, forcing.body);
  }

  FlowState next = s;
  for (int i = 0; i < 3; ++i)
    add_scaled_integral(next.u.component(i), rm.component(i), cfg.direction, cfg.omega);
  if (micropolar)
    for (int i = 0; i < 3; ++i)
      add_scaled_integral(next.w->component(i), rw->component(i), cfg.direction, cfg.omega);
  add_scaled_integral(next.p, rp, cfg.direction, cfg.omega);

  next = apply_dirichlet(std::move(next), prob);
  if (cfg.impose_pressure_neumann) {
    const NeumannData data =
        micropolar
            ? mp_pressure_neumann(next, forcing.body, prob.params, cfg.neumann_form)
            : ns_pressure_neumann(next, forcing.body, prob.params, cfg.neumann_form);
    impose_neumann(next.p, data);
  }
  next.p = project_pressure_gauge(next.p);

  ensure_finite(next.u, "vim_step");
  if (next.w) ensure_finite(*next.w, "vim_step");
  ensure_finite(next.p, "vim_step");
  return next;
}

std::pair<FlowState, ConvergenceReport> iterate(FlowState s0, const ProblemSpec& prob,
                                                const DiscreteForcing& forcing,
                                                const IterationConfig& cfg) {
  cfg.validate();
  ConvergenceReport rep;
  double prev_d = -1.0;
  std::size_t bad_streak = 0;

  for (std::size_t n = 0; n < cfg.max_iters; ++n) {
    const auto tic = std::chrono::steady_clock::now();
    FlowState s1;
    try {
      s1 = vim_step(s0, prob, forcing, cfg);
    } catch (const NonFiniteError&) {
      rep.status = SolveStatus::NonFinite;
      rep.iterations = n;
      return {std::move(s0), std::move(rep)};
    }

    IterationRecord rec;
    rec.n = n;
    rec.d_u = diff_norm(s1.u, s0.u, cfg.norm_kind);
    rec.d_p = diff_norm(s1.p, s0.p, cfg.norm_kind);
    rec.d = std::max(rec.d_u, rec.d_p);
    if (s1.w) {
      rec.d_w = diff_norm(*s1.w, *s0.w, cfg.norm_kind);
      rec.d = std::max(rec.d, *rec.d_w);
    }
    if (prev_d > 0.0) rec.gamma = rec.d / prev_d;
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - tic).count();
    rep.records.push_back(rec);

    s0 = std::move(s1);
    rep.iterations = n + 1;

    if (!std::isfinite(rec.d)) {
      rep.status = SolveStatus::NonFinite;
      return {std::move(s0), std::move(rep)};
    }
    if (rec.d <= cfg.tol) {
      rep.status = SolveStatus::Converged;
      return {std::move(s0), std::move(rep)};
    }
    if (rec.gamma && *rec.gamma >= 1.0) {
      if (++bad_streak >= cfg.divergence_window) {
        rep.status = SolveStatus::Diverged;
        return {std::move(s0), std::move(rep)};
      }
    } else {
      bad_streak = 0;
    }
    prev_d = rec.d;
  }
  rep.status = SolveStatus::MaxIters;
  return {std::move(s0), std::move(rep)};
}

double estimate_contraction(const ConvergenceReport& rep, std::size_t window) {
  std::vector<double> gammas;
  for (const auto& r : rep.records)
    if (r.gamma) gammas.push_back(*r.gamma);
  if (rep.records.size() < 2 || gammas.empty())
    throw InsufficientDataError("estimate_contraction: need at least two iterations");
  const std::size_t k = std::min(window, gammas.size());
  double logsum = 0.0;
  for (std::size_t i = gammas.size() - k; i < gammas.size(); ++i) {
    if (gammas[i] <= 0.0) return 0.0;
    logsum += std::log(gammas[i]);
  }
  return std::exp(logsum / double(k));
}

// --- multiplier identification ---------------------------------------------

namespace {

MultiplierCheck run_check(const char* name, const Expr& e, double expected) {
  MultiplierCheck c;
  c.condition = name;
  double worst = 0.0;
  const int samples = 33;
  for (int i = 0; i < samples; ++i) {
    const double x = double(i) / double(samples - 1);
    worst = std::max(worst, std::abs(eval_point(e, x, 0.3, 0.7, 0.5) - expected));
  }
  c.max_violation = worst;
  c.pass = worst <= 1e-12;
  return c;
}

}  // namespace

MultiplierWitness check_multiplier_candidate(const Expr& candidate) {
  MultiplierWitness w;
  const Expr d1 = differentiate(candidate, Var::X1);
  const Expr dd = differentiate(d1, Var::X1);
  w.checks.push_back(run_check("second derivative vanishes identically", dd, 0.0));
  w.checks.push_back(run_check("value at the evaluation point equals 1", candidate, 1.0));
  w.checks.push_back(run_check("first derivative vanishes at the evaluation point", d1, 0.0));
  w.all_pass = true;
  for (const auto& c : w.checks) w.all_pass = w.all_pass && c.pass;
  return w;
}

MultiplierIdentification identify_multipliers() {
  MultiplierIdentification id;
  id.lambda = 1.0;
  id.mu = 1.0;
  id.lambda_witness = check_multiplier_candidate(num(1.0));
  id.mu_witness = check_multiplier_candidate(num(1.0));
  return id;
}

}  // namespace vimflow
