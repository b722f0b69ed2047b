#pragma once

#include <utility>
#include <vector>

#include "vimflow/systems.hpp"

namespace vimflow {

struct InsufficientDataError : std::runtime_error {
  explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

enum class SolveStatus { Converged, MaxIters, Diverged, NonFinite };

const char* status_name(SolveStatus s);

struct IterationConfig {
  Axis direction = Axis::X1;
  std::size_t max_iters = 100;
  double tol = 1e-8;
  NormKind norm_kind = NormKind::L2;
  double omega = 1.0;  // under-relaxation; 1 is the plain scheme
  std::size_t divergence_window = 5;
  NeumannForm neumann_form = NeumannForm::Viscous;
  bool impose_pressure_neumann = false;

  void validate() const;
};

struct IterationRecord {
  std::size_t n = 0;
  double d_u = 0.0;
  std::optional<double> d_w;
  double d_p = 0.0;
  double d = 0.0;  // max over the unknown blocks
  std::optional<double> gamma;
  double wall_seconds = 0.0;
};

struct ConvergenceReport {
  std::vector<IterationRecord> records;
  SolveStatus status = SolveStatus::MaxIters;
  std::size_t iterations = 0;
};

// Forcing realized as grid fields. pressure_source, when present, replaces
// div(body) in the pressure equation (the per-equation source of the general
// formulation); the discrete manufacturing mode relies on it.
struct DiscreteForcing {
  VectorField body;
  std::optional<VectorField> torque;
  std::optional<ScalarField> pressure_source;
};

DiscreteForcing realize_forcing(const ProblemSpec& prob);

// One correctional update with lambda = mu = 1: every unknown gains
// omega * prefix_integral(residual, direction), all residuals evaluated at
// the incoming iterate; then Dirichlet data and the pressure gauge are
// re-imposed.
FlowState vim_step(const FlowState& s, const ProblemSpec& prob,
                   const DiscreteForcing& forcing, const IterationConfig& cfg);

std::pair<FlowState, ConvergenceReport> iterate(FlowState s0, const ProblemSpec& prob,
                                                const DiscreteForcing& forcing,
                                                const IterationConfig& cfg);

// Geometric mean of the last divergence_window defined successive-difference
// ratios. Throws InsufficientData with fewer than two iterations.
double estimate_contraction(const ConvergenceReport& rep, std::size_t window = 5);

// --- Lagrange multiplier identification -----------------------------------

struct MultiplierCheck {
  std::string condition;
  double max_violation = 0.0;
  bool pass = false;
};

struct MultiplierWitness {
  std::vector<MultiplierCheck> checks;
  bool all_pass = false;
};

// Checks a candidate multiplier (an expression in x1) against the three
// stationary conditions: vanishing second derivative, unit value at the
// evaluation point, vanishing first derivative there.
MultiplierWitness check_multiplier_candidate(const Expr& candidate);

struct MultiplierIdentification {
  double lambda = 1.0;
  double mu = 1.0;
  MultiplierWitness lambda_witness;
  MultiplierWitness mu_witness;
};

MultiplierIdentification identify_multipliers();

}  // namespace vimflow
