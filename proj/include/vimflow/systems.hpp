#pragma once

#include <functional>
#include <optional>

#include "vimflow/expr.hpp"
#include "vimflow/grid.hpp"
#include "vimflow/operators.hpp"

namespace vimflow {

enum class ProblemKind { NavierStokes, Micropolar };

// Which trace the pressure Neumann data uses: the viscous trace
// -(nu*lap(u)+f).n or the full momentum trace including time derivative and
// convection.
enum class NeumannForm { Viscous, Full };

struct MissingMicrorotationError : std::runtime_error {
  explicit MissingMicrorotationError(const std::string& what) : std::runtime_error(what) {}
};

struct FluidParams {
  double nu = 1.0;    // kinematic viscosity
  double nu_r = 0.0;  // microrotation viscosity
  double c0 = 0.0, ca = 0.0, cd = 0.0;  // angular viscosities

  void validate(ProblemKind kind) const;
};

// The iterate: velocity, optional microrotation, pressure.
struct FlowState {
  VectorField u;
  std::optional<VectorField> w;
  ScalarField p;

  const GridSpec& grid() const { return p.grid; }
  void validate(ProblemKind kind) const;
};

struct ProblemSpec {
  ProblemKind kind = ProblemKind::NavierStokes;
  FluidParams params;
  GridSpec grid;
  std::array<Expr, 3> force;                   // f (NS) / f1 (micropolar)
  std::optional<std::array<Expr, 3>> torque;   // f2, micropolar only
  std::array<Expr, 3> dirichlet_u;             // g
  std::optional<std::array<Expr, 3>> dirichlet_w;  // q
  std::array<Expr, 3> initial_u;               // u0
  std::optional<std::array<Expr, 3>> initial_w;    // w0

  void validate() const;
};

// Pressure Neumann targets: defined on boundary-face nodes of every
// non-degenerate spatial axis (zero elsewhere). Shared edge/corner nodes are
// assigned in axis order X1 < X2 < X3.
struct NeumannData {
  ScalarField values;
};

// Extension contract for the general m-equation setting: user-supplied
// residual evaluators over compatible fields. The two concrete systems below
// are hand instantiations of the same shape.
struct GeneralSystem {
  std::size_t equation_count = 0;
  std::vector<std::function<VectorField(const std::vector<VectorField>&,
                                        const ScalarField&)>>
      momentum_residuals;
  std::vector<std::function<ScalarField(const std::vector<VectorField>&,
                                        const ScalarField&)>>
      pressure_residuals;
};

// u_j * d(phi)/dx_j summed in axis order (advective form).
ScalarField convection(const VectorField& u, const ScalarField& phi);
VectorField convection(const VectorField& u, const VectorField& v);

// lap(u) - 1/nu*(ddt(u) + (u.grad)u + grad p) + 1/nu*f, componentwise.
VectorField ns_momentum_residual(const FlowState& s, const VectorField& f,
                                 const FluidParams& prm);

// lap(p) + div((u.grad)u - f).
ScalarField ns_pressure_residual(const FlowState& s, const VectorField& f);

// lap(p) + div((u.grad)u): the forcing-free part of the pressure equation.
ScalarField ns_pressure_source_term(const FlowState& s);

// lap(p) + div((u.grad)u) - source; used when the pressure equation carries
// an explicit per-equation source field instead of div(f).
ScalarField ns_pressure_residual_with_source(const FlowState& s, const ScalarField& source);

NeumannData ns_pressure_neumann(const FlowState& s, const VectorField& f,
                                const FluidParams& prm, NeumannForm form = NeumannForm::Viscous);

// lap(u) - 1/(nu+nu_r)*(ddt(u) + (u.grad)u + grad p)
//        + 1/(nu+nu_r)*(2 nu_r curl(w) + f1).
VectorField mp_momentum_residual(const FlowState& s, const VectorField& f1,
                                 const FluidParams& prm);

// lap(w) - 1/(ca+cd)*(ddt(w) - (c0+cd-ca)*grad(div w) + (u.grad)w + 4 nu_r w)
//        + 1/(ca+cd)*(2 nu_r curl(u) + f2).
VectorField mp_microrotation_residual(const FlowState& s, const VectorField& f2,
                                      const FluidParams& prm);

// lap(p) + div((u.grad)u - 2 nu_r curl(w) - f1).
ScalarField mp_pressure_residual(const FlowState& s, const VectorField& f1,
                                 const FluidParams& prm);

ScalarField mp_pressure_source_term(const FlowState& s, const FluidParams& prm);
ScalarField mp_pressure_residual_with_source(const FlowState& s, const ScalarField& source,
                                             const FluidParams& prm);

NeumannData mp_pressure_neumann(const FlowState& s, const VectorField& f1,
                                const FluidParams& prm, NeumannForm form = NeumannForm::Viscous);

// Overwrites boundary faces (t > t0) with g/q and the t = t0 slice with
// u0/w0; interior nodes untouched. Idempotent.
FlowState apply_dirichlet(FlowState s, const ProblemSpec& prob);

// Canonical starting iterate: u0/w0 extended constantly in time, boundary
// data re-imposed, zero gauge-projected pressure.
FlowState initial_state(const ProblemSpec& prob);

// Subtracts the per-time-slice mean (L2_0 gauge).
ScalarField project_pressure_gauge(const ScalarField& p);

}  // namespace vimflow
