#pragma once

#include <string>
#include <vector>

#include "vimflow/vim.hpp"

namespace vimflow {

struct LadderTooShortError : std::runtime_error {
  explicit LadderTooShortError(const std::string& what) : std::runtime_error(what) {}
};

// A prescribed exact solution plus the parameters and grid it lives on.
struct ManufacturedCase {
  std::string name;
  ProblemKind kind = ProblemKind::NavierStokes;
  FluidParams params;
  GridSpec grid;
  std::array<Expr, 3> exact_u;
  std::optional<std::array<Expr, 3>> exact_w;
  Expr exact_p;
  std::size_t rungs = 1;

  void validate() const;
};

// Halves the spacing of every non-degenerate axis (n -> 2(n-1)+1).
GridSpec refine(const GridSpec& g);

// coarse -> fine, `rungs` grids total, factor-2 nested.
std::vector<GridSpec> grid_ladder(const ManufacturedCase& c);

// Exact expressions sampled on the grid; pressure gauge-projected so the
// state lies in the iteration's admissible set.
FlowState exact_state(const ManufacturedCase& c, const GridSpec& g);

// Forcing fields that make every discrete residual vanish at the exact
// fields (the momentum forcing to roundoff, the pressure source exactly).
DiscreteForcing manufacture_discrete(const ManufacturedCase& c, const GridSpec& g);

struct SymbolicForcing {
  std::array<Expr, 3> body;
  std::optional<std::array<Expr, 3>> torque;
};

// The continuous forcing obtained by symbolic differentiation of the exact
// solution (true method of manufactured solutions).
SymbolicForcing manufacture_symbolic(const ManufacturedCase& c);

// Wraps the case as a solvable problem: Dirichlet/initial data are the exact
// expressions, forcing is the symbolic one when given (zero otherwise).
ProblemSpec problem_from_case(const ManufacturedCase& c, const GridSpec& g,
                              const SymbolicForcing* forcing = nullptr);

struct ErrorEntry {
  std::string name;
  double l2 = 0.0;
  double linf = 0.0;
};

struct ErrorReport {
  std::vector<ErrorEntry> entries;
  double max_linf() const;
  double max_l2() const;
};

ErrorReport error_report(const FlowState& state, const ManufacturedCase& c,
                         const GridSpec& g);

// order per ladder rung pair: log2(e_coarse / e_fine). Throws LadderTooShort
// with fewer than two entries.
std::vector<double> observed_order(const std::vector<double>& ladder_errors);

}  // namespace vimflow
