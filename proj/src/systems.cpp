#include "vimflow/systems.hpp"

#include <cmath>
#include <cstdint>

namespace vimflow {

void FluidParams::validate(ProblemKind kind) const {
  if (!(nu > 0.0) || !std::isfinite(nu))
    throw std::invalid_argument("FluidParams: nu must be positive");
  if (kind == ProblemKind::Micropolar) {
    if (nu_r < 0.0) throw std::invalid_argument("FluidParams: nu_r must be >= 0");
    if (!(c0 > 0.0 && ca > 0.0 && cd > 0.0))
      throw std::invalid_argument("FluidParams: c0, ca, cd must be positive");
    if (!(c0 + cd > ca))
      throw std::invalid_argument("FluidParams: requires c0 + cd > ca");
  }
}

void FlowState::validate(ProblemKind kind) const {
  u.validate();
  require_compatible(u.c1, p, "FlowState");
  if (kind == ProblemKind::Micropolar) {
    if (!w) throw MissingMicrorotationError("FlowState: micropolar state requires w");
    w->validate();
    require_compatible(w->c1, p, "FlowState");
  }
}

void ProblemSpec::validate() const {
  grid.validate();
  params.validate(kind);
  auto all_set = [](const std::array<Expr, 3>& a) { return a[0] && a[1] && a[2]; };
  if (!all_set(force) || !all_set(dirichlet_u) || !all_set(initial_u))
    throw std::invalid_argument("ProblemSpec: missing force/boundary/initial expressions");
  if (kind == ProblemKind::Micropolar) {
    if (!torque || !dirichlet_w || !initial_w || !all_set(*torque) ||
        !all_set(*dirichlet_w) || !all_set(*initial_w))
      throw std::invalid_argument("ProblemSpec: micropolar requires f2, q and w0");
  }
}

ScalarField convection(const VectorField& u, const ScalarField& phi) {
  require_compatible(u.c1, phi, "convection");
  const ScalarField d1f = ddx(phi, Axis::X1);
  const ScalarField d2f = ddx(phi, Axis::X2);
  const ScalarField d3f = ddx(phi, Axis::X3);
  ScalarField out(phi.grid);
  const std::int64_t n = std::int64_t(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out.values[i] = u.c1.values[i] * d1f.values[i] + u.c2.values[i] * d2f.values[i] +
                    u.c3.values[i] * d3f.values[i];
  return out;
}

VectorField convection(const VectorField& u, const VectorField& v) {
  VectorField out;
  out.c1 = convection(u, v.c1);
  out.c2 = convection(u, v.c2);
  out.c3 = convection(u, v.c3);
  return out;
}

namespace {

Axis spatial_axis(int i) { return Axis(i); }

// Shared momentum kernel. The micropolar coupling 2*nu_r*curl(w) is passed as
// a field (null for plain Navier-Stokes); with nu_r = 0 and w = 0 the two
// systems evaluate to numerically identical residuals.
VectorField momentum_residual_impl(const FlowState& s, const VectorField& f,
                                   double inv_coeff, const VectorField* curl_term) {
  require_compatible(s.u.c1, f.c1, "momentum_residual");
  VectorField out(s.grid());
  for (int i = 0; i < 3; ++i) {
    const ScalarField& ui = s.u.component(i);
    const ScalarField lap = laplacian(ui);
    const ScalarField dtu = ddt(ui);
    const ScalarField conv = convection(s.u, ui);
    const ScalarField dp = ddx(s.p, spatial_axis(i));
    const ScalarField& fi = f.component(i);
    const ScalarField* cw = curl_term ? &curl_term->component(i) : nullptr;
    ScalarField& ri = out.component(i);
    const std::int64_t n = std::int64_t(ri.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
      const double base =
          lap.values[k] - inv_coeff * (dtu.values[k] + conv.values[k] + dp.values[k]);
      const double rhs =
          inv_coeff * (cw ? (cw->values[k] + fi.values[k]) : fi.values[k]);
      ri.values[k] = base + rhs;
    }
  }
  return out;
}

VectorField scaled_curl(const VectorField& v, double factor) {
  VectorField c = curl(v);
  for (int i = 0; i < 3; ++i) {
    ScalarField& ci = c.component(i);
    const std::int64_t n = std::int64_t(ci.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) ci.values[k] = factor * ci.values[k];
  }
  return c;
}

}  // namespace

VectorField ns_momentum_residual(const FlowState& s, const VectorField& f,
                                 const FluidParams& prm) {
  s.validate(ProblemKind::NavierStokes);
  prm.validate(ProblemKind::NavierStokes);
  return momentum_residual_impl(s, f, 1.0 / prm.nu, nullptr);
}

VectorField mp_momentum_residual(const FlowState& s, const VectorField& f1,
                                 const FluidParams& prm) {
  if (!s.w) throw MissingMicrorotationError("mp_momentum_residual: state has no w");
  s.validate(ProblemKind::Micropolar);
  const VectorField cw = scaled_curl(*s.w, 2.0 * prm.nu_r);
  return momentum_residual_impl(s, f1, 1.0 / (prm.nu + prm.nu_r), &cw);
}

VectorField mp_microrotation_residual(const FlowState& s, const VectorField& f2,
                                      const FluidParams& prm) {
  if (!s.w) throw MissingMicrorotationError("mp_microrotation_residual: state has no w");
  s.validate(ProblemKind::Micropolar);
  require_compatible(s.p, f2.c1, "mp_microrotation_residual");
  const VectorField& w = *s.w;
  const double inv = 1.0 / (prm.ca + prm.cd);
  const double cdiv = prm.c0 + prm.cd - prm.ca;
  const VectorField cu = scaled_curl(s.u, 2.0 * prm.nu_r);
  VectorField out(s.grid());
  for (int i = 0; i < 3; ++i) {
    const ScalarField& wi = w.component(i);
    const ScalarField lap = laplacian(wi);
    const ScalarField dtw = ddt(wi);
    const ScalarField conv = convection(s.u, wi);
    // i-th component of grad(div w): d/dx_i sum_j d w_j/dx_j, expanded with
    // d2 on the diagonal and d_mixed off it.
    ScalarField graddiv(s.grid());
    for (int j = 0; j < 3; ++j) {
      const ScalarField term =
          (i == j) ? d2(w.component(j), spatial_axis(i))
                   : d_mixed(w.component(j), spatial_axis(j), spatial_axis(i));
      const std::int64_t n = std::int64_t(graddiv.size());
#pragma omp parallel for schedule(static)
      for (std::int64_t k = 0; k < n; ++k)
        graddiv.values[k] = graddiv.values[k] + term.values[k];
    }
    const ScalarField& fi = f2.component(i);
    const ScalarField& ci = cu.component(i);
    ScalarField& ri = out.component(i);
    const double nr4 = 4.0 * prm.nu_r;
    const std::int64_t n = std::int64_t(ri.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
      const double base =
          lap.values[k] - inv * (dtw.values[k] - cdiv * graddiv.values[k] +
                                 conv.values[k] + nr4 * wi.values[k]);
      ri.values[k] = base + inv * (ci.values[k] + fi.values[k]);
    }
  }
  return out;
}

namespace {

// lap(p) + div(integrand), the common pressure-residual shape.
ScalarField pressure_residual_shape(const ScalarField& p, const VectorField& integrand) {
  const ScalarField lap = laplacian(p);
  const ScalarField dv = divergence(integrand);
  ScalarField out(p.grid);
  const std::int64_t n = std::int64_t(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) out.values[k] = lap.values[k] + dv.values[k];
  return out;
}

VectorField subtract(const VectorField& a, const VectorField& b) {
  VectorField out(a.grid());
  for (int i = 0; i < 3; ++i) {
    const std::int64_t n = std::int64_t(out.c1.size());
    const ScalarField& ai = a.component(i);
    const ScalarField& bi = b.component(i);
    ScalarField& oi = out.component(i);
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) oi.values[k] = ai.values[k] - bi.values[k];
  }
  return out;
}

}  // namespace

ScalarField ns_pressure_residual(const FlowState& s, const VectorField& f) {
  s.validate(ProblemKind::NavierStokes);
  require_compatible(s.p, f.c1, "ns_pressure_residual");
  return pressure_residual_shape(s.p, subtract(convection(s.u, s.u), f));
}

ScalarField ns_pressure_source_term(const FlowState& s) {
  return pressure_residual_shape(s.p, convection(s.u, s.u));
}

ScalarField ns_pressure_residual_with_source(const FlowState& s, const ScalarField& source) {
  require_compatible(s.p, source, "ns_pressure_residual_with_source");
  ScalarField out = ns_pressure_source_term(s);
  const std::int64_t n = std::int64_t(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) out.values[k] = out.values[k] - source.values[k];
  return out;
}

ScalarField mp_pressure_residual(const FlowState& s, const VectorField& f1,
                                 const FluidParams& prm) {
  if (!s.w) throw MissingMicrorotationError("mp_pressure_residual: state has no w");
  const VectorField cw = scaled_curl(*s.w, 2.0 * prm.nu_r);
  return pressure_residual_shape(s.p, subtract(subtract(convection(s.u, s.u), cw), f1));
}

ScalarField mp_pressure_source_term(const FlowState& s, const FluidParams& prm) {
  if (!s.w) throw MissingMicrorotationError("mp_pressure_source_term: state has no w");
  const VectorField cw = scaled_curl(*s.w, 2.0 * prm.nu_r);
  return pressure_residual_shape(s.p, subtract(convection(s.u, s.u), cw));
}

ScalarField mp_pressure_residual_with_source(const FlowState& s, const ScalarField& source,
                                             const FluidParams& prm) {
  require_compatible(s.p, source, "mp_pressure_residual_with_source");
  ScalarField out = mp_pressure_source_term(s, prm);
  const std::int64_t n = std::int64_t(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) out.values[k] = out.values[k] - source.values[k];
  return out;
}

namespace {

// Assigns -(G.n) on each boundary face, n the outward axis-aligned normal.
NeumannData neumann_from_trace(const VectorField& G) {
  const GridSpec& g = G.grid();
  NeumannData out{ScalarField(g)};
  for (int ai = 0; ai < 3; ++ai) {
    const Axis a = Axis(ai);
    const std::size_t n = g.extent(a);
    if (n < 2) continue;
    const std::size_t s = g.stride(a);
    const std::size_t block = n * s;
    const ScalarField& Ga = G.component(ai);
    for (std::size_t outer = 0; outer < g.size() / block; ++outer)
      for (std::size_t inner = 0; inner < s; ++inner) {
        const std::size_t lo = outer * block + inner;
        const std::size_t hi = lo + (n - 1) * s;
        out.values.values[lo] = Ga.values[lo];    // n = -e_a: -(G.n) = +G_a
        out.values.values[hi] = -Ga.values[hi];   // n = +e_a
      }
  }
  return out;
}

VectorField momentum_trace(const FlowState& s, const VectorField& f,
                           const FluidParams& prm, NeumannForm form, bool micropolar) {
  VectorField G(s.grid());
  const VectorField cu =
      micropolar ? scaled_curl(s.u, 2.0 * prm.nu_r) : VectorField(s.grid());
  for (int i = 0; i < 3; ++i) {
    const ScalarField lap = laplacian(s.u.component(i));
    const ScalarField& fi = f.component(i);
    ScalarField& Gi = G.component(i);
    const std::int64_t n = std::int64_t(Gi.size());
    if (form == NeumannForm::Viscous) {
#pragma omp parallel for schedule(static)
      for (std::int64_t k = 0; k < n; ++k)
        Gi.values[k] = prm.nu * lap.values[k] + cu.component(i).values[k] + fi.values[k];
    } else {
      const ScalarField dtu = ddt(s.u.component(i));
      const ScalarField conv = convection(s.u, s.u.component(i));
#pragma omp parallel for schedule(static)
      for (std::int64_t k = 0; k < n; ++k)
        Gi.values[k] = prm.nu * lap.values[k] + cu.component(i).values[k] + fi.values[k] -
                       dtu.values[k] - conv.values[k];
    }
  }
  return G;
}

}  // namespace

NeumannData ns_pressure_neumann(const FlowState& s, const VectorField& f,
                                const FluidParams& prm, NeumannForm form) {
  require_compatible(s.p, f.c1, "ns_pressure_neumann");
  return neumann_from_trace(momentum_trace(s, f, prm, form, false));
}

NeumannData mp_pressure_neumann(const FlowState& s, const VectorField& f1,
                                const FluidParams& prm, NeumannForm form) {
  if (!s.w) throw MissingMicrorotationError("mp_pressure_neumann: state has no w");
  return neumann_from_trace(momentum_trace(s, f1, prm, form, true));
}

namespace {

void apply_initial_slice(VectorField& v, const std::array<Expr, 3>& exprs,
                         const GridSpec& g) {
  for (std::size_t i1 = 0; i1 < g.n1; ++i1)
    for (std::size_t i2 = 0; i2 < g.n2; ++i2)
      for (std::size_t i3 = 0; i3 < g.n3; ++i3) {
        const std::size_t idx = g.index(i1, i2, i3, 0);
        const auto x = g.point(idx);
        for (int c = 0; c < 3; ++c) v.component(c).values[idx] = eval_point(exprs[c], x);
      }
}

void apply_boundary_faces(VectorField& v, const std::array<Expr, 3>& exprs,
                          const GridSpec& g) {
  for (int ai = 0; ai < 3; ++ai) {
    const Axis a = Axis(ai);
    const std::size_t n = g.extent(a);
    if (n < 2) continue;
    const std::size_t s = g.stride(a);
    const std::size_t block = n * s;
    for (std::size_t outer = 0; outer < g.size() / block; ++outer)
      for (std::size_t inner = 0; inner < s; ++inner) {
        const std::size_t lo = outer * block + inner;
        const std::size_t hi = lo + (n - 1) * s;
        for (std::size_t idx : {lo, hi}) {
          if (g.coords(idx)[3] == 0) continue;  // t = t0 slice belongs to u0
          const auto x = g.point(idx);
          for (int c = 0; c < 3; ++c)
            v.component(c).values[idx] = eval_point(exprs[c], x);
        }
      }
  }
}

}  // namespace

FlowState apply_dirichlet(FlowState s, const ProblemSpec& prob) {
  prob.validate();
  s.validate(prob.kind);
  if (!(s.p.grid == prob.grid))
    throw GridMismatchError("apply_dirichlet: state grid differs from problem grid");
  apply_initial_slice(s.u, prob.initial_u, prob.grid);
  apply_boundary_faces(s.u, prob.dirichlet_u, prob.grid);
  if (prob.kind == ProblemKind::Micropolar) {
    apply_initial_slice(*s.w, *prob.initial_w, prob.grid);
    apply_boundary_faces(*s.w, *prob.dirichlet_w, prob.grid);
  }
  return s;
}

FlowState initial_state(const ProblemSpec& prob) {
  prob.validate();
  const GridSpec& g = prob.grid;
  FlowState s;
  s.u = VectorField(g);
  s.p = ScalarField(g);
  GridSpec slice = g;
  slice.nt = 1;
  for (int c = 0; c < 3; ++c) {
    const ScalarField u0 = eval_on_grid(prob.initial_u[c], slice);
    ScalarField& uc = s.u.component(c);
    const std::int64_t nsp = std::int64_t(g.n1 * g.n2 * g.n3);
#pragma omp parallel for schedule(static)
    for (std::int64_t sp = 0; sp < nsp; ++sp)
      for (std::size_t it = 0; it < g.nt; ++it)
        uc.values[std::size_t(sp) * g.nt + it] = u0.values[std::size_t(sp)];
  }
  if (prob.kind == ProblemKind::Micropolar) {
    VectorField w(g);
    for (int c = 0; c < 3; ++c) {
      const ScalarField w0 = eval_on_grid((*prob.initial_w)[c], slice);
      ScalarField& wc = w.component(c);
      const std::int64_t nsp = std::int64_t(g.n1 * g.n2 * g.n3);
#pragma omp parallel for schedule(static)
      for (std::int64_t sp = 0; sp < nsp; ++sp)
        for (std::size_t it = 0; it < g.nt; ++it)
          wc.values[std::size_t(sp) * g.nt + it] = w0.values[std::size_t(sp)];
    }
    s.w = std::move(w);
  }
  return apply_dirichlet(std::move(s), prob);
}

ScalarField project_pressure_gauge(const ScalarField& p) {
  const GridSpec& g = p.grid;
  const std::size_t nspace = g.n1 * g.n2 * g.n3;
  ScalarField out = p;
  for (std::size_t it = 0; it < g.nt; ++it) {
    double sum = 0.0;
    for (std::size_t sp = 0; sp < nspace; ++sp) sum += p.values[sp * g.nt + it];
    const double mean = sum / double(nspace);
    const std::int64_t ns = std::int64_t(nspace);
#pragma omp parallel for schedule(static)
    for (std::int64_t sp = 0; sp < ns; ++sp)
      out.values[std::size_t(sp) * g.nt + it] =
          p.values[std::size_t(sp) * g.nt + it] - mean;
  }
  return out;
}

}  // namespace vimflow
