#include "vimflow/verify.hpp"

#include <cmath>
#include <cstdint>

namespace vimflow {

void ManufacturedCase::validate() const {
  grid.validate();
  params.validate(kind);
  if (!exact_u[0] || !exact_u[1] || !exact_u[2] || !exact_p)
    throw std::invalid_argument("ManufacturedCase: incomplete exact expressions");
  if (kind == ProblemKind::Micropolar &&
      (!exact_w || !(*exact_w)[0] || !(*exact_w)[1] || !(*exact_w)[2]))
    throw std::invalid_argument("ManufacturedCase: micropolar case requires exact w");
  if (rungs < 1) throw std::invalid_argument("ManufacturedCase: rungs must be >= 1");
}

GridSpec refine(const GridSpec& g) {
  GridSpec f = g;
  auto split = [](std::size_t n, double& h) -> std::size_t {
    if (n < 2) return n;
    h *= 0.5;
    return 2 * (n - 1) + 1;
  };
  f.n1 = split(g.n1, f.h1);
  f.n2 = split(g.n2, f.h2);
  f.n3 = split(g.n3, f.h3);
  f.nt = split(g.nt, f.dt);
  return f;
}

std::vector<GridSpec> grid_ladder(const ManufacturedCase& c) {
  c.validate();
  std::vector<GridSpec> ladder{c.grid};
  for (std::size_t r = 1; r < c.rungs; ++r) ladder.push_back(refine(ladder.back()));
  return ladder;
}

FlowState exact_state(const ManufacturedCase& c, const GridSpec& g) {
  c.validate();
  FlowState s;
  s.u = VectorField(g);
  for (int i = 0; i < 3; ++i) s.u.component(i) = eval_on_grid(c.exact_u[i], g);
  if (c.kind == ProblemKind::Micropolar) {
    VectorField w(g);
    for (int i = 0; i < 3; ++i) w.component(i) = eval_on_grid((*c.exact_w)[i], g);
    s.w = std::move(w);
  }
  s.p = project_pressure_gauge(eval_on_grid(c.exact_p, g));
  return s;
}

namespace {

VectorField negate_scaled(const VectorField& v, double factor) {
  VectorField out(v.grid());
  for (int i = 0; i < 3; ++i) {
    const ScalarField& vi = v.component(i);
    ScalarField& oi = out.component(i);
    const std::int64_t n = std::int64_t(oi.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) oi.values[k] = -factor * vi.values[k];
  }
  return out;
}

}  // namespace

DiscreteForcing manufacture_discrete(const ManufacturedCase& c, const GridSpec& g) {
  const FlowState s = exact_state(c, g);
  const VectorField zero(g);
  DiscreteForcing f;
  if (c.kind == ProblemKind::NavierStokes) {
    const VectorField r0 = ns_momentum_residual(s, zero, c.params);
    f.body = negate_scaled(r0, c.params.nu);
    f.pressure_source = ns_pressure_source_term(s);
  } else {
    const VectorField r0 = mp_momentum_residual(s, zero, c.params);
    f.body = negate_scaled(r0, c.params.nu + c.params.nu_r);
    const VectorField rw0 = mp_microrotation_residual(s, zero, c.params);
    f.torque = negate_scaled(rw0, c.params.ca + c.params.cd);
    f.pressure_source = mp_pressure_source_term(s, c.params);
  }
  return f;
}

namespace {

Var axis_var(int i) { return Var(i); }

Expr expr_laplacian(const Expr& e) {
  Expr out = differentiate(differentiate(e, Var::X1), Var::X1);
  out = add(out, differentiate(differentiate(e, Var::X2), Var::X2));
  out = add(out, differentiate(differentiate(e, Var::X3), Var::X3));
  return out;
}

Expr expr_convection(const std::array<Expr, 3>& u, const Expr& phi) {
  Expr out = mul(u[0], differentiate(phi, Var::X1));
  out = add(out, mul(u[1], differentiate(phi, Var::X2)));
  out = add(out, mul(u[2], differentiate(phi, Var::X3)));
  return out;
}

std::array<Expr, 3> expr_curl(const std::array<Expr, 3>& v) {
  return {sub(differentiate(v[2], Var::X2), differentiate(v[1], Var::X3)),
          sub(differentiate(v[0], Var::X3), differentiate(v[2], Var::X1)),
          sub(differentiate(v[1], Var::X1), differentiate(v[0], Var::X2))};
}

}  // namespace

SymbolicForcing manufacture_symbolic(const ManufacturedCase& c) {
  c.validate();
  SymbolicForcing f;
  if (c.kind == ProblemKind::NavierStokes) {
    // f = du/dt + (u.grad)u - nu*lap(u) + grad p
    for (int i = 0; i < 3; ++i) {
      Expr e = differentiate(c.exact_u[i], Var::T);
      e = add(e, expr_convection(c.exact_u, c.exact_u[i]));
      e = sub(e, mul(num(c.params.nu), expr_laplacian(c.exact_u[i])));
      e = add(e, differentiate(c.exact_p, axis_var(i)));
      f.body[i] = e;
    }
    return f;
  }
  const auto& w = *c.exact_w;
  const auto curl_w = expr_curl(w);
  const auto curl_u = expr_curl(c.exact_u);
  Expr div_w = add(differentiate(w[0], Var::X1),
                   add(differentiate(w[1], Var::X2), differentiate(w[2], Var::X3)));
  std::array<Expr, 3> torque;
  for (int i = 0; i < 3; ++i) {
    // f1 = du/dt - (nu+nu_r)*lap(u) + (u.grad)u + grad p - 2 nu_r curl(w)
    Expr e = differentiate(c.exact_u[i], Var::T);
    e = sub(e, mul(num(c.params.nu + c.params.nu_r), expr_laplacian(c.exact_u[i])));
    e = add(e, expr_convection(c.exact_u, c.exact_u[i]));
    e = add(e, differentiate(c.exact_p, axis_var(i)));
    e = sub(e, mul(num(2.0 * c.params.nu_r), curl_w[i]));
    f.body[i] = e;
    // f2 = dw/dt - (ca+cd)*lap(w) - (c0+cd-ca)*grad(div w) + (u.grad)w
    //      + 4 nu_r w - 2 nu_r curl(u)
    Expr m = differentiate(w[i], Var::T);
    m = sub(m, mul(num(c.params.ca + c.params.cd), expr_laplacian(w[i])));
    m = sub(m, mul(num(c.params.c0 + c.params.cd - c.params.ca),
                   differentiate(div_w, axis_var(i))));
    m = add(m, expr_convection(c.exact_u, w[i]));
    m = add(m, mul(num(4.0 * c.params.nu_r), w[i]));
    m = sub(m, mul(num(2.0 * c.params.nu_r), curl_u[i]));
    torque[i] = m;
  }
  f.torque = torque;
  return f;
}

ProblemSpec problem_from_case(const ManufacturedCase& c, const GridSpec& g,
                              const SymbolicForcing* forcing) {
  c.validate();
  ProblemSpec prob;
  prob.kind = c.kind;
  prob.params = c.params;
  prob.grid = g;
  for (int i = 0; i < 3; ++i) {
    prob.force[i] = forcing ? forcing->body[i] : num(0.0);
    prob.dirichlet_u[i] = c.exact_u[i];
    prob.initial_u[i] = c.exact_u[i];
  }
  if (c.kind == ProblemKind::Micropolar) {
    std::array<Expr, 3> t, q, w0;
    for (int i = 0; i < 3; ++i) {
      t[i] = (forcing && forcing->torque) ? (*forcing->torque)[i] : num(0.0);
      q[i] = (*c.exact_w)[i];
      w0[i] = (*c.exact_w)[i];
    }
    prob.torque = t;
    prob.dirichlet_w = q;
    prob.initial_w = w0;
  }
  return prob;
}

double ErrorReport::max_linf() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.linf);
  return m;
}

double ErrorReport::max_l2() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.l2);
  return m;
}

ErrorReport error_report(const FlowState& state, const ManufacturedCase& c,
                         const GridSpec& g) {
  const FlowState exact = exact_state(c, g);
  ErrorReport rep;
  const char* unames[3] = {"u1", "u2", "u3"};
  for (int i = 0; i < 3; ++i)
    rep.entries.push_back({unames[i],
                           diff_norm(state.u.component(i), exact.u.component(i), NormKind::L2),
                           diff_norm(state.u.component(i), exact.u.component(i), NormKind::Linf)});
  if (state.w && exact.w) {
    const char* wnames[3] = {"w1", "w2", "w3"};
    for (int i = 0; i < 3; ++i)
      rep.entries.push_back(
          {wnames[i],
           diff_norm(state.w->component(i), exact.w->component(i), NormKind::L2),
           diff_norm(state.w->component(i), exact.w->component(i), NormKind::Linf)});
  }
  const ScalarField pg = project_pressure_gauge(state.p);
  rep.entries.push_back({"p", diff_norm(pg, exact.p, NormKind::L2),
                         diff_norm(pg, exact.p, NormKind::Linf)});
  return rep;
}

std::vector<double> observed_order(const std::vector<double>& ladder_errors) {
  if (ladder_errors.size() < 2)
    throw LadderTooShortError("observed_order: need at least two ladder rungs");
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < ladder_errors.size(); ++i)
    orders.push_back(std::log2(ladder_errors[i] / ladder_errors[i + 1]));
  return orders;
}

}  // namespace vimflow
