#include "vimflow/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace vimflow {

namespace {

// One 1-D pass over every grid line parallel to axis `a`. The callback gets
// the base offset of the line; nodes sit at base + j*stride, j in [0,n).
template <class LineOp>
void for_each_line(const GridSpec& g, Axis a, LineOp&& op) {
  const std::size_t n = g.extent(a);
  const std::size_t s = g.stride(a);
  const std::size_t total = g.size();
  const std::size_t block = n * s;             // contiguous chunk holding s lines
  const std::size_t nouter = total / block;
  const std::int64_t nlines = std::int64_t(nouter * s);
#pragma omp parallel for schedule(static)
  for (std::int64_t l = 0; l < nlines; ++l) {
    const std::size_t outer = std::size_t(l) / s;
    const std::size_t inner = std::size_t(l) % s;
    op(outer * block + inner, s, n);
  }
}

void ddx_line(const double* f, double* out, std::size_t base, std::size_t s, std::size_t n,
              double h) {
  if (n == 1) {
    out[base] = 0.0;
    return;
  }
  if (n == 2) {
    const double d = (f[base + s] - f[base]) / h;
    out[base] = d;
    out[base + s] = d;
    return;
  }
  const double inv2h = 1.0 / (2.0 * h);
  out[base] = (-3.0 * f[base] + 4.0 * f[base + s] - f[base + 2 * s]) * inv2h;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const std::size_t k = base + j * s;
    out[k] = (f[k + s] - f[k - s]) * inv2h;
  }
  const std::size_t e = base + (n - 1) * s;
  out[e] = (3.0 * f[e] - 4.0 * f[e - s] + f[e - 2 * s]) * inv2h;
}

void d2_line(const double* f, double* out, std::size_t base, std::size_t s, std::size_t n,
             double h) {
  if (n < 3) {
    for (std::size_t j = 0; j < n; ++j) out[base + j * s] = 0.0;
    return;
  }
  const double invh2 = 1.0 / (h * h);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const std::size_t k = base + j * s;
    out[k] = (f[k + s] - 2.0 * f[k] + f[k - s]) * invh2;
  }
  const std::size_t e = base + (n - 1) * s;
  if (n == 3) {
    out[base] = (f[base] - 2.0 * f[base + s] + f[base + 2 * s]) * invh2;
    out[e] = out[base];
  } else {
    out[base] =
        (2.0 * f[base] - 5.0 * f[base + s] + 4.0 * f[base + 2 * s] - f[base + 3 * s]) * invh2;
    out[e] = (2.0 * f[e] - 5.0 * f[e - s] + 4.0 * f[e - 2 * s] - f[e - 3 * s]) * invh2;
  }
}

void trapezoid_line(const double* f, double* out, std::size_t base, std::size_t s,
                    std::size_t n, double h) {
  out[base] = 0.0;
  double acc = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const std::size_t k = base + j * s;
    acc += 0.5 * h * (f[k - s] + f[k]);
    out[k] = acc;
  }
}

constexpr std::size_t kReduceBlock = 4096;

}  // namespace

ScalarField ddx(const ScalarField& f, Axis a) {
  ScalarField out(f.grid);
  const double h = f.grid.spacing(a);
  for_each_line(f.grid, a, [&](std::size_t base, std::size_t s, std::size_t n) {
    ddx_line(f.values.data(), out.values.data(), base, s, n, h);
  });
  return out;
}

ScalarField d2(const ScalarField& f, Axis a) {
  ScalarField out(f.grid);
  const double h = f.grid.spacing(a);
  for_each_line(f.grid, a, [&](std::size_t base, std::size_t s, std::size_t n) {
    d2_line(f.values.data(), out.values.data(), base, s, n, h);
  });
  return out;
}

ScalarField d_mixed(const ScalarField& f, Axis a, Axis b) {
  if (a == b) throw SameAxisError("d_mixed: axes must differ, use d2");
  return ddx(ddx(f, a), b);
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField out = d2(f, Axis::X1);
  const ScalarField d22 = d2(f, Axis::X2);
  const ScalarField d33 = d2(f, Axis::X3);
  const std::int64_t n = std::int64_t(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out.values[i] = out.values[i] + d22.values[i] + d33.values[i];
  return out;
}

ScalarField ddt(const ScalarField& f) { return ddx(f, Axis::T); }

VectorField gradient(const ScalarField& p) {
  VectorField g;
  g.c1 = ddx(p, Axis::X1);
  g.c2 = ddx(p, Axis::X2);
  g.c3 = ddx(p, Axis::X3);
  return g;
}

ScalarField divergence(const VectorField& v) {
  v.validate();
  ScalarField out = ddx(v.c1, Axis::X1);
  const ScalarField d2f = ddx(v.c2, Axis::X2);
  const ScalarField d3f = ddx(v.c3, Axis::X3);
  const std::int64_t n = std::int64_t(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out.values[i] = out.values[i] + d2f.values[i] + d3f.values[i];
  return out;
}

VectorField curl(const VectorField& v) {
  v.validate();
  const ScalarField d2c3 = ddx(v.c3, Axis::X2);
  const ScalarField d3c2 = ddx(v.c2, Axis::X3);
  const ScalarField d3c1 = ddx(v.c1, Axis::X3);
  const ScalarField d1c3 = ddx(v.c3, Axis::X1);
  const ScalarField d1c2 = ddx(v.c2, Axis::X1);
  const ScalarField d2c1 = ddx(v.c1, Axis::X2);
  VectorField out(v.grid());
  const std::int64_t n = std::int64_t(out.c1.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out.c1.values[i] = d2c3.values[i] - d3c2.values[i];
    out.c2.values[i] = d3c1.values[i] - d1c3.values[i];
    out.c3.values[i] = d1c2.values[i] - d2c1.values[i];
  }
  return out;
}

ScalarField prefix_integral(const ScalarField& f, Axis a) {
  if (a == Axis::T)
    throw TemporalAxisError("prefix_integral: integration axis must be spatial");
  ScalarField out(f.grid);
  const double h = f.grid.spacing(a);
  for_each_line(f.grid, a, [&](std::size_t base, std::size_t s, std::size_t n) {
    trapezoid_line(f.values.data(), out.values.data(), base, s, n, h);
  });
  return out;
}

namespace {

double axis_weight(const GridSpec& g, Axis a, std::size_t i) {
  const std::size_t n = g.extent(a);
  if (n == 1) return 1.0;
  const double h = g.spacing(a);
  return (i == 0 || i == n - 1) ? 0.5 * h : h;
}

double node_weight(const GridSpec& g, std::size_t idx) {
  const auto c = g.coords(idx);
  return axis_weight(g, Axis::X1, c[0]) * axis_weight(g, Axis::X2, c[1]) *
         axis_weight(g, Axis::X3, c[2]) * axis_weight(g, Axis::T, c[3]);
}

}  // namespace

double norm_l2(const ScalarField& f) {
  const std::size_t n = f.size();
  const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < std::int64_t(nblocks); ++b) {
    const std::size_t lo = std::size_t(b) * kReduceBlock;
    const std::size_t hi = std::min(n, lo + kReduceBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      acc += node_weight(f.grid, i) * f.values[i] * f.values[i];
    partial[std::size_t(b)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;  // fixed order
  return std::sqrt(total);
}

double norm_linf(const ScalarField& f) {
  const std::size_t n = f.size();
  const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(nblocks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < std::int64_t(nblocks); ++b) {
    const std::size_t lo = std::size_t(b) * kReduceBlock;
    const std::size_t hi = std::min(n, lo + kReduceBlock);
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(f.values[i]));
    partial[std::size_t(b)] = m;
  }
  double m = 0.0;
  for (double p : partial) m = std::max(m, p);
  return m;
}

double norm(const ScalarField& f, NormKind kind) {
  return kind == NormKind::L2 ? norm_l2(f) : norm_linf(f);
}

double diff_norm(const ScalarField& a, const ScalarField& b, NormKind kind) {
  require_compatible(a, b, "diff_norm");
  ScalarField d(a.grid);
  const std::int64_t n = std::int64_t(a.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) d.values[i] = a.values[i] - b.values[i];
  return norm(d, kind);
}

double diff_norm(const VectorField& a, const VectorField& b, NormKind kind) {
  const double d1 = diff_norm(a.c1, b.c1, kind);
  const double d2v = diff_norm(a.c2, b.c2, kind);
  const double d3 = diff_norm(a.c3, b.c3, kind);
  if (kind == NormKind::Linf) return std::max({d1, d2v, d3});
  return std::sqrt(d1 * d1 + d2v * d2v + d3 * d3);
}

void ensure_finite(const ScalarField& f, const char* ctx) {
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!std::isfinite(f.values[i])) throw NonFiniteError(ctx, i);
}

void ensure_finite(const VectorField& v, const char* ctx) {
  ensure_finite(v.c1, ctx);
  ensure_finite(v.c2, ctx);
  ensure_finite(v.c3, ctx);
}

namespace ref {

ScalarField ddx(const ScalarField& f, Axis a) {
  ScalarField out(f.grid);
  const GridSpec& g = f.grid;
  const double h = g.spacing(a);
  const std::size_t n = g.extent(a);
  const std::size_t s = g.stride(a);
  const std::size_t block = n * s;
  for (std::size_t outer = 0; outer < g.size() / block; ++outer)
    for (std::size_t inner = 0; inner < s; ++inner)
      ddx_line(f.values.data(), out.values.data(), outer * block + inner, s, n, h);
  return out;
}

ScalarField d2(const ScalarField& f, Axis a) {
  ScalarField out(f.grid);
  const GridSpec& g = f.grid;
  const double h = g.spacing(a);
  const std::size_t n = g.extent(a);
  const std::size_t s = g.stride(a);
  const std::size_t block = n * s;
  for (std::size_t outer = 0; outer < g.size() / block; ++outer)
    for (std::size_t inner = 0; inner < s; ++inner)
      d2_line(f.values.data(), out.values.data(), outer * block + inner, s, n, h);
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField out = ref::d2(f, Axis::X1);
  const ScalarField d22 = ref::d2(f, Axis::X2);
  const ScalarField d33 = ref::d2(f, Axis::X3);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.values[i] = out.values[i] + d22.values[i] + d33.values[i];
  return out;
}

ScalarField prefix_integral(const ScalarField& f, Axis a) {
  if (a == Axis::T)
    throw TemporalAxisError("prefix_integral: integration axis must be spatial");
  ScalarField out(f.grid);
  const GridSpec& g = f.grid;
  const double h = g.spacing(a);
  const std::size_t n = g.extent(a);
  const std::size_t s = g.stride(a);
  const std::size_t block = n * s;
  for (std::size_t outer = 0; outer < g.size() / block; ++outer)
    for (std::size_t inner = 0; inner < s; ++inner)
      trapezoid_line(f.values.data(), out.values.data(), outer * block + inner, s, n, h);
  return out;
}

double norm_l2(const ScalarField& f) {
  const std::size_t n = f.size();
  double total = 0.0;
  for (std::size_t lo = 0; lo < n; lo += kReduceBlock) {
    const std::size_t hi = std::min(n, lo + kReduceBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i)
      acc += node_weight(f.grid, i) * f.values[i] * f.values[i];
    total += acc;
  }
  return std::sqrt(total);
}

double norm_linf(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace ref

}  // namespace vimflow
