#pragma once

#include "vimflow/grid.hpp"

namespace vimflow {

enum class NormKind { L2, Linf };

// First derivative along an axis. Second-order central differences at
// interior nodes, second-order one-sided 3-point closures at the ends.
// Degenerate axis -> zero field; a 2-node axis falls back to the two-point
// difference.
ScalarField ddx(const ScalarField& f, Axis a);

// Second derivative: 3-point central stencil, one-sided 4-point at the
// boundaries (3-point when the axis has exactly 3 nodes). Exact on
// quadratics either way.
ScalarField d2(const ScalarField& f, Axis a);

// Mixed second derivative ddx(ddx(f,a),b). Throws SameAxisError if a == b.
ScalarField d_mixed(const ScalarField& f, Axis a, Axis b);

// Spatial Laplacian d2(f,X1)+d2(f,X2)+d2(f,X3); never includes T.
ScalarField laplacian(const ScalarField& f);

ScalarField ddt(const ScalarField& f);

VectorField gradient(const ScalarField& p);
ScalarField divergence(const VectorField& v);
VectorField curl(const VectorField& v);

// Cumulative trapezoidal integral along a spatial axis, from the lower
// domain boundary to each node. Throws TemporalAxisError for a == T.
ScalarField prefix_integral(const ScalarField& f, Axis a);

// Trapezoid-weighted discrete L2 norm: sqrt(sum w_i f_i^2) with per-axis
// weights (h/2 at the ends, h inside, 1 on degenerate axes). Reduction uses
// fixed-size blocks so the result is bit-reproducible for any thread count.
double norm_l2(const ScalarField& f);
double norm_linf(const ScalarField& f);
double norm(const ScalarField& f, NormKind kind);

double diff_norm(const ScalarField& a, const ScalarField& b, NormKind kind);
double diff_norm(const VectorField& a, const VectorField& b, NormKind kind);

// Serial reference kernels, kept for testing and benchmarking against the
// OpenMP implementations above. Results must match bit-for-bit.
namespace ref {
ScalarField ddx(const ScalarField& f, Axis a);
ScalarField d2(const ScalarField& f, Axis a);
ScalarField laplacian(const ScalarField& f);
ScalarField prefix_integral(const ScalarField& f, Axis a);
double norm_l2(const ScalarField& f);
double norm_linf(const ScalarField& f);
}  // namespace ref

}  // namespace vimflow
