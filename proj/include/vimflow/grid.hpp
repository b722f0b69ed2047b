#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vimflow {

// Axis order X1 < X2 < X3 < T fixes the traversal order everywhere.
enum class Axis : int { X1 = 0, X2 = 1, X3 = 2, T = 3 };

inline const char* axis_name(Axis a) {
  switch (a) {
    case Axis::X1: return "x1";
    case Axis::X2: return "x2";
    case Axis::X3: return "x3";
    case Axis::T: return "t";
  }
  return "?";
}

struct GridMismatchError : std::runtime_error {
  explicit GridMismatchError(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteError : std::runtime_error {
  std::size_t node = 0;
  NonFiniteError(const std::string& ctx, std::size_t node_index)
      : std::runtime_error(ctx + ": non-finite value at node " + std::to_string(node_index)),
        node(node_index) {}
};

struct SameAxisError : std::runtime_error {
  explicit SameAxisError(const std::string& what) : std::runtime_error(what) {}
};

struct TemporalAxisError : std::runtime_error {
  explicit TemporalAxisError(const std::string& what) : std::runtime_error(what) {}
};

// Node-centered 4-D grid over (x1,x2,x3,t). An axis with count 1 is
// degenerate: derivatives along it are identically zero.
struct GridSpec {
  std::size_t n1 = 1, n2 = 1, n3 = 1, nt = 1;
  double h1 = 1.0, h2 = 1.0, h3 = 1.0, dt = 1.0;
  std::array<double, 4> origin{0.0, 0.0, 0.0, 0.0};

  std::size_t extent(Axis a) const {
    switch (a) {
      case Axis::X1: return n1;
      case Axis::X2: return n2;
      case Axis::X3: return n3;
      case Axis::T: return nt;
    }
    return 1;
  }

  double spacing(Axis a) const {
    switch (a) {
      case Axis::X1: return h1;
      case Axis::X2: return h2;
      case Axis::X3: return h3;
      case Axis::T: return dt;
    }
    return 1.0;
  }

  std::size_t size() const { return n1 * n2 * n3 * nt; }

  // Row-major in (x1,x2,x3,t): t is the fastest axis.
  std::size_t index(std::size_t i1, std::size_t i2, std::size_t i3, std::size_t it) const {
    return ((i1 * n2 + i2) * n3 + i3) * nt + it;
  }

  std::size_t stride(Axis a) const {
    switch (a) {
      case Axis::X1: return n2 * n3 * nt;
      case Axis::X2: return n3 * nt;
      case Axis::X3: return nt;
      case Axis::T: return 1;
    }
    return 1;
  }

  std::array<std::size_t, 4> coords(std::size_t idx) const {
    std::array<std::size_t, 4> c{};
    c[3] = idx % nt;
    idx /= nt;
    c[2] = idx % n3;
    idx /= n3;
    c[1] = idx % n2;
    c[0] = idx / n2;
    return c;
  }

  std::array<double, 4> point(std::size_t idx) const {
    auto c = coords(idx);
    return {origin[0] + h1 * double(c[0]), origin[1] + h2 * double(c[1]),
            origin[2] + h3 * double(c[2]), origin[3] + dt * double(c[3])};
  }

  bool operator==(const GridSpec& o) const = default;

  void validate() const {
    if (n1 < 1 || n2 < 1 || n3 < 1 || nt < 1)
      throw std::invalid_argument("GridSpec: all node counts must be >= 1");
    auto ok = [](double h) { return h > 0.0 && std::isfinite(h); };
    if (!ok(h1) || !ok(h2) || !ok(h3) || !ok(dt))
      throw std::invalid_argument("GridSpec: all spacings must be positive and finite");
  }
};

struct ScalarField {
  GridSpec grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double fill = 0.0)
      : grid(g), values(g.size(), fill) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }

  bool compatible(const ScalarField& o) const { return grid == o.grid; }
};

inline void require_compatible(const ScalarField& a, const ScalarField& b, const char* ctx) {
  if (!a.compatible(b)) throw GridMismatchError(std::string(ctx) + ": incompatible grids");
}

struct VectorField {
  ScalarField c1, c2, c3;

  VectorField() = default;
  explicit VectorField(const GridSpec& g, double fill = 0.0)
      : c1(g, fill), c2(g, fill), c3(g, fill) {}

  const GridSpec& grid() const { return c1.grid; }

  ScalarField& component(int i) { return i == 0 ? c1 : (i == 1 ? c2 : c3); }
  const ScalarField& component(int i) const { return i == 0 ? c1 : (i == 1 ? c2 : c3); }

  bool compatible(const VectorField& o) const {
    return c1.compatible(o.c1) && c2.compatible(o.c2) && c3.compatible(o.c3);
  }

  void validate() const {
    if (!c1.compatible(c2) || !c1.compatible(c3))
      throw GridMismatchError("VectorField: components live on different grids");
  }
};

// Scans for the first NaN/Inf in traversal order; throws NonFiniteError.
void ensure_finite(const ScalarField& f, const char* ctx);
void ensure_finite(const VectorField& v, const char* ctx);

}  // namespace vimflow
