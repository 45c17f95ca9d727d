#pragma once

// Cell-centered uniform grids, grid-bound vector fields, midpoint quadrature
// and the finite-difference operators shared by every other module.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace nlnoether {

inline constexpr int kMaxDim = 3;

/// Spatial point; components beyond the grid dimension are zero.
using Point = std::array<double, kMaxDim>;

inline double distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (int k = 0; k < kMaxDim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

enum class FaceLabel { x_min, x_max, y_min, y_max, z_min, z_max };

inline constexpr std::array<FaceLabel, 6> kAllFaces = {FaceLabel::x_min, FaceLabel::x_max,
                                                       FaceLabel::y_min, FaceLabel::y_max,
                                                       FaceLabel::z_min, FaceLabel::z_max};

inline std::string_view to_string(FaceLabel f) {
  switch (f) {
    case FaceLabel::x_min: return "x-min";
    case FaceLabel::x_max: return "x-max";
    case FaceLabel::y_min: return "y-min";
    case FaceLabel::y_max: return "y-max";
    case FaceLabel::z_min: return "z-min";
    case FaceLabel::z_max: return "z-max";
  }
  return "?";
}

inline std::optional<FaceLabel> parse_face_label(std::string_view s) {
  for (FaceLabel f : kAllFaces)
    if (to_string(f) == s) return f;
  return std::nullopt;
}

inline constexpr int face_axis(FaceLabel f) { return static_cast<int>(f) / 2; }
inline constexpr int face_sign(FaceLabel f) { return static_cast<int>(f) % 2 == 0 ? -1 : +1; }
inline constexpr FaceLabel make_face(int axis, int sign) {
  return static_cast<FaceLabel>(2 * axis + (sign > 0 ? 1 : 0));
}

/// One face of a boundary cell. `inner` is the neighbouring cell one step
/// inward along the face normal.
struct BoundaryFace {
  std::size_t cell = 0;
  std::size_t inner = 0;
  FaceLabel label = FaceLabel::x_min;
  int axis = 0;
  int sign = -1;
  Point normal{};
  Point center{};
  double area = 0.0;
  bool dirichlet = false;
};

class DomainGrid;
DomainGrid build_grid(int dim, std::span<const int> counts, std::span<const double> lengths,
                      const std::set<FaceLabel>& dirichlet_faces = {});

/// Discretized body: cell centers at (i + 1/2)·h per axis, x-fastest ordering.
class DomainGrid {
 public:
  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::uint64_t id() const noexcept { return id_; }

  const std::array<int, kMaxDim>& counts() const noexcept { return counts_; }
  const std::array<double, kMaxDim>& lengths() const noexcept { return lengths_; }
  const std::array<double, kMaxDim>& spacing() const noexcept { return spacing_; }
  const std::vector<Point>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<BoundaryFace>& boundary_faces() const noexcept { return faces_; }
  const std::vector<bool>& dirichlet_mask() const noexcept { return dirichlet_; }
  const std::set<FaceLabel>& dirichlet_faces() const noexcept { return dirichlet_faces_; }

  const Point& point(std::size_t p) const { return points_[p]; }
  double weight(std::size_t p) const { return weights_[p]; }

  double volume() const noexcept {
    double v = 1.0;
    for (int k = 0; k < dim_; ++k) v *= lengths_[k];
    return v;
  }

  std::size_t stride(int axis) const noexcept {
    std::size_t s = 1;
    for (int k = 0; k < axis; ++k) s *= static_cast<std::size_t>(counts_[k]);
    return s;
  }

  std::size_t index(const std::array<int, kMaxDim>& ijk) const noexcept {
    std::size_t p = 0;
    for (int k = dim_ - 1; k >= 0; --k) p = p * static_cast<std::size_t>(counts_[k]) + ijk[k];
    return p;
  }

  std::array<int, kMaxDim> multi_index(std::size_t p) const noexcept {
    std::array<int, kMaxDim> ijk{};
    for (int k = 0; k < dim_; ++k) {
      ijk[k] = static_cast<int>(p % static_cast<std::size_t>(counts_[k]));
      p /= static_cast<std::size_t>(counts_[k]);
    }
    return ijk;
  }

 private:
  friend DomainGrid build_grid(int, std::span<const int>, std::span<const double>,
                               const std::set<FaceLabel>&);

  static std::uint64_t next_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
  }

  int dim_ = 1;
  std::uint64_t id_ = 0;
  std::array<int, kMaxDim> counts_{1, 1, 1};
  std::array<double, kMaxDim> lengths_{1.0, 1.0, 1.0};
  std::array<double, kMaxDim> spacing_{1.0, 1.0, 1.0};
  std::vector<Point> points_;
  std::vector<double> weights_;
  std::vector<BoundaryFace> faces_;
  std::vector<bool> dirichlet_;
  std::set<FaceLabel> dirichlet_faces_;
};

inline DomainGrid build_grid(int dim, std::span<const int> counts, std::span<const double> lengths,
                             const std::set<FaceLabel>& dirichlet_faces) {
  if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("build_grid: dim must be 1, 2 or 3");
  if (counts.size() != static_cast<std::size_t>(dim) ||
      lengths.size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("build_grid: counts and lengths need one entry per axis");
  DomainGrid g;
  g.dim_ = dim;
  g.id_ = DomainGrid::next_id();
  for (int k = 0; k < dim; ++k) {
    if (counts[k] < 2) throw std::invalid_argument("build_grid: counts must be >= 2 per axis");
    if (!(lengths[k] > 0.0) || !std::isfinite(lengths[k]))
      throw std::invalid_argument("build_grid: lengths must be positive");
    g.counts_[k] = counts[k];
    g.lengths_[k] = lengths[k];
    g.spacing_[k] = lengths[k] / counts[k];
  }
  for (FaceLabel f : dirichlet_faces)
    if (face_axis(f) >= dim)
      throw std::invalid_argument("build_grid: Dirichlet face " + std::string(to_string(f)) +
                                  " does not exist in dimension " + std::to_string(dim));
  g.dirichlet_faces_ = dirichlet_faces;

  std::size_t n = 1;
  double cell_volume = 1.0;
  for (int k = 0; k < dim; ++k) {
    n *= static_cast<std::size_t>(counts[k]);
    cell_volume *= g.spacing_[k];
  }
  g.points_.resize(n);
  g.weights_.assign(n, cell_volume);
  g.dirichlet_.assign(n, false);
  for (std::size_t p = 0; p < n; ++p) {
    const auto ijk = g.multi_index(p);
    Point x{};
    for (int k = 0; k < dim; ++k) x[k] = (ijk[k] + 0.5) * g.spacing_[k];
    g.points_[p] = x;
  }

  for (int axis = 0; axis < dim; ++axis) {
    double area = 1.0;
    for (int k = 0; k < dim; ++k)
      if (k != axis) area *= g.spacing_[k];
    for (int sign : {-1, +1}) {
      const FaceLabel label = make_face(axis, sign);
      const bool fixed = dirichlet_faces.count(label) > 0;
      const int edge = sign < 0 ? 0 : counts[axis] - 1;
      for (std::size_t p = 0; p < n; ++p) {
        auto ijk = g.multi_index(p);
        if (ijk[axis] != edge) continue;
        BoundaryFace f;
        f.cell = p;
        ijk[axis] -= sign;
        f.inner = g.index(ijk);
        f.label = label;
        f.axis = axis;
        f.sign = sign;
        f.normal[axis] = sign;
        f.center = g.points_[p];
        f.center[axis] = sign < 0 ? 0.0 : lengths[axis];
        f.area = area;
        f.dirichlet = fixed;
        g.faces_.push_back(f);
        if (fixed) g.dirichlet_[p] = true;
      }
    }
  }
  return g;
}

inline DomainGrid build_grid(int dim, std::initializer_list<int> counts,
                             std::initializer_list<double> lengths,
                             const std::set<FaceLabel>& dirichlet_faces = {}) {
  return build_grid(dim, std::span<const int>(counts.begin(), counts.size()),
                    std::span<const double>(lengths.begin(), lengths.size()), dirichlet_faces);
}

/// d real components per grid point, stored point-major.
class Field {
 public:
  Field() = default;
  Field(const DomainGrid& grid, int components, double fill = 0.0)
      : components_(components), points_(grid.size()), grid_id_(grid.id()) {
    if (components < 1) throw std::invalid_argument("Field: components must be >= 1");
    values_.assign(points_ * static_cast<std::size_t>(components), fill);
  }

  template <class F>
  static Field from_function(const DomainGrid& grid, int components, F&& fn) {
    Field f(grid, components);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      if constexpr (std::is_invocable_r_v<double, F, const Point&>) {
        f(p, 0) = fn(grid.point(p));
        for (int c = 1; c < components; ++c) f(p, c) = f(p, 0);
      } else {
        const auto val = fn(grid.point(p));
        for (int c = 0; c < components; ++c) f(p, c) = val[c];
      }
    }
    return f;
  }

  int components() const noexcept { return components_; }
  std::size_t points() const noexcept { return points_; }
  std::uint64_t grid_id() const noexcept { return grid_id_; }
  bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t p, int c) { return values_[p * components_ + c]; }
  const double& operator()(std::size_t p, int c) const { return values_[p * components_ + c]; }

  std::span<double> at(std::size_t p) {
    return {values_.data() + p * components_, static_cast<std::size_t>(components_)};
  }
  std::span<const double> at(std::size_t p) const {
    return {values_.data() + p * components_, static_cast<std::size_t>(components_)};
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool lives_on(const DomainGrid& grid) const noexcept {
    return grid_id_ == grid.id() && points_ == grid.size();
  }

  bool compatible(const Field& o) const noexcept {
    return grid_id_ == o.grid_id_ && components_ == o.components_ && points_ == o.points_;
  }

  bool all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
  }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double x : values_) m = std::max(m, std::abs(x));
    return m;
  }

  Field& operator+=(const Field& o) {
    require_compatible(o, "+=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_compatible(o, "-=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  Field& operator*=(double a) {
    for (double& x : values_) x *= a;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }

  /// Plain (unweighted) Euclidean inner product of the value arrays.
  double dot(const Field& o) const {
    require_compatible(o, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) s += values_[i] * o.values_[i];
    return s;
  }

 private:
  void require_compatible(const Field& o, const char* op) const {
    if (!compatible(o))
      throw std::invalid_argument(std::string("Field ") + op +
                                  ": operands differ in grid or component count");
  }

  int components_ = 0;
  std::size_t points_ = 0;
  std::uint64_t grid_id_ = 0;
  std::vector<double> values_;
};

inline void require_on_grid(const Field& f, const DomainGrid& grid, const char* op) {
  if (!f.lives_on(grid))
    throw std::invalid_argument(std::string(op) + ": field does not live on this grid");
}

/// The coordinate field x (dim components).
inline Field coordinates(const DomainGrid& grid) {
  Field x(grid, grid.dim());
  for (std::size_t p = 0; p < grid.size(); ++p)
    for (int k = 0; k < grid.dim(); ++k) x(p, k) = grid.point(p)[k];
  return x;
}

/// Midpoint quadrature, per component, index-ordered.
inline std::vector<double> integrate(const Field& f, const DomainGrid& grid) {
  require_on_grid(f, grid, "integrate");
  std::vector<double> acc(static_cast<std::size_t>(f.components()), 0.0);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double w = grid.weight(p);
    for (int c = 0; c < f.components(); ++c) acc[c] += w * f(p, c);
  }
  return acc;
}

/// ∫|f| with |·| the Euclidean norm over components.
inline double integrate_norm(const Field& f, const DomainGrid& grid) {
  require_on_grid(f, grid, "integrate_norm");
  double acc = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    double s = 0.0;
    for (int c = 0; c < f.components(); ++c) s += f(p, c) * f(p, c);
    acc += grid.weight(p) * std::sqrt(s);
  }
  return acc;
}

/// Face trace of a cell-centered field: the cell value on Dirichlet faces,
/// second-order linear extrapolation from the two innermost cells elsewhere.
inline std::vector<double> face_value(const Field& f, const BoundaryFace& face) {
  std::vector<double> out(static_cast<std::size_t>(f.components()));
  for (int c = 0; c < f.components(); ++c) {
    const double a = f(face.cell, c);
    out[c] = face.dirichlet ? a : a + 0.5 * (a - f(face.inner, c));
  }
  return out;
}

/// Σ_faces area · g(face). `g` returns a real or an indexable vector of reals.
template <class G>
std::vector<double> boundary_integrate(const DomainGrid& grid, G&& g) {
  std::vector<double> acc;
  for (const BoundaryFace& face : grid.boundary_faces()) {
    const auto val = g(face);
    if constexpr (std::is_arithmetic_v<std::decay_t<decltype(val)>>) {
      if (acc.empty()) acc.assign(1, 0.0);
      acc[0] += face.area * val;
    } else {
      if (acc.empty()) acc.assign(val.size(), 0.0);
      if (val.size() != acc.size())
        throw std::invalid_argument("boundary_integrate: integrand size changed between faces");
      for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += face.area * val[c];
    }
  }
  return acc;
}

namespace detail {

// Second-order derivative of component `c` along `axis` at point p.
inline double axis_derivative(const Field& f, const DomainGrid& grid, std::size_t p, int c,
                              int axis, int i, std::size_t s) {
  const int n = grid.counts()[axis];
  const double inv = 0.5 / grid.spacing()[axis];
  if (i > 0 && i < n - 1) return (f(p + s, c) - f(p - s, c)) * inv;
  if (i == 0) {
    const double f0 = f(p, c);
    return (4.0 * (f(p + s, c) - f0) - (f(p + 2 * s, c) - f0)) * inv;
  }
  const double fn = f(p, c);
  return -(4.0 * (f(p - s, c) - fn) - (f(p - 2 * s, c) - fn)) * inv;
}

inline void require_stencil(const DomainGrid& grid, const char* op) {
  for (int k = 0; k < grid.dim(); ++k)
    if (grid.counts()[k] < 3)
      throw std::invalid_argument(std::string(op) +
                                  ": need at least 3 points along every differentiated axis");
}

}  // namespace detail

/// ∂f_c/∂x_k in component c·dim + k. Central in the interior, one-sided
/// second order on boundary cells.
inline Field gradient(const Field& f, const DomainGrid& grid) {
  require_on_grid(f, grid, "gradient");
  detail::require_stencil(grid, "gradient");
  const int dim = grid.dim();
  const int d = f.components();
  Field g(grid, d * dim);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto ijk = grid.multi_index(p);
    for (int k = 0; k < dim; ++k) {
      const std::size_t s = grid.stride(k);
      for (int c = 0; c < d; ++c) g(p, c * dim + k) = detail::axis_derivative(f, grid, p, c, k, ijk[k], s);
    }
  }
  return g;
}

/// Σ_k ∂T_{c,k}/∂x_k for a tensor field stored as in `gradient`.
inline Field divergence(const Field& t, const DomainGrid& grid) {
  require_on_grid(t, grid, "divergence");
  detail::require_stencil(grid, "divergence");
  const int dim = grid.dim();
  if (t.components() % dim != 0)
    throw std::invalid_argument("divergence: component count must be a multiple of dim");
  const int d = t.components() / dim;
  Field out(grid, d);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const auto ijk = grid.multi_index(p);
    for (int c = 0; c < d; ++c) {
      double acc = 0.0;
      for (int k = 0; k < dim; ++k)
        acc += detail::axis_derivative(t, grid, p, c * dim + k, k, ijk[k], grid.stride(k));
      out(p, c) = acc;
    }
  }
  return out;
}

}  // namespace nlnoether
