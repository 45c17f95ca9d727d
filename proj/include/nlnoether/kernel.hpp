#pragma once

// Nonlocal kernel families h(x, y, s) with s = |r| the magnitude of the
// reference-field difference, their s-derivatives and the derived kernels
// g = h + s h' and kappa = h + s h' / 2.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mesh.hpp"

namespace nlnoether {

enum class KernelFamily { constant, exponential, exponential_modulated, gaussian, custom };

inline std::string_view to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::constant: return "constant";
    case KernelFamily::exponential: return "exponential";
    case KernelFamily::exponential_modulated: return "exponential_modulated";
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::custom: return "custom";
  }
  return "?";
}

/// Built-in families only; "custom" has no textual form.
inline std::optional<KernelFamily> parse_kernel_family(std::string_view s) {
  for (KernelFamily f : {KernelFamily::constant, KernelFamily::exponential,
                         KernelFamily::exponential_modulated, KernelFamily::gaussian})
    if (to_string(f) == s) return f;
  return std::nullopt;
}

using KernelFn = std::function<double(const Point& x, const Point& y, double s)>;

struct KernelSpec {
  KernelFamily family = KernelFamily::exponential;
  double amplitude = 1.0;
  double horizon = 1.0;     // may be +inf: exp(-d/inf) = 1
  double modulation = 0.0;  // exponential_modulated only
  bool central = false;

  // family == custom. custom_dh_ds may be empty, meaning h does not depend on s.
  KernelFn custom_h;
  KernelFn custom_dh_ds;

  static KernelSpec constant(double A) {
    KernelSpec k;
    k.family = KernelFamily::constant;
    k.amplitude = A;
    return k;
  }
  static KernelSpec exponential(double A, double ell) {
    KernelSpec k;
    k.family = KernelFamily::exponential;
    k.amplitude = A;
    k.horizon = ell;
    return k;
  }
  static KernelSpec exponential_modulated(double A, double ell, double beta) {
    KernelSpec k;
    k.family = KernelFamily::exponential_modulated;
    k.amplitude = A;
    k.horizon = ell;
    k.modulation = beta;
    return k;
  }
  static KernelSpec gaussian(double A, double ell) {
    KernelSpec k;
    k.family = KernelFamily::gaussian;
    k.amplitude = A;
    k.horizon = ell;
    return k;
  }
  static KernelSpec custom(KernelFn h, KernelFn dh_ds = {}) {
    KernelSpec k;
    k.family = KernelFamily::custom;
    k.custom_h = std::move(h);
    k.custom_dh_ds = std::move(dh_ds);
    return k;
  }

  /// True when h, g and kappa coincide for every s.
  bool s_independent() const noexcept {
    switch (family) {
      case KernelFamily::exponential_modulated: return modulation == 0.0;
      case KernelFamily::custom: return !custom_dh_ds;
      default: return true;
    }
  }
};

/// Throws std::invalid_argument on a malformed kernel.
inline void validate(const KernelSpec& k) {
  if (k.family == KernelFamily::custom) {
    if (!k.custom_h) throw std::invalid_argument("kernel: custom family needs an h callback");
    return;
  }
  if (!(k.amplitude >= 0.0) || !std::isfinite(k.amplitude))
    throw std::invalid_argument("kernel: amplitude must be finite and >= 0");
  if (k.family != KernelFamily::constant && !(k.horizon > 0.0))
    throw std::invalid_argument("kernel: horizon must be > 0");
  if (k.family == KernelFamily::exponential_modulated &&
      (!(k.modulation >= 0.0) || !std::isfinite(k.modulation)))
    throw std::invalid_argument("kernel: modulation must be finite and >= 0");
}

namespace detail {

inline void require_nonnegative_s(double s) {
  if (!(s >= 0.0)) throw std::invalid_argument("kernel: s must be >= 0");
}

// The s-independent factor of the exponential families.
inline double exp_attenuation(const KernelSpec& k, const Point& x, const Point& y) {
  return std::exp(-distance(x, y) / k.horizon);
}

}  // namespace detail

inline double eval_h(const KernelSpec& k, const Point& x, const Point& y, double s) {
  detail::require_nonnegative_s(s);
  switch (k.family) {
    case KernelFamily::constant: return k.amplitude;
    case KernelFamily::exponential: return k.amplitude * detail::exp_attenuation(k, x, y);
    case KernelFamily::exponential_modulated:
      return k.amplitude * detail::exp_attenuation(k, x, y) * (1.0 + k.modulation * s * s);
    case KernelFamily::gaussian: {
      const double d = distance(x, y) / k.horizon;
      return k.amplitude * std::exp(-d * d);
    }
    case KernelFamily::custom: return k.custom_h(x, y, s);
  }
  return 0.0;
}

inline double eval_dh_ds(const KernelSpec& k, const Point& x, const Point& y, double s) {
  detail::require_nonnegative_s(s);
  switch (k.family) {
    case KernelFamily::exponential_modulated:
      return 2.0 * k.amplitude * k.modulation * s * detail::exp_attenuation(k, x, y);
    case KernelFamily::custom: return k.custom_dh_ds ? k.custom_dh_ds(x, y, s) : 0.0;
    default: return 0.0;
  }
}

inline double eval_g(const KernelSpec& k, const Point& x, const Point& y, double s) {
  return eval_h(k, x, y, s) + s * eval_dh_ds(k, x, y, s);
}

inline double eval_kappa(const KernelSpec& k, const Point& x, const Point& y, double s) {
  return eval_h(k, x, y, s) + 0.5 * s * eval_dh_ds(k, x, y, s);
}

/// Which kernel a nonlocal operator weights with.
enum class Weight { h, g, kappa };

inline double eval_weight(const KernelSpec& k, Weight w, const Point& x, const Point& y,
                          double s) {
  switch (w) {
    case Weight::h: return eval_h(k, x, y, s);
    case Weight::g: return eval_g(k, x, y, s);
    case Weight::kappa: return eval_kappa(k, x, y, s);
  }
  return 0.0;
}

/// Euclidean norm of probe(p) - probe(q) over components.
inline double pair_separation(const Field& probe, std::size_t p, std::size_t q) {
  double s = 0.0;
  for (int c = 0; c < probe.components(); ++c) {
    const double r = probe(p, c) - probe(q, c);
    s += r * r;
  }
  return std::sqrt(s);
}

/// max over pairs |W(p,q,s_pq) - W(q,p,s_pq)|.
inline double check_symmetry(const KernelSpec& k, const DomainGrid& grid, const Field& probe,
                             Weight w = Weight::h) {
  require_on_grid(probe, grid, "check_symmetry");
  double worst = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p)
    for (std::size_t q = p + 1; q < grid.size(); ++q) {
      const double s = pair_separation(probe, p, q);
      const double a = eval_weight(k, w, grid.point(p), grid.point(q), s);
      const double b = eval_weight(k, w, grid.point(q), grid.point(p), s);
      worst = std::max(worst, std::abs(a - b));
    }
  return worst;
}

}  // namespace nlnoether
