#pragma once

// Dense pairwise nonlocal operators and the identity gaps built on them.

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kernel.hpp"
#include "mesh.hpp"

namespace nlnoether {

/// Grid, kernel and the reference field whose pair differences give s.
/// The grid is held by reference and must outlive the context.
class NonlocalContext {
 public:
  /// Largest grid for which the s-independent kernel factor is tabulated.
  static constexpr std::size_t kTableLimit = 1024;

  /// `cutoff` c drops pairs with |x - y| > c * horizon. This approximation
  /// breaks the exact pairwise cancellation and is off by default.
  NonlocalContext(const DomainGrid& grid, KernelSpec kernel, Field reference,
                  std::optional<double> cutoff = std::nullopt)
      : grid_(&grid), kernel_(std::move(kernel)), reference_(std::move(reference)),
        cutoff_(cutoff) {
    validate(kernel_);
    require_on_grid(reference_, grid, "NonlocalContext");
    if (cutoff_ && !(*cutoff_ > 0.0))
      throw std::invalid_argument("NonlocalContext: cutoff must be > 0");
    build_table();
  }

  /// Same grid, kernel and cached table with a new reference field.
  NonlocalContext rebind(Field reference) const {
    require_on_grid(reference, *grid_, "NonlocalContext::rebind");
    NonlocalContext c(*this);
    c.reference_ = std::move(reference);
    return c;
  }

  const DomainGrid& grid() const noexcept { return *grid_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  const Field& reference() const noexcept { return reference_; }
  std::optional<double> cutoff() const noexcept { return cutoff_; }

  double separation(std::size_t p, std::size_t q) const {
    return pair_separation(reference_, p, q);
  }

  /// W(p, q, s_pq) for the selected kernel.
  double weight(Weight w, std::size_t p, std::size_t q) const {
    if (table_) {
      const double base = (*table_)[p * grid_->size() + q];
      if (kernel_.family != KernelFamily::exponential_modulated || kernel_.modulation == 0.0)
        return base;
      const double s = separation(p, q);
      const double bs2 = kernel_.modulation * s * s;
      switch (w) {
        case Weight::h: return base * (1.0 + bs2);
        case Weight::g: return base * (1.0 + 3.0 * bs2);
        case Weight::kappa: return base * (1.0 + 2.0 * bs2);
      }
    }
    const Point& x = grid_->point(p);
    const Point& y = grid_->point(q);
    if (outside_cutoff(x, y)) return 0.0;
    return eval_weight(kernel_, w, x, y, kernel_.s_independent() ? 0.0 : separation(p, q));
  }

 private:
  bool outside_cutoff(const Point& x, const Point& y) const {
    return cutoff_ && distance(x, y) > *cutoff_ * kernel_.horizon;
  }

  void build_table() {
    const std::size_t n = grid_->size();
    if (kernel_.family == KernelFamily::custom || n > kTableLimit) return;
    auto t = std::make_shared<std::vector<double>>(n * n);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) {
        const Point& x = grid_->point(p);
        const Point& y = grid_->point(q);
        (*t)[p * n + q] = outside_cutoff(x, y) ? 0.0 : eval_h(kernel_, x, y, 0.0);
      }
    table_ = std::move(t);
  }

  const DomainGrid* grid_;
  KernelSpec kernel_;
  Field reference_;
  std::optional<double> cutoff_;
  std::shared_ptr<const std::vector<double>> table_;
};

/// <W|f>(p) = sum_q w_q W(p,q,s_pq) (f(p) - f(q)), per component.
inline Field nonlocal_argument(const NonlocalContext& ctx, const Field& f, Weight w = Weight::h) {
  const DomainGrid& grid = ctx.grid();
  require_on_grid(f, grid, "nonlocal_argument");
  const int d = f.components();
  const std::size_t n = grid.size();
  Field out(grid, d);
  std::vector<double> acc(static_cast<std::size_t>(d));
  for (std::size_t p = 0; p < n; ++p) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t q = 0; q < n; ++q) {
      if (q == p) continue;
      const double wq = grid.weight(q) * ctx.weight(w, p, q);
      for (int c = 0; c < d; ++c) acc[c] += wq * (f(p, c) - f(q, c));
    }
    for (int c = 0; c < d; ++c) out(p, c) = acc[c];
  }
  return out;
}

/// sum_q w_q W(p,q,s_pq) f(q), per component (no difference form).
inline Field weighted_sum(const NonlocalContext& ctx, const Field& f, Weight w) {
  const DomainGrid& grid = ctx.grid();
  require_on_grid(f, grid, "weighted_sum");
  const int d = f.components();
  const std::size_t n = grid.size();
  Field out(grid, d);
  std::vector<double> acc(static_cast<std::size_t>(d));
  for (std::size_t p = 0; p < n; ++p) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t q = 0; q < n; ++q) {
      const double wq = grid.weight(q) * ctx.weight(w, p, q);
      for (int c = 0; c < d; ++c) acc[c] += wq * f(q, c);
    }
    for (int c = 0; c < d; ++c) out(p, c) = acc[c];
  }
  return out;
}

/// Nonlocal traction <g|psi>.
inline Field weighted_traction(const NonlocalContext& ctx, const Field& psi) {
  return nonlocal_argument(ctx, psi, Weight::g);
}

/// max_c |integral of <W|f>_c| / (1 + integral of |f|).
inline double zero_mean_gap(const NonlocalContext& ctx, const Field& f, Weight w = Weight::h) {
  const Field a = nonlocal_argument(ctx, f, w);
  const auto total = integrate(a, ctx.grid());
  double worst = 0.0;
  for (double x : total) worst = std::max(worst, std::abs(x));
  return worst / (1.0 + integrate_norm(f, ctx.grid()));
}

namespace detail {
inline void require_scalar(const Field& f, const char* op) {
  if (f.components() != 1) throw std::invalid_argument(std::string(op) + ": scalar field required");
}
}  // namespace detail

/// |int psi <h|phi> - int phi <h|psi>|.
inline double interchange_gap(const NonlocalContext& ctx, const Field& psi, const Field& phi) {
  detail::require_scalar(psi, "interchange_gap");
  detail::require_scalar(phi, "interchange_gap");
  const DomainGrid& grid = ctx.grid();
  const Field hphi = nonlocal_argument(ctx, phi, Weight::h);
  const Field hpsi = nonlocal_argument(ctx, psi, Weight::h);
  double a = 0.0, b = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    a += grid.weight(p) * psi(p, 0) * hphi(p, 0);
    b += grid.weight(p) * phi(p, 0) * hpsi(p, 0);
  }
  return std::abs(a - b);
}

/// Max-norm of the central difference quotient of <h|phi + e dphi> in e,
/// with s recomputed from the perturbed field, minus <g|dphi> at phi.
inline double variation_identity_gap(const NonlocalContext& ctx, const Field& phi,
                                     const Field& dphi, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("variation_identity_gap: eps must be > 0");
  detail::require_scalar(phi, "variation_identity_gap");
  detail::require_scalar(dphi, "variation_identity_gap");
  const Field plus = phi + eps * dphi;
  const Field minus = phi - eps * dphi;
  const Field hp = nonlocal_argument(ctx.rebind(plus), plus, Weight::h);
  const Field hm = nonlocal_argument(ctx.rebind(minus), minus, Weight::h);
  const Field gd = nonlocal_argument(ctx.rebind(phi), dphi, Weight::g);
  double worst = 0.0;
  for (std::size_t p = 0; p < ctx.grid().size(); ++p)
    worst = std::max(worst, std::abs((hp(p, 0) - hm(p, 0)) / (2.0 * eps) - gd(p, 0)));
  return worst;
}

/// sum_q w_q u(q) . [sum_p w_p h(p,q,s) (u(p) - u(q))], the double integral of
/// h r.u(y). Its exact value is -int u . <h|u>, which is negative for
/// non-constant u.
inline double double_integral_hru(const NonlocalContext& ctx, const Field& u) {
  const DomainGrid& grid = ctx.grid();
  require_on_grid(u, grid, "double_integral_hru");
  const int d = u.components();
  double total = 0.0;
  for (std::size_t q = 0; q < grid.size(); ++q) {
    double inner = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      if (p == q) continue;
      double ru = 0.0;
      for (int c = 0; c < d; ++c) ru += (u(p, c) - u(q, c)) * u(q, c);
      inner += grid.weight(p) * ctx.weight(Weight::h, p, q) * ru;
    }
    total += grid.weight(q) * inner;
  }
  return total;
}

}  // namespace nlnoether
