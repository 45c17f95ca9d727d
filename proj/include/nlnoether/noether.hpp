#pragma once

// Conserved quantities, boundary fluxes, time balances, the nonlocal residual
// fields of the pointwise balance laws and their zero-mean gaps.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dynamics.hpp"
#include "error.hpp"
#include "mesh.hpp"
#include "nonlocal.hpp"

namespace nlnoether {

/// Number of independent angular components: 0 (1D), 1 (2D, z only), 3 (3D).
inline constexpr int angular_components(int dim) { return dim == 2 ? 1 : dim == 3 ? 3 : 0; }

/// (x × a) restricted to the angular components of `dim`.
inline void cross(int dim, const double* x, const double* a, double* out) {
  if (dim == 2) {
    out[0] = x[0] * a[1] - x[1] * a[0];
  } else if (dim == 3) {
    out[0] = x[1] * a[2] - x[2] * a[1];
    out[1] = x[2] * a[0] - x[0] * a[2];
    out[2] = x[0] * a[1] - x[1] * a[0];
  }
}

struct ConservedQuantities {
  double energy = 0.0;
  std::vector<double> linear_momentum;   // int rho v
  std::vector<double> angular_momentum;  // int x × rho v
  std::vector<double> pseudo_momentum;   // int rho v_i u_i,k
};

struct BoundaryFluxes {
  double power = 0.0;                 // sigma_ks v_k n_s
  std::vector<double> traction;       // sigma_ks n_s
  std::vector<double> moment;         // x × (sigma n)
  std::vector<double> eshelby_flux;   // (L delta_kj + sigma_ij u_i,k) n_j
};

/// Kinetic + strain energy + 1/2 int <h|u>.u. The strain term is the
/// potential of elastic_force.
inline ConservedQuantities conserved_quantities(const State& s, const NonlocalContext& ctx,
                                                const MaterialModel& m) {
  const DomainGrid& grid = ctx.grid();
  require_displacement(s.u, grid, "conserved_quantities");
  require_displacement(s.v, grid, "conserved_quantities");
  const int dim = grid.dim();
  const int na = angular_components(dim);
  ConservedQuantities q;
  q.linear_momentum.assign(dim, 0.0);
  q.angular_momentum.assign(na, 0.0);
  q.pseudo_momentum.assign(dim, 0.0);

  const Field hu = nonlocal_argument(ctx, s.u, Weight::h);
  const Field G = gradient(s.u, grid);
  double kin = 0.0, nl = 0.0;
  double lp[3];
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double w = grid.weight(p);
    double v2 = 0.0, hu_u = 0.0;
    for (int c = 0; c < dim; ++c) {
      v2 += s.v(p, c) * s.v(p, c);
      hu_u += hu(p, c) * s.u(p, c);
      q.linear_momentum[c] += w * m.rho * s.v(p, c);
    }
    kin += w * 0.5 * m.rho * v2;
    nl += w * 0.5 * hu_u;
    cross(dim, grid.point(p).data(), &s.v(p, 0), lp);
    for (int a = 0; a < na; ++a) q.angular_momentum[a] += w * m.rho * lp[a];
    for (int k = 0; k < dim; ++k) {
      double acc = 0.0;
      for (int i = 0; i < dim; ++i) acc += s.v(p, i) * G(p, i * dim + k);
      q.pseudo_momentum[k] += w * m.rho * acc;
    }
  }
  q.energy = kin + strain_energy(s.u, grid, m) + nl;
  return q;
}

/// Face integrals of the product fields, with face traces from `face_value`.
inline BoundaryFluxes boundary_fluxes(const State& s, const NonlocalContext& ctx,
                                      const MaterialModel& m) {
  const DomainGrid& grid = ctx.grid();
  const int dim = grid.dim();
  const int na = angular_components(dim);
  const Field sig = stress(s.u, grid, m);
  const Field G = gradient(s.u, grid);
  const Field L = lagrangian_density(s, ctx, m);

  // Product fields, flux direction index last.
  Field power(grid, dim), moment(grid, std::max(1, na * dim)), esh(grid, dim * dim);
  double col[3], xc[3];
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (int j = 0; j < dim; ++j) {
      double pw = 0.0;
      for (int k = 0; k < dim; ++k) {
        pw += sig(p, k * dim + j) * s.v(p, k);
        col[k] = sig(p, k * dim + j);
      }
      power(p, j) = pw;
      cross(dim, grid.point(p).data(), col, xc);
      for (int a = 0; a < na; ++a) moment(p, a * dim + j) = xc[a];
    }
    for (int k = 0; k < dim; ++k)
      for (int j = 0; j < dim; ++j) {
        double acc = k == j ? L(p, 0) : 0.0;
        for (int i = 0; i < dim; ++i) acc += sig(p, i * dim + j) * G(p, i * dim + k);
        esh(p, k * dim + j) = acc;
      }
  }

  // Contract a row-major (rows x dim) trace with the face normal.
  auto normal_flux = [dim](const Field& f, int rows) {
    return [&f, rows, dim](const BoundaryFace& face) {
      const auto tr = face_value(f, face);
      std::vector<double> out(static_cast<std::size_t>(rows));
      for (int r = 0; r < rows; ++r) out[r] = face.sign * tr[r * dim + face.axis];
      return out;
    };
  };

  BoundaryFluxes b;
  b.power = boundary_integrate(grid, normal_flux(power, 1))[0];
  b.traction = boundary_integrate(grid, normal_flux(sig, dim));
  b.moment = na > 0 ? boundary_integrate(grid, normal_flux(moment, na)) : std::vector<double>{};
  b.eshelby_flux = boundary_integrate(grid, normal_flux(esh, dim));
  return b;
}

struct BalanceSample {
  double energy = 0.0;
  std::vector<double> momentum;
  std::vector<double> angular;
  std::vector<double> eshelby;
};

/// d/dt(bulk) - flux at each sample: centered differences inside, one-sided
/// second order at both ends.
inline std::vector<BalanceSample> balance_residuals(const std::vector<ConservedQuantities>& q,
                                                    const std::vector<BoundaryFluxes>& b,
                                                    double dt_sample) {
  if (q.size() < 3) throw std::invalid_argument("balance_residuals: need at least 3 samples");
  if (b.size() != q.size())
    throw std::invalid_argument("balance_residuals: bulk and flux series differ in length");
  if (!(dt_sample > 0.0)) throw std::invalid_argument("balance_residuals: dt_sample must be > 0");
  const std::size_t n = q.size();
  auto rate = [n, dt_sample](auto&& get, std::size_t i) {
    if (i == 0) return (-3.0 * get(0) + 4.0 * get(1) - get(2)) / (2.0 * dt_sample);
    if (i == n - 1) return (3.0 * get(n - 1) - 4.0 * get(n - 2) + get(n - 3)) / (2.0 * dt_sample);
    return (get(i + 1) - get(i - 1)) / (2.0 * dt_sample);
  };
  std::vector<BalanceSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    BalanceSample& r = out[i];
    r.energy = rate([&](std::size_t j) { return q[j].energy; }, i) - b[i].power;
    for (std::size_t c = 0; c < q[i].linear_momentum.size(); ++c)
      r.momentum.push_back(rate([&](std::size_t j) { return q[j].linear_momentum[c]; }, i) -
                           b[i].traction[c]);
    for (std::size_t c = 0; c < q[i].angular_momentum.size(); ++c)
      r.angular.push_back(rate([&](std::size_t j) { return q[j].angular_momentum[c]; }, i) -
                          b[i].moment[c]);
    for (std::size_t c = 0; c < q[i].pseudo_momentum.size(); ++c)
      r.eshelby.push_back(rate([&](std::size_t j) { return q[j].pseudo_momentum[c]; }, i) -
                          b[i].eshelby_flux[c]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Residual fields.

/// 1/2 [u_i(x) sum_y w g v_i(y) - v_i(x) sum_y w g u_i(y)].
inline Field residual_energy_field(const State& s, const NonlocalContext& ctx) {
  const DomainGrid& grid = ctx.grid();
  const Field gv = weighted_sum(ctx, s.v, Weight::g);
  const Field gu = weighted_sum(ctx, s.u, Weight::g);
  Field e(grid, 1);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    double acc = 0.0;
    for (int c = 0; c < s.u.components(); ++c) acc += s.u(p, c) * gv(p, c) - s.v(p, c) * gu(p, c);
    e(p, 0) = 0.5 * acc;
  }
  return e;
}

/// -<kappa|u>, operand x in central mode.
inline Field residual_momentum_field(const State& s, const NonlocalContext& ctx) {
  return -1.0 * nonlocal_argument(ctx, force_operand(s.u, ctx), Weight::kappa);
}

/// x × P_hat. Undefined in 1D.
inline Field residual_angular_field(const State& s, const NonlocalContext& ctx) {
  const DomainGrid& grid = ctx.grid();
  const int dim = grid.dim();
  if (dim < 2) throw UnsupportedDimension("residual_angular_field: needs dim >= 2");
  const Field P = residual_momentum_field(s, ctx);
  Field M(grid, angular_components(dim));
  for (std::size_t p = 0; p < grid.size(); ++p) cross(dim, grid.point(p).data(), &P(p, 0), &M(p, 0));
  return M;
}

/// 1/2 [u_i (<h|u_i>),k - <g|u_i> u_i,k].
inline Field residual_eshelby_field(const State& s, const NonlocalContext& ctx) {
  const DomainGrid& grid = ctx.grid();
  const int dim = grid.dim();
  const Field hu = nonlocal_argument(ctx, s.u, Weight::h);
  const Field gu = nonlocal_argument(ctx, s.u, Weight::g);
  const Field dhu = gradient(hu, grid);
  const Field G = gradient(s.u, grid);
  Field J(grid, dim);
  for (std::size_t p = 0; p < grid.size(); ++p)
    for (int k = 0; k < dim; ++k) {
      double acc = 0.0;
      for (int i = 0; i < s.u.components(); ++i)
        acc += s.u(p, i) * dhu(p, i * dim + k) - gu(p, i) * G(p, i * dim + k);
      J(p, k) = 0.5 * acc;
    }
  return J;
}

struct ResidualFields {
  Field E_hat;
  Field P_hat;
  std::optional<Field> M_hat;  // absent in 1D
  Field J_hat;
};

inline ResidualFields residual_fields(const State& s, const NonlocalContext& ctx) {
  ResidualFields r;
  r.E_hat = residual_energy_field(s, ctx);
  r.P_hat = residual_momentum_field(s, ctx);
  if (ctx.grid().dim() >= 2) r.M_hat = residual_angular_field(s, ctx);
  r.J_hat = residual_eshelby_field(s, ctx);
  return r;
}

/// max_c |int f_c| / (1e-30 + int |f|).
inline double normalized_mean(const Field& f, const DomainGrid& grid) {
  const auto total = integrate(f, grid);
  double worst = 0.0;
  for (double x : total) worst = std::max(worst, std::abs(x));
  return worst / (1e-30 + integrate_norm(f, grid));
}

struct ZeroMeanGaps {
  double E = 0.0;
  double P = 0.0;
  double M = std::numeric_limits<double>::quiet_NaN();  // NaN when undefined
  double J = 0.0;
};

inline ZeroMeanGaps zero_mean_verdicts(const ResidualFields& r, const DomainGrid& grid) {
  ZeroMeanGaps g;
  g.E = normalized_mean(r.E_hat, grid);
  g.P = normalized_mean(r.P_hat, grid);
  if (r.M_hat) g.M = normalized_mean(*r.M_hat, grid);
  g.J = normalized_mean(r.J_hat, grid);
  return g;
}

// ---------------------------------------------------------------------------
// Left sides of the pointwise balance laws from three consecutive states
// s0, s1, s2 spaced by dt, evaluated at s1.

/// d/dt(L - rho v.v) + div(sigma^T v).
inline Field energy_localization_lhs(const State& s0, const State& s1, const State& s2, double dt,
                                     const NonlocalContext& ctx, const MaterialModel& m) {
  const DomainGrid& grid = ctx.grid();
  const int dim = grid.dim();
  auto q = [&](const State& s) {
    Field L = lagrangian_density(s, ctx.rebind(s.u), m);
    for (std::size_t p = 0; p < grid.size(); ++p)
      for (int c = 0; c < dim; ++c) L(p, 0) -= m.rho * s.v(p, c) * s.v(p, c);
    return L;
  };
  Field out = (q(s2) - q(s0)) * (0.5 / dt);
  const Field sig = stress(s1.u, grid, m);
  Field sv(grid, dim);
  for (std::size_t p = 0; p < grid.size(); ++p)
    for (int j = 0; j < dim; ++j) {
      double acc = 0.0;
      for (int k = 0; k < dim; ++k) acc += sig(p, k * dim + j) * s1.v(p, k);
      sv(p, j) = acc;
    }
  out += divergence(sv, grid);
  return out;
}

/// d/dt(rho v_i u_i,k) - (L delta_kj + sigma_ij u_i,k),j.
inline Field eshelby_localization_lhs(const State& s0, const State& s1, const State& s2, double dt,
                                      const NonlocalContext& ctx, const MaterialModel& m) {
  const DomainGrid& grid = ctx.grid();
  const int dim = grid.dim();
  auto pm = [&](const State& s) {
    const Field G = gradient(s.u, grid);
    Field f(grid, dim);
    for (std::size_t p = 0; p < grid.size(); ++p)
      for (int k = 0; k < dim; ++k) {
        double acc = 0.0;
        for (int i = 0; i < dim; ++i) acc += s.v(p, i) * G(p, i * dim + k);
        f(p, k) = m.rho * acc;
      }
    return f;
  };
  Field out = (pm(s2) - pm(s0)) * (0.5 / dt);
  const Field L = lagrangian_density(s1, ctx.rebind(s1.u), m);
  const Field sig = stress(s1.u, grid, m);
  const Field G = gradient(s1.u, grid);
  Field T(grid, dim * dim);
  for (std::size_t p = 0; p < grid.size(); ++p)
    for (int k = 0; k < dim; ++k)
      for (int j = 0; j < dim; ++j) {
        double acc = k == j ? L(p, 0) : 0.0;
        for (int i = 0; i < dim; ++i) acc += sig(p, i * dim + j) * G(p, i * dim + k);
        T(p, k * dim + j) = acc;
      }
  out -= divergence(T, grid);
  return out;
}

/// rho u'' - elastic force for the state's own force evaluation.
inline Field momentum_localization_lhs(const State& s, const NonlocalContext& ctx,
                                       const MaterialModel& m) {
  return internal_force(s, ctx, m) - elastic_force(s.u, ctx.grid(), m);
}

}  // namespace nlnoether
