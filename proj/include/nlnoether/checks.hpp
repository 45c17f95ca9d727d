#pragma once

// Property suites behind `nlnoether check`.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "noether.hpp"
#include "nonlocal.hpp"
#include "scenarios.hpp"
#include "simulation.hpp"

namespace nlnoether::checks {

enum class Relation { at_most, at_least, above, within };

struct CheckRow {
  std::string name;
  std::string law;
  double measured = 0.0;
  Relation relation = Relation::at_most;
  double lo = 0.0;  // threshold, or lower end for `within`
  double hi = 0.0;  // upper end for `within`
  bool pass = false;
};

inline CheckRow make_row(std::string name, std::string law, double measured, Relation rel,
                         double lo, double hi = 0.0) {
  CheckRow r{std::move(name), std::move(law), measured, rel, lo, hi, false};
  switch (rel) {
    case Relation::at_most: r.pass = measured <= lo; break;
    case Relation::at_least: r.pass = measured >= lo; break;
    case Relation::above: r.pass = measured > lo; break;
    case Relation::within: r.pass = measured >= lo && measured <= hi; break;
  }
  if (std::isnan(measured)) r.pass = false;
  return r;
}

inline std::string threshold_text(const CheckRow& r) {
  char buf[64];
  switch (r.relation) {
    case Relation::at_most: std::snprintf(buf, sizeof buf, "<= %.3g", r.lo); break;
    case Relation::at_least: std::snprintf(buf, sizeof buf, ">= %.3g", r.lo); break;
    case Relation::above: std::snprintf(buf, sizeof buf, "> %.3g", r.lo); break;
    case Relation::within: std::snprintf(buf, sizeof buf, "in [%.3g, %.3g]", r.lo, r.hi); break;
  }
  return buf;
}

/// Uniform [-1, 1] values, `d` components.
inline Field random_field(const DomainGrid& g, int d, PortableRng& rng) {
  Field f(g, d);
  for (double& x : f.values()) x = rng.uniform(-1.0, 1.0);
  return f;
}

inline std::vector<KernelSpec> builtin_kernels() {
  return {KernelSpec::constant(1.0), KernelSpec::exponential(1.0, 0.2),
          KernelSpec::exponential_modulated(1.0, 0.2, 5.0), KernelSpec::gaussian(1.0, 0.2)};
}

inline std::vector<DomainGrid> sweep_grids() {
  std::vector<DomainGrid> g;
  g.push_back(build_grid(1, {64}, {1.0}));
  g.push_back(build_grid(2, {16, 16}, {1.0, 1.0}));
  return g;
}

/// Max normalized zero-mean gap of <h|f> (or of <g|psi> when `traction`)
/// over the built-in kernels x 20 seeded fields x {1D N=64, 2D 16x16}.
inline double zero_mean_sweep(bool traction) {
  double worst = 0.0;
  for (const DomainGrid& g : sweep_grids())
    for (const KernelSpec& k : builtin_kernels())
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        PortableRng rng(1000 * seed + 17);
        const Field f = random_field(g, g.dim(), rng);
        if (!traction) {
          worst = std::max(worst, zero_mean_gap(NonlocalContext(g, k, f), f, Weight::h));
        } else {
          const Field ref = random_field(g, g.dim(), rng);
          const NonlocalContext ctx(g, k, ref);
          const auto total = integrate(weighted_traction(ctx, f), g);
          double m = 0.0;
          for (double x : total) m = std::max(m, std::abs(x));
          worst = std::max(worst, m / (1.0 + integrate_norm(f, g)));
        }
      }
  return worst;
}

/// Relative interchange gap, worst over kernels and 20 seeds on 8-point grids.
inline double interchange_sweep() {
  std::vector<DomainGrid> grids;
  grids.push_back(build_grid(1, {8}, {1.0}));
  grids.push_back(build_grid(2, {2, 4}, {1.0, 2.0}));
  double worst = 0.0;
  for (const DomainGrid& g : grids)
    for (const KernelSpec& k : builtin_kernels())
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        PortableRng rng(seed + 5);
        const Field ref = random_field(g, 1, rng);
        const Field psi = random_field(g, 1, rng);
        const Field phi = random_field(g, 1, rng);
        const NonlocalContext ctx(g, k, ref);
        const Field a = nonlocal_argument(ctx, phi);
        const Field b = nonlocal_argument(ctx, psi);
        double scale = 0.0;
        for (std::size_t p = 0; p < g.size(); ++p)
          scale += g.weight(p) * (std::abs(psi(p, 0) * a(p, 0)) + std::abs(phi(p, 0) * b(p, 0)));
        worst = std::max(worst, interchange_gap(ctx, psi, phi) / (1e-300 + scale));
      }
  return worst;
}

/// Scale sum_q w_q |u_q| sum_p w_p h |u_p - u_q| of the double integral.
inline double double_integral_scale(const NonlocalContext& ctx, const Field& u) {
  const DomainGrid& g = ctx.grid();
  double s = 0.0;
  for (std::size_t q = 0; q < g.size(); ++q)
    for (std::size_t p = 0; p < g.size(); ++p) {
      double r = 0.0, uq = 0.0;
      for (int c = 0; c < u.components(); ++c) {
        r += (u(p, c) - u(q, c)) * (u(p, c) - u(q, c));
        uq += u(q, c) * u(q, c);
      }
      s += g.weight(p) * g.weight(q) * ctx.weight(Weight::h, p, q) * std::sqrt(r * uq);
    }
  return s;
}

struct DoubleIntegralResult {
  double vanishing = 0.0;    // |I| / scale
  double closed_form = 0.0;  // |I + int u.<h|u>| / scale
};

inline DoubleIntegralResult double_integral_sweep() {
  std::vector<DomainGrid> grids;
  grids.push_back(build_grid(1, {8}, {1.0}));
  grids.push_back(build_grid(2, {2, 4}, {1.0, 2.0}));
  DoubleIntegralResult out;
  out.vanishing = std::numeric_limits<double>::infinity();
  for (const DomainGrid& g : grids)
    for (const KernelSpec& k : builtin_kernels())
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        PortableRng rng(seed + 99);
        const Field u = random_field(g, g.dim(), rng);
        const NonlocalContext ctx(g, k, u);
        const double I = double_integral_hru(ctx, u);
        const double scale = double_integral_scale(ctx, u);
        const Field hu = nonlocal_argument(ctx, u);
        double uhu = 0.0;
        for (std::size_t p = 0; p < g.size(); ++p)
          for (int c = 0; c < u.components(); ++c) uhu += g.weight(p) * u(p, c) * hu(p, c);
        // Worst case for the vanishing claim is its smallest violation.
        out.vanishing = std::min(out.vanishing, std::abs(I) / scale);
        out.closed_form = std::max(out.closed_form, std::abs(I + uhu) / scale);
      }
  return out;
}

/// Smooth scalar fields for the variation identity.
inline std::pair<Field, Field> variation_fields(const DomainGrid& g) {
  const Field phi = Field::from_function(g, 1, [](const Point& x) {
    return 0.3 * std::sin(2.0 * x[0]) + 0.2 * std::cos(3.0 * x[0]);
  });
  const Field dphi = Field::from_function(g, 1, [](const Point& x) {
    return std::cos(5.0 * x[0]) + 0.5 * x[0];
  });
  return {phi, dphi};
}

inline double variation_exact_gap() {
  const DomainGrid g = build_grid(1, {32}, {1.0});
  auto [phi, dphi] = variation_fields(g);
  double worst = 0.0;
  for (const KernelSpec& k : builtin_kernels()) {
    if (!k.s_independent()) continue;
    const NonlocalContext ctx(g, k, phi);
    for (double eps : {1e-3, 5e-4}) worst = std::max(worst, variation_identity_gap(ctx, phi, dphi, eps));
  }
  return worst;
}

inline double variation_richardson_ratio() {
  const DomainGrid g = build_grid(1, {32}, {1.0});
  auto [phi, dphi] = variation_fields(g);
  const NonlocalContext ctx(g, KernelSpec::exponential_modulated(1.0, 0.2, 5.0), phi);
  return variation_identity_gap(ctx, phi, dphi, 1e-3) / variation_identity_gap(ctx, phi, dphi, 5e-4);
}

/// max |g - h| + |kappa - h| over random points for s-independent families.
inline double kernel_reduction_gap() {
  PortableRng rng(31);
  double worst = 0.0;
  for (const KernelSpec& k : builtin_kernels()) {
    if (!k.s_independent()) continue;
    for (int i = 0; i < 200; ++i) {
      const Point x{rng.uniform(), rng.uniform(), rng.uniform()};
      const Point y{rng.uniform(), rng.uniform(), rng.uniform()};
      const double s = rng.uniform(0.0, 2.0);
      const double h = eval_h(k, x, y, s);
      worst = std::max({worst, std::abs(eval_g(k, x, y, s) - h), std::abs(eval_kappa(k, x, y, s) - h)});
    }
  }
  return worst;
}

inline double max_relative_energy_drift(const RunResult& r) {
  const double e0 = r.bulk.front().energy;
  double m = 0.0;
  for (const auto& q : r.bulk) m = std::max(m, std::abs(q.energy - e0) / e0);
  return m;
}

inline double max_abs_column(const RunResult& r, const std::string& col) {
  double m = 0.0;
  for (double x : r.series.values(col)) m = std::max(m, std::abs(x));
  return m;
}

/// Momentum drift over the run / (rho int |v| at t = 0).
inline double momentum_drift(const ScenarioConfig& c, const RunResult& r) {
  const DomainGrid g = build_grid(c);
  double l1 = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p)
    for (int k = 0; k < c.dim; ++k) l1 += g.weight(p) * std::abs(r.initial.v(p, k));
  double d = 0.0;
  for (const auto& q : r.bulk)
    for (int k = 0; k < c.dim; ++k)
      d = std::max(d, std::abs(q.linear_momentum[k] - r.bulk.front().linear_momentum[k]));
  return d / (c.material.rho * l1);
}

/// Momentum balance maxima at N = 32, 64, 128 over the same physical time.
inline std::vector<double> momentum_balance_study() {
  std::vector<double> out;
  for (int n : {32, 64, 128}) {
    const ScenarioConfig c = scenarios::free_pulse(n, static_cast<std::size_t>(2000 * n / 64), 1);
    out.push_back(max_abs_column(run(c), "balance_px"));
  }
  return out;
}

/// Angular balance maxima at N = 16, 32 and the max central-mode M_hat gap.
inline std::pair<std::vector<double>, double> angular_study() {
  std::vector<double> bal;
  double gap = 0.0;
  for (int n : {16, 32}) {
    const RunResult r = run(scenarios::rotation_central(n));
    bal.push_back(max_abs_column(r, "balance_lz"));
    for (const auto& g : r.gaps) gap = std::max(gap, g.M);
  }
  return {bal, gap};
}

struct LocalizationErrors {
  double energy = 0.0;
  double eshelby = 0.0;
};

/// Pointwise max-norm errors of both localization identities at the last
/// interior state of the localization pulse on N cells.
inline LocalizationErrors localization_errors(int n) {
  const ScenarioConfig c = scenarios::localization_pulse(n);
  const DomainGrid g = build_grid(c);
  State s = initial_state(g, c.init);
  VerletIntegrator integ(NonlocalContext(g, c.kernel, s.u, c.cutoff), c.material);
  State s0 = s, s1 = s;
  for (std::size_t i = 0; i < c.steps; ++i) {
    s0 = s1;
    s1 = s;
    integ.step(s, c.dt);
  }
  const NonlocalContext ctx(g, c.kernel, s1.u, c.cutoff);
  LocalizationErrors e;
  e.energy = (energy_localization_lhs(s0, s1, s, c.dt, ctx, c.material) -
              residual_energy_field(s1, ctx)).max_abs();
  e.eshelby = (eshelby_localization_lhs(s0, s1, s, c.dt, ctx, c.material) -
               residual_eshelby_field(s1, ctx)).max_abs();
  return e;
}

/// max |(u_A0 - u_ref)| / max |u_ref| between the solver with A = 0 and an
/// elastic-only Verlet loop.
inline double local_limit_gap() {
  ScenarioConfig c = scenarios::fixed_standing_wave(32, 1.0, 400, 400);
  c.kernel = KernelSpec::exponential(0.0, 0.1);
  const RunResult r = run(c);
  const DomainGrid g = build_grid(c);
  State s = initial_state(g, c.init);
  Field f = elastic_force(s.u, g, c.material);
  mask_dirichlet(f, g);
  for (std::size_t n = 0; n < c.steps; ++n) {
    s.v += (0.5 * c.dt / c.material.rho) * f;
    s.u += c.dt * s.v;
    f = elastic_force(s.u, g, c.material);
    mask_dirichlet(f, g);
    s.v += (0.5 * c.dt / c.material.rho) * f;
    apply_boundary(s, g);
  }
  // The run owns its own grid instance, so compare raw values.
  auto diff = [](const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i)
      m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
  };
  return diff(r.final_state.u, s.u) / s.u.max_abs() +
         diff(r.final_state.v, s.v) / std::max(1e-300, s.v.max_abs());
}

inline std::vector<CheckRow> identities() {
  std::vector<CheckRow> rows;
  rows.push_back(make_row("zero_mean_argument", "zero mean of the nonlocal argument",
                          zero_mean_sweep(false), Relation::at_most, 1e-12));
  rows.push_back(make_row("action_reaction", "nonlocal traction integrates to zero",
                          zero_mean_sweep(true), Relation::at_most, 1e-12));
  rows.push_back(make_row("interchange", "int psi<h|phi> = int phi<h|psi>", interchange_sweep(),
                          Relation::at_most, 1e-12));
  rows.push_back(make_row("variation_exact", "variation of <h|phi> is <g|dphi>, s-independent h",
                          variation_exact_gap(), Relation::at_most, 1e-12));
  rows.push_back(make_row("variation_richardson", "variation identity, O(eps^2) for s-dependent h",
                          variation_richardson_ratio(), Relation::within, 3.5, 4.5));
  const auto di = double_integral_sweep();
  rows.push_back(make_row("double_integral_vanishing", "int int h r.u(y) = 0",
                          di.vanishing, Relation::at_most, 1e-12));
  rows.push_back(make_row("double_integral_closed_form", "int int h r.u(y) = -int u.<h|u>",
                          di.closed_form, Relation::at_most, 1e-12));
  rows.push_back(make_row("kernel_reduction", "g = kappa = h for s-independent h",
                          kernel_reduction_gap(), Relation::at_most, 1e-14));
  return rows;
}

inline std::vector<CheckRow> conservation() {
  std::vector<CheckRow> rows;
  const double e1 = max_relative_energy_drift(run(scenarios::fixed_standing_wave(64, 1.0, 10000)));
  const double e2 = max_relative_energy_drift(run(scenarios::fixed_standing_wave(64, 0.5, 20000)));
  rows.push_back(make_row("energy_drift", "energy, fixed-fixed standing wave", e1, Relation::at_most, 1e-4));
  rows.push_back(make_row("energy_dt_order", "energy error ratio on halving dt", e1 / e2,
                          Relation::within, 3.5, 4.5));

  const ScenarioConfig fp = scenarios::free_pulse(64, 2000, 1);
  const RunResult rp = run(fp);
  rows.push_back(make_row("momentum_drift", "linear momentum, free-free pulse", momentum_drift(fp, rp),
                          Relation::at_most, 1e-10));
  const auto mb = momentum_balance_study();
  rows.push_back(make_row("momentum_balance_order", "momentum balance ratio per dx halving",
                          std::min(mb[0] / mb[1], mb[1] / mb[2]), Relation::at_least, 3.5));

  const auto [ab, gapM] = angular_study();
  rows.push_back(make_row("angular_zero_mean_central", "int M_hat = 0 in central mode", gapM,
                          Relation::at_most, 1e-12));
  rows.push_back(make_row("angular_balance_refinement", "angular balance ratio on dx halving",
                          ab[0] / ab[1], Relation::at_least, 2.0));

  double rt = 0.0;
  for (int dim : {1, 2}) {
    const RunResult r = run(scenarios::rigid_translation(dim));
    for (const auto& col : r.series.columns)
      if (col.rfind("balance_", 0) == 0) rt = std::max(rt, max_abs_column(r, col));
  }
  rows.push_back(make_row("rigid_translation_balance", "all balances, rigid translation", rt,
                          Relation::at_most, 1e-12));
  rows.push_back(make_row("local_limit", "A = 0 equals classical elastodynamics", local_limit_gap(),
                          Relation::at_most, 1e-14));
  return rows;
}

inline std::vector<CheckRow> residuals() {
  std::vector<CheckRow> rows;
  const RunResult ra = run(scenarios::demo_angular_noncentral());
  const RunResult rj = run(scenarios::demo_eshelby());
  const RunResult rc = run(scenarios::rotation_central(16));
  double gE = 0.0, gP = 0.0, gMc = 0.0;
  double minM = std::numeric_limits<double>::infinity(), minJ = minM;
  for (const RunResult* r : {&ra, &rj, &rc})
    for (const auto& g : r->gaps) {
      gE = std::max(gE, g.E);
      gP = std::max(gP, g.P);
    }
  for (const auto& g : rc.gaps) gMc = std::max(gMc, g.M);
  for (const auto& g : ra.gaps) minM = std::min(minM, g.M);
  for (const auto& g : rj.gaps) minJ = std::min(minJ, g.J);
  rows.push_back(make_row("zero_mean_E", "int E_hat = 0", gE, Relation::at_most, 1e-12));
  rows.push_back(make_row("zero_mean_P", "int P_hat = 0", gP, Relation::at_most, 1e-12));
  rows.push_back(make_row("zero_mean_M_central", "int M_hat = 0, central mode", gMc, Relation::at_most, 1e-12));
  rows.push_back(make_row("nonvanishing_M_generic", "int M_hat != 0, non-central demo", minM,
                          Relation::above, 1e-3));
  rows.push_back(make_row("nonvanishing_J", "int J_hat != 0, Eshelby demo", minJ, Relation::above, 1e-3));

  const auto l32 = localization_errors(32), l64 = localization_errors(64),
             l128 = localization_errors(128);
  rows.push_back(make_row("localization_energy", "E_hat identity error ratio on joint halving",
                          std::min(l32.energy / l64.energy, l64.energy / l128.energy),
                          Relation::at_least, 3.0));
  rows.push_back(make_row("localization_eshelby", "J_hat identity error ratio on joint halving",
                          std::min(l32.eshelby / l64.eshelby, l64.eshelby / l128.eshelby),
                          Relation::at_least, 3.0));

  // rho u'' - elastic force equals P_hat pointwise.
  const ScenarioConfig c = scenarios::demo_eshelby();
  const DomainGrid g = build_grid(c);
  const State s = initial_state(g, c.init);
  const NonlocalContext ctx(g, c.kernel, s.u);
  const Field P = residual_momentum_field(s, ctx);
  const double m = (momentum_localization_lhs(s, ctx, c.material) - P).max_abs() / P.max_abs();
  rows.push_back(make_row("localization_momentum", "rho u'' - div sigma = P_hat", m,
                          Relation::at_most, 1e-12));
  return rows;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n = {"identities", "conservation", "residuals"};
  return n;
}

/// Check names per suite, in run order.
inline const std::vector<std::pair<std::string, std::vector<std::string>>>& suite_checks() {
  static const std::vector<std::pair<std::string, std::vector<std::string>>> s = {
      {"identities",
       {"zero_mean_argument", "action_reaction", "interchange", "variation_exact",
        "variation_richardson", "double_integral_vanishing", "double_integral_closed_form",
        "kernel_reduction"}},
      {"conservation",
       {"energy_drift", "energy_dt_order", "momentum_drift", "momentum_balance_order",
        "angular_zero_mean_central", "angular_balance_refinement", "rigid_translation_balance",
        "local_limit"}},
      {"residuals",
       {"zero_mean_E", "zero_mean_P", "zero_mean_M_central", "nonvanishing_M_generic",
        "nonvanishing_J", "localization_energy", "localization_eshelby", "localization_momentum"}},
  };
  return s;
}

inline std::vector<CheckRow> run_suite(const std::string& name) {
  if (name == "identities") return identities();
  if (name == "conservation") return conservation();
  if (name == "residuals") return residuals();
  throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace nlnoether::checks
