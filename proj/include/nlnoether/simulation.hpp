#pragma once

// Scenario runner: builds grid, kernel and material from a config, advances
// the state and samples every diagnostic.

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dynamics.hpp"
#include "error.hpp"
#include "noether.hpp"

namespace nlnoether {

struct DiagnosticsSeries {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw std::out_of_range("DiagnosticsSeries: no column " + name);
  }
  std::vector<double> values(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
};

inline std::vector<std::string> diagnostic_columns(int dim) {
  static const char* axes[3] = {"x", "y", "z"};
  std::vector<std::string> ang;
  if (dim == 2) ang = {"z"};
  if (dim == 3) ang = {"x", "y", "z"};
  std::vector<std::string> c = {"t", "energy"};
  for (int k = 0; k < dim; ++k) c.push_back(std::string("p") + axes[k]);
  for (const auto& a : ang) c.push_back("l" + a);
  for (int k = 0; k < dim; ++k) c.push_back(std::string("eshelby_") + axes[k]);
  c.push_back("power");
  for (int k = 0; k < dim; ++k) c.push_back(std::string("traction_") + axes[k]);
  for (const auto& a : ang) c.push_back("moment_" + a);
  for (int k = 0; k < dim; ++k) c.push_back(std::string("eshelby_flux_") + axes[k]);
  for (const char* g : {"gap_E", "gap_P", "gap_M", "gap_J"}) c.push_back(g);
  c.push_back("balance_energy");
  for (int k = 0; k < dim; ++k) c.push_back(std::string("balance_p") + axes[k]);
  for (const auto& a : ang) c.push_back("balance_l" + a);
  for (int k = 0; k < dim; ++k) c.push_back(std::string("balance_eshelby_") + axes[k]);
  return c;
}

struct RunResult {
  State initial;
  State final_state;
  DiagnosticsSeries series;
  std::vector<ConservedQuantities> bulk;
  std::vector<BoundaryFluxes> fluxes;
  std::vector<ZeroMeanGaps> gaps;
  std::optional<std::size_t> diverged_at;  // step index of a divergence
  double wall_seconds = 0.0;
  std::size_t steps_taken = 0;
};

/// Throws std::invalid_argument (or ConfigError) for inconsistent configs.
inline void validate(const ScenarioConfig& c) {
  if (c.dim < 1 || c.dim > 3) throw ConfigError("dim", "must be 1, 2 or 3");
  if (c.counts.size() != static_cast<std::size_t>(c.dim))
    throw ConfigError("counts", "needs one entry per axis");
  if (c.lengths.size() != static_cast<std::size_t>(c.dim))
    throw ConfigError("lengths", "needs one entry per axis");
  for (int k = 0; k < c.dim; ++k) {
    if (c.counts[k] < 3) throw ConfigError("counts", "must be >= 3 per axis");
    if (!(c.lengths[k] > 0.0)) throw ConfigError("lengths", "must be > 0");
  }
  try {
    validate(c.material, c.dim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("material", e.what());
  }
  try {
    validate(c.kernel);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("kernel", e.what());
  }
  if (c.cutoff && !(*c.cutoff > 0.0)) throw ConfigError("kernel.cutoff", "must be > 0");
  if (!(c.dt > 0.0)) throw ConfigError("dt", "must be > 0");
  const double bound = stability_bound(c);
  if (c.dt > bound * (1.0 + 1e-12))
    throw ConfigError("dt", "exceeds the stability bound " + std::to_string(bound));
  if (c.sample_every < 1) throw ConfigError("sample_every", "must be >= 1");
  for (FaceLabel f : c.fixed_faces)
    if (face_axis(f) >= c.dim)
      throw ConfigError("bc." + std::string(to_string(f)), "face does not exist in this dimension");
}

namespace detail {

inline std::vector<double> diagnostics_row(double t, const ConservedQuantities& q,
                                           const BoundaryFluxes& b, const ZeroMeanGaps& g) {
  std::vector<double> r = {t, q.energy};
  r.insert(r.end(), q.linear_momentum.begin(), q.linear_momentum.end());
  r.insert(r.end(), q.angular_momentum.begin(), q.angular_momentum.end());
  r.insert(r.end(), q.pseudo_momentum.begin(), q.pseudo_momentum.end());
  r.push_back(b.power);
  r.insert(r.end(), b.traction.begin(), b.traction.end());
  r.insert(r.end(), b.moment.begin(), b.moment.end());
  r.insert(r.end(), b.eshelby_flux.begin(), b.eshelby_flux.end());
  r.insert(r.end(), {g.E, g.P, g.M, g.J});
  return r;
}

}  // namespace detail

/// Runs a validated config. A divergence stops the loop and is reported in
/// `diverged_at`; samples taken so far are kept.
inline RunResult run(const ScenarioConfig& c) {
  validate(c);
  const auto t0 = std::chrono::steady_clock::now();
  const DomainGrid grid = build_grid(c);
  RunResult res;
  State s = initial_state(grid, c.init);
  res.initial = s;
  res.series.columns = diagnostic_columns(c.dim);
  VerletIntegrator integ(NonlocalContext(grid, c.kernel, s.u, c.cutoff), c.material);

  auto sample = [&](const State& st) {
    const NonlocalContext ctx = integ.context().rebind(st.u);
    res.bulk.push_back(conserved_quantities(st, ctx, c.material));
    res.fluxes.push_back(boundary_fluxes(st, ctx, c.material));
    res.gaps.push_back(zero_mean_verdicts(residual_fields(st, ctx), grid));
    res.series.rows.push_back(
        detail::diagnostics_row(st.t, res.bulk.back(), res.fluxes.back(), res.gaps.back()));
  };

  sample(s);
  for (std::size_t n = 1; n <= c.steps; ++n) {
    try {
      integ.step(s, c.dt);
    } catch (const DivergenceError&) {
      res.diverged_at = n;
      break;
    }
    res.steps_taken = n;
    if (n % c.sample_every == 0) sample(s);
  }

  const std::size_t nb = 1 + static_cast<std::size_t>(c.dim) +
                         static_cast<std::size_t>(angular_components(c.dim)) +
                         static_cast<std::size_t>(c.dim);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (res.bulk.size() >= 3) {
    const auto bal = balance_residuals(res.bulk, res.fluxes, c.dt * c.sample_every);
    for (std::size_t i = 0; i < bal.size(); ++i) {
      auto& r = res.series.rows[i];
      r.push_back(bal[i].energy);
      r.insert(r.end(), bal[i].momentum.begin(), bal[i].momentum.end());
      r.insert(r.end(), bal[i].angular.begin(), bal[i].angular.end());
      r.insert(r.end(), bal[i].eshelby.begin(), bal[i].eshelby.end());
    }
  } else {
    for (auto& r : res.series.rows) r.insert(r.end(), nb, nan);
  }
  res.final_state = s;
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace nlnoether
