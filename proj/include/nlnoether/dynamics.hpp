#pragma once

// Hookean material, Lagrangian density, the nonlocal motion equation and its
// velocity-Verlet integration.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "error.hpp"
#include "kernel.hpp"
#include "mesh.hpp"
#include "nonlocal.hpp"

namespace nlnoether {

struct MaterialModel {
  double rho = 1.0;
  bool isotropic = false;
  double E = 1.0;  // uniaxial modulus
  double lambda = 0.0;
  double mu = 0.0;

  static MaterialModel uniaxial(double rho, double E) {
    MaterialModel m;
    m.rho = rho;
    m.E = E;
    return m;
  }
  static MaterialModel lame(double rho, double lambda, double mu) {
    MaterialModel m;
    m.rho = rho;
    m.isotropic = true;
    m.lambda = lambda;
    m.mu = mu;
    return m;
  }

  /// P-wave modulus: E, or lambda + 2 mu.
  double longitudinal_modulus() const noexcept { return isotropic ? lambda + 2.0 * mu : E; }
  double wave_speed() const { return std::sqrt(longitudinal_modulus() / rho); }
};

inline void validate(const MaterialModel& m, int dim) {
  if (!(m.rho > 0.0) || !std::isfinite(m.rho))
    throw std::invalid_argument("material: rho must be > 0");
  if (m.isotropic) {
    if (!(m.mu > 0.0)) throw std::invalid_argument("material: mu must be > 0");
    if (!(3.0 * m.lambda + 2.0 * m.mu > 0.0))
      throw std::invalid_argument("material: 3 lambda + 2 mu must be > 0");
  } else {
    if (dim > 1) throw std::invalid_argument("material: dim >= 2 needs the Lame pair");
    if (!(m.E > 0.0) || !std::isfinite(m.E)) throw std::invalid_argument("material: E must be > 0");
  }
}

/// sigma = C : G for one point; G and sigma are dim x dim, row-major (i*dim + j).
inline void apply_elasticity(const MaterialModel& m, int dim, const double* G, double* sigma) {
  if (dim == 1) {
    sigma[0] = m.longitudinal_modulus() * G[0];
    return;
  }
  double tr = 0.0;
  for (int i = 0; i < dim; ++i) tr += G[i * dim + i];
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      sigma[i * dim + j] = m.mu * (G[i * dim + j] + G[j * dim + i]) + (i == j ? m.lambda * tr : 0.0);
}

inline void require_displacement(const Field& u, const DomainGrid& grid, const char* op) {
  require_on_grid(u, grid, op);
  if (u.components() != grid.dim())
    throw std::invalid_argument(std::string(op) + ": displacement needs dim components");
}

/// Pointwise Hookean stress from the finite-difference gradient; component i*dim + j.
inline Field stress(const Field& u, const DomainGrid& grid, const MaterialModel& m) {
  require_displacement(u, grid, "stress");
  const int dim = grid.dim();
  const Field G = gradient(u, grid);
  Field s(grid, dim * dim);
  for (std::size_t p = 0; p < grid.size(); ++p) apply_elasticity(m, dim, &G(p, 0), &s(p, 0));
  return s;
}

struct State {
  Field u;
  Field v;
  double t = 0.0;
};

/// Operand of the kappa-operator: u, or the coordinate field in central mode.
inline Field force_operand(const Field& u, const NonlocalContext& ctx) {
  return ctx.kernel().central ? coordinates(ctx.grid()) : u;
}

/// 1/2 rho |v|^2 - 1/2 grad u : C : grad u - 1/2 <h|u> . u
inline Field lagrangian_density(const State& s, const NonlocalContext& ctx,
                                const MaterialModel& m) {
  const DomainGrid& grid = ctx.grid();
  require_displacement(s.u, grid, "lagrangian_density");
  require_displacement(s.v, grid, "lagrangian_density");
  const int dim = grid.dim();
  const Field G = gradient(s.u, grid);
  const Field hu = nonlocal_argument(ctx, s.u, Weight::h);
  Field L(grid, 1);
  std::vector<double> sig(static_cast<std::size_t>(dim * dim));
  for (std::size_t p = 0; p < grid.size(); ++p) {
    apply_elasticity(m, dim, &G(p, 0), sig.data());
    double kin = 0.0, el = 0.0, nl = 0.0;
    for (int c = 0; c < dim; ++c) {
      kin += s.v(p, c) * s.v(p, c);
      nl += hu(p, c) * s.u(p, c);
    }
    for (int a = 0; a < dim * dim; ++a) el += G(p, a) * sig[a];
    L(p, 0) = 0.5 * m.rho * kin - 0.5 * el - 0.5 * nl;
  }
  return L;
}

namespace detail {

// Multilinear elements on the lattice of cell centers, 2^dim Gauss points.
struct Q1Element {
  int dim = 1;
  int nodes = 2;
  std::vector<int> gather;   // node a -> linear offset of corner a from the element origin
  std::vector<double> dN;    // [gp][a][k]
  double gp_weight = 0.0;    // element volume / 2^dim

  explicit Q1Element(const DomainGrid& grid) : dim(grid.dim()), nodes(1 << grid.dim()) {
    const double xi[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
    double vol = 1.0;
    for (int k = 0; k < dim; ++k) vol *= grid.spacing()[k];
    gp_weight = vol / nodes;
    gather.resize(nodes);
    for (int a = 0; a < nodes; ++a) {
      std::size_t off = 0;
      for (int k = 0; k < dim; ++k)
        if (a >> k & 1) off += grid.stride(k);
      gather[a] = static_cast<int>(off);
    }
    dN.assign(static_cast<std::size_t>(nodes * nodes * dim), 0.0);
    for (int g = 0; g < nodes; ++g)
      for (int a = 0; a < nodes; ++a)
        for (int k = 0; k < dim; ++k) {
          double v = ((a >> k & 1) ? 1.0 : -1.0) / grid.spacing()[k];
          for (int m = 0; m < dim; ++m) {
            if (m == k) continue;
            const double x = xi[g >> m & 1];
            v *= (a >> m & 1) ? x : 1.0 - x;
          }
          dN[(g * nodes + a) * dim + k] = v;
        }
  }
};

// Strain energy; when `grad_out` is given, accumulates dE/du into it.
inline double q1_energy(const Field& u, const DomainGrid& grid, const MaterialModel& m,
                        Field* grad_out) {
  const int dim = grid.dim();
  const Q1Element el(grid);
  std::array<int, kMaxDim> ne{1, 1, 1};
  std::size_t n_elem = 1;
  for (int k = 0; k < dim; ++k) {
    ne[k] = grid.counts()[k] - 1;
    n_elem *= static_cast<std::size_t>(ne[k]);
  }
  std::vector<double> G(static_cast<std::size_t>(dim * dim)), sig(G.size());
  double energy = 0.0;
  for (std::size_t e = 0; e < n_elem; ++e) {
    std::array<int, kMaxDim> ijk{};
    std::size_t rest = e;
    for (int k = 0; k < dim; ++k) {
      ijk[k] = static_cast<int>(rest % static_cast<std::size_t>(ne[k]));
      rest /= static_cast<std::size_t>(ne[k]);
    }
    const std::size_t origin = grid.index(ijk);
    for (int g = 0; g < el.nodes; ++g) {
      std::fill(G.begin(), G.end(), 0.0);
      const double* dN = &el.dN[static_cast<std::size_t>(g * el.nodes * dim)];
      for (int a = 0; a < el.nodes; ++a) {
        const std::size_t node = origin + el.gather[a];
        for (int i = 0; i < dim; ++i)
          for (int k = 0; k < dim; ++k) G[i * dim + k] += u(node, i) * dN[a * dim + k];
      }
      apply_elasticity(m, dim, G.data(), sig.data());
      double w = 0.0;
      for (int a = 0; a < dim * dim; ++a) w += G[a] * sig[a];
      energy += 0.5 * el.gp_weight * w;
      if (!grad_out) continue;
      for (int a = 0; a < el.nodes; ++a) {
        const std::size_t node = origin + el.gather[a];
        for (int i = 0; i < dim; ++i) {
          double acc = 0.0;
          for (int k = 0; k < dim; ++k) acc += sig[i * dim + k] * dN[a * dim + k];
          (*grad_out)(node, i) += el.gp_weight * acc;
        }
      }
    }
  }
  return energy;
}

}  // namespace detail

/// Elastic energy of the multilinear interpolant of u between cell centers.
inline double strain_energy(const Field& u, const DomainGrid& grid, const MaterialModel& m) {
  require_displacement(u, grid, "strain_energy");
  return detail::q1_energy(u, grid, m, nullptr);
}

/// -(1/w_p) dE/du_p: the discrete div sigma whose potential is strain_energy.
/// Free faces carry no ghost traction.
inline Field elastic_force(const Field& u, const DomainGrid& grid, const MaterialModel& m) {
  require_displacement(u, grid, "elastic_force");
  Field f(grid, grid.dim());
  detail::q1_energy(u, grid, m, &f);
  for (std::size_t p = 0; p < grid.size(); ++p)
    for (int c = 0; c < grid.dim(); ++c) f(p, c) *= -1.0 / grid.weight(p);
  return f;
}

/// rho u'' = elastic_force(u) - <kappa|u>  (operand x in central mode).
inline Field internal_force(const State& s, const NonlocalContext& ctx, const MaterialModel& m) {
  Field f = elastic_force(s.u, ctx.grid(), m);
  f -= nonlocal_argument(ctx, force_operand(s.u, ctx), Weight::kappa);
  return f;
}

/// Pins u = 0 and v = 0 on cells of fixed faces.
inline void apply_boundary(State& s, const DomainGrid& grid) {
  const auto& mask = grid.dirichlet_mask();
  for (std::size_t p = 0; p < grid.size(); ++p) {
    if (!mask[p]) continue;
    for (int c = 0; c < s.u.components(); ++c) {
      s.u(p, c) = 0.0;
      s.v(p, c) = 0.0;
    }
  }
}

inline void mask_dirichlet(Field& f, const DomainGrid& grid) {
  const auto& mask = grid.dirichlet_mask();
  for (std::size_t p = 0; p < grid.size(); ++p)
    if (mask[p])
      for (int c = 0; c < f.components(); ++c) f(p, c) = 0.0;
}

inline bool state_finite(const State& s) {
  return std::isfinite(s.t) && s.u.all_finite() && s.v.all_finite();
}

/// Velocity Verlet with the force cached between steps.
class VerletIntegrator {
 public:
  VerletIntegrator(NonlocalContext ctx, MaterialModel m) : ctx_(std::move(ctx)), m_(m) {}

  const NonlocalContext& context() const noexcept { return ctx_; }
  const MaterialModel& material() const noexcept { return m_; }
  std::size_t steps_taken() const noexcept { return steps_; }

  /// Force at the current state, for diagnostics.
  const Field& force(const State& s) {
    if (!cached_) refresh(s);
    return force_;
  }

  void step(State& s, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    const DomainGrid& grid = ctx_.grid();
    if (!cached_) refresh(s);
    const double half = 0.5 * dt / m_.rho;
    for (std::size_t p = 0; p < grid.size(); ++p)
      for (int c = 0; c < grid.dim(); ++c) {
        s.v(p, c) += half * force_(p, c);
        s.u(p, c) += dt * s.v(p, c);
      }
    refresh(s);
    for (std::size_t p = 0; p < grid.size(); ++p)
      for (int c = 0; c < grid.dim(); ++c) s.v(p, c) += half * force_(p, c);
    apply_boundary(s, grid);
    s.t += dt;
    ++steps_;
    if (!state_finite(s)) throw DivergenceError(steps_);
  }

 private:
  void refresh(const State& s) {
    ctx_ = ctx_.rebind(s.u);
    force_ = internal_force(s, ctx_, m_);
    mask_dirichlet(force_, ctx_.grid());
    cached_ = true;
  }

  NonlocalContext ctx_;
  MaterialModel m_;
  Field force_;
  bool cached_ = false;
  std::size_t steps_ = 0;
};

/// One velocity-Verlet step without caching. `step_index` labels a divergence.
inline State step(const State& s, const NonlocalContext& ctx, const MaterialModel& m, double dt,
                  std::size_t step_index = 0) {
  VerletIntegrator integ(ctx.rebind(s.u), m);
  State out = s;
  try {
    integ.step(out, dt);
  } catch (const DivergenceError&) {
    throw DivergenceError(step_index);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenario configuration and initial-condition presets.

/// mt19937_64 with a platform-independent real mapping.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : g_(seed) {}
  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::mt19937_64 g_;
};

using PresetParams = std::map<std::string, std::vector<double>>;

struct InitSpec {
  std::string preset = "gaussian_pulse";
  PresetParams params;
  std::uint64_t seed = 0;
};

struct ScenarioConfig {
  int dim = 1;
  std::vector<int> counts{64};
  std::vector<double> lengths{1.0};
  MaterialModel material;
  KernelSpec kernel;
  std::optional<double> cutoff;
  InitSpec init;
  std::set<FaceLabel> fixed_faces;
  double dt = 0.0;
  std::size_t steps = 0;
  std::size_t sample_every = 1;
};

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"standing_wave", "gaussian_pulse",
                                                 "rigid_translation", "rigid_rotation",
                                                 "random_smooth"};
  return names;
}

inline DomainGrid build_grid(const ScenarioConfig& c) {
  return build_grid(c.dim, std::span<const int>(c.counts), std::span<const double>(c.lengths),
                    c.fixed_faces);
}

/// 0.9 * 0.5 * min spacing / c.
inline double stability_bound(const ScenarioConfig& c) {
  double dx = std::numeric_limits<double>::infinity();
  for (int k = 0; k < c.dim; ++k) dx = std::min(dx, c.lengths[k] / c.counts[k]);
  return 0.9 * 0.5 * dx / c.material.wave_speed();
}

namespace detail {

class ParamReader {
 public:
  ParamReader(const PresetParams& p, std::string preset) : p_(p), preset_(std::move(preset)) {}

  double scalar(const std::string& name, double fallback) {
    used_.insert(name);
    auto it = p_.find(name);
    if (it == p_.end()) return fallback;
    if (it->second.size() != 1) throw ConfigError(key(name), "expected a number");
    return it->second[0];
  }

  Point vector(const std::string& name, const Point& fallback, int dim) {
    used_.insert(name);
    auto it = p_.find(name);
    if (it == p_.end()) return fallback;
    if (it->second.size() != static_cast<std::size_t>(dim))
      throw ConfigError(key(name), "expected " + std::to_string(dim) + " numbers");
    Point v{};
    for (int k = 0; k < dim; ++k) v[k] = it->second[k];
    return v;
  }

  void reject_unused() const {
    for (const auto& [name, _] : p_)
      if (!used_.count(name)) throw ConfigError(key(name), "unknown parameter for " + preset_);
  }

  std::string key(const std::string& name) const { return "init.params." + name; }

 private:
  const PresetParams& p_;
  std::string preset_;
  std::set<std::string> used_;
};

inline Point domain_center(const DomainGrid& g) {
  Point c{};
  for (int k = 0; k < g.dim(); ++k) c[k] = 0.5 * g.lengths()[k];
  return c;
}

inline int positive_int(ParamReader& r, const std::string& name, double fallback) {
  const double x = r.scalar(name, fallback);
  if (!(x >= 1.0) || x != std::floor(x) || x > 1e6)
    throw ConfigError(r.key(name), "must be a positive integer");
  return static_cast<int>(x);
}

// Adds amp * sum_t c_t cos(pi k_t.x / L + phase_t) per component, with
// c_t uniform in [-1, 1] / (t + 1) and integer wave numbers k in [0, modes].
inline void add_random_smooth(Field& f, const DomainGrid& grid, PortableRng& rng, double amp,
                              int modes) {
  const double pi = std::numbers::pi;
  for (int c = 0; c < f.components(); ++c)
    for (int t = 0; t < modes; ++t) {
      const double coef = rng.uniform(-1.0, 1.0) / (t + 1);
      Point k{};
      for (int ax = 0; ax < grid.dim(); ++ax)
        k[ax] = std::floor(rng.uniform() * (modes + 1.0)) / grid.lengths()[ax];
      const double phase = rng.uniform(0.0, 2.0 * pi);
      if (amp == 0.0) continue;
      for (std::size_t p = 0; p < grid.size(); ++p) {
        double arg = phase;
        for (int ax = 0; ax < grid.dim(); ++ax) arg += pi * k[ax] * grid.point(p)[ax];
        f(p, c) += amp * coef * std::cos(arg);
      }
    }
}

}  // namespace detail

/// Initial state from a preset. Fixed-face cells are pinned afterwards.
inline State initial_state(const DomainGrid& grid, const InitSpec& init) {
  const int dim = grid.dim();
  State s{Field(grid, dim), Field(grid, dim), 0.0};
  detail::ParamReader r(init.params, init.preset);
  const double pi = std::numbers::pi;

  if (init.preset == "standing_wave") {
    // Mode along x mapped onto [first, last] cell center so it vanishes on pinned cells.
    const double a = r.scalar("amplitude", 0.01);
    const int mode = detail::positive_int(r, "mode", 1.0);
    const double x0 = grid.point(0)[0];
    const double x1 = grid.lengths()[0] - x0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double xi = (grid.point(p)[0] - x0) / (x1 - x0);
      s.u(p, 0) = a * std::sin(mode * pi * xi);
    }
  } else if (init.preset == "gaussian_pulse") {
    const double a = r.scalar("amplitude", 0.01);
    const double w = r.scalar("width", 0.1);
    if (!(w > 0.0)) throw ConfigError(r.key("width"), "must be > 0");
    const Point x0 = r.vector("center", detail::domain_center(grid), dim);
    Point ex{};
    ex[0] = 1.0;
    const Point dir = r.vector("direction", ex, dim);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double d = distance(grid.point(p), x0);
      const double amp = a * std::exp(-d * d / (w * w));
      for (int c = 0; c < dim; ++c) s.v(p, c) = amp * dir[c];
    }
  } else if (init.preset == "rigid_translation") {
    Point def{};
    def[0] = 0.01;
    const Point vel = r.vector("velocity", def, dim);
    for (std::size_t p = 0; p < grid.size(); ++p)
      for (int c = 0; c < dim; ++c) s.v(p, c) = vel[c];
  } else if (init.preset == "rigid_rotation") {
    if (dim < 2) throw ConfigError("init.preset", "rigid_rotation needs dim >= 2");
    const double omega = r.scalar("omega", 0.01);
    const Point c0 = r.vector("center", detail::domain_center(grid), dim);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const Point& x = grid.point(p);
      s.v(p, 0) = -omega * (x[1] - c0[1]);
      s.v(p, 1) = omega * (x[0] - c0[0]);
    }
    // Optional seeded smooth velocity on top of the rotation; u stays 0 so the
    // data remain traction free.
    const double pert = r.scalar("perturbation", 0.0);
    const int modes = detail::positive_int(r, "modes", 4.0);
    PortableRng rng(init.seed);
    if (pert != 0.0) detail::add_random_smooth(s.v, grid, rng, pert, modes);
  } else if (init.preset == "random_smooth") {
    const double a = r.scalar("amplitude", 0.01);
    const double va = r.scalar("velocity_amplitude", 0.0);
    const int modes = detail::positive_int(r, "modes", 4.0);
    PortableRng rng(init.seed);
    detail::add_random_smooth(s.u, grid, rng, a, modes);
    detail::add_random_smooth(s.v, grid, rng, va, modes);
  } else {
    throw ConfigError("init.preset", "unknown preset '" + init.preset + "'");
  }
  r.reject_unused();
  apply_boundary(s, grid);
  return s;
}

}  // namespace nlnoether
