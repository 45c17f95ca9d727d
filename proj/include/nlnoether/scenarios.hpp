#pragma once

// Built-in scenarios used by the check suites and shipped as JSON files.

#include <cmath>

#include "dynamics.hpp"

namespace nlnoether::scenarios {

inline ScenarioConfig rod(int n) {
  ScenarioConfig c;
  c.dim = 1;
  c.counts = {n};
  c.lengths = {1.0};
  c.material = MaterialModel::uniaxial(1.0, 1.0);
  c.kernel = KernelSpec::exponential(1.0, 0.1);
  return c;
}

inline ScenarioConfig plate(int n) {
  ScenarioConfig c;
  c.dim = 2;
  c.counts = {n, n};
  c.lengths = {1.0, 1.0};
  c.material = MaterialModel::lame(1.0, 1.0, 1.0);
  c.kernel = KernelSpec::exponential(1.0, 0.2);
  return c;
}

/// Free-free rod, velocity pulse centered in the rod.
inline ScenarioConfig free_pulse(int n = 64, std::size_t steps = 2000, std::size_t sample_every = 1) {
  ScenarioConfig c = rod(n);
  c.init.preset = "gaussian_pulse";
  c.init.params = {{"amplitude", {0.01}}, {"width", {0.1}}};
  c.dt = stability_bound(c);
  c.steps = steps;
  c.sample_every = sample_every;
  return c;
}

/// Fixed-fixed rod, first mode released from rest.
inline ScenarioConfig fixed_standing_wave(int n = 64, double dt_factor = 1.0,
                                          std::size_t steps = 10000, std::size_t sample_every = 1) {
  ScenarioConfig c = rod(n);
  c.fixed_faces = {FaceLabel::x_min, FaceLabel::x_max};
  c.init.preset = "standing_wave";
  c.init.params = {{"amplitude", {0.01}}, {"mode", {1.0}}};
  c.dt = dt_factor * stability_bound(c);
  c.steps = steps;
  c.sample_every = sample_every;
  return c;
}

inline ScenarioConfig rigid_translation(int dim = 1, std::size_t steps = 200) {
  ScenarioConfig c = dim == 1 ? rod(32) : plate(12);
  c.init.preset = "rigid_translation";
  c.init.params = {{"velocity", std::vector<double>(static_cast<std::size_t>(dim), 0.01)}};
  c.dt = stability_bound(c);
  c.steps = steps;
  c.sample_every = 10;
  return c;
}

/// Free plate spun about its center plus a seeded smooth velocity, central mode.
inline ScenarioConfig rotation_central(int n = 16, double T = 0.5) {
  ScenarioConfig c = plate(n);
  c.kernel.central = true;
  c.init.preset = "rigid_rotation";
  c.init.params = {{"omega", {0.1}}, {"perturbation", {0.01}}};
  c.init.seed = 7;
  c.dt = stability_bound(c);
  c.steps = static_cast<std::size_t>(std::lround(T / c.dt));
  c.sample_every = 1;
  return c;
}

/// Non-central plate with a seeded smooth displacement: angular residual not zero-mean.
inline ScenarioConfig demo_angular_noncentral() {
  ScenarioConfig c = plate(16);
  c.init.preset = "random_smooth";
  c.init.params = {{"amplitude", {0.01}}, {"velocity_amplitude", {0.01}}, {"modes", {4.0}}};
  c.init.seed = 5;
  c.dt = stability_bound(c);
  c.steps = 100;
  c.sample_every = 20;
  return c;
}

/// Rod with an s-dependent kernel and seeded smooth data: Eshelby residual not zero-mean.
inline ScenarioConfig demo_eshelby() {
  ScenarioConfig c = rod(64);
  c.kernel = KernelSpec::exponential_modulated(5.0, 0.2, 10.0);
  c.init.preset = "random_smooth";
  c.init.params = {{"amplitude", {0.01}}, {"velocity_amplitude", {0.01}}, {"modes", {4.0}}};
  c.init.seed = 3;
  c.dt = stability_bound(c);
  c.steps = 200;
  c.sample_every = 50;
  return c;
}

/// Free rod for the pointwise balance checks: smooth, traction-free data, short horizon.
inline ScenarioConfig localization_pulse(int n, double T = 0.15) {
  ScenarioConfig c = rod(n);
  c.kernel = KernelSpec::gaussian(5.0, 0.1);
  c.init.preset = "gaussian_pulse";
  c.init.params = {{"amplitude", {0.01}}, {"width", {0.1}}};
  c.dt = stability_bound(c);
  c.steps = static_cast<std::size_t>(std::lround(T / c.dt));
  c.sample_every = 1;
  return c;
}

}  // namespace nlnoether::scenarios
