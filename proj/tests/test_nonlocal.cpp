#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "nlnoether/nonlocal.hpp"

using namespace nlnoether;
using Catch::Approx;

namespace {

Field random_field(const DomainGrid& g, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  Field f(g, d);
  for (std::size_t p = 0; p < g.size(); ++p)
    for (int c = 0; c < d; ++c) f(p, c) = n01(rng);
  return f;
}

// Direct double loop with kernels evaluated from scratch for every pair.
Field brute_argument(const DomainGrid& g, const KernelSpec& k, const Field& ref, const Field& f, Weight w) {
  Field out(g, f.components());
  for (std::size_t p = 0; p < g.size(); ++p)
    for (std::size_t q = 0; q < g.size(); ++q) {
      double s = 0.0;
      for (int c = 0; c < ref.components(); ++c) s += (ref(p, c) - ref(q, c)) * (ref(p, c) - ref(q, c));
      const double W = eval_weight(k, w, g.point(p), g.point(q), std::sqrt(s));
      for (int c = 0; c < f.components(); ++c) out(p, c) += g.weight(q) * W * (f(p, c) - f(q, c));
    }
  return out;
}

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

std::vector<KernelSpec> kernels() {
  return {KernelSpec::constant(0.9), KernelSpec::exponential(1.0, 0.2),
          KernelSpec::exponential_modulated(2.0, 0.3, 4.0), KernelSpec::gaussian(1.5, 0.25)};
}

}  // namespace

TEST_CASE("constant field has zero nonlocal argument") {
  const DomainGrid g = build_grid(2, {6, 5}, {1.0, 1.0});
  const Field ref = random_field(g, 2, 1);
  for (const auto& k : kernels()) {
    const NonlocalContext ctx(g, k, ref);
    for (Weight w : {Weight::h, Weight::g, Weight::kappa})
      CHECK(nonlocal_argument(ctx, Field(g, 2, 3.7), w).max_abs() == 0.0);
  }
}

TEST_CASE("constant kernel 1/V gives f minus its mean") {
  const DomainGrid g = build_grid(1, {10}, {2.0});
  const Field f = random_field(g, 1, 4);
  const NonlocalContext ctx(g, KernelSpec::constant(1.0 / g.volume()), f);
  const double mean = integrate(f, g)[0] / g.volume();
  const Field a = nonlocal_argument(ctx, f);
  for (std::size_t p = 0; p < g.size(); ++p) CHECK(a(p, 0) == Approx(f(p, 0) - mean).margin(1e-14));
}

TEST_CASE("two-point hand calculation") {
  const DomainGrid g = build_grid(1, {2}, {1.0});
  Field f(g, 1);
  f(0, 0) = 3.0;
  f(1, 0) = -1.0;
  const NonlocalContext ctx(g, KernelSpec::constant(1.0), f);
  const Field a = nonlocal_argument(ctx, f);
  CHECK(a(0, 0) == 2.0);
  CHECK(a(1, 0) == -2.0);
  CHECK(double_integral_hru(ctx, f) == -0.25 * 16.0);
}

TEST_CASE("operators agree with a brute-force double loop") {
  for (int dim = 1; dim <= 2; ++dim) {
    const DomainGrid g = dim == 1 ? build_grid(1, {8}, {1.0}) : build_grid(2, {3, 3}, {1.0, 0.7});
    for (const auto& k : kernels()) {
      const Field ref = random_field(g, dim, 7);
      const Field f = random_field(g, dim, 8);
      const NonlocalContext ctx(g, k, ref);
      for (Weight w : {Weight::h, Weight::g, Weight::kappa}) {
        const Field expect = brute_argument(g, k, ref, f, w);
        CHECK(max_diff(nonlocal_argument(ctx, f, w), expect) <= 1e-14 * (1.0 + expect.max_abs()));
      }
      CHECK(max_diff(weighted_traction(ctx, f), brute_argument(g, k, ref, f, Weight::g)) <= 1e-13);
    }
  }
}

TEST_CASE("tabulated and direct kernel paths agree") {
  const DomainGrid g = build_grid(1, {12}, {1.0});
  const Field ref = random_field(g, 1, 3), f = random_field(g, 1, 4);
  const KernelSpec tab = KernelSpec::exponential_modulated(1.5, 0.3, 2.0);
  const KernelSpec direct = KernelSpec::custom(
      [](const Point& x, const Point& y, double s) { return 1.5 * std::exp(-distance(x, y) / 0.3) * (1 + 2 * s * s); },
      [](const Point& x, const Point& y, double s) { return 1.5 * std::exp(-distance(x, y) / 0.3) * 4 * s; });
  const NonlocalContext a(g, tab, ref), b(g, direct, ref);
  for (Weight w : {Weight::h, Weight::g, Weight::kappa})
    CHECK(max_diff(nonlocal_argument(a, f, w), nonlocal_argument(b, f, w)) <= 1e-13);
  const NonlocalContext r = a.rebind(f);
  CHECK(max_diff(nonlocal_argument(r, ref, Weight::g), nonlocal_argument(b.rebind(f), ref, Weight::g)) <= 1e-13);
}

TEST_CASE("weighted_sum is the plain weighted sum") {
  const DomainGrid g = build_grid(1, {5}, {1.0});
  const Field f = random_field(g, 1, 9);
  const KernelSpec k = KernelSpec::gaussian(1.0, 0.4);
  const NonlocalContext ctx(g, k, f);
  const Field s = weighted_sum(ctx, f, Weight::h);
  for (std::size_t p = 0; p < g.size(); ++p) {
    double e = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) e += g.weight(q) * eval_h(k, g.point(p), g.point(q), 0.0) * f(q, 0);
    CHECK(s(p, 0) == Approx(e).epsilon(1e-14));
  }
}

TEST_CASE("weighted traction") {
  const DomainGrid g = build_grid(1, {3}, {1.0});
  const KernelSpec k = KernelSpec::exponential_modulated(1.0, 0.5, 2.0);
  Field ref(g, 1), psi(g, 1);
  ref(0, 0) = 0.1; ref(1, 0) = -0.4; ref(2, 0) = 0.3;
  psi(0, 0) = 1.0; psi(1, 0) = 2.0; psi(2, 0) = -1.0;
  const NonlocalContext ctx(g, k, ref);
  SECTION("three-point oracle") {
    const Field t = weighted_traction(ctx, psi);
    for (std::size_t p = 0; p < 3; ++p) {
      double e = 0.0;
      for (std::size_t q = 0; q < 3; ++q) {
        const double s = std::abs(ref(p, 0) - ref(q, 0));
        const double base = std::exp(-std::abs(g.point(p)[0] - g.point(q)[0]) / 0.5);
        e += (1.0 / 3.0) * base * (1.0 + 3.0 * 2.0 * s * s) * (psi(p, 0) - psi(q, 0));
      }
      CHECK(t(p, 0) == Approx(e).epsilon(1e-14));
    }
  }
  SECTION("constant psi gives zero") { CHECK(weighted_traction(ctx, Field(g, 1, 4.0)).max_abs() == 0.0); }
  SECTION("integrates to zero") { CHECK(std::abs(integrate(weighted_traction(ctx, psi), g)[0]) <= 1e-15); }
}

TEST_CASE("zero_mean_gap") {
  const DomainGrid g = build_grid(1, {16}, {1.0});
  const Field f = random_field(g, 1, 21);
  SECTION("symmetric kernels") {
    for (const auto& k : kernels()) {
      const NonlocalContext ctx(g, k, f);
      for (Weight w : {Weight::h, Weight::g, Weight::kappa}) CHECK(zero_mean_gap(ctx, f, w) <= 1e-12);
    }
  }
  SECTION("zero field") {
    const NonlocalContext ctx(g, KernelSpec::exponential(1.0, 0.2), f);
    CHECK(zero_mean_gap(ctx, Field(g, 1)) == 0.0);
  }
  SECTION("asymmetric h(x, y) = x_1 breaks the cancellation") {
    const KernelSpec k = KernelSpec::custom([](const Point& x, const Point&, double) { return x[0]; });
    const Field x = coordinates(g);
    const NonlocalContext ctx(g, k, x);
    double total = 0.0, norm = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
      norm += g.weight(p) * std::abs(x(p, 0));
      for (std::size_t q = 0; q < g.size(); ++q)
        total += g.weight(p) * g.weight(q) * x(p, 0) * (x(p, 0) - x(q, 0));
    }
    CHECK(total > 0.0);
    CHECK(zero_mean_gap(ctx, x) == Approx(total / (1.0 + norm)).epsilon(1e-12));
  }
}

TEST_CASE("interchange_gap") {
  const DomainGrid g = build_grid(1, {5}, {1.0});
  const Field psi = random_field(g, 1, 31), phi = random_field(g, 1, 32);
  for (const auto& k : kernels()) {
    const NonlocalContext ctx(g, k, random_field(g, 1, 33));
    SECTION("both sides against brute force: " + std::string(to_string(k.family))) {
      const Field hphi = brute_argument(g, k, ctx.reference(), phi, Weight::h);
      const Field hpsi = brute_argument(g, k, ctx.reference(), psi, Weight::h);
      double a = 0.0, b = 0.0;
      for (std::size_t p = 0; p < g.size(); ++p) {
        a += g.weight(p) * psi(p, 0) * hphi(p, 0);
        b += g.weight(p) * phi(p, 0) * hpsi(p, 0);
      }
      CHECK(a == Approx(b).epsilon(1e-13));
      CHECK(interchange_gap(ctx, psi, phi) <= 1e-12 * (1.0 + std::abs(a)));
      CHECK(interchange_gap(ctx, psi, psi) == 0.0);
      CHECK(interchange_gap(ctx, psi, Field(g, 1, 2.0)) <= 1e-15);
    }
  }
  const NonlocalContext ctx(g, KernelSpec::constant(1.0), psi);
  CHECK_THROWS_AS(interchange_gap(ctx, Field(g, 2), phi), std::invalid_argument);
}

TEST_CASE("variation identity") {
  const DomainGrid g = build_grid(1, {16}, {1.0});
  const Field phi = random_field(g, 1, 41), dphi = random_field(g, 1, 42);
  SECTION("s-independent kernel: the difference quotient is exact") {
    const NonlocalContext ctx(g, KernelSpec::exponential(1.0, 0.2), phi);
    CHECK(variation_identity_gap(ctx, phi, dphi, 1e-3) <= 1e-12);
  }
  SECTION("s-dependent kernel: second order in eps") {
    const NonlocalContext ctx(g, KernelSpec::exponential_modulated(1.0, 0.2, 0.5), phi);
    const double e1 = variation_identity_gap(ctx, phi, dphi, 1e-2);
    const double e2 = variation_identity_gap(ctx, phi, dphi, 5e-3);
    CHECK(e1 > 0.0);
    CHECK(e1 / e2 == Approx(4.0).margin(0.5));
  }
  SECTION("zero variation") {
    const NonlocalContext ctx(g, KernelSpec::exponential_modulated(1.0, 0.2, 0.5), phi);
    CHECK(variation_identity_gap(ctx, phi, Field(g, 1), 1e-3) == 0.0);
  }
  SECTION("eps must be positive") {
    const NonlocalContext ctx(g, KernelSpec::constant(1.0), phi);
    CHECK_THROWS_AS(variation_identity_gap(ctx, phi, dphi, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(variation_identity_gap(ctx, phi, dphi, -1e-3), std::invalid_argument);
  }
}

TEST_CASE("double integral of h r u equals minus the nonlocal energy form") {
  const DomainGrid g = build_grid(2, {4, 3}, {1.0, 1.0});
  const Field u = random_field(g, 2, 51);
  for (const auto& k : kernels()) {
    const NonlocalContext ctx(g, k, u);
    // First-form double loop, kernel evaluated from scratch.
    double direct = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q)
      for (std::size_t p = 0; p < g.size(); ++p) {
        const double s = pair_separation(u, p, q);
        const double h = eval_h(k, g.point(p), g.point(q), s);
        for (int c = 0; c < 2; ++c) direct += g.weight(q) * g.weight(p) * h * (u(p, c) - u(q, c)) * u(q, c);
      }
    const double value = double_integral_hru(ctx, u);
    CHECK(value == Approx(direct).epsilon(1e-13));
    const Field hu = nonlocal_argument(ctx, u);
    double energy_form = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p)
      for (int c = 0; c < 2; ++c) energy_form += g.weight(p) * u(p, c) * hu(p, c);
    CHECK(value == Approx(-energy_form).epsilon(1e-13));
    if (k.amplitude > 0.0) CHECK(value < 0.0);
    CHECK(double_integral_hru(ctx, Field(g, 2, 1.5)) == 0.0);
  }
}

TEST_CASE("nonlocal argument is linear in f") {
  const DomainGrid g = build_grid(1, {20}, {1.0});
  const Field ref = random_field(g, 1, 61), a = random_field(g, 1, 62), b = random_field(g, 1, 63);
  const NonlocalContext ctx(g, KernelSpec::exponential_modulated(1.0, 0.2, 2.0), ref);
  const double al = 1.7, be = -0.3;
  for (Weight w : {Weight::h, Weight::g, Weight::kappa}) {
    const Field lhs = nonlocal_argument(ctx, al * a + be * b, w);
    const Field rhs = al * nonlocal_argument(ctx, a, w) + be * nonlocal_argument(ctx, b, w);
    CHECK(max_diff(lhs, rhs) <= 1e-13);
  }
}

TEST_CASE("cutoff drops distant pairs") {
  const DomainGrid g = build_grid(1, {10}, {1.0});
  const Field f = random_field(g, 1, 71);
  const KernelSpec k = KernelSpec::exponential(1.0, 0.1);
  const NonlocalContext ctx(g, k, f, 2.0);
  const Field a = nonlocal_argument(ctx, f);
  for (std::size_t p = 0; p < g.size(); ++p) {
    double e = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) {
      const double d = distance(g.point(p), g.point(q));
      if (d > 0.2) continue;
      e += g.weight(q) * std::exp(-d / 0.1) * (f(p, 0) - f(q, 0));
    }
    CHECK(a(p, 0) == Approx(e).margin(1e-15));
  }
  CHECK_THROWS_AS(NonlocalContext(g, k, f, 0.0), std::invalid_argument);
}
