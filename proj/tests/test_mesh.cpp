#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>

#include "nlnoether/mesh.hpp"

using namespace nlnoether;
using Catch::Approx;

namespace {

double max_error(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

}  // namespace

TEST_CASE("uniform 1D grid has cell-centered points") {
  const DomainGrid g = build_grid(1, {4}, {1.0});
  REQUIRE(g.size() == 4);
  const double expect[] = {0.125, 0.375, 0.625, 0.875};
  for (std::size_t p = 0; p < 4; ++p) {
    CHECK(g.point(p)[0] == expect[p]);
    CHECK(g.weight(p) == 0.25);
  }
  CHECK(g.boundary_faces().size() == 2);
}

TEST_CASE("unit square with 2x2 cells") {
  const DomainGrid g = build_grid(2, {2, 2}, {1.0, 1.0});
  REQUIRE(g.size() == 4);
  for (double w : g.weights()) CHECK(w == 0.25);
  REQUIRE(g.boundary_faces().size() == 8);
  double area = 0.0;
  for (const auto& f : g.boundary_faces()) {
    CHECK(f.area == 0.5);
    area += f.area;
  }
  CHECK(area == 4.0);
}

TEST_CASE("grid invariants over a range of shapes") {
  for (int dim = 1; dim <= 3; ++dim)
    for (int n : {2, 3, 7}) {
      std::vector<int> counts(dim);
      std::vector<double> lengths(dim);
      for (int k = 0; k < dim; ++k) {
        counts[k] = n + k;
        lengths[k] = 0.7 + 0.45 * k;
      }
      std::set<FaceLabel> fixed{FaceLabel::x_min};
      const DomainGrid g = build_grid(dim, counts, lengths, fixed);
      double vol = 1.0, perimeter = 0.0;
      for (int k = 0; k < dim; ++k) vol *= lengths[k];
      for (int k = 0; k < dim; ++k) {
        double a = 2.0;
        for (int m = 0; m < dim; ++m)
          if (m != k) a *= lengths[m];
        perimeter += a;
      }
      double wsum = 0.0;
      for (double w : g.weights()) wsum += w;
      CHECK(wsum == Approx(vol).epsilon(1e-13));
      CHECK(g.volume() == Approx(vol).epsilon(1e-15));

      double fsum = 0.0;
      std::vector<bool> on_boundary(g.size(), false);
      for (const auto& f : g.boundary_faces()) {
        fsum += f.area;
        on_boundary[f.cell] = true;
        double nn = 0.0;
        for (double x : f.normal) nn += x * x;
        CHECK(nn == 1.0);
        CHECK(f.normal[f.axis] == f.sign);
        CHECK(f.dirichlet == (f.label == FaceLabel::x_min));
      }
      CHECK(fsum == Approx(perimeter).epsilon(1e-13));

      for (std::size_t p = 0; p < g.size(); ++p) {
        const auto ijk = g.multi_index(p);
        CHECK(g.index(ijk) == p);
        for (int k = 0; k < dim; ++k)
          CHECK(g.point(p)[k] == Approx((ijk[k] + 0.5) * lengths[k] / counts[k]).epsilon(1e-15));
        if (g.dirichlet_mask()[p]) {
          CHECK(on_boundary[p]);
          CHECK(ijk[0] == 0);
        }
      }
    }
}

TEST_CASE("build_grid rejects invalid arguments") {
  CHECK_THROWS_AS(build_grid(0, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(4, {2, 2, 2, 2}, {1, 1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1, {0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1, {-3}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1, {1}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1, {4}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1, {4}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(2, {4}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(1, {4}, {1.0}, {FaceLabel::y_min}), std::invalid_argument);
}

TEST_CASE("face labels round-trip through text") {
  for (FaceLabel f : kAllFaces) CHECK(parse_face_label(to_string(f)) == f);
  CHECK_FALSE(parse_face_label("x_min").has_value());
}

TEST_CASE("field arithmetic requires matching grid and components") {
  const DomainGrid g = build_grid(1, {4}, {1.0});
  const DomainGrid h = build_grid(1, {4}, {1.0});
  Field a(g, 1, 2.0), b(g, 1, 3.0), c(h, 1, 1.0), d(g, 2, 1.0);
  CHECK((a + b)(0, 0) == 5.0);
  CHECK((a - b)(3, 0) == -1.0);
  CHECK((2.0 * a)(1, 0) == 4.0);
  CHECK(a.dot(b) == 24.0);
  CHECK_THROWS_AS(a + c, std::invalid_argument);
  CHECK_THROWS_AS(a - d, std::invalid_argument);
  CHECK_THROWS_AS(a.dot(c), std::invalid_argument);
  CHECK(a.values().size() == 4);
  CHECK(d.values().size() == 8);
  CHECK_THROWS_AS(Field(g, 0), std::invalid_argument);
}

TEST_CASE("integrate") {
  const DomainGrid g = build_grid(1, {64}, {1.0});
  SECTION("constant") { CHECK(integrate(Field(g, 1, 1.0), g)[0] == Approx(1.0).epsilon(1e-15)); }
  SECTION("affine is exact") {
    const Field f = coordinates(g);
    CHECK(integrate(f, g)[0] == Approx(0.5).epsilon(1e-15));
  }
  SECTION("quadratic against the analytic value") {
    const Field f = Field::from_function(g, 1, [](const Point& x) { return x[0] * x[0]; });
    CHECK(std::abs(integrate(f, g)[0] - 1.0 / 3.0) <= 1e-4);
  }
  SECTION("per component") {
    const Field f = Field::from_function(g, 2, [](const Point& x) {
      return std::array<double, 2>{1.0, 2.0 * x[0]};
    });
    const auto v = integrate(f, g);
    CHECK(v[0] == Approx(1.0));
    CHECK(v[1] == Approx(1.0));
  }
  SECTION("grid mismatch") {
    const DomainGrid other = build_grid(1, {64}, {1.0});
    CHECK_THROWS_AS(integrate(Field(other, 1), g), std::invalid_argument);
  }
}

TEST_CASE("boundary_integrate") {
  SECTION("perimeter of the unit square") {
    const DomainGrid g = build_grid(2, {5, 7}, {1.0, 1.0});
    CHECK(boundary_integrate(g, [](const BoundaryFace&) { return 1.0; })[0] == Approx(4.0));
  }
  SECTION("end normals of an interval cancel") {
    const DomainGrid g = build_grid(1, {9}, {1.0});
    CHECK(boundary_integrate(g, [](const BoundaryFace& f) { return f.normal[0]; })[0] == 0.0);
  }
  SECTION("vector integrand") {
    const DomainGrid g = build_grid(2, {4, 4}, {2.0, 1.0});
    const auto v = boundary_integrate(g, [](const BoundaryFace& f) {
      return std::vector<double>{f.normal[0] * f.normal[0], f.normal[1] * f.normal[1]};
    });
    CHECK(v[0] == Approx(2.0));
    CHECK(v[1] == Approx(4.0));
  }
}

TEST_CASE("face traces") {
  const DomainGrid g = build_grid(2, {6, 5}, {1.0, 2.0}, {FaceLabel::y_max});
  const Field f = Field::from_function(g, 1, [](const Point& x) { return 1.0 + 2.0 * x[0] - 3.0 * x[1]; });
  for (const auto& face : g.boundary_faces()) {
    const double tr = face_value(f, face)[0];
    if (face.dirichlet) {
      CHECK(tr == f(face.cell, 0));
    } else {
      CHECK(tr == Approx(1.0 + 2.0 * face.center[0] - 3.0 * face.center[1]).epsilon(1e-13).margin(1e-14));
    }
  }
}

TEST_CASE("gradient") {
  SECTION("affine field is differentiated exactly") {
    const DomainGrid g = build_grid(2, {5, 4}, {1.0, 0.5});
    const Field u = Field::from_function(g, 2, [](const Point& x) {
      return std::array<double, 2>{2.0 * x[0] - x[1], 0.5 + 3.0 * x[1]};
    });
    const Field G = gradient(u, g);
    REQUIRE(G.components() == 4);
    for (std::size_t p = 0; p < g.size(); ++p) {
      CHECK(G(p, 0) == Approx(2.0).epsilon(1e-12));
      CHECK(G(p, 1) == Approx(-1.0).epsilon(1e-12));
      CHECK(std::abs(G(p, 2)) <= 1e-12);
      CHECK(G(p, 3) == Approx(3.0).epsilon(1e-12));
    }
  }
  SECTION("constant field gives exact zero") {
    const DomainGrid g = build_grid(3, {3, 4, 3}, {1.0, 1.0, 1.0});
    const Field G = gradient(Field(g, 3, 0.7), g);
    CHECK(G.max_abs() == 0.0);
  }
  SECTION("second order for sin(pi x)") {
    double prev = 0.0;
    for (int n : {16, 32, 64, 128}) {
      const DomainGrid g = build_grid(1, {n}, {1.0});
      const double pi = std::numbers::pi;
      const Field u = Field::from_function(g, 1, [&](const Point& x) { return std::sin(pi * x[0]); });
      const Field d = Field::from_function(g, 1, [&](const Point& x) { return pi * std::cos(pi * x[0]); });
      const double err = max_error(gradient(u, g), d);
      if (prev > 0.0) CHECK(prev / err == Approx(4.0).margin(0.5));
      prev = err;
    }
  }
  SECTION("needs three points per axis") {
    const DomainGrid g = build_grid(2, {4, 2}, {1.0, 1.0});
    CHECK_THROWS_AS(gradient(Field(g, 1), g), std::invalid_argument);
  }
}

TEST_CASE("divergence") {
  SECTION("constant tensor") {
    const DomainGrid g = build_grid(2, {5, 5}, {1.0, 1.0});
    CHECK(divergence(Field(g, 4, 1.3), g).max_abs() == 0.0);
  }
  SECTION("constant stress from a linear displacement") {
    const DomainGrid g = build_grid(1, {10}, {1.0});
    const Field u = Field::from_function(g, 1, [](const Point& x) { return 0.4 * x[0]; });
    const Field T = 2.5 * gradient(u, g);
    CHECK(divergence(T, g).max_abs() <= 1e-12);
  }
  SECTION("T_xx = x^2 gives 2x to second order") {
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
      const DomainGrid g = build_grid(1, {n}, {1.0});
      const Field T = Field::from_function(g, 1, [](const Point& x) { return x[0] * x[0]; });
      const Field d = Field::from_function(g, 1, [](const Point& x) { return 2.0 * x[0]; });
      const double err = max_error(divergence(T, g), d);
      CHECK(err <= 1e-12);  // quadratic: both stencils are exact
      prev = err;
    }
    (void)prev;
  }
  SECTION("T_xx = sin x, T_yy = cos y: error shrinks fourfold") {
    double prev = 0.0;
    for (int n : {16, 32, 64}) {
      const DomainGrid g = build_grid(2, {n, n}, {1.0, 1.0});
      const Field T = Field::from_function(g, 4, [](const Point& x) {
        return std::array<double, 4>{std::sin(3 * x[0]), 0.0, 0.0, std::cos(2 * x[1])};
      });
      const Field d = Field::from_function(g, 2, [](const Point& x) {
        return std::array<double, 2>{3 * std::cos(3 * x[0]), -2 * std::sin(2 * x[1])};
      });
      const double err = max_error(divergence(T, g), d);
      if (prev > 0.0) CHECK(prev / err == Approx(4.0).margin(0.6));
      prev = err;
    }
  }
  SECTION("component count must be a multiple of dim") {
    const DomainGrid g = build_grid(2, {4, 4}, {1.0, 1.0});
    CHECK_THROWS_AS(divergence(Field(g, 3), g), std::invalid_argument);
  }
}

TEST_CASE("discrete divergence theorem converges at second order") {
  std::vector<double> gaps;
  for (int n : {8, 16, 32, 64}) {
    const DomainGrid g = build_grid(2, {n, n}, {1.0, 1.0});
    // One row of a smooth tensor field, non-polynomial.
    const Field T = Field::from_function(g, 2, [](const Point& x) {
      return std::array<double, 2>{std::exp(x[0]) * std::sin(x[1] + 0.3), std::cos(2 * x[0] * x[1])};
    });
    const double bulk = integrate(divergence(T, g), g)[0];
    const double flux = boundary_integrate(g, [&](const BoundaryFace& f) {
      return f.sign * face_value(T, f)[f.axis];
    })[0];
    gaps.push_back(std::abs(bulk - flux));
  }
  for (std::size_t i = 1; i < gaps.size(); ++i) CHECK(gaps[i - 1] / gaps[i] >= 3.0);
}

TEST_CASE("gradient and divergence are linear") {
  const DomainGrid g = build_grid(2, {6, 5}, {1.0, 1.3});
  const Field a = Field::from_function(g, 2, [](const Point& x) {
    return std::array<double, 2>{std::sin(x[0]) * x[1], x[0] * x[0]};
  });
  const Field b = Field::from_function(g, 2, [](const Point& x) {
    return std::array<double, 2>{std::cos(x[1]), std::exp(x[0] - x[1])};
  });
  const double al = 0.7, be = -1.9;
  const Field lhs = gradient(al * a + be * b, g);
  const Field rhs = al * gradient(a, g) + be * gradient(b, g);
  CHECK(max_error(lhs, rhs) <= 1e-12);
  const Field T = gradient(a, g), S = gradient(b, g);
  CHECK(max_error(divergence(al * T + be * S, g), al * divergence(T, g) + be * divergence(S, g)) <= 1e-11);
}
