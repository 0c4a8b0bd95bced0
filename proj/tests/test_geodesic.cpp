#include "gmc/geodesic.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace gmc;
using gmc::testing::random_point;

namespace {

PhaseStated random_state(const ManifoldSpec& m, Rng& rng, double speed = 1.0) {
  PhaseStated s;
  s.q = random_point(m, rng);
  s.v = sample_tangent_gaussian(m, s.q, rng);
  s.v *= speed / s.v.norm();
  return s;
}

std::vector<ManifoldSpec> test_manifolds() {
  return {ManifoldSpec::sphere(1),     ManifoldSpec::sphere(2),     ManifoldSpec::sphere(4),
          ManifoldSpec::so3(),         ManifoldSpec::stiefel(1, 3), ManifoldSpec::stiefel(2, 4),
          ManifoldSpec::stiefel(2, 5), ManifoldSpec::stiefel(3, 5), ManifoldSpec::stiefel(3, 3)};
}

}  // namespace

TEST_CASE("quarter great circle") {
  const auto m = ManifoldSpec::sphere(1);
  const PhaseStated s{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, std::numbers::pi / 2)};
  const PhaseStated out = geodesic_flow(m, s, 1.0);
  CHECK((out.q - Eigen::Vector2d(0, 1)).norm() < 1e-15);
  CHECK((out.v - Eigen::Vector2d(-std::numbers::pi / 2, 0)).norm() < 1e-15);
}

TEST_CASE("zero velocity is stationary") {
  Rng rng(1);
  for (const auto& m : test_manifolds()) {
    PhaseStated s{random_point(m, rng), Eigen::VectorXd::Zero(m.ambient_dim())};
    const PhaseStated out = geodesic_flow(m, s, 3.7);
    CHECK((out.q - s.q).norm() < 1e-15);
    CHECK(out.v.norm() == 0.0);
  }
}

TEST_CASE("flows preserve constraint, tangency and speed") {
  Rng rng(2);
  for (const auto& m : test_manifolds()) {
    CAPTURE(m.name());
    for (int trial = 0; trial < 20; ++trial) {
      const PhaseStated s = random_state(m, rng, 0.5 + 2.0 * uniform01(rng));
      const double t = -3.0 + 6.0 * uniform01(rng);
      const PhaseStated out = geodesic_flow(m, s, t);
      CHECK(constraint_error(m, out.q) < (m.sphere_like() ? 1e-12 : 1e-10));
      CHECK(tangency_error(m, out.q, out.v) < 1e-10);
      CHECK(std::abs(out.v.norm() - s.v.norm()) < 1e-10);
    }
  }
}

TEST_CASE("flow composition and time reversal") {
  Rng rng(3);
  for (const auto& m : test_manifolds()) {
    CAPTURE(m.name());
    for (int trial = 0; trial < 10; ++trial) {
      const PhaseStated s = random_state(m, rng, 1.5);
      const double t1 = 0.7 * uniform01(rng), t2 = 1.3 * uniform01(rng);
      const PhaseStated once = geodesic_flow(m, s, t1 + t2);
      const PhaseStated twice = geodesic_flow(m, geodesic_flow(m, s, t1), t2);
      CHECK((once.q - twice.q).norm() < 1e-9);
      CHECK((once.v - twice.v).norm() < 1e-9);

      PhaseStated back = geodesic_flow(m, s, t1);
      back.v = -back.v;
      back = geodesic_flow(m, back, t1);
      CHECK((back.q - s.q).norm() < 1e-9);
      CHECK((back.v + s.v).norm() < 1e-9);
    }
  }
}

TEST_CASE("stiefel(2,4) closed form matches the RK4 oracle") {
  Rng rng(4);
  const auto m = ManifoldSpec::stiefel(2, 4);
  const PhaseStated s = random_state(m, rng, 1.0);
  const PhaseStated exact = geodesic_flow(m, s, 0.3);
  const PhaseStated ode = integrate_geodesic_ode(m, s, 0.3, 200);
  CHECK((exact.q - ode.q).norm() < 1e-6);
  CHECK((exact.v - ode.v).norm() < 1e-6);
}

TEST_CASE("closed form matches the ODE oracle on 100 random cases") {
  Rng rng(5);
  const auto manifolds = test_manifolds();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto& m = manifolds[static_cast<std::size_t>(trial) % manifolds.size()];
    const PhaseStated s = random_state(m, rng, 0.2 + 2.0 * uniform01(rng));
    const double t = 2.0 * uniform01(rng);
    const PhaseStated exact = geodesic_flow(m, s, t);
    const PhaseStated ode = integrate_geodesic_ode(m, s, t, 2000);
    worst = std::max({worst, (exact.q - ode.q).norm(), (exact.v - ode.v).norm()});
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("RK4 oracle reaches the known quarter-circle endpoint with order 4") {
  const auto m = ManifoldSpec::sphere(2);
  const PhaseStated s{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, std::numbers::pi / 2, 0)};
  const Eigen::Vector3d target(0, 1, 0);
  CHECK((integrate_geodesic_ode(m, s, 1.0, 1000).q - target).norm() < 1e-9);

  const double e1 = (integrate_geodesic_ode(m, s, 1.0, 20).q - target).norm();
  const double e2 = (integrate_geodesic_ode(m, s, 1.0, 40).q - target).norm();
  const double ratio = e1 / e2;
  CHECK(ratio > 13.0);
  CHECK(ratio < 19.0);

  const PhaseStated still{s.q, Eigen::Vector3d::Zero()};
  CHECK(integrate_geodesic_ode(m, still, 5.0, 10).q == still.q);
  CHECK_THROWS_AS(integrate_geodesic_ode(m, s, 1.0, 0), ParameterError);
}

TEST_CASE("drift before re-projection stays below 1e-12 per step") {
  Rng rng(6);
  for (const auto& m : {ManifoldSpec::sphere(3), ManifoldSpec::stiefel(2, 5), ManifoldSpec::stiefel(3, 4)}) {
    PhaseStated s = random_state(m, rng, 1.0);
    for (int step = 0; step < 200; ++step) {
      const PhaseStated raw = geodesic_flow_unprojected(m, s, 0.1);
      REQUIRE(constraint_error(m, raw.q) < 1e-12);
      s = retract(m, raw);
    }
  }
}

TEST_CASE("unsupported kinds raise rather than fall back") {
  const auto m = ManifoldSpec::barbell();
  const PhaseStated s{Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(1, 0, 0)};
  CHECK_THROWS_AS(geodesic_flow(m, s, 0.1), NotImplementedError);
  CHECK_THROWS_AS(integrate_geodesic_ode(m, s, 0.1, 10), NotImplementedError);
}

TEST_CASE("geodesic path evaluates to its start at time zero") {
  Rng rng(7);
  const auto m = ManifoldSpec::stiefel(2, 4);
  const PhaseStated s = random_state(m, rng);
  const GeodesicPath<double> path(m, s, 2.0);
  CHECK(path.at(0.0).q == s.q);
  CHECK(path.at(0.0).v == s.v);
  CHECK(path.positions(5).size() == 5);
}

TEST_CASE("interpolation on the circle") {
  const auto m = ManifoldSpec::sphere(1);
  const auto frames = geodesic_interpolate(m, Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), 3);
  REQUIRE(frames.size() == 3);
  CHECK(frames[0] == Eigen::VectorXd(Eigen::Vector2d(1, 0)));
  CHECK((frames[1] - Eigen::Vector2d(1, 1) / std::sqrt(2.0)).norm() < 1e-15);
  CHECK(frames[2] == Eigen::VectorXd(Eigen::Vector2d(0, 1)));
}

TEST_CASE("interpolating a point to itself is constant") {
  Rng rng(8);
  for (const auto& m : {ManifoldSpec::sphere(3), ManifoldSpec::stiefel(2, 5)}) {
    const Eigen::VectorXd a = random_point(m, rng);
    for (const auto& f : geodesic_interpolate(m, a, a, 4)) CHECK((f - a).norm() < 1e-15);
  }
}

TEST_CASE("antipodal endpoints are degenerate") {
  const auto m = ManifoldSpec::sphere(2);
  const Eigen::Vector3d a(0, 0, 1);
  CHECK_THROWS_AS(geodesic_interpolate(m, a, -a, 5), DegenerateGeodesicError);
  CHECK_THROWS_AS(geodesic_interpolate(m, a, Eigen::Vector3d(0, 1e-6, -1).normalized(), 5),
                  DegenerateGeodesicError);
  CHECK_NOTHROW(geodesic_interpolate(m, a, Eigen::Vector3d(0, 1e-3, -1).normalized(), 5));
  CHECK_THROWS_AS(geodesic_interpolate(m, a, a, 1), ParameterError);
}

TEST_CASE("stiefel(2,5) interpolation: orthonormal frames, equidistant midpoint, constant speed") {
  Rng rng(9);
  const auto m = ManifoldSpec::stiefel(2, 5);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::VectorXd a = random_point(m, rng);
    // Moderately separated endpoints.
    const PhaseStated s{a, sample_tangent_gaussian(m, a, rng).normalized() * 1.2};
    const Eigen::VectorXd b = geodesic_flow(m, s, 1.0).q;

    const auto frames = geodesic_interpolate(m, a, b, 9);
    for (const auto& f : frames) CHECK(constraint_error(m, f) < 1e-10);

    const Eigen::VectorXd& mid = frames[4];
    const double total = geodesic_distance(m, a, b);
    CHECK(std::abs(geodesic_distance(m, mid, a) - total / 2) < 1e-6);
    CHECK(std::abs(geodesic_distance(m, mid, b) - total / 2) < 1e-6);

    const double chord0 = (frames[1] - frames[0]).norm();
    for (std::size_t i = 1; i + 1 < frames.size(); ++i) CHECK(std::abs((frames[i + 1] - frames[i]).norm() - chord0) < 1e-6);
  }
}

TEST_CASE("stiefel log map inverts the exponential") {
  Rng rng(10);
  const auto m = ManifoldSpec::stiefel(3, 5);
  const Eigen::VectorXd a = random_point(m, rng);
  const Eigen::VectorXd v = sample_tangent_gaussian(m, a, rng).normalized() * 0.8;
  const Eigen::VectorXd b = geodesic_flow(m, PhaseStated{a, v}, 1.0).q;
  CHECK((log_map(m, a, b) - v).norm() < 1e-8);
}

TEST_CASE("templated on the scalar type") {
  using Ld = long double;
  const auto m = ManifoldSpec::sphere(2);
  PhaseState<Ld> s;
  s.q = Vec<Ld>::Unit(3, 0);
  s.v = Vec<Ld>::Unit(3, 1) * (std::numbers::pi_v<Ld> / 2);
  const PhaseState<Ld> out = geodesic_flow(m, s, Ld(1));
  CHECK(static_cast<double>((out.q - Vec<Ld>::Unit(3, 1)).norm()) < 1e-17);
}
