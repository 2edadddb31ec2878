#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "cnstn/diagnostics.hpp"
#include "cnstn/noise.hpp"
#include "cnstn/solver.hpp"
#include "cnstn/spectral.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "manufactured.hpp"

using namespace cnstn;
using testutil::max_abs;
using testutil::max_abs_diff;
using testutil::sample;

namespace {

const double kPi = 3.14159265358979323846;

solver::SchemeParams base_params() {
  solver::SchemeParams p;
  p.gamma = 2.0;
  p.a = 1.0;
  p.mu = 0.1;
  p.eta = 0.1;
  p.epsilon = 1e-3;
  p.delta = 0.0;
  p.beta = 5.0;
  p.m = 4;
  p.dt = 1e-3;
  p.T = 0.5;
  return p;
}

/// Smooth perturbed state used by the stepping tests.
solver::GalerkinState smooth_state(const TorusGrid& g, const solver::SchemeParams& p) {
  solver::GalerkinState s(g, p);
  s.rho = sample(g, [](const std::array<double, 3>& x) {
    return 1.0 + 0.1 * std::cos(x[0]) + 0.05 * std::sin(x[1]);
  });
  s.u = testutil::sample_vec(
      g, [](const std::array<double, 3>& x) { return 0.1 * std::sin(x[1]); },
      [](const std::array<double, 3>& x) { return -0.1 * std::sin(x[0]); });
  s.u = solver::prepare_velocity(s.u, p.m);
  return s;
}

double state_distance(const solver::GalerkinState& a, const solver::GalerkinState& b) {
  double d = max_abs_diff(a.rho, b.rho);
  for (int i = 0; i < a.grid().dim; ++i) d = std::max(d, max_abs_diff(a.u[i], b.u[i]));
  return d;
}

noise::DriverPath zero_driver(int K, double T, int steps) {
  noise::DriverPath p;
  p.times.resize(static_cast<std::size_t>(steps) + 1);
  p.values.assign(static_cast<std::size_t>(steps) + 1,
                  std::vector<double>(static_cast<std::size_t>(K), 0.0));
  for (int i = 0; i <= steps; ++i)
    p.times[static_cast<std::size_t>(i)] = T * static_cast<double>(i) / steps;
  return p;
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("pressure of the unit density is the unit field") {
    TorusGrid g(2, 4, 12);
    solver::SchemeParams p = base_params();
    ScalarField rho = sample(g, [](const std::array<double, 3>&) { return 1.0; });
    ScalarField want = sample(g, [](const std::array<double, 3>&) { return 1.0; });
    CHECK(max_abs_diff(solver::pressure(rho, p), want) <= 1e-12);
  }

  TEST_CASE("pressure of the zero density vanishes") {
    TorusGrid g(2, 4, 12);
    ScalarField rho(g);
    CHECK(max_abs(solver::pressure(rho, base_params())) <= 1e-12);
  }

  TEST_CASE("the two-term law evaluates a = 1, gamma = 2, delta = 0.1, beta = 4 at rho = 2") {
    TorusGrid g(2, 4, 12);
    solver::SchemeParams p = base_params();
    p.delta = 0.1;
    p.beta = 4.0;
    ScalarField rho = sample(g, [](const std::array<double, 3>&) { return 2.0; });
    // 2^2 + 0.1 * 2^4 = 5.6
    ScalarField want = sample(g, [](const std::array<double, 3>&) { return 5.6; });
    CHECK(max_abs_diff(solver::pressure(rho, p), want) <= 1e-10);
    CHECK(std::abs(solver::pressure_value(2.0, p) - 5.6) <= 1e-14);
  }

  TEST_CASE("genuinely negative density is a blow-up, not a pressure value") {
    TorusGrid g(2, 4, 12);
    ScalarField rho = sample(g, [](const std::array<double, 3>&) { return -0.5; });
    CHECK_THROWS_AS(solver::pressure(rho, base_params()), solver::BlowUp);
  }

  TEST_CASE("pressure potential of rho = 2 with gamma = 2 is 4") {
    TorusGrid g(2, 4, 12);
    solver::SchemeParams p = base_params();
    ScalarField rho = sample(g, [](const std::array<double, 3>&) { return 2.0; });
    ScalarField want = sample(g, [](const std::array<double, 3>&) { return 4.0; });
    CHECK(max_abs_diff(solver::pressure_potential(rho, p), want) <= 1e-10);
    CHECK(max_abs(solver::pressure_potential(ScalarField(g), p)) <= 1e-12);
  }

  TEST_CASE("P'(rho) rho - P(rho) = p(rho) pointwise on random densities") {
    solver::SchemeParams p = base_params();
    p.delta = 0.05;
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> d(0.1, 3.0);
    for (int rep = 0; rep < 200; ++rep) {
      const double z = d(rng);
      const double lhs = solver::pressure_potential_prime(z, p) * z -
                         solver::pressure_potential_value(z, p);
      CHECK(std::abs(lhs - solver::pressure_value(z, p)) <= 1e-10);
    }
  }

  TEST_CASE("stress divergence of a solenoidal shear mode is mu lap u") {
    TorusGrid g(2, 4, 12);
    solver::SchemeParams p = base_params();
    VectorField u = testutil::sample_vec(
        g, [](const std::array<double, 3>& x) { return std::sin(x[1]); },
        [](const std::array<double, 3>&) { return 0.0; });
    VectorField got = solver::stress_divergence(u, p);
    ScalarField want =
        sample(g, [&](const std::array<double, 3>& x) { return -p.mu * std::sin(x[1]); });
    CHECK(max_abs_diff(got[0], want) <= 1e-12);
    CHECK(max_abs(got[1]) <= 1e-12);
  }

  TEST_CASE("stress divergence of a gradient mode picks up the full 2 mu + eta weight") {
    TorusGrid g(2, 4, 12);
    solver::SchemeParams p = base_params();
    VectorField u = testutil::sample_vec(
        g, [](const std::array<double, 3>& x) { return std::cos(x[0]); },
        [](const std::array<double, 3>&) { return 0.0; });
    VectorField got = solver::stress_divergence(u, p);
    ScalarField want = sample(g, [&](const std::array<double, 3>& x) {
      return -(2.0 * p.mu + p.eta) * std::cos(x[0]);
    });
    CHECK(max_abs_diff(got[0], want) <= 1e-12);
    CHECK(max_abs(got[1]) <= 1e-12);
  }

  TEST_CASE("viscous dissipation is nonnegative and matches the stress pairing") {
    TorusGrid g(2, 4, 12);
    solver::SchemeParams p = base_params();
    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 100; ++rep) {
      solver::GalerkinState s(g, p);
      s.rho = sample(g, [](const std::array<double, 3>&) { return 1.0; });
      s.u = testutil::random_vector_field(g, p.m, rng, 0.5);
      const double rate = diag::dissipation_rate(s);
      CHECK(rate >= -1e-12);
      // int S(grad u) : grad u = -int div S . u for periodic fields.
      const double pairing = -spectral::inner(solver::stress_divergence(s.u, p), s.u);
      CHECK(std::abs(rate - pairing) <= 1e-10 * std::max(1.0, std::abs(rate)));
    }
  }

  TEST_CASE("continuity right-hand side vanishes on uniform density at rest") {
    TorusGrid g(2, 4, 12);
    solver::GalerkinState s(g, base_params());
    s.rho = sample(g, [](const std::array<double, 3>&) { return 1.0; });
    noise::QField q = noise::QField::constant(g, {{0.5, -0.25}});
    CHECK(max_abs(solver::rhs_continuity(s, q, {2.0})) <= 1e-14);
  }

  TEST_CASE("at rest with zero slope the continuity rhs is the parabolic term") {
    TorusGrid g(2, 4, 12);
    solver::SchemeParams p = base_params();
    p.epsilon = 0.02;
    solver::GalerkinState s(g, p);
    s.rho = sample(g, [](const std::array<double, 3>& x) { return 1.0 + 0.2 * std::cos(x[0]); });
    noise::QField q = noise::QField::constant(g, {{0.5, -0.25}});
    ScalarField got = solver::rhs_continuity(s, q, {0.0});
    ScalarField want = spectral::laplacian(s.rho) * p.epsilon;
    CHECK(max_abs_diff(got, want) <= 1e-13);
  }

  TEST_CASE("the continuity rhs has exactly zero mean on random states") {
    TorusGrid g(2, 4, 12);
    solver::SchemeParams p = base_params();
    std::mt19937_64 rng(43);
    noise::QField q = noise::QField::constant(g, {{0.4, 0.1}, {-0.2, 0.3}});
    for (int rep = 0; rep < 20; ++rep) {
      solver::GalerkinState s(g, p);
      s.rho = testutil::random_density(g, 5, rng);
      s.u = testutil::random_vector_field(g, p.m, rng, 0.5);
      ScalarField rhs = solver::rhs_continuity(s, q, {0.7, -1.1});
      CHECK(std::abs(rhs.mean()) <= 1e-14);
    }
  }

  TEST_CASE("momentum rhs of the uniform rest state vanishes") {
    TorusGrid g(2, 4, 12);
    solver::GalerkinState s(g, base_params());
    s.rho = sample(g, [](const std::array<double, 3>&) { return 1.0; });
    noise::QField q = noise::QField::constant(g, {{0.5, -0.25}});
    VectorField rhs = solver::rhs_momentum(s, q, {1.0});
    CHECK(max_abs(rhs[0]) <= 1e-13);
    CHECK(max_abs(rhs[1]) <= 1e-13);
  }

  TEST_CASE("divergence-form momentum terms carry zero spatial mean") {
    TorusGrid g(2, 4, 12);
    solver::SchemeParams p = base_params();
    p.epsilon = 0.0;
    std::mt19937_64 rng(44);
    noise::QField q = noise::QField::constant(g, {{0.4, 0.1}});
    for (int rep = 0; rep < 20; ++rep) {
      solver::GalerkinState s(g, p);
      s.rho = testutil::random_density(g, 5, rng);
      s.u = testutil::random_vector_field(g, p.m, rng, 0.5);
      VectorField rhs = solver::rhs_momentum(s, q, {0.0});
      CHECK(std::abs(rhs[0].mean()) <= 1e-14);
      CHECK(std::abs(rhs[1].mean()) <= 1e-14);
    }
  }

  TEST_CASE("momentum rhs matches the hand-expanded single-mode closed form") {
    TorusGrid g(2, 4, 16);
    testutil::ManufacturedCase mc;
    solver::SchemeParams p = base_params();
    p.mu = mc.mu;
    p.eta = mc.eta;
    p.epsilon = mc.eps;
    p.a = mc.a;
    solver::GalerkinState s(g, p);
    s.rho = sample(g, [&](const std::array<double, 3>& x) { return mc.rho(x[0]); });
    s.u = testutil::sample_vec(
        g, [&](const std::array<double, 3>& x) { return mc.u1(x[0]); },
        [](const std::array<double, 3>&) { return 0.0; });
    noise::QField q = noise::QField::constant(g, {{mc.q1, mc.q2}});

    VectorField rhs = solver::rhs_momentum(s, q, {mc.w});
    ScalarField want =
        sample(g, [&](const std::array<double, 3>& x) { return mc.momentum_rhs(x[0]); });
    CHECK(max_abs_diff(rhs[0], want) <= 1e-10);
    CHECK(max_abs(rhs[1]) <= 1e-10);

    ScalarField rhs_c = solver::rhs_continuity(s, q, {mc.w});
    ScalarField want_c =
        sample(g, [&](const std::array<double, 3>& x) { return mc.continuity_rhs(x[0]); });
    CHECK(max_abs_diff(rhs_c, want_c) <= 1e-10);
  }

  TEST_CASE("uniform rest states are fixed points of the step for any driver") {
    TorusGrid g(2, 4, 12);
    solver::SchemeParams p = base_params();
    solver::GalerkinState s(g, p);
    s.rho = sample(g, [](const std::array<double, 3>&) { return 1.3; });
    noise::QField q = noise::QField::constant(g, {{0.6, -0.3}});
    noise::DriverPath driver = noise::sample_brownian(1, p.T, 500, 77);
    solver::GalerkinState next = solver::step(s, q, driver);
    CHECK(state_distance(s, next) <= 1e-14);
    CHECK(next.t == doctest::Approx(p.dt).epsilon(1e-12));
  }

  TEST_CASE("one-step defect at least quarters when dt halves") {
    TorusGrid g(2, 4, 16);
    solver::SchemeParams p = base_params();
    noise::QField q = noise::QField::constant(g, {{0.3, 0.2}});
    const double dt0 = 4e-3;

    auto advance_to = [&](double t_end, double dt) {
      solver::SchemeParams pp = base_params();
      pp.dt = dt;
      pp.T = t_end;
      solver::GalerkinState s = smooth_state(g, pp);
      noise::SmoothDriverSpec spec;
      spec.linear = {1.0};
      spec.waves = {{noise::Wave{0.5, 3.0, 0.4}}};
      noise::DriverPath driver = noise::smooth_driver(spec, t_end, 256);
      const int steps = static_cast<int>(std::lround(t_end / dt));
      for (int i = 0; i < steps; ++i) s = solver::step(s, q, driver);
      return s;
    };

    std::vector<double> defect;
    for (double dt : {dt0, dt0 / 2.0}) {
      solver::GalerkinState coarse = advance_to(dt, dt);
      solver::GalerkinState fine = advance_to(dt, dt / 16.0);
      defect.push_back(state_distance(coarse, fine));
    }
    CHECK(defect[0] / defect[1] >= 3.5);
  }

  TEST_CASE("global self-convergence against a dt/16 reference is at least second order") {
    TorusGrid g(2, 4, 16);
    noise::QField q = noise::QField::constant(g, {{0.3, 0.2}});
    const double T = 0.032;
    noise::SmoothDriverSpec spec;
    spec.linear = {1.0};
    spec.waves = {{noise::Wave{0.5, 3.0, 0.4}}};
    noise::DriverPath driver = noise::smooth_driver(spec, T, 1024);

    auto run_with = [&](double dt) {
      solver::SchemeParams pp = base_params();
      pp.dt = dt;
      pp.T = T;
      solver::GalerkinState s = smooth_state(g, pp);
      const int steps = static_cast<int>(std::lround(T / dt));
      for (int i = 0; i < steps; ++i) s = solver::step(s, q, driver);
      return s;
    };

    const double dt0 = 4e-3;
    solver::GalerkinState ref = run_with(dt0 / 16.0);
    std::vector<double> logs_dt, logs_err;
    for (double dt : {dt0, dt0 / 2.0, dt0 / 4.0}) {
      logs_dt.push_back(std::log(dt));
      logs_err.push_back(std::log(state_distance(run_with(dt), ref)));
    }
    CHECK(testutil::ols_slope(logs_dt, logs_err) >= 1.9);
  }

  TEST_CASE("mass is conserved to relative 1e-11 over 1000 steps") {
    TorusGrid g(2, 4, 12);
    solver::SchemeParams p = base_params();
    p.T = 1.0;
    p.dt = 1e-3;
    ScalarField rho0 = sample(g, [](const std::array<double, 3>& x) {
      return 1.0 + 0.15 * std::cos(x[0]) + 0.1 * std::sin(x[1]);
    });
    VectorField u0 = testutil::sample_vec(
        g, [](const std::array<double, 3>& x) { return 0.15 * std::sin(x[1]); },
        [](const std::array<double, 3>& x) { return 0.1 * std::cos(x[0]); });
    noise::QField q = noise::QField::constant(g, {{0.2, 0.1}});
    noise::DriverPath driver = noise::sample_brownian(1, p.T, 1000, 11);
    solver::Trajectory traj = solver::run(rho0, u0, p, q, driver);
    REQUIRE(!traj.blew_up);
    REQUIRE(traj.steps_taken() == 1000);
    for (const auto& rec : traj.steps)
      CHECK(std::abs(rec.mass - traj.mass0) <= 1e-11 * std::abs(traj.mass0));
  }

  TEST_CASE("velocity coefficients outside the Galerkin band stay exactly zero") {
    TorusGrid g(2, 3, 16);
    solver::SchemeParams p = base_params();
    p.m = 3;
    p.T = 0.05;
    ScalarField rho0 = sample(g, [](const std::array<double, 3>& x) {
      return 1.0 + 0.2 * std::cos(x[0]) * std::sin(x[1]);
    });
    VectorField u0 = testutil::sample_vec(
        g, [](const std::array<double, 3>& x) { return 0.2 * std::sin(2.0 * x[1]); },
        [](const std::array<double, 3>& x) { return 0.2 * std::cos(2.0 * x[0]); });
    noise::QField q = noise::QField::constant(g, {{0.3, -0.1}});
    noise::DriverPath driver = noise::sample_brownian(1, p.T, 50, 12);
    solver::Trajectory traj = solver::run(rho0, u0, p, q, driver);
    REQUIRE(!traj.blew_up);
    for (const auto& s : traj.states) {
      for (int comp = 0; comp < 2; ++comp) {
        const auto& c = s.u[comp].coeffs();
        for (std::size_t j = 0; j < c.size(); ++j) {
          const auto k = g.wavevector(j);
          if (TorusGrid::band(k) > p.m) {
            CHECK(c[j].real() == 0.0);
            CHECK(c[j].imag() == 0.0);
          }
        }
      }
    }
  }

  TEST_CASE("a density floor breach aborts with time and minimum recorded") {
    TorusGrid g(2, 4, 12);
    solver::SchemeParams p = base_params();
    p.density_floor = 0.9;  // initial dip sits below this
    ScalarField rho0 =
        sample(g, [](const std::array<double, 3>& x) { return 1.0 + 0.5 * std::cos(x[0]); });
    VectorField u0(g);
    noise::QField q = noise::QField::constant(g, {{0.1, 0.0}});
    noise::DriverPath driver = zero_driver(1, p.T, 500);
    try {
      solver::Trajectory traj = solver::run(rho0, u0, p, q, driver);
      CHECK(traj.blew_up);  // partial trajectory path
      CHECK(traj.blowup_min_rho <= 0.9);
    } catch (const solver::BlowUp& b) {
      CHECK(b.min_rho <= 0.9);
      CHECK(b.t >= 0.0);
    }
  }

  TEST_CASE("zero-noise uniform rest configurations produce a constant trajectory") {
    TorusGrid g(2, 4, 12);
    solver::SchemeParams p = base_params();
    p.T = 0.05;
    ScalarField rho0 = sample(g, [](const std::array<double, 3>&) { return 1.0; });
    VectorField u0(g);
    noise::QField q = noise::QField::none(g);
    noise::DriverPath driver = zero_driver(0, p.T, 50);
    solver::Trajectory traj = solver::run(rho0, u0, p, q, driver);
    REQUIRE(!traj.blew_up);
    for (const auto& s : traj.states) {
      CHECK(max_abs_diff(s.rho, rho0) <= 1e-14);
      CHECK(max_abs(s.u[0]) <= 1e-14);
      CHECK(max_abs(s.u[1]) <= 1e-14);
    }
  }

  TEST_CASE("a smooth-driver run completes without a floor breach") {
    TorusGrid g(2, 6, 24);
    solver::SchemeParams p = base_params();
    p.m = 6;
    p.T = 0.064;
    ScalarField rho0 = sample(g, [](const std::array<double, 3>& x) {
      return 1.0 + 0.1 * std::cos(x[0]) + 0.05 * std::sin(x[1]);
    });
    VectorField u0 = testutil::sample_vec(
        g, [](const std::array<double, 3>& x) { return 0.1 * std::sin(x[1]); },
        [](const std::array<double, 3>& x) { return -0.1 * std::sin(x[0]); });
    noise::QField q = noise::QField::constant(g, {{0.2, 0.1}, {-0.1, 0.15}});
    noise::SmoothDriverSpec spec;
    spec.linear = {0.5, -0.25};
    spec.waves = {{noise::Wave{0.4, 5.0, 0.0}}, {noise::Wave{0.3, 3.0, 1.0}}};
    noise::DriverPath driver = noise::smooth_driver(spec, p.T, 64);
    solver::Trajectory traj = solver::run(rho0, u0, p, q, driver);
    CHECK(!traj.blew_up);
    CHECK(traj.steps_taken() == 64);
    CHECK(spectral::min_value(traj.states.back().rho) > 0.0);
  }

  TEST_CASE("truncation is the identity below k and saturates at 2k") {
    CHECK(solver::truncation(0.5, 1.0) == 0.5);
    CHECK(solver::truncation(5.0, 1.0) == 2.0);
    CHECK(std::abs(solver::truncation(2.0, 1.0) - 1.75) <= 1e-15);
  }

  TEST_CASE("truncation is C1 at both knots and concave in between") {
    for (double k : {1.0, 2.5}) {
      const double h = 1e-7;
      // value continuity
      CHECK(std::abs(solver::truncation(k - 1e-12, k) - solver::truncation(k + 1e-12, k)) <=
            1e-11);
      CHECK(std::abs(solver::truncation(3.0 * k - 1e-12, k) -
                     solver::truncation(3.0 * k + 1e-12, k)) <= 1e-11);
      // derivative continuity against the closed-form prime
      CHECK(std::abs(solver::truncation_prime(k - 1e-12, k) - 1.0) <= 1e-10);
      CHECK(std::abs(solver::truncation_prime(3.0 * k + 1e-12, k)) <= 1e-10);
      // prime matches a central difference mid-bridge
      const double z = 2.0 * k;
      const double fd = (solver::truncation(z + h, k) - solver::truncation(z - h, k)) / (2.0 * h);
      CHECK(std::abs(fd - solver::truncation_prime(z, k)) <= 1e-6);
      // monotone nondecreasing, bounded by min(z, 2k)
      double prev = 0.0;
      for (double z2 = 0.0; z2 <= 4.0 * k; z2 += 0.01 * k) {
        const double v = solver::truncation(z2, k);
        CHECK(v >= prev - 1e-14);
        CHECK(v <= std::min(z2, 2.0 * k) + 1e-12);
        prev = v;
      }
    }
    CHECK_THROWS_AS(solver::truncation(1.0, 0.0), std::invalid_argument);
  }

  TEST_CASE("solve_velocity inverts the projected mass matrix") {
    TorusGrid g(2, 4, 16);
    std::mt19937_64 rng(45);
    for (int rep = 0; rep < 5; ++rep) {
      ScalarField rho = testutil::random_density(g, 5, rng, 0.3);
      VectorField u = testutil::random_vector_field(g, 4, rng, 0.7);
      u = solver::prepare_velocity(u, 4);
      VectorField target = spectral::project_modes(spectral::multiply(rho, u), 4);
      VectorField got = solver::solve_velocity(rho, target, 4);
      CHECK(max_abs_diff(got, u) <= 1e-8);
    }
  }

  TEST_CASE("prepared densities keep the exact original mass") {
    TorusGrid g(2, 4, 16);
    std::mt19937_64 rng(46);
    for (int rep = 0; rep < 10; ++rep) {
      ScalarField rho0 = testutil::random_density(g, 7, rng, 0.45);
      ScalarField prep = solver::prepare_density(rho0, 4, 0.05);
      CHECK(std::abs(spectral::integrate(prep) - spectral::integrate(rho0)) <=
            1e-12 * std::abs(spectral::integrate(rho0)));
      CHECK(spectral::min_value(prep) >= 0.05 - 1e-12);
    }
  }

  TEST_CASE("already-positive projections come back bit-identical") {
    TorusGrid g(2, 4, 16);
    ScalarField rho0 =
        sample(g, [](const std::array<double, 3>& x) { return 1.0 + 0.2 * std::cos(x[0]); });
    ScalarField proj = spectral::project_modes(rho0, 4);
    ScalarField prep = solver::prepare_density(rho0, 4, 0.05);
    const auto& a = proj.coeffs();
    const auto& b = prep.coeffs();
    for (std::size_t j = 0; j < a.size(); ++j) {
      CHECK(a[j].real() == b[j].real());
      CHECK(a[j].imag() == b[j].imag());
    }
  }

  TEST_CASE("the stability indicator scales linearly with dt") {
    TorusGrid g(2, 4, 12);
    solver::SchemeParams p = base_params();
    solver::GalerkinState s = smooth_state(g, p);
    const double c1 = solver::cfl_number(s);
    s.params.dt *= 2.0;
    const double c2 = solver::cfl_number(s);
    CHECK(c1 > 0.0);
    CHECK(std::abs(c2 - 2.0 * c1) <= 1e-12 * c2);
  }

  TEST_CASE("scheme parameters validate the physical exponent ranges") {
    solver::SchemeParams p = base_params();
    p.gamma = 0.5;
    CHECK_THROWS_WITH_AS(p.validate(2), "gamma must exceed N/2", std::invalid_argument);
    p = base_params();
    p.beta = 3.0;
    p.delta = 0.1;
    CHECK_THROWS_WITH_AS(p.validate(2), "beta must exceed max{4, gamma}", std::invalid_argument);
    p = base_params();
    CHECK_NOTHROW(p.validate(2));
  }

  TEST_CASE("quadrature padding factor tracks the pressure exponents") {
    solver::SchemeParams p = base_params();  // gamma 2, delta 0 -> d = 2
    CHECK(p.quad_factor() == 2);
    p.delta = 0.1;  // beta 5 now active -> d = 5, (5+2)/2 -> 3
    CHECK(p.quad_factor() == 3);
    p.beta = 7.0;
    CHECK(p.quad_factor() == 4);  // clamped at 4
  }
}
