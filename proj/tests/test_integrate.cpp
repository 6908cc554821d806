#include <catch2/catch_amalgamated.hpp>

#include <mra/brownian.hpp>
#include <mra/integrate.hpp>

#include <cmath>
#include <vector>

namespace {

constexpr double pi = 3.14159265358979323846264338327950288;

mra::ModelParams heat_model(double mu = 1.0) {
    mra::ModelParams p;
    p.mode = mra::Mode::deterministic;
    p.a = mra::DiffusionLaw::constant(mu);
    p.f = mra::ReactionLaw::linear(0.0);
    return p;
}

} // namespace

TEST_CASE("without reaction and forcing each mode contracts by the implicit factor",
          "[integrate]") {
    const mra::Basis b = mra::build_basis(pi, 3, 12);
    const mra::ModelParams p = heat_model(0.7);
    const std::vector<double> gamma0 = {1.0, -2.0, 0.5};
    const double dt = 1e-2;

    const mra::Trajectory traj = mra::simulate_path(p, b, gamma0, 0.0, 1.0, dt, nullptr);
    REQUIRE(traj.times.size() == 101);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == Catch::Approx(1.0).margin(1e-12));

    std::vector<double> expect = gamma0;
    for (int k = 0; k < 100; ++k)
        for (int j = 0; j < 3; ++j)
            expect[j] = expect[j] / (1.0 + dt * 0.7 * b.lambda[j]);
    for (int j = 0; j < 3; ++j)
        CHECK(traj.states.back()[j] == expect[j]);  // bit-identical recurrence
}

TEST_CASE("constant forcing enters the step through its mode coefficients",
          "[integrate]") {
    const mra::Basis b = mra::build_basis(pi, 3, 12);
    mra::ModelParams p = heat_model(1.0);
    p.h = mra::ForcingSpec::constant({0.5, -0.25, 0.125});

    const mra::SpectralState u = mra::make_state(b, {1.0, 1.0, 1.0});
    const double dt = 0.1;
    const mra::SpectralState next = mra::step_deterministic(p, u, 0.0, dt);
    const std::vector<double> h = {0.5, -0.25, 0.125};
    for (int j = 0; j < 3; ++j) {
        const double expect = (1.0 + dt * h[j]) / (1.0 + dt * b.lambda[j]);
        CHECK(next.gamma[j] == Catch::Approx(expect).margin(1e-14));
    }
}

TEST_CASE("the noise term scales with the Wiener increment", "[integrate]") {
    const mra::Basis b = mra::build_basis(pi, 2, 8);
    mra::ModelParams p;
    p.mode = mra::Mode::stochastic;
    p.a = mra::DiffusionLaw::constant(1.0);
    p.f = mra::ReactionLaw::linear(0.0);
    p.sigma = mra::NoiseLaw::affine(0.5, 0.0);  // sigma(u) = 0.5 u

    const mra::SpectralState u = mra::make_state(b, {2.0, -1.0});
    const double dt = 0.05, dW = 0.3;
    const mra::SpectralState next = mra::step_stochastic(p, u, 0.0, dt, dW);
    for (int j = 0; j < 2; ++j) {
        // sigma acts diagonally on an affine-through-zero law: modes scale by 0.5.
        const double expect =
            (u.gamma[j] + 0.5 * u.gamma[j] * dW) / (1.0 + dt * b.lambda[j]);
        CHECK(next.gamma[j] == Catch::Approx(expect).margin(1e-12));
    }
}

TEST_CASE("simulation inputs are validated", "[integrate]") {
    const mra::Basis b = mra::build_basis(pi, 2, 8);
    const mra::ModelParams p = heat_model();
    CHECK_THROWS_AS(mra::simulate_path(p, b, {1.0, 0.0}, 0.0, 1.0, -0.1, nullptr),
                    mra::ConfigError);
    CHECK_THROWS_AS(mra::simulate_path(p, b, {1.0, 0.0}, 1.0, 1.0, 0.1, nullptr),
                    mra::ConfigError);
    CHECK_THROWS_AS(mra::simulate_path(p, b, {1.0}, 0.0, 1.0, 0.1, nullptr),
                    mra::DimensionError);

    mra::ModelParams noisy;
    noisy.mode = mra::Mode::stochastic;
    noisy.a = mra::DiffusionLaw::constant(1.0);
    noisy.f = mra::ReactionLaw::linear(0.0);
    noisy.sigma = mra::NoiseLaw::affine(0.3, 0.0);
    CHECK_THROWS_AS(mra::simulate_path(noisy, b, {1.0, 0.0}, 0.0, 1.0, 0.1, nullptr),
                    mra::ConfigError);
}

TEST_CASE("runaway growth raises a blow-up report with its location", "[integrate]") {
    const mra::Basis b = mra::build_basis(pi, 2, 8);
    mra::ModelParams p;
    p.mode = mra::Mode::deterministic;
    p.a = mra::DiffusionLaw::constant(0.01);
    p.f = mra::ReactionLaw::linear(10.0);  // strong anti-damping

    bool thrown = false;
    try {
        mra::simulate_path(p, b, {1000.0, 0.0}, 0.0, 50.0, 0.1, nullptr);
    } catch (const mra::BlowUpError& e) {
        thrown = true;
        CHECK(e.h_sq > mra::blow_up_threshold);
        CHECK(e.step >= 1);
        CHECK(e.time == Catch::Approx(0.1 * static_cast<double>(e.step)).margin(1e-12));
    }
    CHECK(thrown);
}

TEST_CASE("trajectories record consistent diagnostics", "[integrate]") {
    const mra::Basis b = mra::build_basis(pi, 3, 12);
    mra::ModelParams p;
    p.mode = mra::Mode::deterministic;
    p.a = mra::DiffusionLaw::saturating(0.5, 2.0);
    p.f = mra::ReactionLaw::cubic(1.0, 1.0);

    const mra::Trajectory traj =
        mra::simulate_path(p, b, {1.0, 0.3, -0.2}, 0.0, 0.5, 0.05, nullptr);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const std::vector<double>& g = traj.states[k];
        double h = 0.0, v = 0.0, d = 0.0;
        for (int j = 0; j < 3; ++j) {
            h += g[j] * g[j];
            v += b.lambda[j] * g[j] * g[j];
            d += b.lambda[j] * b.lambda[j] * g[j] * g[j];
        }
        CHECK(traj.h_sq[k] == Catch::Approx(h).epsilon(1e-13));
        CHECK(traj.v_sq[k] == Catch::Approx(v).epsilon(1e-13));
        CHECK(traj.h2_diag[k] == Catch::Approx(d).epsilon(1e-13));
        CHECK(traj.a_value[k] == Catch::Approx(p.a(traj.v_sq[k])).epsilon(1e-13));
    }
}

TEST_CASE("the deterministic energy defect shrinks quadratically with the step",
          "[integrate]") {
    const mra::Basis b = mra::build_basis(pi, 4, 16);
    mra::ModelParams p;
    p.mode = mra::Mode::deterministic;
    p.a = mra::DiffusionLaw::constant(1.0);
    p.f = mra::ReactionLaw::cubic(0.5, 1.0);

    auto worst = [&](double dt) {
        const mra::Trajectory traj =
            mra::simulate_path(p, b, {1.0, -0.5, 0.25, 0.1}, 0.0, 1.0, dt, nullptr);
        const std::vector<double> res = mra::energy_residual(p, b, traj, nullptr);
        double m = 0.0;
        for (double r : res) m = std::max(m, std::abs(r));
        return m;
    };
    const double w1 = worst(1e-2);
    const double w2 = worst(5e-3);
    CHECK(w1 < 1e-2);
    CHECK(w2 < 0.35 * w1);  // one halving: expect a factor of about four
}

TEST_CASE("the stochastic energy defect is reproducible from the same stream",
          "[integrate]") {
    const mra::Basis b = mra::build_basis(pi, 4, 16);
    mra::ModelParams p;
    p.mode = mra::Mode::stochastic;
    p.a = mra::DiffusionLaw::constant(1.0);
    p.f = mra::ReactionLaw::tanh_sat(0.2);
    p.sigma = mra::NoiseLaw::affine(0.3, 0.1);

    const mra::BrownianStream stream{77, 0, 1e-2};
    const mra::Trajectory traj =
        mra::simulate_path(p, b, {1.0, 0.0, 0.5, 0.0}, 0.0, 0.5, 1e-2, &stream);
    const std::vector<double> r1 = mra::energy_residual(p, b, traj, &stream);
    const std::vector<double> r2 = mra::energy_residual(p, b, traj, &stream);
    REQUIRE(r1.size() == traj.times.size() - 1);
    CHECK(r1 == r2);
    // Residuals are small per interval but not identically zero.
    double m = 0.0;
    for (double r : r1) m = std::max(m, std::abs(r));
    CHECK(m > 0.0);
    CHECK(m < 0.05);
}

TEST_CASE("the scheme converges strongly at order one half on a linear noise model",
          "[integrate]") {
    // Single mode with negligible drift and sigma = 0.3 u: the solution is the
    // geometric martingale u(T) = u0 exp((-a lambda_1 - 0.045) T + 0.3 W(T)),
    // so the measured error is purely the stochastic one of order one half.
    // (With an O(1) drift the order-one deterministic bias still dominates at
    // these step sizes and the fitted slope climbs toward one.)
    const mra::Basis b = mra::build_basis(pi, 1, 4);
    mra::ModelParams p;
    p.mode = mra::Mode::stochastic;
    p.a = mra::DiffusionLaw::constant(1e-8);
    p.f = mra::ReactionLaw::linear(0.0);
    p.sigma = mra::NoiseLaw::affine(0.3, 0.0);

    const int paths = 2000;
    const int k_fine = 512;
    const double dt_fine = 1.0 / k_fine;
    const std::vector<int> strides = {32, 16, 8};  // dt = 1/16, 1/32, 1/64

    std::vector<double> err(strides.size(), 0.0);
    mra::StepWork work;
    std::vector<double> cur, next;
    for (int path = 0; path < paths; ++path) {
        std::vector<double> dw(k_fine);
        double wT = 0.0;
        for (int i = 0; i < k_fine; ++i) {
            dw[i] = std::sqrt(dt_fine) *
                    mra::counter_gauss(4242, static_cast<std::uint64_t>(path),
                                       mra::StreamPurpose::wiener, static_cast<std::uint64_t>(i));
            wT += dw[i];
        }
        const double exact = std::exp((-1e-8 - 0.045) + 0.3 * wT);
        for (std::size_t s = 0; s < strides.size(); ++s) {
            const int stride = strides[s];
            const double dt = dt_fine * stride;
            cur.assign(1, 1.0);
            for (int k = 0; k * stride < k_fine; ++k) {
                double inc = 0.0;
                for (int i = 0; i < stride; ++i) inc += dw[k * stride + i];
                mra::step_core(p, b, cur, k * dt, dt, inc, next, work);
                cur.swap(next);
            }
            err[s] += std::abs(cur[0] - exact);
        }
    }
    for (double& e : err) e /= paths;

    // Least-squares slope of log err against log dt.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(strides.size());
    for (int i = 0; i < n; ++i) {
        const double x = std::log(dt_fine * strides[i]);
        const double y = std::log(err[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope > 0.35);
    CHECK(slope < 0.65);
}
