#include <catch2/catch_amalgamated.hpp>

#include <mra/attractor.hpp>

#include <cmath>
#include <vector>

namespace {

constexpr double pi = 3.14159265358979323846264338327950288;

mra::ModelParams reference_noisy_model() {
    // D = m lambda_1 - gamma4 - C^2 = 1 - 0.2 - 0.09 = 0.71.
    mra::ModelParams p;
    p.mode = mra::Mode::stochastic;
    p.a = mra::DiffusionLaw::constant(1.0);
    p.f = mra::ReactionLaw::linear(0.2);
    p.sigma = mra::NoiseLaw::affine(0.3, 0.0);
    return p;
}

mra::ModelParams steady_model() {
    // Fixed point z = (1, 0, ...): |z|_V^2 = 1, a(1) = 2, h_1 = 2.
    mra::ModelParams p;
    p.mode = mra::Mode::deterministic;
    p.a = mra::DiffusionLaw::saturating(1.0, 3.0);
    p.f = mra::ReactionLaw::linear(0.0);
    p.h = mra::ForcingSpec::constant({2.0});
    return p;
}

} // namespace

TEST_CASE("derived constants for the deterministic envelope", "[attractor]") {
    const mra::Basis b = mra::build_basis(pi, 4, 16);
    mra::ModelParams p;
    p.mode = mra::Mode::deterministic;
    p.a = mra::DiffusionLaw::constant(1.0);
    p.f = mra::ReactionLaw::cubic(1.0, 1.0);  // beta = 1/2

    const mra::DerivedConstants dc =
        mra::derive_constants(p, b, 1.0, mra::RateSpec::by_rate);
    CHECK(dc.admissible_sup == Catch::Approx(2.0));
    CHECK(dc.rate == 1.0);
    CHECK(dc.eps == Catch::Approx(0.5));
    CHECK(dc.K1 == Catch::Approx(pi));  // 2 beta L
    CHECK(dc.K2 == Catch::Approx(1.0));
    CHECK_FALSE(dc.beyond_stated_range);
    CHECK(dc.provenance.find("sampled") == std::string::npos);

    // Without any sign certificate there is no envelope.
    mra::ModelParams bad = p;
    bad.f = mra::ReactionLaw::tanh_sat(0.1);
    CHECK_THROWS_AS(mra::derive_constants(bad, b, 1.0, mra::RateSpec::by_rate),
                    mra::ConfigError);
}

TEST_CASE("derived constants for the stochastic envelope", "[attractor]") {
    const mra::Basis b = mra::build_basis(pi, 4, 16);
    const mra::ModelParams p = reference_noisy_model();

    const mra::DerivedConstants half =
        mra::derive_constants(p, b, 0.5, mra::RateSpec::by_eps);
    CHECK(half.admissible_sup == Catch::Approx(1.42));
    CHECK(half.rate == Catch::Approx(0.71));
    CHECK(half.K1 == 0.0);  // gamma3 = 0 and sigma(0) = 0
    CHECK(half.K2 == Catch::Approx(1.0 / 0.71));
    CHECK_FALSE(half.beyond_stated_range);

    const mra::DerivedConstants aggressive =
        mra::derive_constants(p, b, 1.0, mra::RateSpec::by_rate);
    CHECK(aggressive.eps == Catch::Approx(1.0 - 1.0 / 1.42));
    CHECK(aggressive.beyond_stated_range);  // eps < 1/2

    CHECK_THROWS_AS(mra::derive_constants(p, b, 0.0, mra::RateSpec::by_eps),
                    mra::RateRangeError);
    CHECK_THROWS_AS(mra::derive_constants(p, b, 1.0, mra::RateSpec::by_eps),
                    mra::RateRangeError);
    // The computed limit 2(m lambda_1 - gamma4 - C^2) sits within an ulp of
    // 1.42, so probe clearly past it rather than at the rounded endpoint.
    CHECK_THROWS_AS(mra::derive_constants(p, b, 1.43, mra::RateSpec::by_rate),
                    mra::RateRangeError);

    // A gap that closes entirely is rejected outright.
    mra::ModelParams tight = p;
    tight.a = mra::DiffusionLaw::constant(0.2);
    CHECK_THROWS_AS(mra::derive_constants(tight, b, 0.5, mra::RateSpec::by_eps),
                    mra::RateRangeError);

    mra::ModelParams sampled = p;
    sampled.a = mra::DiffusionLaw::custom([](double) { return 1.0; }, 1.0, 1.0);
    CHECK(mra::derive_constants(sampled, b, 0.5, mra::RateSpec::by_eps)
              .provenance.find("sampled, not certified") != std::string::npos);
}

TEST_CASE("the absorbing radius tracks the weighted forcing tail", "[attractor]") {
    const mra::Basis b = mra::build_basis(pi, 4, 16);
    mra::ModelParams p = steady_model();
    const mra::DerivedConstants dc =
        mra::derive_constants(p, b, 1.0, mra::RateSpec::by_rate);
    CHECK(dc.K2 == Catch::Approx(1.0));
    CHECK(dc.K1 == 0.0);
    // Constant forcing: weighted tail is |h|^2 / rate = 4, radius 1 + 4 = 5 at
    // every target time.
    for (double t : {-10.0, 0.0, 10.0})
        CHECK(mra::absorbing_radius_sq(p, dc, t) == Catch::Approx(5.0).margin(1e-12));

    // Zero forcing: the radius is exactly the headroom constant 1 + K1/rate.
    mra::ModelParams bare = p;
    bare.h = mra::ForcingSpec::zero();
    CHECK(mra::absorbing_radius_sq(bare, dc, 3.0) == 1.0);
}

TEST_CASE("the decay envelope starts at the initial energy and flattens at the tail",
          "[attractor]") {
    const mra::Basis b = mra::build_basis(pi, 4, 16);
    const mra::ModelParams p = steady_model();
    const mra::DerivedConstants dc =
        mra::derive_constants(p, b, 1.0, mra::RateSpec::by_rate);

    CHECK_THROWS_AS(mra::decay_bound(dc, p.h, 0.0, -1.0, 10.0), mra::ConfigError);
    CHECK(mra::decay_bound(dc, p.h, 0.0, 0.0, 10.0) == Catch::Approx(10.0).margin(1e-12));
    // As t grows the bound decreases toward K1/rate + K2 |h|^2/rate = 4.
    double prev = mra::decay_bound(dc, p.h, 0.0, 0.0, 10.0);
    for (double t : {1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double cur = mra::decay_bound(dc, p.h, 0.0, t, 10.0);
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(prev == Catch::Approx(4.0).margin(1e-5));
}

TEST_CASE("entry times solve the tail-supremum equation", "[attractor]") {
    const mra::Basis b = mra::build_basis(pi, 4, 16);
    const mra::ModelParams p = reference_noisy_model();
    const mra::DerivedConstants dc =
        mra::derive_constants(p, b, 1.0, mra::RateSpec::by_rate);
    REQUIRE(dc.rate == 1.0);

    SECTION("linear-radius ball at target zero") {
        const mra::FamilySpec fam =
            mra::FamilySpec::ball_uniform(mra::RadiusProfile::poly_abs(10.0, 1.0));
        // Root of 10 (1 + s) e^{-s} = 1.
        const double T = mra::pullback_entry_time(dc, fam, 0.0);
        CHECK(T == Catch::Approx(3.8897201698674291).margin(1e-5));
    }
    SECTION("families already inside the ball enter immediately") {
        const mra::FamilySpec fam =
            mra::FamilySpec::ball_uniform(mra::RadiusProfile::constant(0.5));
        CHECK(mra::pullback_entry_time(dc, fam, 0.0) == 0.0);
    }
    SECTION("exponentially growing ball with closed-form entry time") {
        const mra::FamilySpec fam =
            mra::FamilySpec::ball_uniform(mra::RadiusProfile::exp_growth(20.0, 0.3));
        // e^{-rate s} rho^2(t - s) = 20 e^{-0.3 t} e^{(0.3 - rate) s} is
        // decreasing in s; the entry time solves it equal to one.
        const double t = 0.0;
        const double T = mra::pullback_entry_time(dc, fam, t);
        CHECK(T == Catch::Approx(std::log(20.0) / 0.7).margin(1e-5));
    }
    SECTION("the late interior bump postpones entry") {
        const mra::DerivedConstants slow =
            mra::derive_constants(p, b, 0.3, mra::RateSpec::by_rate);
        const mra::FamilySpec fam =
            mra::FamilySpec::ball_uniform(mra::RadiusProfile::poly_abs(1.2, 7.0));
        const double t = 5.0;
        const double T = mra::pullback_entry_time(slow, fam, t);
        auto phi = [&](double s) {
            return std::exp(-0.3 * s) * 1.2 * std::pow(1.0 + std::abs(t - s), 7.0);
        };
        // phi dips below one near s = 5 but peaks far above one later, around
        // s = t - 1 + degree/rate; entry must wait for the final crossing.
        CHECK(phi(5.0) < 1.0);
        CHECK(phi(27.0) > 1.0);
        CHECK(T > 27.0);
        CHECK(phi(T) == Catch::Approx(1.0).margin(1e-3));
        for (double s = T + 1e-3; s < 3.0 * T; s += T / 500.0)
            CHECK(phi(s) <= 1.0 + 1e-9);
    }
    SECTION("unbounded or untempered families are rejected") {
        CHECK_THROWS_AS(
            mra::pullback_entry_time(dc, mra::FamilySpec::gaussian_modes({1.0}), 0.0),
            mra::UniverseError);
        CHECK_THROWS_AS(
            mra::pullback_entry_time(
                dc, mra::FamilySpec::ball_uniform(mra::RadiusProfile::exp_growth(1.0, 2.0)),
                0.0),
            mra::UniverseError);
    }
}

TEST_CASE("measured entry times respect the lead grid", "[attractor]") {
    const mra::Basis b = mra::build_basis(pi, 4, 16);
    const mra::ModelParams p = reference_noisy_model();
    const mra::DerivedConstants dc =
        mra::derive_constants(p, b, 1.0, mra::RateSpec::by_rate);
    const mra::FamilySpec fam =
        mra::FamilySpec::ball_uniform(mra::RadiusProfile::constant(3.0));

    mra::EnsembleOptions opts;
    opts.threads = 1;
    const mra::EntryMeasurement m =
        mra::measure_entry_time(p, b, dc, fam, 0.0, {0.5, 1.0, 2.0, 4.0}, 200, 17, 0.01, opts);
    REQUIRE(m.rows.size() == 4);
    CHECK(m.theory_T == Catch::Approx(std::log(3.0)).margin(1e-5));
    for (const auto& row : m.rows) {
        // Without forcing the ball is exactly the unit headroom: 1 + 0 + 0.
        CHECK(row.radius_sq == 1.0);
        CHECK(row.absorbed == (row.mean_h_sq <= row.radius_sq));
    }
    CHECK(std::isfinite(m.measured_T));
    // Once measured, every later lead stays absorbed.
    bool seen = false;
    for (const auto& row : m.rows) {
        if (row.s == m.measured_T) seen = true;
        if (seen) CHECK(row.absorbed);
    }
    CHECK_THROWS_AS(
        mra::measure_entry_time(p, b, dc, fam, 0.0, {-1.0}, 10, 17, 0.01, opts),
        mra::ConfigError);
}

TEST_CASE("two solutions driven by one Wiener path separate no faster than the "
          "exponential envelope", "[attractor]") {
    const mra::Basis b = mra::build_basis(pi, 4, 16);

    mra::ModelParams det;
    det.mode = mra::Mode::deterministic;
    det.a = mra::DiffusionLaw::saturating(1.0, 2.0);
    det.f = mra::ReactionLaw::tanh_sat(0.5);
    const mra::BoundReport drep = mra::continuity_gap(
        det, b, {1.0, 0.2, 0.0, 0.0}, {0.9, 0.25, 0.0, 0.0}, 0.0, 2.0, 1e-3, 100, 1, 7);
    CHECK(drep.pass);
    CHECK(drep.violation_margin <= 0.0);
    CHECK(drep.measured.front() == Catch::Approx(drep.bound.front()).epsilon(1e-12));

    const mra::ModelParams noisy = reference_noisy_model();
    const mra::BoundReport srep = mra::continuity_gap(
        noisy, b, {1.0, 0.0, 0.0, 0.0}, {0.5, 0.1, 0.0, 0.0}, 0.0, 1.0, 1e-3, 100, 64, 7);
    CHECK(srep.pass);
    // With shared noise and linear coefficients the paths contract while the
    // envelope grows; the worst margin sits at the anchored release time.
    CHECK(srep.violation_margin <= 0.0);
    CHECK(srep.measured.back() - srep.bound.back() < -0.01);

    mra::ModelParams bare = det;
    bare.f = mra::ReactionLaw::custom([](double r) { return r; }, {});
    CHECK_THROWS_AS(
        mra::continuity_gap(bare, b, {1.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0},
                            0.0, 1.0, 0.1, 1, 1, 7),
        mra::ConfigError);
}

TEST_CASE("the uniform-gradient envelope dominates the simulated gradient energy",
          "[attractor]") {
    const mra::Basis b = mra::build_basis(pi, 6, 24);
    mra::ModelParams p;
    p.mode = mra::Mode::deterministic;
    p.a = mra::DiffusionLaw::constant(1.0);
    p.f = mra::ReactionLaw::cubic(0.5, 1.0);
    p.h = mra::ForcingSpec::constant({0.4, -0.2});

    CHECK_THROWS_AS(mra::smoothing_bound(p, b, 1.0, 0.0, 1.0, 2.0), mra::ConfigError);
    mra::ModelParams st = p;
    st.mode = mra::Mode::stochastic;
    st.sigma = mra::NoiseLaw::affine(0.1, 0.0);
    CHECK_THROWS_AS(mra::smoothing_bound(st, b, 1.0, 0.0, 1.0, 0.5), mra::ModeError);

    const double T = 2.0, r = 0.5;
    const std::vector<double> g0 = {2.0, -1.0, 0.5, 0.0, 0.25, 0.0};
    const double E0 = mra::h_norm_sq(b, g0);
    const mra::SmoothingBound sb = mra::smoothing_bound(p, b, E0, 0.0, T, r);
    // cubic(0.5, 1) certifies beta = eta^2/(2 kappa) = 0.125, so K1 = 0.25 pi.
    CHECK(sb.K1 == Catch::Approx(0.25 * pi));
    CHECK(sb.K3 == Catch::Approx(2.0 * sb.K2));  // mass/m vs mass/(2 lambda_1 m)
    const double expect =
        ((2.0 * T * sb.K1 + 2.0 * sb.K2 + E0) / (1.0 * r) + sb.K3) *
        std::exp(2.0 * 0.5 * r);
    CHECK(sb.value == Catch::Approx(expect).epsilon(1e-13));

    const mra::Trajectory traj = mra::simulate_path(p, b, g0, 0.0, T, 1e-3, nullptr);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k)
        if (traj.times[k] >= r) worst = std::max(worst, traj.v_sq[k]);
    CHECK(worst <= sb.value);
}

TEST_CASE("the stationary solver lands on the closed-form fixed point", "[attractor]") {
    const mra::Basis b = mra::build_basis(pi, 4, 16);
    const mra::ModelParams p = steady_model();

    const mra::SteadyStateResult z = mra::steady_state(p, b);
    REQUIRE(z.gamma.size() == 4);
    CHECK(z.gamma[0] == Catch::Approx(1.0).margin(1e-8));
    CHECK(z.gamma[1] == Catch::Approx(0.0).margin(1e-12));
    CHECK(z.gamma[2] == Catch::Approx(0.0).margin(1e-12));
    CHECK(z.gamma[3] == Catch::Approx(0.0).margin(1e-12));
    CHECK(z.residual <= 1e-10);

    // The fixed point is invariant for the discrete stepper too.
    const mra::Trajectory traj = mra::simulate_path(p, b, z.gamma, 0.0, 10.0, 1e-2, nullptr);
    for (double h : traj.h_sq)
        CHECK(h == Catch::Approx(traj.h_sq.front()).margin(1e-8));

    mra::ModelParams st = p;
    st.mode = mra::Mode::stochastic;
    st.sigma = mra::NoiseLaw::affine(0.1, 0.0);
    CHECK_THROWS_AS(mra::steady_state(st, b), mra::ModeError);

    mra::ModelParams wobbly = p;
    wobbly.h = mra::ForcingSpec::exponential(0.1, {1.0});
    CHECK_THROWS_AS(mra::steady_state(wobbly, b), mra::ConfigError);

    mra::SteadyStateOptions strict;
    strict.max_iter = 1;
    CHECK_THROWS_AS(mra::steady_state(p, b, strict), mra::NonConvergenceError);
}

TEST_CASE("the ensemble decay report stays under its envelope", "[attractor]") {
    const mra::Basis b = mra::build_basis(pi, 4, 16);
    mra::ModelParams p = reference_noisy_model();
    p.h = mra::ForcingSpec::constant({0.3});
    const mra::DerivedConstants dc =
        mra::derive_constants(p, b, 0.5, mra::RateSpec::by_eps);

    mra::EnsembleOptions opts;
    opts.threads = 1;
    const mra::BoundReport rep = mra::decay_report(
        p, b, dc, mra::FamilySpec::point({1.5, 0.0, 0.0, 0.0}), 0.0, 2.0, 2e-3, 100,
        200, 99, opts);
    CHECK(rep.pass);
    CHECK(rep.violation_margin <= 0.0);
    REQUIRE(rep.times.size() == rep.bound.size());
    // At release the envelope is anchored at the empirical mean: the margin
    // there is exactly -(K1/rate + K2 window) <= -K1/rate.
    CHECK(rep.measured.front() - rep.bound.front() <= -dc.K1 / dc.rate);
}
