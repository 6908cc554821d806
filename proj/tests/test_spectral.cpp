#include <catch2/catch_amalgamated.hpp>

#include <mra/spectral.hpp>

#include <cmath>
#include <random>
#include <vector>

namespace {

std::vector<double> random_modes(std::mt19937_64& rng, int n, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    std::vector<double> g(static_cast<std::size_t>(n));
    for (double& x : g) x = gauss(rng);
    return g;
}

constexpr double pi = 3.14159265358979323846264338327950288;

} // namespace

TEST_CASE("basis construction validates its arguments", "[spectral]") {
    CHECK_THROWS_AS(mra::build_basis(0.0, 4, 16), mra::ConfigError);
    CHECK_THROWS_AS(mra::build_basis(-1.0, 4, 16), mra::ConfigError);
    CHECK_THROWS_AS(mra::build_basis(pi, 0, 16), mra::ConfigError);
    CHECK_THROWS_AS(mra::build_basis(pi, 4, 7), mra::ConfigError);
    CHECK_NOTHROW(mra::build_basis(pi, 4, 8));
}

TEST_CASE("eigenvalues and grid follow the Dirichlet eigenpairs", "[spectral]") {
    const mra::Basis b = mra::build_basis(2.0, 5, 12);
    for (int j = 1; j <= 5; ++j) {
        const double expected = (j * pi / 2.0) * (j * pi / 2.0);
        CHECK(b.lambda[j - 1] == Catch::Approx(expected).epsilon(1e-14));
    }
    CHECK(b.weight == Catch::Approx(2.0 / 13.0).epsilon(1e-15));
    CHECK(b.grid.front() == Catch::Approx(2.0 / 13.0).epsilon(1e-15));
    CHECK(b.grid.back() == Catch::Approx(24.0 / 13.0).epsilon(1e-15));
    // On the unit-eigenvalue domain the first eigenvalue is exactly one.
    const mra::Basis bp = mra::build_basis(pi, 3, 8);
    CHECK(bp.lambda[0] == Catch::Approx(1.0).epsilon(1e-14));
    CHECK(bp.lambda[2] == Catch::Approx(9.0).epsilon(1e-14));
}

TEST_CASE("analyze inverts synthesize on band-limited data", "[spectral]") {
    std::mt19937_64 rng(11);
    for (const auto& [L, N, Q] : {std::tuple{pi, 8, 32}, {2.5, 6, 12}, {1.0, 3, 6}}) {
        const mra::Basis b = mra::build_basis(L, N, Q);
        for (int rep = 0; rep < 20; ++rep) {
            const std::vector<double> gamma = random_modes(rng, N);
            std::vector<double> values, back;
            mra::synthesize_into(b, gamma, values);
            mra::analyze_into(b, values, back);
            for (int j = 0; j < N; ++j)
                CHECK(back[j] == Catch::Approx(gamma[j]).margin(1e-12));
        }
    }
}

TEST_CASE("quadrature norm equals the coefficient norm for band-limited data",
          "[spectral]") {
    std::mt19937_64 rng(12);
    const mra::Basis b = mra::build_basis(pi, 8, 32);
    for (int rep = 0; rep < 20; ++rep) {
        const std::vector<double> gamma = random_modes(rng, 8);
        std::vector<double> values;
        mra::synthesize_into(b, gamma, values);
        CHECK(mra::quad_norm_sq(b, values) ==
              Catch::Approx(mra::h_norm_sq(b, gamma)).epsilon(1e-12));
    }
    // The quadrature inner product matches the coefficient inner product too.
    const std::vector<double> u = random_modes(rng, 8);
    const std::vector<double> v = random_modes(rng, 8);
    std::vector<double> gu, gv;
    mra::synthesize_into(b, u, gu);
    mra::synthesize_into(b, v, gv);
    double dot = 0.0;
    for (int j = 0; j < 8; ++j) dot += u[j] * v[j];
    CHECK(mra::quad_inner(b, gu, gv) == Catch::Approx(dot).margin(1e-12));
}

TEST_CASE("norms weight modes by their eigenvalues", "[spectral]") {
    const mra::Basis b = mra::build_basis(pi, 3, 8);
    const std::vector<double> gamma = {2.0, 0.0, -1.0};
    const mra::Norms n = mra::sobolev_norms(b, gamma);
    CHECK(n.h_sq == Catch::Approx(5.0).epsilon(1e-14));
    CHECK(n.v_sq == Catch::Approx(4.0 + 9.0).epsilon(1e-13));
    // Applying the negative Laplacian mode-wise and dualizing gives back the
    // V-norm: sum (lambda_j g_j)^2 / lambda_j = sum lambda_j g_j^2.
    std::vector<double> w(3);
    for (int j = 0; j < 3; ++j) w[j] = b.lambda[j] * gamma[j];
    CHECK(mra::dual_norm_sq(b, w) == Catch::Approx(n.v_sq).epsilon(1e-13));
}

TEST_CASE("dimension mismatches are rejected", "[spectral]") {
    const mra::Basis b = mra::build_basis(pi, 3, 8);
    CHECK_THROWS_AS(mra::make_state(b, {1.0, 2.0}), mra::DimensionError);
    CHECK_THROWS_AS(mra::dual_norm_sq(b, {1.0}), mra::DimensionError);
    CHECK_NOTHROW(mra::make_state(b, {1.0, 2.0, 3.0}));
}

TEST_CASE("the top retained mode survives the coarsest admissible grid", "[spectral]") {
    const int N = 6;
    const mra::Basis b = mra::build_basis(pi, N, 2 * N);
    std::vector<double> gamma(N, 0.0), values, back;
    gamma[N - 1] = 1.0;
    mra::synthesize_into(b, gamma, values);
    mra::analyze_into(b, values, back);
    for (int j = 0; j < N; ++j)
        CHECK(back[j] == Catch::Approx(gamma[j]).margin(1e-12));
}

TEST_CASE("projection of smooth off-basis data converges with the grid", "[spectral]") {
    // g(x) = x (L - x) on (0, pi): first coefficient 4 sqrt(2/pi).
    const double exact = 4.0 * std::sqrt(2.0 / pi);
    auto first_coeff = [&](int Q) {
        const mra::Basis b = mra::build_basis(pi, 4, Q);
        std::vector<double> values(static_cast<std::size_t>(Q)), gamma;
        for (int k = 0; k < Q; ++k) values[k] = b.grid[k] * (pi - b.grid[k]);
        mra::analyze_into(b, values, gamma);
        return gamma[0];
    };
    const double err_coarse = std::abs(first_coeff(64) - exact);
    const double err_fine = std::abs(first_coeff(128) - exact);
    CHECK(err_coarse < 1e-5);
    CHECK(err_fine < 0.3 * err_coarse);  // at least second-order decay
}
