#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <cstring>
#include <vector>

#include "mfc/sde.hpp"

using namespace mfc;

namespace {

SimulationConfig free_motion(std::size_t particles, std::size_t dim, double horizon,
                             std::size_t steps) {
    SimulationConfig config;
    config.particles = particles;
    config.dim = dim;
    config.grid = TimeGrid(horizon, steps);
    config.confinement = make_zero_confinement(dim);
    config.interaction = make_zero_interaction(dim);
    config.initial = gaussian_initial(std::vector<double>(dim, 0.0), 0.0);
    return config;
}

}  // namespace

TEST_SUITE("sde") {

TEST_CASE("initial laws sample their stated distributions") {
    auto gauss = gaussian_initial({3.0}, 2.0);
    CHECK(gauss.square_exp_scale == doctest::Approx(1.0 / 16.0));
    const std::size_t n = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x;
        sample_initial(gauss, 5, Stream::initial, i, &x);
        sum += x;
        sumsq += x * x;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    CHECK(mean == doctest::Approx(3.0).epsilon(0.02));
    CHECK(var == doctest::Approx(4.0).epsilon(0.05));

    auto ball = uniform_ball_initial({1.0, -1.0}, 0.5);
    CHECK(std::isinf(ball.square_exp_scale));
    double max_r = 0.0;
    for (std::size_t i = 0; i < 20000; ++i) {
        double x[2];
        sample_initial(ball, 5, Stream::initial, i, x);
        double r = std::hypot(x[0] - 1.0, x[1] + 1.0);
        CHECK(r <= 0.5);
        max_r = std::max(max_r, r);
    }
    CHECK(max_r > 0.49);

    CHECK_THROWS_AS(gaussian_initial({}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_initial({0.0}, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(uniform_ball_initial({0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("deterministic start decays at the exact discrete rate") {
    // dX = -kappa X dt + sqrt(2) dB from X_0 = x0: the discrete mean is
    // x0 (1 - kappa dt)^M and the discrete variance 2 dt (1-rho^2M)/(1-rho^2).
    const double kappa = 1.0;
    const std::size_t steps = 32;
    const std::size_t n = 4000;
    SimulationConfig config = free_motion(n, 1, 1.0, steps);
    config.confinement = make_quadratic_confinement(kappa, {0.0});
    config.initial = gaussian_initial({2.0}, 0.0);

    auto ensemble = simulate_interacting(config, BrownianDriver::main(21));
    REQUIRE(ensemble.size() == n);

    const double dt = config.grid.dt();
    const double rho = 1.0 - kappa * dt;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double x = ensemble.atom(i).value(steps, 0);
        sum += x;
        sumsq += x * x;
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    double mean_exact = 2.0 * std::pow(rho, static_cast<double>(steps));
    double var_exact = 2.0 * dt * (1.0 - std::pow(rho, 2.0 * steps)) / (1.0 - rho * rho);
    CHECK(std::abs(mean - mean_exact) < 0.05);
    CHECK(std::abs(var - var_exact) < 0.10 * var_exact);
}

TEST_CASE("free motion matches the brownian variance ramp") {
    const std::size_t steps = 16, n = 4000;
    auto config = free_motion(n, 1, 1.0, steps);
    auto ensemble = simulate_interacting(config, BrownianDriver::main(3));
    for (std::size_t m : {static_cast<std::size_t>(4), steps}) {
        double sumsq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double x = ensemble.atom(i).value(m, 0);
            sumsq += x * x;
        }
        double var = sumsq / n;  // mean is zero by construction
        CHECK(var == doctest::Approx(2.0 * config.grid.time(m)).epsilon(0.08));
    }
}

TEST_CASE("same seed reproduces bitwise, different seed does not") {
    auto config = free_motion(8, 2, 0.5, 8);
    config.confinement = make_quadratic_confinement(1.0, {0.0, 0.0});
    config.interaction = make_quadratic_interaction(2, 0.5);
    config.initial = gaussian_initial({0.0, 0.0}, 1.0);

    auto a = simulate_interacting(config, BrownianDriver::main(77));
    auto b = simulate_interacting(config, BrownianDriver::main(77));
    auto c = simulate_interacting(config, BrownianDriver::main(78));
    bool identical = true, distinct = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        identical = identical && (a.atom(i).values() == b.atom(i).values());
        distinct = distinct || (a.atom(i).values() != c.atom(i).values());
    }
    CHECK(identical);
    CHECK(distinct);
}

TEST_CASE("reference ensembles use disjoint streams") {
    auto config = free_motion(4, 1, 0.5, 8);
    auto main_run = simulate_interacting(config, BrownianDriver::main(9));
    auto ref_run = simulate_reference_ensemble(config, 4, BrownianDriver::reference(9));
    CHECK(ref_run.size() == 4);
    bool differs = false;
    for (std::size_t i = 0; i < 4; ++i) {
        differs = differs || (main_run.atom(i).values() != ref_run.atom(i).values());
    }
    CHECK(differs);
}

TEST_CASE("coupled copy is bitwise identical without interaction") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        auto config = free_motion(16, 1, 1.0, 16);
        config.confinement = make_quadratic_confinement(1.5, {0.0});
        config.initial = gaussian_initial({0.0}, 1.0);
        auto reference =
            simulate_reference_ensemble(config, 32, BrownianDriver::reference(seed));
        auto run = simulate_coupled(config, BrownianDriver::main(seed), reference);
        REQUIRE(run.x.size() == run.y.size());
        for (std::size_t i = 0; i < run.x.size(); ++i) {
            const auto& xv = run.x.atom(i).values();
            const auto& yv = run.y.atom(i).values();
            CHECK(std::memcmp(xv.data(), yv.data(), xv.size() * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("coupling gap shrinks as the system grows") {
    // with a true interaction the ensemble-averaged sup gap decays once the
    // empirical drift concentrates; compare a small and a large system
    auto gap = [](std::size_t n, std::uint64_t seed) {
        SimulationConfig config;
        config.particles = n;
        config.dim = 1;
        config.grid = TimeGrid(0.5, 32);
        config.confinement = make_quadratic_confinement(2.0, {0.0});
        config.interaction = make_quadratic_interaction(1, 0.5);
        config.initial = gaussian_initial({0.0}, 1.0);
        auto reference =
            simulate_reference_ensemble(config, 256, BrownianDriver::reference(seed));
        auto run = simulate_coupled(config, BrownianDriver::main(seed), reference);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += sup_distance(run.x.atom(i), run.y.atom(i));
        }
        return total / static_cast<double>(n);
    };
    std::vector<double> small, large;
    for (std::uint64_t seed : {11ull, 12ull, 13ull, 14ull, 15ull}) {
        small.push_back(gap(4, seed));
        large.push_back(gap(64, seed));
    }
    std::sort(small.begin(), small.end());
    std::sort(large.begin(), large.end());
    CHECK(large[2] < small[2]);
}

TEST_CASE("validation rejects inconsistent configurations") {
    auto config = free_motion(4, 2, 1.0, 4);
    config.initial = gaussian_initial({0.0}, 1.0);  // wrong dimension
    CHECK_THROWS_AS(validate(config), std::invalid_argument);

    config = free_motion(0, 1, 1.0, 4);
    CHECK_THROWS_AS(validate(config), std::invalid_argument);

    config = free_motion(4, 1, 1.0, 4);
    auto reference = simulate_reference_ensemble(config, 2, BrownianDriver::reference(1));
    auto other = free_motion(4, 1, 2.0, 4);
    CHECK_THROWS_AS(simulate_coupled(other, BrownianDriver::main(1), reference),
                    std::invalid_argument);
}

TEST_CASE("explicit scheme reports divergence") {
    auto config = free_motion(2, 1, 400.0, 400);  // dt = 1, stiff drift below
    config.confinement = make_quadratic_confinement(10.0, {0.0});
    config.initial = gaussian_initial({1.0}, 0.0);
    CHECK_THROWS_WITH_AS(simulate_interacting(config, BrownianDriver::main(4)),
                         doctest::Contains("diverged"), std::runtime_error);
}

}  // TEST_SUITE
