#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <cstdint>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include "mfc/paths.hpp"
#include "mfc/rng.hpp"
#include "mfc/transport.hpp"

using namespace mfc;

namespace {

// test-local deterministic input generator
struct Gen {
    std::uint64_t seed;
    std::uint64_t counter = 0;
    double next() { return uniform01(seed, Stream::test, counter++, 0, 0); }
    double sym() { return 2.0 * next() - 1.0; }
    std::size_t upto(std::size_t n) {
        return std::min<std::size_t>(n - 1, static_cast<std::size_t>(next() * n));
    }
};

// independent minimum over all matchings of uniform empirical measures
double brute_force_value(const std::vector<std::vector<double>>& dist, double p) {
    const std::size_t n = dist.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += std::pow(dist[i][perm[i]], p);
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::pow(best / static_cast<double>(n), 1.0 / p);
}

EmpiricalPointMeasure random_cloud(Gen& gen, std::size_t n, std::size_t dim) {
    std::vector<double> pts(n * dim);
    for (auto& v : pts) v = 3.0 * gen.sym();
    return EmpiricalPointMeasure::uniform(dim, std::move(pts));
}

std::vector<std::vector<double>> point_distances(const EmpiricalPointMeasure& mu,
                                                 const EmpiricalPointMeasure& nu) {
    std::vector<std::vector<double>> d(mu.size(), std::vector<double>(nu.size()));
    for (std::size_t i = 0; i < mu.size(); ++i) {
        for (std::size_t j = 0; j < nu.size(); ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < mu.dim(); ++c) {
                double diff = mu.point(i)[c] - nu.point(j)[c];
                s += diff * diff;
            }
            d[i][j] = std::sqrt(s);
        }
    }
    return d;
}

Path random_path(Gen& gen, const TimeGrid& grid, std::size_t dim) {
    std::vector<double> v(grid.points() * dim);
    double level = gen.sym();
    for (std::size_t m = 0; m < grid.points(); ++m) {
        for (std::size_t c = 0; c < dim; ++c) {
            level += 0.5 * gen.sym();
            v[m * dim + c] = level;
        }
    }
    return Path(grid, dim, std::move(v));
}

// weights k_i / total from small positive integers
std::vector<double> rational_weights(Gen& gen, std::size_t n) {
    std::vector<double> counts(n);
    double total = 0.0;
    for (auto& c : counts) {
        c = 1.0 + static_cast<double>(gen.upto(4));
        total += c;
    }
    for (auto& c : counts) c /= total;
    return counts;
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("assignment route matches permutation brute force on point clouds") {
    Gen gen{101};
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 2 + gen.upto(5);
        std::size_t dim = 1 + gen.upto(3);
        double p = (trial % 2 == 0) ? 1.0 : 2.0;
        auto mu = random_cloud(gen, n, dim);
        auto nu = random_cloud(gen, n, dim);
        auto result = wasserstein(mu, nu, p);
        CHECK(result.solver == "assignment");
        double oracle = brute_force_value(point_distances(mu, nu), p);
        CHECK(std::abs(result.value - oracle) <= 1e-9);
    }
}

TEST_CASE("assignment route matches brute force on path measures") {
    Gen gen{202};
    TimeGrid grid(1.0, 3);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n = 2 + gen.upto(4);
        std::size_t dim = 1 + gen.upto(2);
        double p = (trial % 2 == 0) ? 1.0 : 2.0;
        std::vector<Path> a, b;
        for (std::size_t i = 0; i < n; ++i) {
            a.push_back(random_path(gen, grid, dim));
            b.push_back(random_path(gen, grid, dim));
        }
        auto mu = EmpiricalPathMeasure::uniform(a);
        auto nu = EmpiricalPathMeasure::uniform(b);

        std::vector<std::vector<double>> dist(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double best = 0.0;
                for (std::size_t m = 0; m < grid.points(); ++m) {
                    double s = 0.0;
                    for (std::size_t c = 0; c < dim; ++c) {
                        double diff = a[i].value(m, c) - b[j].value(m, c);
                        s += diff * diff;
                    }
                    best = std::max(best, std::sqrt(s));
                }
                dist[i][j] = best;
            }
        }
        auto result = wasserstein(mu, nu, p);
        double oracle = brute_force_value(dist, p);
        CHECK(std::abs(result.value - oracle) <= 1e-9);
    }
}

TEST_CASE("network simplex matches atom duplication oracle on weighted clouds") {
    Gen gen{303};
    for (int trial = 0; trial < 25; ++trial) {
        std::size_t n = 2 + gen.upto(3);
        std::size_t m = 2 + gen.upto(3);
        std::size_t dim = 1 + gen.upto(2);
        double p = (trial % 2 == 0) ? 1.0 : 2.0;

        // weights with denominator 8 so duplication is exact
        std::vector<double> wm(n, 0.0), wn(m, 0.0);
        std::vector<int> cm(n, 1), cn(m, 1);
        int left = static_cast<int>(8 - n);
        for (int k = 0; k < left; ++k) cm[gen.upto(n)] += 1;
        left = static_cast<int>(8 - m);
        for (int k = 0; k < left; ++k) cn[gen.upto(m)] += 1;
        for (std::size_t i = 0; i < n; ++i) wm[i] = cm[i] / 8.0;
        for (std::size_t j = 0; j < m; ++j) wn[j] = cn[j] / 8.0;

        std::vector<double> pm(n * dim), pn(m * dim);
        for (auto& v : pm) v = 3.0 * gen.sym();
        for (auto& v : pn) v = 3.0 * gen.sym();

        EmpiricalPointMeasure mu(dim, pm, wm);
        EmpiricalPointMeasure nu(dim, pn, wn);
        auto result = wasserstein(mu, nu, p);
        // equal-sized clouds can draw uniform weights, which dispatch to the
        // assignment route instead
        if (!mu.equal_weights() || !nu.equal_weights() || n != m) {
            CHECK(result.solver == "network_simplex");
        }

        // duplicated 8x8 uniform instance solved through the assignment route
        std::vector<double> dup_m, dup_n;
        for (std::size_t i = 0; i < n; ++i)
            for (int k = 0; k < cm[i]; ++k)
                dup_m.insert(dup_m.end(), pm.begin() + i * dim, pm.begin() + (i + 1) * dim);
        for (std::size_t j = 0; j < m; ++j)
            for (int k = 0; k < cn[j]; ++k)
                dup_n.insert(dup_n.end(), pn.begin() + j * dim, pn.begin() + (j + 1) * dim);
        auto mu8 = EmpiricalPointMeasure::uniform(dim, dup_m);
        auto nu8 = EmpiricalPointMeasure::uniform(dim, dup_n);
        auto oracle = wasserstein(mu8, nu8, p);
        CHECK(oracle.solver == "assignment");
        CHECK(std::abs(result.value - oracle.value) <= 1e-9);
    }
}

TEST_CASE("uniform unequal counts agree with lcm duplication") {
    Gen gen{404};
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t dim = 1 + gen.upto(2);
        double p = (trial % 2 == 0) ? 1.0 : 2.0;
        std::vector<double> pm(3 * dim), pn(6 * dim);
        for (auto& v : pm) v = 2.0 * gen.sym();
        for (auto& v : pn) v = 2.0 * gen.sym();
        auto mu = EmpiricalPointMeasure::uniform(dim, pm);
        auto nu = EmpiricalPointMeasure::uniform(dim, pn);
        auto result = wasserstein(mu, nu, p);
        CHECK(result.solver == "network_simplex");

        std::vector<double> dup;
        for (std::size_t i = 0; i < 3; ++i) {
            dup.insert(dup.end(), pm.begin() + i * dim, pm.begin() + (i + 1) * dim);
            dup.insert(dup.end(), pm.begin() + i * dim, pm.begin() + (i + 1) * dim);
        }
        auto mu6 = EmpiricalPointMeasure::uniform(dim, dup);
        auto oracle = wasserstein(mu6, nu, p);
        CHECK(std::abs(result.value - oracle.value) <= 1e-9);
    }
}

TEST_CASE("primal solver agrees with the cdf dual on the line") {
    Gen gen{505};
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 1 + gen.upto(12);
        std::size_t m = 1 + gen.upto(12);
        std::vector<double> pm(n), pn(m);
        for (auto& v : pm) v = 5.0 * gen.sym();
        for (auto& v : pn) v = 5.0 * gen.sym();

        std::vector<double> wm(n), wn(m);
        double sm = 0.0, sn = 0.0;
        for (auto& v : wm) { v = 0.05 + gen.next(); sm += v; }
        for (auto& v : wn) { v = 0.05 + gen.next(); sn += v; }
        for (auto& v : wm) v /= sm;
        for (auto& v : wn) v /= sn;

        EmpiricalPointMeasure mu(1, pm, wm);
        EmpiricalPointMeasure nu(1, pn, wn);
        double primal = wasserstein(mu, nu, 1.0).value;
        double dual = w1_dual_1d(mu, nu);
        CHECK(std::abs(primal - dual) <= 1e-8);
    }
}

TEST_CASE("cdf dual hand values") {
    auto d0 = EmpiricalPointMeasure::uniform(1, {0.0});
    auto d1 = EmpiricalPointMeasure::uniform(1, {1.0});
    CHECK(w1_dual_1d(d0, d1) == doctest::Approx(1.0).epsilon(1e-15));

    auto mu = EmpiricalPointMeasure::uniform(1, {0.0, 1.0});
    auto nu = EmpiricalPointMeasure::uniform(1, {0.5, 1.5});
    CHECK(w1_dual_1d(mu, nu) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(w1_dual_1d(mu, mu) == 0.0);

    auto flat = EmpiricalPointMeasure::uniform(2, {0, 0, 1, 1});
    CHECK_THROWS_AS(w1_dual_1d(flat, flat), std::invalid_argument);
}

TEST_CASE("transport plans are feasible and price out the reported value") {
    Gen gen{606};
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t n = 2 + gen.upto(4);
        std::size_t m = 2 + gen.upto(4);
        auto mu = random_cloud(gen, n, 2);
        std::vector<double> pn(m * 2);
        for (auto& v : pn) v = 3.0 * gen.sym();
        EmpiricalPointMeasure nu(2, pn, rational_weights(gen, m));

        double p = (trial % 2 == 0) ? 1.0 : 2.0;
        auto cost = cost_matrix(mu, nu, p);
        auto result = wasserstein(cost, mu.weights(), nu.weights());

        auto rows = result.plan.row_sums();
        auto cols = result.plan.col_sums();
        for (std::size_t i = 0; i < n; ++i)
            CHECK(rows[i] == doctest::Approx(mu.weights()[i]).epsilon(1e-12));
        for (std::size_t j = 0; j < m; ++j)
            CHECK(cols[j] == doctest::Approx(nu.weights()[j]).epsilon(1e-12));

        double priced = 0.0;
        for (const auto& e : result.plan.entries) {
            CHECK(e.mass >= 0.0);
            priced += e.mass * cost.at(e.i, e.j);
        }
        CHECK(priced == doctest::Approx(result.transport_cost).epsilon(1e-12));
        CHECK(result.value ==
              doctest::Approx(std::pow(result.transport_cost, 1.0 / p)).epsilon(1e-12));
    }
}

TEST_CASE("repeat solves give identical plans") {
    Gen gen{707};
    auto mu = random_cloud(gen, 5, 2);
    auto nu = random_cloud(gen, 5, 2);
    auto r1 = wasserstein(mu, nu, 2.0);
    auto r2 = wasserstein(mu, nu, 2.0);
    REQUIRE(r1.plan.entries.size() == r2.plan.entries.size());
    for (std::size_t k = 0; k < r1.plan.entries.size(); ++k) {
        CHECK(r1.plan.entries[k].i == r2.plan.entries[k].i);
        CHECK(r1.plan.entries[k].j == r2.plan.entries[k].j);
        CHECK(r1.plan.entries[k].mass == r2.plan.entries[k].mass);
    }
}

TEST_CASE("metric axioms hold on random triples") {
    Gen gen{808};
    for (int trial = 0; trial < 12; ++trial) {
        std::size_t n = 2 + gen.upto(4);
        double p = (trial % 2 == 0) ? 1.0 : 2.0;
        auto a = random_cloud(gen, n, 2);
        auto b = random_cloud(gen, n, 2);
        auto c = random_cloud(gen, n, 2);
        double ab = wasserstein(a, b, p).value;
        double ba = wasserstein(b, a, p).value;
        double bc = wasserstein(b, c, p).value;
        double ac = wasserstein(a, c, p).value;
        CHECK(std::abs(ab - ba) <= 1e-9);
        CHECK(ac <= ab + bc + 1e-9);
        CHECK(wasserstein(a, a, p).value == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("order one never exceeds order two") {
    Gen gen{909};
    for (int trial = 0; trial < 10; ++trial) {
        auto a = random_cloud(gen, 4, 2);
        auto b = random_cloud(gen, 4, 2);
        CHECK(wasserstein(a, b, 1.0).value <= wasserstein(a, b, 2.0).value + 1e-12);
    }
}

TEST_CASE("marginal and prefix distances never exceed the path distance") {
    Gen gen{1010};
    TimeGrid grid(1.0, 5);
    for (int trial = 0; trial < 12; ++trial) {
        std::size_t n = 2 + gen.upto(4);
        double p = (trial % 2 == 0) ? 1.0 : 2.0;
        std::vector<Path> a, b;
        for (std::size_t i = 0; i < n; ++i) {
            a.push_back(random_path(gen, grid, 1));
            b.push_back(random_path(gen, grid, 1));
        }
        auto mu = EmpiricalPathMeasure::uniform(a);
        auto nu = EmpiricalPathMeasure::uniform(b);
        double full = wasserstein(mu, nu, p).value;
        for (std::size_t t = 0; t <= grid.steps; ++t) {
            double marginal = wasserstein(project(mu, t), project(nu, t), p).value;
            CHECK(marginal <= full + 1e-9);
        }
        for (std::size_t u = 1; u <= grid.steps; ++u) {
            double prefix = wasserstein(restrict(mu, u), restrict(nu, u), p).value;
            CHECK(prefix <= full + 1e-9);
        }
    }
}

TEST_CASE("pair measures use the sum metric") {
    Gen gen{1111};
    TimeGrid grid(1.0, 2);
    for (int trial = 0; trial < 8; ++trial) {
        std::size_t n = 2 + gen.upto(3);
        std::vector<Path> a1, a2, b1, b2;
        for (std::size_t i = 0; i < n; ++i) {
            a1.push_back(random_path(gen, grid, 1));
            a2.push_back(random_path(gen, grid, 1));
            b1.push_back(random_path(gen, grid, 1));
            b2.push_back(random_path(gen, grid, 1));
        }
        auto mu = EmpiricalPathPairMeasure::uniform(a1, a2);
        auto nu = EmpiricalPathPairMeasure::uniform(b1, b2);

        std::vector<std::vector<double>> dist(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                dist[i][j] = sup_distance(a1[i], b1[j]) + sup_distance(a2[i], b2[j]);

        auto result = product_wasserstein(mu, nu, 1.0);
        double oracle = brute_force_value(dist, 1.0);
        CHECK(std::abs(result.value - oracle) <= 1e-9);
        CHECK(product_wasserstein(mu, mu, 1.0).value == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("relative entropy conventions") {
    CHECK(relative_entropy({0.25, 0.25, 0.25, 0.25}, {0.25, 0.25, 0.25, 0.25}) == 0.0);
    CHECK(relative_entropy({0.5, 0.5, 0.0, 0.0}, {0.25, 0.25, 0.25, 0.25}) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(std::isinf(relative_entropy({0.5, 0.5}, {1.0, 0.0})));
    CHECK(relative_entropy({0.0, 1.0}, {0.5, 0.5}) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(relative_entropy({1.0}, {0.5, 0.5}), std::invalid_argument);

    auto mu = EmpiricalPointMeasure(1, {0.0, 1.0}, {0.5, 0.5});
    auto nu = EmpiricalPointMeasure(1, {0.0, 1.0}, {0.25, 0.75});
    CHECK(relative_entropy(nu, mu) ==
          doctest::Approx(0.25 * std::log(0.5) + 0.75 * std::log(1.5)).epsilon(1e-14));
    auto other = EmpiricalPointMeasure(1, {0.0, 1.5}, {0.25, 0.75});
    CHECK_THROWS_AS(relative_entropy(other, mu), std::invalid_argument);
}

TEST_CASE("quadratic transport entropy margin closed forms") {
    // shifted standard construction: entropy m^2/(2 s^2), distance |m|, rate 1/s^2
    for (double m : {-2.0, -0.5, 0.3, 1.0, 4.0}) {
        for (double s : {0.25, 1.0, 3.0}) {
            double entropy = m * m / (2.0 * s * s);
            double lambda = 1.0 / (s * s);
            CHECK(std::abs(talagrand_margin(entropy, std::abs(m), lambda)) <= 1e-9);
        }
    }
    CHECK(talagrand_margin(0.0, 0.0, 2.0) == 0.0);

    // two-atom pair violating an overstated rate
    auto mu = EmpiricalPointMeasure(1, {0.0, 0.3}, {0.5, 0.5});
    auto nu = EmpiricalPointMeasure(1, {0.0, 0.3}, {0.0, 1.0});
    double margin = talagrand_margin(mu, nu, 1.0, 100.0);
    CHECK(margin < 0.0);
    // consistency of the measure overload with the scalar form
    double h = relative_entropy(nu, mu);
    double w = wasserstein(mu, nu, 1.0).value;
    CHECK(margin == doctest::Approx(talagrand_margin(h, w, 100.0)).epsilon(1e-12));
    CHECK(talagrand_margin(mu, mu, 2.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(talagrand_margin(1.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(talagrand_margin(-0.5, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("audit dumps have headers and one row per entry") {
    auto mu = EmpiricalPointMeasure::uniform(1, {0.0, 1.0});
    auto nu = EmpiricalPointMeasure::uniform(1, {0.5, 2.0});
    auto cost = cost_matrix(mu, nu, 1.0);
    std::ostringstream cost_text;
    write_cost_csv(cost, cost_text);
    CHECK(cost_text.str().rfind("i,j,cost", 0) == 0);

    auto result = wasserstein(cost, mu.weights(), nu.weights());
    std::ostringstream plan_text;
    write_plan_csv(result.plan, plan_text);
    CHECK(plan_text.str().rfind("i,j,mass", 0) == 0);
    std::size_t lines = 0;
    for (char ch : plan_text.str()) lines += (ch == '\n');
    CHECK(lines == result.plan.entries.size() + 1);
}

TEST_CASE("input validation") {
    auto mu = EmpiricalPointMeasure::uniform(1, {0.0});
    auto nu = EmpiricalPointMeasure::uniform(2, {0.0, 0.0});
    CHECK_THROWS_AS(cost_matrix(mu, nu, 1.0), std::invalid_argument);
    auto same = EmpiricalPointMeasure::uniform(1, {0.0, 1.0});
    CHECK_THROWS_AS(cost_matrix(same, same, 0.5), std::invalid_argument);
    auto cost = cost_matrix(same, same, 1.0);
    CHECK_THROWS_AS(wasserstein(cost, {1.0}, {0.5, 0.5}), std::invalid_argument);
}

}  // TEST_SUITE
