#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <limits>
#include <sstream>
#include <vector>

#include "mfc/paths.hpp"

using namespace mfc;

namespace {

Path line_path(double a, double b, std::size_t steps) {
    TimeGrid grid(1.0, steps);
    std::vector<double> v(grid.points());
    for (std::size_t m = 0; m < grid.points(); ++m) v[m] = a + b * grid.time(m);
    return Path(grid, 1, std::move(v));
}

}  // namespace

TEST_SUITE("paths") {

TEST_CASE("time grid accessors and validation") {
    TimeGrid g(2.0, 8);
    CHECK(g.dt() == doctest::Approx(0.25));
    CHECK(g.points() == 9);
    CHECK(g.time(0) == 0.0);
    CHECK(g.time(8) == doctest::Approx(2.0));
    CHECK_THROWS_AS(TimeGrid(-1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(std::numeric_limits<double>::quiet_NaN(), 4),
                    std::invalid_argument);
}

TEST_CASE("path construction rejects bad buffers") {
    TimeGrid g(1.0, 2);
    CHECK_THROWS_AS(Path(g, 1, {0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(Path(g, 0, {}), std::invalid_argument);
    CHECK_THROWS_AS(Path(g, 1, {0.0, std::numeric_limits<double>::infinity(), 1.0}),
                    std::invalid_argument);
    Path p(g, 2, {0, 0, 1, 1, 2, 2});
    CHECK(p.value(1, 1) == 1.0);
    CHECK(p.point(2)[0] == 2.0);
}

TEST_CASE("norms on hand-computed examples") {
    TimeGrid g(1.0, 2);
    // f(t) = t^2 sampled at {0, 1/2, 1}
    Path sq(g, 1, {0.0, 0.25, 1.0});
    CHECK(uniform_norm(sq) == doctest::Approx(1.0));
    // Lipschitz case: max slope |1 - 0.25| / 0.5 = 1.5
    CHECK(holder_seminorm(sq, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
    // alpha 1/2: max of {0.25/sqrt(.5), 0.75/sqrt(.5), 1/1} = 0.75/sqrt(0.5)
    CHECK(holder_seminorm(sq, 0.5) ==
          doctest::Approx(0.75 / std::sqrt(0.5)).epsilon(1e-14));
    CHECK(holder_norm(sq, 1.0) == doctest::Approx(1.5));
    CHECK(holder_norm(sq, 0.5) ==
          doctest::Approx(0.75 / std::sqrt(0.5)).epsilon(1e-14));

    Path flat(g, 1, {0.3, 0.3, 0.3});
    CHECK(holder_seminorm(flat, 0.7) == 0.0);
    CHECK(holder_norm(flat, 0.7) == doctest::Approx(0.3));

    CHECK_THROWS_AS(holder_seminorm(sq, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(holder_seminorm(sq, 1.2), std::invalid_argument);
}

TEST_CASE("linear path seminorm equals slope for alpha one") {
    Path p = line_path(0.2, -1.7, 16);
    CHECK(holder_seminorm(p, 1.0) == doctest::Approx(1.7).epsilon(1e-13));
}

TEST_CASE("sup distance and restriction") {
    TimeGrid g(1.0, 4);
    Path a(g, 1, {0, 1, 2, 3, 4});
    Path b(g, 1, {0, 1, 2, 3, 0});
    CHECK(sup_distance(a, b) == doctest::Approx(4.0));
    Path ar = restrict(a, 2);
    CHECK(ar.grid().steps == 2);
    CHECK(ar.grid().horizon == doctest::Approx(0.5));
    CHECK(ar.value(2, 0) == 2.0);
    CHECK(sup_distance(restrict(a, 3), restrict(b, 3)) == 0.0);
    CHECK_THROWS_AS(restrict(a, 0), std::invalid_argument);
    CHECK_THROWS_AS(restrict(a, 5), std::invalid_argument);

    TimeGrid other(2.0, 4);
    Path c(other, 1, {0, 1, 2, 3, 4});
    CHECK_THROWS_AS(sup_distance(a, c), std::invalid_argument);
}

TEST_CASE("euclidean distance") {
    std::vector<double> x = {1.0, 2.0}, y = {4.0, 6.0};
    CHECK(euclidean_distance({x.data(), 2}, {y.data(), 2}) == doctest::Approx(5.0));
}

TEST_CASE("empirical path measure weights") {
    TimeGrid g(1.0, 1);
    std::vector<Path> atoms;
    atoms.emplace_back(g, 1, std::vector<double>{0.0, 1.0});
    atoms.emplace_back(g, 1, std::vector<double>{1.0, 0.0});
    auto mu = EmpiricalPathMeasure::uniform(atoms);
    CHECK(mu.size() == 2);
    CHECK(mu.weights()[0] == doctest::Approx(0.5));
    CHECK(mu.equal_weights());

    CHECK_THROWS_AS(EmpiricalPathMeasure(atoms, {0.5}), std::invalid_argument);
    CHECK_THROWS_AS(EmpiricalPathMeasure(atoms, {0.7, 0.7}), std::invalid_argument);
    CHECK_THROWS_AS(EmpiricalPathMeasure(atoms, {-0.1, 1.1}), std::invalid_argument);
    CHECK_THROWS_AS(EmpiricalPathMeasure({}, {}), std::invalid_argument);

    EmpiricalPathMeasure weighted(atoms, {0.25, 0.75});
    CHECK_FALSE(weighted.equal_weights());
}

TEST_CASE("projection extracts marginals and restriction keeps prefixes") {
    TimeGrid g(1.0, 2);
    std::vector<Path> atoms;
    atoms.emplace_back(g, 2, std::vector<double>{0, 0, 1, 2, 3, 4});
    atoms.emplace_back(g, 2, std::vector<double>{9, 9, 8, 7, 6, 5});
    auto mu = EmpiricalPathMeasure::uniform(atoms);

    auto marginal = project(mu, 1);
    CHECK(marginal.size() == 2);
    CHECK(marginal.dim() == 2);
    CHECK(marginal.point(0)[0] == 1.0);
    CHECK(marginal.point(0)[1] == 2.0);
    CHECK(marginal.point(1)[0] == 8.0);
    CHECK_THROWS_AS(project(mu, 3), std::invalid_argument);

    auto head = restrict(mu, 1);
    CHECK(head.grid().steps == 1);
    CHECK(head.atom(1).value(1, 1) == 7.0);
    CHECK(head.weights() == mu.weights());
}

TEST_CASE("point measure basics") {
    auto nu = EmpiricalPointMeasure::uniform(2, {0, 0, 3, 4});
    CHECK(nu.size() == 2);
    CHECK(nu.point(1)[1] == 4.0);
    CHECK_THROWS_AS(EmpiricalPointMeasure(2, {0, 0, 1}, {0.5, 0.5}),
                    std::invalid_argument);
}

TEST_CASE("pair measure alignment") {
    TimeGrid g(1.0, 1);
    std::vector<Path> first, second;
    first.emplace_back(g, 1, std::vector<double>{0.0, 1.0});
    second.emplace_back(g, 1, std::vector<double>{1.0, 0.0});
    auto pairs = EmpiricalPathPairMeasure::uniform(first, second);
    CHECK(pairs.size() == 1);
    CHECK(pairs.first(0).value(1, 0) == 1.0);
    CHECK(pairs.second(0).value(0, 0) == 1.0);

    second.emplace_back(g, 1, std::vector<double>{2.0, 2.0});
    CHECK_THROWS_AS(EmpiricalPathPairMeasure::uniform(first, second),
                    std::invalid_argument);
}

TEST_CASE("csv round trip is bitwise") {
    TimeGrid g(0.7, 3);
    Path p(g, 2, {0.1, -0.2, 1.0 / 3.0, 2.0 / 7.0, -1e-17, 5e300, 0.0, 1.25});
    std::string text = path_to_csv(p);
    std::istringstream in(text);
    Path q = path_from_csv(in);
    CHECK(q.dim() == p.dim());
    CHECK(q.grid().steps == p.grid().steps);
    CHECK(q.grid().horizon == doctest::Approx(p.grid().horizon).epsilon(1e-15));
    for (std::size_t m = 0; m < p.points(); ++m) {
        for (std::size_t c = 0; c < p.dim(); ++c) {
            CHECK(q.value(m, c) == p.value(m, c));
        }
    }

    std::istringstream bad("t,x1\n0,1\n");
    CHECK_THROWS_AS(path_from_csv(bad), std::invalid_argument);
    std::istringstream ragged("t,x1,x2\n0,1,2\n0.5,1\n1,2,3\n");
    CHECK_THROWS_AS(path_from_csv(ragged), std::invalid_argument);
}

}  // TEST_SUITE
