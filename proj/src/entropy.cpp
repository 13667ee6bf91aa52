#include "mfc/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mfc/rng.hpp"

namespace mfc {

namespace {

std::size_t smallest_integer_geq(double x, const char* what) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw std::invalid_argument(std::string(what) + ": lattice size must be positive and finite");
    }
    double c = std::ceil(x);
    if (c > 9.0e15) {
        throw std::overflow_error(std::string(what) + ": lattice size does not fit an integer");
    }
    return static_cast<std::size_t>(c);
}

void check_radius(double r) {
    if (!std::isfinite(r) || r <= 0.0) {
        throw std::invalid_argument("covering radius must be positive and finite");
    }
}

// piecewise-affine evaluation on knots t_j = (j - 1/2) tau, flat outside
double knot_interp(const std::vector<double>& values, double tau, double t) {
    const std::size_t J = values.size();
    const double t1 = 0.5 * tau;
    if (t <= t1 || J == 1) {
        return values.front();
    }
    const double tJ = (static_cast<double>(J) - 0.5) * tau;
    if (t >= tJ) {
        return values.back();
    }
    auto j = static_cast<std::size_t>((t - t1) / tau);  // segment [t_{j+1}, t_{j+2}), 0-based
    if (j > J - 2) {
        j = J - 2;
    }
    const double tj = (static_cast<double>(j) + 0.5) * tau;
    const double s = (t - tj) / tau;
    return (1.0 - s) * values[j] + s * values[j + 1];
}

}  // namespace

void validate(const HolderBallSpec& spec) {
    if (spec.dim == 0) {
        throw std::invalid_argument("ball dimension must be at least 1");
    }
    if (!(spec.horizon > 0.0) || !std::isfinite(spec.horizon)) {
        throw std::invalid_argument("ball horizon must be positive and finite");
    }
    if (!(spec.radius > 0.0) || !std::isfinite(spec.radius)) {
        throw std::invalid_argument("ball radius must be positive and finite");
    }
    if (!(spec.alpha > 0.0) || spec.alpha > 1.0) {
        throw std::invalid_argument("ball exponent must lie in (0, 1]");
    }
}

double covering_upper_bound_log(const HolderBallSpec& spec, double r) {
    validate(spec);
    check_radius(r);
    if (r >= spec.radius) {
        return 0.0;
    }
    const double d = static_cast<double>(spec.dim);
    const double inva = 1.0 / spec.alpha;
    const double ratio = spec.radius / r;
    return d * std::log(10.0 * std::sqrt(d) * ratio) +
           std::pow(5.0, inva) * std::pow(d, 1.0 + 0.5 * inva) * spec.horizon *
               std::pow(ratio, inva) * std::log(3.0);
}

double covering_lower_bound_validity(const HolderBallSpec& spec) {
    validate(spec);
    const double ta = std::pow(spec.horizon, spec.alpha);
    return spec.radius * ta / (4.0 * ta + 4.0);
}

double covering_lower_bound_log(const HolderBallSpec& spec, double r) {
    validate(spec);
    check_radius(r);
    const double limit = covering_lower_bound_validity(spec);
    if (r > limit) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "covering lower bound needs r <= %.17g, got %.17g", limit, r);
        throw std::domain_error(buf);
    }
    const double d = static_cast<double>(spec.dim);
    const double inva = 1.0 / spec.alpha;
    const double ratio = spec.radius / r;
    return d * std::log(std::sqrt(d) * ratio / 4.0) +
           std::pow(2.0, -inva) * std::pow(d, 1.0 + 0.5 * inva) * spec.horizon *
               std::pow(ratio, inva) * std::log(2.0);
}

CoverFormula cover_formula(const HolderBallSpec& spec, double r) {
    validate(spec);
    check_radius(r);
    const double d = static_cast<double>(spec.dim);
    const double inva = 1.0 / spec.alpha;
    const double ratio = std::sqrt(d) * spec.radius / r;
    CoverFormula out;
    out.time_cells = smallest_integer_geq(
        std::pow(5.0, inva) * spec.horizon * std::pow(ratio, inva), "cover time cells");
    out.level_cells = smallest_integer_geq(4.0 * ratio, "cover level cells");
    out.log_count = d * (std::log(2.0 * static_cast<double>(out.level_cells)) +
                         static_cast<double>(out.time_cells - 1) * std::log(3.0));
    return out;
}

CoverConstruction::CoverConstruction(double horizon, double tau, double eta,
                                     std::size_t time_cells, std::size_t level_cells,
                                     std::vector<std::vector<int>> index_paths)
    : horizon_(horizon),
      tau_(tau),
      eta_(eta),
      time_cells_(time_cells),
      level_cells_(level_cells),
      index_paths_(std::move(index_paths)) {}

double CoverConstruction::center_value(std::size_t center, double t) const {
    const auto& k = index_paths_.at(center);
    std::vector<double> values(k.size());
    for (std::size_t j = 0; j < k.size(); ++j) {
        values[j] = level(k[j]);
    }
    return knot_interp(values, tau_, t);
}

double CoverConstruction::center_distance(std::size_t center, const Path& f) const {
    if (f.dim() != 1) {
        throw std::invalid_argument("cover centers are scalar paths");
    }
    const auto& k = index_paths_.at(center);
    std::vector<double> values(k.size());
    for (std::size_t j = 0; j < k.size(); ++j) {
        values[j] = level(k[j]);
    }
    double worst = 0.0;
    for (std::size_t m = 0; m <= f.grid().steps; ++m) {
        const double diff = std::fabs(f.value(m, 0) - knot_interp(values, tau_, f.grid().time(m)));
        worst = std::max(worst, diff);
    }
    return worst;
}

Path CoverConstruction::center_path(std::size_t center, const TimeGrid& grid) const {
    std::vector<double> flat(grid.points());
    for (std::size_t m = 0; m <= grid.steps; ++m) {
        flat[m] = center_value(center, grid.time(m));
    }
    return Path(grid, 1, std::move(flat));
}

CoverConstruction build_cover(const HolderBallSpec& spec, double r, std::size_t cap) {
    validate(spec);
    check_radius(r);
    if (spec.dim != 1) {
        throw std::invalid_argument("explicit cover enumeration is implemented for dim 1");
    }
    if (r > spec.radius) {
        throw std::invalid_argument("explicit cover needs r <= ball radius");
    }
    const CoverFormula formula = cover_formula(spec, r);
    const std::size_t J = formula.time_cells;
    const auto K = static_cast<int>(formula.level_cells);
    const double tau = spec.horizon / static_cast<double>(J);
    const double eta = spec.radius / static_cast<double>(K);
    // adjacent index steps must move farther than the path can: R tau^alpha < eta
    if (!(spec.radius * std::pow(tau, spec.alpha) < eta)) {
        throw std::logic_error("cover lattice too coarse for its time resolution");
    }

    std::vector<std::vector<int>> paths;
    std::vector<int> current(J, 0);
    // depth-first over k(1) ascending, then steps -1, 0, +1 in that order
    struct Frame {
        int next_delta;  // 0 -> try -1, 1 -> try 0, 2 -> try +1
    };
    for (int k1 = -K + 1; k1 <= K; ++k1) {
        current[0] = k1;
        if (J == 1) {
            paths.push_back(current);
            if (paths.size() > cap) {
                throw std::length_error("cover enumeration exceeds cap; use cover_count_log");
            }
            continue;
        }
        std::vector<Frame> stack;
        stack.push_back({0});
        while (!stack.empty()) {
            const std::size_t depth = stack.size();  // filling current[depth]
            Frame& frame = stack.back();
            if (frame.next_delta > 2) {
                stack.pop_back();
                continue;
            }
            const int k = current[depth - 1] + (frame.next_delta - 1);
            ++frame.next_delta;
            if (k < -K + 1 || k > K) {
                continue;
            }
            current[depth] = k;
            if (depth + 1 == J) {
                paths.push_back(current);
                if (paths.size() > cap) {
                    throw std::length_error("cover enumeration exceeds cap; use cover_count_log");
                }
            } else {
                stack.push_back({0});
            }
        }
    }
    return CoverConstruction(spec.horizon, tau, eta, J, formula.level_cells, std::move(paths));
}

double cover_count_log(const HolderBallSpec& spec, double r) {
    validate(spec);
    check_radius(r);
    const CoverFormula formula = cover_formula(spec, r);
    const std::size_t J = formula.time_cells;
    const std::size_t states = 2 * formula.level_cells;
    // normalized transfer-matrix pass; exact count in log space
    std::vector<double> weight(states, 1.0 / static_cast<double>(states));
    double log_count = std::log(static_cast<double>(states));
    std::vector<double> next(states, 0.0);
    for (std::size_t j = 1; j < J; ++j) {
        double total = 0.0;
        for (std::size_t s = 0; s < states; ++s) {
            double w = weight[s];
            if (s > 0) {
                w += weight[s - 1];
            }
            if (s + 1 < states) {
                w += weight[s + 1];
            }
            next[s] = w;
            total += w;
        }
        log_count += std::log(total);
        for (std::size_t s = 0; s < states; ++s) {
            weight[s] = next[s] / total;
        }
    }
    return static_cast<double>(spec.dim) * log_count;
}

PackingConstruction::PackingConstruction(double horizon, double tau, double eta,
                                         std::size_t time_cells, std::size_t shift_count,
                                         std::vector<std::vector<double>> knot_values)
    : horizon_(horizon),
      tau_(tau),
      eta_(eta),
      time_cells_(time_cells),
      shift_count_(shift_count),
      knot_values_(std::move(knot_values)) {}

double PackingConstruction::member_distance(std::size_t a, std::size_t b) const {
    const auto& va = knot_values_.at(a);
    const auto& vb = knot_values_.at(b);
    double worst = 0.0;
    for (std::size_t j = 0; j < va.size(); ++j) {
        worst = std::max(worst, std::fabs(va[j] - vb[j]));
    }
    return worst;
}

double PackingConstruction::member_value(std::size_t member, double t) const {
    return knot_interp(knot_values_.at(member), tau_, t);
}

Path PackingConstruction::member_path(std::size_t member, const TimeGrid& grid) const {
    std::vector<double> flat(grid.points());
    for (std::size_t m = 0; m <= grid.steps; ++m) {
        flat[m] = member_value(member, grid.time(m));
    }
    return Path(grid, 1, std::move(flat));
}

std::size_t PackingConstruction::duplicate_pairs() const {
    std::vector<std::size_t> order(knot_values_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return knot_values_[a] < knot_values_[b];
    });
    std::size_t pairs = 0;
    std::size_t run = 1;
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (knot_values_[order[i]] == knot_values_[order[i - 1]]) {
            ++run;
        } else {
            pairs += run * (run - 1) / 2;
            run = 1;
        }
    }
    pairs += run * (run - 1) / 2;
    return pairs;
}

PackingConstruction build_packing(const HolderBallSpec& spec, double r, std::size_t cap) {
    validate(spec);
    check_radius(r);
    if (spec.dim != 1) {
        throw std::invalid_argument("explicit packing is implemented for dim 1");
    }
    const double ta = std::pow(spec.horizon, spec.alpha);
    const double limit = std::min(spec.radius, 0.5 * ta * spec.radius);
    if (!(r < limit)) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "packing needs r < %.17g, got %.17g", limit, r);
        throw std::domain_error(buf);
    }
    const double inva = 1.0 / spec.alpha;
    const std::size_t j_plus_1 = smallest_integer_geq(
        std::pow(2.0, -inva) * spec.horizon * std::pow(spec.radius / r, inva),
        "packing time cells");
    if (j_plus_1 < 2) {
        throw std::logic_error("packing produced no interior time cell");
    }
    const std::size_t J = j_plus_1 - 1;
    const double tau = spec.horizon / static_cast<double>(J);
    const double eta = spec.radius * std::pow(tau, spec.alpha);
    if (!(eta > 2.0 * r)) {
        throw std::logic_error("packing level gap failed to clear twice the radius");
    }
    const double bound = std::pow(tau, -spec.alpha);
    const auto shift_lo = static_cast<long long>(std::ceil(-bound + 0.5));
    const auto shift_hi = static_cast<long long>(std::floor(bound - 0.5));
    if (shift_hi < shift_lo) {
        throw std::runtime_error("packing admits no level shift at these parameters");
    }
    const auto L = static_cast<std::size_t>(shift_hi - shift_lo + 1);
    if (J >= 63) {
        throw std::length_error("packing enumeration exceeds cap");
    }
    const std::size_t masks = std::size_t{1} << J;
    if (L > cap / masks) {
        throw std::length_error("packing enumeration exceeds cap");
    }

    std::vector<std::vector<double>> members;
    members.reserve(L * masks);
    for (long long shift = shift_lo; shift <= shift_hi; ++shift) {
        for (std::size_t mask = 0; mask < masks; ++mask) {
            std::vector<double> values(J);
            for (std::size_t j = 0; j < J; ++j) {
                const long long bit = (mask >> j) & 1U;
                values[j] = (static_cast<double>(bit + shift) - 0.5) * eta;
            }
            members.push_back(std::move(values));
        }
    }
    PackingConstruction packing(spec.horizon, tau, eta, J, L, std::move(members));

    // every member must stay inside the ball
    const double tol = 1.0e-12;
    if (spec.alpha == 1.0) {
        for (const auto& values : packing.knot_values()) {
            double amp = 0.0;
            double slope = 0.0;
            for (std::size_t j = 0; j < values.size(); ++j) {
                amp = std::max(amp, std::fabs(values[j]));
                if (j > 0) {
                    slope = std::max(slope, std::fabs(values[j] - values[j - 1]) / tau);
                }
            }
            if (amp > spec.radius + tol || slope > spec.radius + tol) {
                throw std::logic_error("packing member falls outside the ball");
            }
        }
    } else {
        const TimeGrid fine(spec.horizon, 8 * J);
        for (std::size_t i = 0; i < packing.size(); ++i) {
            const Path path = packing.member_path(i, fine);
            if (holder_norm(path, spec.alpha) > spec.radius + tol) {
                throw std::logic_error("packing member falls outside the ball");
            }
        }
    }

    // pairwise separation: distinct functions sit more than 2r apart; pairs of
    // indices that alias the same function are exempt (checked on small families)
    if (packing.size() <= 4096) {
        for (std::size_t a = 0; a < packing.size(); ++a) {
            for (std::size_t b = a + 1; b < packing.size(); ++b) {
                const double dist = packing.member_distance(a, b);
                if (dist == 0.0) {
                    continue;
                }
                if (!(dist > 2.0 * r)) {
                    throw std::logic_error("packing members closer than twice the radius");
                }
            }
        }
    }
    return packing;
}

double measure_cover_bound_log(double p, double diameter, double cover_count_log,
                               double delta) {
    if (!(p >= 1.0) || !std::isfinite(p)) {
        throw std::invalid_argument("moment order must be at least 1");
    }
    if (!(diameter > 0.0) || !std::isfinite(diameter)) {
        throw std::invalid_argument("diameter must be positive and finite");
    }
    if (!(delta > 0.0) || !std::isfinite(delta)) {
        throw std::invalid_argument("covering radius must be positive and finite");
    }
    if (!std::isfinite(cover_count_log) || cover_count_log < 0.0) {
        throw std::invalid_argument("log cover count must be finite and nonnegative");
    }
    if (delta >= diameter) {
        return 0.0;
    }
    const double factor = std::log(8.0 * std::exp(1.0) * diameter / delta);
    // p * N * factor, assembled in log space so huge counts overflow to inf
    return std::exp(std::log(p) + cover_count_log + std::log(factor));
}

double measure_cover_bound_log(const HolderBallSpec& spec, double p, double delta) {
    validate(spec);
    const double diameter = 2.0 * spec.radius;
    if (delta >= diameter) {
        return 0.0;
    }
    const double count_log = covering_upper_bound_log(spec, 0.5 * delta);
    return measure_cover_bound_log(p, diameter, count_log, delta);
}

std::vector<Path> sample_holder_ball(const HolderBallSpec& spec, const TimeGrid& grid,
                                     std::size_t count, std::uint64_t seed,
                                     double amplitude) {
    validate(spec);
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
        throw std::invalid_argument("sampler amplitude must be nonnegative and finite");
    }
    if (spec.dim > 255) {
        throw std::invalid_argument("sampler supports at most 255 coordinates");
    }
    const double R = spec.radius;
    const double dt = grid.dt();
    const double steps = static_cast<double>(grid.steps);
    // rough-path scaling keeps the discrete Hoelder ratio near amplitude * 0.4 * R;
    // amplitude 0 collapses everything to the constant zero function
    const double start_scale = 0.5 * std::min(1.0, amplitude) * R;
    const double sigma = 0.4 * amplitude * R * std::pow(dt, spec.alpha) *
                         std::min(1.0, std::pow(steps, spec.alpha - 0.5));

    std::vector<Path> accepted;
    accepted.reserve(count);
    std::uint64_t proposal = 0;
    while (accepted.size() < count) {
        if (proposal >= 100 && static_cast<double>(accepted.size()) <
                                   0.01 * static_cast<double>(proposal)) {
            throw std::runtime_error(
                "ball sampler rejected more than 99% of proposals; lower the amplitude");
        }
        std::vector<double> flat(grid.points() * spec.dim);
        for (std::size_t c = 0; c < spec.dim; ++c) {
            const double u = uniform01(seed, Stream::ball_sampler, proposal, 0,
                                       static_cast<std::uint32_t>(c));
            flat[c] = (u - 0.5) * 2.0 * start_scale;
        }
        for (std::size_t m = 1; m <= grid.steps; ++m) {
            for (std::size_t c = 0; c < spec.dim; ++c) {
                const double g = standard_normal(seed, Stream::ball_sampler, proposal, m,
                                                 static_cast<std::uint32_t>(c));
                double v = flat[(m - 1) * spec.dim + c] + sigma * g;
                v = std::clamp(v, -R, R);
                flat[m * spec.dim + c] = v;
            }
        }
        ++proposal;
        Path path(grid, spec.dim, std::move(flat));
        if (holder_norm(path, spec.alpha) <= R) {
            accepted.push_back(std::move(path));
        }
    }
    return accepted;
}

}  // namespace mfc
