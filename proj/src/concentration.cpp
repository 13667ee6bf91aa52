#include "mfc/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "mfc/rng.hpp"
#include "mfc/transport.hpp"
#include "mfc/util.hpp"
#include "ot_solvers.hpp"

namespace mfc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ95 = 1.959963984540054;
constexpr double kExpOverflow = 709.0;  // exp() saturates just above this
constexpr std::uint64_t kChaosSaltBit = std::uint64_t{1} << 63;

double require_positive(double x, const char* what) {
    if (!std::isfinite(x) || x <= 0.0) {
        throw std::invalid_argument(std::string(what) + " must be positive and finite");
    }
    return x;
}

double median_of(std::vector<double> values) {
    if (values.empty()) {
        throw std::invalid_argument("median of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) {
        return values[n / 2];
    }
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double point_distance_to(const EmpiricalPointMeasure& a, const EmpiricalPointMeasure& b) {
    if (a.dim() == 1) {
        return w1_dual_1d(a, b);
    }
    return wasserstein(a, b, 1.0).value;
}

}  // namespace

void validate(const TailBoundParameters& params) {
    if (!(params.moment_order >= 1.0) || !(params.moment_order <= 2.0)) {
        throw std::invalid_argument("moment order must lie in [1, 2]");
    }
    require_positive(params.quadratic_rate, "quadratic rate");
    require_positive(params.working_rate, "working rate");
    if (!(params.working_rate < params.quadratic_rate)) {
        throw std::invalid_argument("working rate must be strictly below the quadratic rate");
    }
    require_positive(params.square_exp_scale, "square-exponential scale");
    if (!(params.holder_exponent > 0.0) || params.holder_exponent > 1.0) {
        throw std::invalid_argument("holder exponent must lie in (0, 1]");
    }
    require_positive(params.working_exponent, "working exponent");
    if (!(params.working_exponent < params.holder_exponent)) {
        throw std::invalid_argument("working exponent must be strictly below the holder exponent");
    }
    require_positive(params.threshold_constant, "threshold constant");
}

double beta_factor(const TailBoundParameters& params) {
    validate(params);
    if (params.moment_order == 2.0) {
        const double root = std::sqrt(params.quadratic_rate / params.square_exp_scale);
        return 1.0 / ((1.0 + root) * (1.0 + root));
    }
    return 1.0;
}

TailBoundResult tail_bound(const TailBoundParameters& params, double particles,
                           double epsilon) {
    validate(params);
    require_positive(epsilon, "epsilon");
    if (!std::isfinite(particles) || particles < 0.0) {
        throw std::invalid_argument("particle count must be nonnegative and finite");
    }
    TailBoundResult out;
    out.log_bound = -beta_factor(params) * 0.5 * params.working_rate * particles *
                    epsilon * epsilon;
    out.bound = std::exp(out.log_bound);
    const double n0 = params.threshold_constant;
    const double inner = n0 * std::pow(epsilon, -1.0 / params.working_exponent);
    if (inner > kExpOverflow) {
        out.min_particles = kInf;
    } else {
        out.min_particles = n0 * std::exp(inner) / (epsilon * epsilon);
    }
    out.condition_met = particles >= out.min_particles;
    return out;
}

void wilson_interval(std::size_t hits, std::size_t trials, double& low, double& high) {
    if (trials == 0) {
        throw std::invalid_argument("Wilson interval needs at least one trial");
    }
    if (hits > trials) {
        throw std::invalid_argument("hit count exceeds trial count");
    }
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / n;
    const double z2 = kZ95 * kZ95;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half =
        kZ95 * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    low = std::max(0.0, center - half);
    high = std::min(1.0, center + half);
}

TailTable estimate_tail(const SimulationConfig& base, std::size_t reference_particles,
                        const std::vector<std::size_t>& particle_grid,
                        const std::vector<double>& epsilon_grid, std::size_t replicas,
                        std::uint64_t seed, std::size_t workers) {
    if (particle_grid.empty()) {
        throw std::invalid_argument("tail estimation needs at least one ensemble size");
    }
    if (replicas == 0) {
        throw std::invalid_argument("tail estimation needs at least one replica");
    }
    for (double eps : epsilon_grid) {
        if (!std::isfinite(eps) || eps < 0.0) {
            throw std::invalid_argument("epsilon grid entries must be nonnegative");
        }
    }

    const EmpiricalPathMeasure reference = simulate_reference_ensemble(
        base, reference_particles, BrownianDriver::reference(seed));

    const std::size_t jobs = particle_grid.size() * replicas;
    std::vector<double> distance(jobs, 0.0);
    std::vector<char> failed(jobs, 0);
    parallel_for(jobs, workers, [&](std::size_t t) {
        const std::size_t n_idx = t / replicas;
        SimulationConfig cfg = base;
        cfg.particles = particle_grid[n_idx];
        const BrownianDriver driver = BrownianDriver::main(derive_seed(seed, t + 1));
        try {
            const EmpiricalPathMeasure ensemble = simulate_interacting(cfg, driver);
            distance[t] = wasserstein(reference, ensemble, 1.0).value;
        } catch (const std::exception&) {
            failed[t] = 1;
        }
    });

    TailTable table;
    table.reference_particles = reference_particles;
    table.seed = seed;
    table.distances.resize(particle_grid.size());
    for (std::size_t n_idx = 0; n_idx < particle_grid.size(); ++n_idx) {
        auto& kept = table.distances[n_idx];
        kept.reserve(replicas);
        std::size_t failures = 0;
        for (std::size_t r = 0; r < replicas; ++r) {
            const std::size_t t = n_idx * replicas + r;
            if (failed[t]) {
                ++failures;
            } else {
                kept.push_back(distance[t]);
            }
        }
        for (double eps : epsilon_grid) {
            TailRow row;
            row.particles = particle_grid[n_idx];
            row.epsilon = eps;
            row.replicas = kept.size();
            row.failures = failures;
            row.hits = static_cast<std::size_t>(
                std::count_if(kept.begin(), kept.end(), [&](double d) { return d > eps; }));
            if (!kept.empty()) {
                row.p_hat = static_cast<double>(row.hits) / static_cast<double>(kept.size());
                wilson_interval(row.hits, kept.size(), row.wilson_low, row.wilson_high);
            }
            table.rows.push_back(row);
        }
    }
    return table;
}

RateFit fit_rate(const TailTable& table) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& row : table.rows) {
        if (row.replicas == 0 || row.p_hat <= 0.0 || row.p_hat >= 1.0) {
            continue;
        }
        xs.push_back(static_cast<double>(row.particles) * row.epsilon * row.epsilon);
        ys.push_back(-std::log(row.p_hat));
    }
    if (xs.size() < 3) {
        throw std::invalid_argument("rate fit needs at least 3 unsaturated rows");
    }
    const std::size_t n = xs.size();
    long double sx = 0.0L;
    long double sy = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const long double mx = sx / static_cast<long double>(n);
    const long double my = sy / static_cast<long double>(n);
    long double sxx = 0.0L;
    long double sxy = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const long double dx = xs[i] - mx;
        sxx += dx * dx;
        sxy += dx * (ys[i] - my);
    }
    if (sxx <= 0.0L) {
        throw std::invalid_argument("rate fit needs variation in N eps^2 across rows");
    }
    RateFit fit;
    fit.k_hat = static_cast<double>(sxy / sxx);
    fit.intercept = static_cast<double>(my - (sxy / sxx) * mx);
    fit.rows_used = n;
    fit.residuals.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        fit.residuals[i] = ys[i] - (fit.k_hat * xs[i] + fit.intercept);
    }
    return fit;
}

CouplingAuditReport coupling_audit(const CouplingRun& run,
                                   const EmpiricalPathMeasure& reference,
                                   const LipschitzConstants& constants, double beta,
                                   double gamma, double slack) {
    const std::size_t n = run.x.size();
    if (run.y.size() != n) {
        throw std::invalid_argument("coupled ensembles must have equal size");
    }
    if (!(run.x.grid() == run.y.grid()) || !(run.x.grid() == reference.grid())) {
        throw std::invalid_argument("coupling audit needs a shared time grid");
    }
    if (run.x.dim() != run.y.dim() || run.x.dim() != reference.dim()) {
        throw std::invalid_argument("coupling audit needs a shared state dimension");
    }
    if (!run.x.equal_weights() || !run.y.equal_weights() || !reference.equal_weights()) {
        throw std::invalid_argument("coupling audit expects uniform ensembles");
    }
    if (!std::isfinite(beta) || !std::isfinite(gamma) || !std::isfinite(slack) ||
        slack < 0.0) {
        throw std::invalid_argument("audit constants must be finite, slack nonnegative");
    }

    const TimeGrid& grid = run.x.grid();
    const std::size_t points = grid.points();
    const std::size_t dim = run.x.dim();
    const double dt = grid.dt();
    const double big_gamma = constants.grad_w;
    const double contraction = beta + gamma;

    CouplingAuditReport report;
    report.slack = slack;
    report.gronwall_factor =
        big_gamma * std::exp(std::fabs(contraction) * grid.horizon);
    report.rows.resize(points);

    // marginal distances to the reference at every grid time
    std::vector<double> point_w1(points, 0.0);
    for (std::size_t u = 0; u < points; ++u) {
        point_w1[u] = point_distance_to(project(run.x, u), project(reference, u));
    }

    // trapezoid recursion for I(s) = int_0^s exp(-c (s-u)) W(u) du
    const double decay = std::exp(-contraction * dt);
    std::vector<double> envelope(points, 0.0);
    double integral = 0.0;
    double peak = 0.0;
    envelope[0] = 0.0;
    for (std::size_t u = 1; u < points; ++u) {
        integral = decay * integral + 0.5 * dt * (decay * point_w1[u - 1] + point_w1[u]);
        peak = std::max(peak, integral);
        envelope[u] = big_gamma * peak;
    }

    // running sup-cost matrices feed an exact assignment at every grid time
    std::vector<double> cost(n * n, 0.0);
    std::size_t violations = 0;
    for (std::size_t u = 0; u < points; ++u) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto xi = run.x.atom(i).point(u);
            for (std::size_t j = 0; j < n; ++j) {
                const auto yj = run.y.atom(j).point(u);
                double sq = 0.0;
                for (std::size_t c = 0; c < dim; ++c) {
                    const double d = xi[c] - yj[c];
                    sq += d * d;
                }
                double& slot = cost[i * n + j];
                slot = std::max(slot, std::sqrt(sq));
            }
        }
        const std::vector<std::size_t> match = detail::solve_assignment(n, cost);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            total += cost[i * n + match[i]];
        }
        CouplingAuditRow& row = report.rows[u];
        row.time = grid.time(u);
        row.lhs = total / static_cast<double>(n);
        row.rhs = envelope[u];
        row.point_w1 = point_w1[u];
        row.violation = row.lhs > row.rhs + slack;
        if (row.violation) {
            ++violations;
        }
    }
    report.violation_fraction =
        static_cast<double>(violations) / static_cast<double>(points);

    if (contraction > big_gamma) {
        report.ratio_available = true;
        report.ratio_bound = contraction / (contraction - big_gamma);
        const double to_x = wasserstein(reference, run.x, 1.0).value;
        const double to_y = wasserstein(reference, run.y, 1.0).value;
        if (to_y > 0.0) {
            report.ratio = to_x / to_y;
        } else {
            report.ratio = (to_x > 0.0) ? kInf : 1.0;
        }
        report.ratio_ok = report.ratio <= report.ratio_bound + slack;
    }
    return report;
}

MomentEstimate holder_exp_moment(const std::vector<Path>& paths, double scale,
                                 double alpha) {
    if (paths.empty()) {
        throw std::invalid_argument("moment estimate needs at least one path");
    }
    require_positive(scale, "moment scale");
    MomentEstimate out;
    out.samples = paths.size();
    std::vector<double> values;
    values.reserve(paths.size());
    for (const Path& path : paths) {
        const double h = holder_norm(path, alpha);
        const double arg = scale * h * h;
        if (arg > kExpOverflow) {
            ++out.overflow_count;
        } else {
            values.push_back(std::exp(arg));
        }
    }
    if (out.overflow_count > 0) {
        out.estimate = kInf;
        out.standard_error = kInf;
        return out;
    }
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) {
        mean += v;
    }
    mean /= n;
    out.estimate = mean;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - mean) * (v - mean);
        }
        out.standard_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return out;
}

EmpiricalPathPairMeasure pair_measure(const EmpiricalPathMeasure& mu, std::size_t cap,
                                      std::uint64_t subsample_seed, bool* subsampled) {
    const std::size_t n = mu.size();
    if (n < 2) {
        throw std::invalid_argument("pair measure needs at least two atoms");
    }
    if (!mu.equal_weights()) {
        throw std::invalid_argument("pair measure expects a uniform ensemble");
    }
    if (cap == 0) {
        throw std::invalid_argument("pair cap must be positive");
    }
    const std::size_t total = n * (n - 1);
    std::vector<Path> first;
    std::vector<Path> second;
    bool did_subsample = total > cap;
    if (!did_subsample) {
        first.reserve(total);
        second.reserve(total);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) {
                    continue;
                }
                first.push_back(mu.atom(i));
                second.push_back(mu.atom(j));
            }
        }
    } else {
        first.reserve(cap);
        second.reserve(cap);
        for (std::size_t k = 0; k < cap; ++k) {
            const double u = uniform01(subsample_seed, Stream::subsample, k, 0, 0);
            const auto t = static_cast<std::size_t>(u * static_cast<double>(total));
            const std::size_t i = t / (n - 1);
            const std::size_t rem = t % (n - 1);
            const std::size_t j = (rem < i) ? rem : rem + 1;
            first.push_back(mu.atom(i));
            second.push_back(mu.atom(j));
        }
    }
    if (subsampled != nullptr) {
        *subsampled = did_subsample;
    }
    return EmpiricalPathPairMeasure::uniform(std::move(first), std::move(second));
}

ChaosTable chaos_experiment(const SimulationConfig& base, std::size_t reference_particles,
                            const std::vector<std::size_t>& particle_grid,
                            std::size_t replicas, std::uint64_t seed,
                            std::size_t pair_cap, std::size_t workers) {
    if (particle_grid.empty()) {
        throw std::invalid_argument("chaos experiment needs at least one ensemble size");
    }
    for (std::size_t n : particle_grid) {
        if (n < 2) {
            throw std::invalid_argument("pair measures need at least two particles");
        }
    }
    if (replicas == 0) {
        throw std::invalid_argument("chaos experiment needs at least one replica");
    }
    if (reference_particles < 4 || reference_particles % 2 != 0) {
        throw std::invalid_argument("reference ensemble must have even size >= 4");
    }

    const EmpiricalPathMeasure reference = simulate_reference_ensemble(
        base, reference_particles, BrownianDriver::reference(seed));
    const std::size_t half = reference_particles / 2;
    std::vector<Path> left;
    std::vector<Path> right;
    left.reserve(half);
    right.reserve(half);
    for (std::size_t k = 0; k < half; ++k) {
        left.push_back(reference.atom(k));
        right.push_back(reference.atom(half + k));
    }
    // zipping two disjoint halves gives independent draws from the product law
    const EmpiricalPathPairMeasure proxy =
        EmpiricalPathPairMeasure::uniform(std::move(left), std::move(right));

    const std::size_t jobs = particle_grid.size() * replicas;
    std::vector<double> distance(jobs, 0.0);
    std::vector<char> failed(jobs, 0);
    std::vector<std::uint64_t> sub_seeds(jobs, 0);
    std::vector<char> sub_flags(jobs, 0);
    parallel_for(jobs, workers, [&](std::size_t t) {
        const std::size_t n_idx = t / replicas;
        SimulationConfig cfg = base;
        cfg.particles = particle_grid[n_idx];
        const std::uint64_t replica_seed = derive_seed(seed, kChaosSaltBit | (t + 1));
        sub_seeds[t] = derive_seed(replica_seed, 2);
        const BrownianDriver driver = BrownianDriver::main(replica_seed);
        try {
            const EmpiricalPathMeasure ensemble = simulate_interacting(cfg, driver);
            bool did = false;
            const EmpiricalPathPairMeasure pairs =
                pair_measure(ensemble, pair_cap, sub_seeds[t], &did);
            sub_flags[t] = did ? 1 : 0;
            distance[t] = product_wasserstein(pairs, proxy, 1.0).value;
        } catch (const std::exception&) {
            failed[t] = 1;
        }
    });

    ChaosTable table;
    table.reference_particles = reference_particles;
    table.seed = seed;
    table.pair_cap = pair_cap;
    for (std::size_t n_idx = 0; n_idx < particle_grid.size(); ++n_idx) {
        ChaosRow row;
        row.particles = particle_grid[n_idx];
        const std::size_t total = row.particles * (row.particles - 1);
        row.pair_atoms = std::min(total, pair_cap);
        std::vector<double> kept;
        kept.reserve(replicas);
        for (std::size_t r = 0; r < replicas; ++r) {
            const std::size_t t = n_idx * replicas + r;
            if (!failed[t]) {
                kept.push_back(distance[t]);
            }
            if (r == 0) {
                row.subsampled = sub_flags[t] != 0;
                row.subsample_seed = sub_seeds[t];
            }
        }
        row.replicas = kept.size();
        if (kept.empty()) {
            throw std::runtime_error("all replicas failed for one ensemble size");
        }
        row.median_distance = median_of(std::move(kept));
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace mfc
