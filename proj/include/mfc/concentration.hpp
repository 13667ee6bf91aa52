#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "mfc/paths.hpp"
#include "mfc/potentials.hpp"
#include "mfc/sde.hpp"

namespace mfc {

// Inputs of the finite-sample tail bound
// P[ W_p(law, empirical of N samples) > eps ] <= exp(-beta (lambda'/2) N eps^2),
// valid once N >= N0 eps^-2 exp(N0 eps^(-1/alpha')).
struct TailBoundParameters {
    double moment_order = 1.0;        // p in [1, 2]
    double quadratic_rate = 1.0;      // lambda, transport-inequality constant
    double working_rate = 0.5;        // lambda' in (0, lambda), the certified rate
    double square_exp_scale = 1.0;    // a, scale in the square-exponential moment
    double holder_exponent = 1.0;     // alpha in (0, 1]
    double working_exponent = 0.5;    // alpha' in (0, alpha)
    double threshold_constant = 1.0;  // N0 in the sample-size condition
};

void validate(const TailBoundParameters& params);

// 1 below moment order 2; (1 + sqrt(lambda/a))^-2 at order exactly 2
double beta_factor(const TailBoundParameters& params);

struct TailBoundResult {
    double log_bound = 0.0;       // -beta (lambda'/2) N eps^2
    double bound = 1.0;           // exp(log_bound)
    double min_particles = 0.0;   // N0 eps^-2 exp(N0 eps^(-1/alpha'))
    bool condition_met = false;   // N >= min_particles
};

TailBoundResult tail_bound(const TailBoundParameters& params, double particles,
                           double epsilon);

// 95% Wilson score interval for hits out of trials
void wilson_interval(std::size_t hits, std::size_t trials, double& low, double& high);

struct TailRow {
    std::size_t particles = 0;
    double epsilon = 0.0;
    std::size_t replicas = 0;  // successful replicas behind the estimate
    std::size_t hits = 0;
    std::size_t failures = 0;  // simulations that blew up, excluded
    double p_hat = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 1.0;
};

struct TailTable {
    std::vector<TailRow> rows;
    std::size_t reference_particles = 0;
    std::uint64_t seed = 0;
    // per particle-grid entry, the replica path distances the rows were cut from
    std::vector<std::vector<double>> distances;
};

// One reference ensemble per table; per (N, replica) an independent N-particle
// system and its path distance to the reference; rows cut at each epsilon.
TailTable estimate_tail(const SimulationConfig& base, std::size_t reference_particles,
                        const std::vector<std::size_t>& particle_grid,
                        const std::vector<double>& epsilon_grid, std::size_t replicas,
                        std::uint64_t seed, std::size_t workers = 1);

struct RateFit {
    double k_hat = 0.0;      // fitted coefficient of N eps^2
    double intercept = 0.0;
    std::vector<double> residuals;
    std::size_t rows_used = 0;
};

// least squares of -ln p_hat against N eps^2, saturated rows dropped
RateFit fit_rate(const TailTable& table);

struct CouplingAuditRow {
    double time = 0.0;
    double lhs = 0.0;       // path distance between the two ensembles on [0, t]
    double rhs = 0.0;       // Gronwall envelope at t
    double point_w1 = 0.0;  // distance of the interacting marginal to the reference
    bool violation = false;
};

struct CouplingAuditReport {
    std::vector<CouplingAuditRow> rows;
    double slack = 0.0;
    double violation_fraction = 0.0;
    double gronwall_factor = 0.0;  // Gamma exp(|beta + gamma| T)
    // contraction ratio, only defined when beta + gamma > Gamma
    bool ratio_available = false;
    double ratio = 0.0;        // W1(ref, interacting) / W1(ref, coupled copy) on [0, T]
    double ratio_bound = 0.0;  // (beta + gamma) / (beta + gamma - Gamma)
    bool ratio_ok = true;
};

// Audits, per grid time t,
//   W1 over [0,t] (interacting vs coupled)  <=
//   max_{s <= t} Gamma int_0^s exp(-(beta+gamma)(s-u)) W1_u(interacting, reference) du
// with trapezoid integrals; beta and gamma are the Hessian floors of the
// confinement and interaction terms, Gamma the interaction Lipschitz constant.
CouplingAuditReport coupling_audit(const CouplingRun& run,
                                   const EmpiricalPathMeasure& reference,
                                   const LipschitzConstants& constants, double beta,
                                   double gamma, double slack = 0.05);

struct MomentEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::size_t overflow_count = 0;
    std::size_t samples = 0;
};

// sample mean of exp(scale * holder_norm(path, alpha)^2); overflowed summands
// push the estimate to +infinity and are counted
MomentEstimate holder_exp_moment(const std::vector<Path>& paths, double scale,
                                 double alpha);

struct ChaosRow {
    std::size_t particles = 0;   // N
    std::size_t pair_atoms = 0;  // pair-measure atoms actually used
    bool subsampled = false;
    std::uint64_t subsample_seed = 0;
    std::size_t replicas = 0;
    double median_distance = 0.0;
};

struct ChaosTable {
    std::vector<ChaosRow> rows;
    std::size_t reference_particles = 0;
    std::uint64_t seed = 0;
    std::size_t pair_cap = 0;
};

// All ordered pairs (i, j), i != j, of one simulation, subsampled above the cap.
EmpiricalPathPairMeasure pair_measure(const EmpiricalPathMeasure& mu, std::size_t cap,
                                      std::uint64_t subsample_seed, bool* subsampled);

// Distance of the pair empirical measure to a product proxy built by zipping
// two disjoint halves of the reference ensemble; medians over replicas.
ChaosTable chaos_experiment(const SimulationConfig& base, std::size_t reference_particles,
                            const std::vector<std::size_t>& particle_grid,
                            std::size_t replicas, std::uint64_t seed,
                            std::size_t pair_cap = 4096, std::size_t workers = 1);

}  // namespace mfc
