#pragma once

#include <cstdint>
#include <vector>

#include "mfc/paths.hpp"
#include "mfc/potentials.hpp"
#include "mfc/rng.hpp"

namespace mfc {

// Initial law of the particles; either Gaussian or supported on a ball so that
// square-exponential moments are available.
struct InitialLaw {
    enum class Kind { gaussian, uniform_ball };

    Kind kind = Kind::gaussian;
    std::vector<double> center;
    double sigma = 1.0;   // gaussian scale per coordinate
    double radius = 1.0;  // uniform_ball radius
    // largest a with int exp(a|x|^2) d mu0 declared finite
    double square_exp_scale = 0.0;

    std::size_t dim() const { return center.size(); }
};

InitialLaw gaussian_initial(std::vector<double> mean, double sigma);
InitialLaw uniform_ball_initial(std::vector<double> center, double radius);

// fixed draw budget per particle, so sampling is schedule-independent
void sample_initial(const InitialLaw& law, std::uint64_t seed, Stream stream,
                    std::uint64_t particle, double* out);

// Addressable Gaussian increments: the value consumed by particle i at step m,
// coordinate c, is a pure function of (seed, stream, i, m, c).
struct BrownianDriver {
    std::uint64_t master_seed = 0;
    Stream noise_stream = Stream::increments;
    Stream initial_stream = Stream::initial;

    static BrownianDriver main(std::uint64_t seed) {
        return {seed, Stream::increments, Stream::initial};
    }
    static BrownianDriver reference(std::uint64_t seed) {
        return {seed, Stream::reference_increments, Stream::reference_initial};
    }

    double normal(std::uint64_t particle, std::uint64_t step, std::uint32_t coord) const {
        return standard_normal(master_seed, noise_stream, particle, step, coord);
    }
};

struct SimulationConfig {
    std::size_t particles = 1;  // N
    std::size_t dim = 1;
    TimeGrid grid;
    ConfinementPotential confinement;
    InteractionPotential interaction;
    InitialLaw initial;
};

void validate(const SimulationConfig& config);

// Explicit Euler scheme for the interacting system
//   X_{m+1}^i = X_m^i + sqrt(2) dB_m^i - grad V(X_m^i) dt
//              - (1/N) sum_j grad W(X_m^i - X_m^j) dt.
// Pairwise interactions are summed directly in index order.
EmpiricalPathMeasure simulate_interacting(const SimulationConfig& config,
                                          const BrownianDriver& driver);

// Same scheme with M_ref particles on an independent driver stream; stands in
// for the law of the nonlinear process.
EmpiricalPathMeasure simulate_reference_ensemble(const SimulationConfig& config,
                                                 std::size_t reference_particles,
                                                 const BrownianDriver& driver);

struct CouplingRun {
    EmpiricalPathMeasure x;  // interacting ensemble
    EmpiricalPathMeasure y;  // same noise, drift against the frozen reference
};

// Synchronous coupling: Y consumes exactly the increments of X, starts at
// X_0, and its interaction drift is averaged over the reference atoms.
CouplingRun simulate_coupled(const SimulationConfig& config, const BrownianDriver& driver,
                             const EmpiricalPathMeasure& reference);

}  // namespace mfc
