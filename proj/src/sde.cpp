#include "mfc/sde.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mfc {

InitialLaw gaussian_initial(std::vector<double> mean, double sigma) {
    if (mean.empty()) {
        throw std::invalid_argument("initial law: dimension must be >= 1");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("initial law: sigma must be finite and >= 0");
    }
    for (double c : mean) {
        if (!std::isfinite(c)) throw std::invalid_argument("initial law: non-finite mean");
    }
    InitialLaw law;
    law.kind = InitialLaw::Kind::gaussian;
    law.center = std::move(mean);
    law.sigma = sigma;
    law.square_exp_scale = sigma > 0.0 ? 1.0 / (4.0 * sigma * sigma)
                                       : std::numeric_limits<double>::infinity();
    return law;
}

InitialLaw uniform_ball_initial(std::vector<double> center, double radius) {
    if (center.empty()) {
        throw std::invalid_argument("initial law: dimension must be >= 1");
    }
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument("initial law: radius must be finite and > 0");
    }
    for (double c : center) {
        if (!std::isfinite(c)) throw std::invalid_argument("initial law: non-finite center");
    }
    InitialLaw law;
    law.kind = InitialLaw::Kind::uniform_ball;
    law.center = std::move(center);
    law.radius = radius;
    // compact support: every square-exponential moment is finite
    law.square_exp_scale = std::numeric_limits<double>::infinity();
    return law;
}

void sample_initial(const InitialLaw& law, std::uint64_t seed, Stream stream,
                    std::uint64_t particle, double* out) {
    const std::size_t d = law.dim();
    if (law.kind == InitialLaw::Kind::gaussian) {
        for (std::size_t c = 0; c < d; ++c) {
            out[c] = law.center[c] +
                     law.sigma * standard_normal(seed, stream, particle, 0,
                                                 static_cast<std::uint32_t>(c));
        }
        return;
    }
    // uniform on the ball: isotropic direction, radius via u^(1/d)
    double norm2 = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        out[c] = standard_normal(seed, stream, particle, 0, static_cast<std::uint32_t>(c));
        norm2 += out[c] * out[c];
    }
    double u = uniform01(seed, stream, particle, 0, static_cast<std::uint32_t>(d));
    double r = law.radius * std::pow(u, 1.0 / static_cast<double>(d));
    double scale = r / std::sqrt(norm2);
    for (std::size_t c = 0; c < d; ++c) {
        out[c] = law.center[c] + scale * out[c];
    }
}

void validate(const SimulationConfig& config) {
    if (config.particles < 1) {
        throw std::invalid_argument("simulation: particle count must be >= 1");
    }
    if (config.dim < 1 || config.dim > 200) {
        throw std::invalid_argument("simulation: dimension must lie in [1,200]");
    }
    if (!(config.grid.horizon > 0.0)) {
        throw std::invalid_argument("simulation: horizon must be > 0");
    }
    if (config.confinement.dim != config.dim || config.interaction.dim != config.dim ||
        config.initial.dim() != config.dim) {
        throw std::invalid_argument("simulation: dimension mismatch across components");
    }
}

namespace {

// Inlineable kernels for the gradient variants; the custom fallback pays an
// std::function call.
struct ZeroK {
    void grad(const double*, double* out, std::size_t d) const {
        for (std::size_t c = 0; c < d; ++c) out[c] = 0.0;
    }
    void add_pair(const double*, const double*, double*, std::size_t) const {}
};

struct QuadK {
    double kappa;
    const double* center;  // null when evaluated on differences
    void grad(const double* x, double* out, std::size_t d) const {
        for (std::size_t c = 0; c < d; ++c) out[c] = kappa * (x[c] - center[c]);
    }
    void add_pair(const double* x, const double* y, double* acc, std::size_t d) const {
        for (std::size_t c = 0; c < d; ++c) acc[c] += kappa * (x[c] - y[c]);
    }
};

struct PerturbK {
    double kappa;
    const double* center;
    double amp_freq;  // amp * freq
    double freq;
    void grad(const double* x, double* out, std::size_t d) const {
        for (std::size_t c = 0; c < d; ++c) {
            double s = x[c] - center[c];
            out[c] = kappa * s + amp_freq * std::sin(freq * s);
        }
    }
    void add_pair(const double* x, const double* y, double* acc, std::size_t d) const {
        for (std::size_t c = 0; c < d; ++c) {
            double s = x[c] - y[c];
            acc[c] += kappa * s + amp_freq * std::sin(freq * s);
        }
    }
};

struct CustomK {
    const CustomGradient* g;
    mutable std::vector<double> zbuf;
    mutable std::vector<double> obuf;
    void grad(const double* x, double* out, std::size_t d) const {
        g->eval({x, d}, {out, d});
    }
    void add_pair(const double* x, const double* y, double* acc, std::size_t d) const {
        for (std::size_t c = 0; c < d; ++c) zbuf[c] = x[c] - y[c];
        g->eval({zbuf.data(), d}, {obuf.data(), d});
        for (std::size_t c = 0; c < d; ++c) acc[c] += obuf[c];
    }
};

template <class F>
auto with_kernel(const GradientField& g, std::size_t d, F&& f) {
    return std::visit(
        [&](const auto& field) {
            using T = std::decay_t<decltype(field)>;
            if constexpr (std::is_same_v<T, ZeroGradient>) {
                return f(ZeroK{});
            } else if constexpr (std::is_same_v<T, QuadraticGradient>) {
                return f(QuadK{field.kappa, field.center.data()});
            } else if constexpr (std::is_same_v<T, PerturbedQuadraticGradient>) {
                return f(PerturbK{field.kappa, field.center.data(), field.amp * field.freq,
                                  field.freq});
            } else {
                return f(CustomK{&field, std::vector<double>(d), std::vector<double>(d)});
            }
        },
        g);
}

[[noreturn]] void abort_non_finite(std::size_t step) {
    throw std::runtime_error("simulation diverged: non-finite state at step " +
                             std::to_string(step));
}

// One ensemble under explicit Euler. `interaction_source(m)` returns the atom
// block the interaction drift is averaged over at step m (the ensemble itself
// for the interacting system, the frozen reference for the coupled one).
template <class VK, class WK, class Source>
std::vector<double> euler_run(const SimulationConfig& config, const BrownianDriver& driver,
                              std::vector<double> init, const VK& vk, const WK& wk,
                              Source&& interaction_source, std::size_t source_count) {
    const std::size_t n = config.particles;
    const std::size_t d = config.dim;
    const std::size_t steps = config.grid.steps;
    const double dt = config.grid.dt();
    const double sqrt_dt = std::sqrt(dt);
    const double sqrt2 = std::sqrt(2.0);
    const double inv_src = 1.0 / static_cast<double>(source_count);

    std::vector<double> traj(n * (steps + 1) * d);
    std::vector<double> cur = std::move(init);
    std::vector<double> next(n * d);
    std::vector<double> vtmp(d), acc(d);

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < d; ++c) {
            traj[(i * (steps + 1)) * d + c] = cur[i * d + c];
        }
    }

    for (std::size_t m = 0; m < steps; ++m) {
        const double* src = interaction_source(m, cur.data());
        for (std::size_t i = 0; i < n; ++i) {
            const double* xi = cur.data() + i * d;
            vk.grad(xi, vtmp.data(), d);
            for (std::size_t c = 0; c < d; ++c) acc[c] = 0.0;
            for (std::size_t j = 0; j < source_count; ++j) {
                wk.add_pair(xi, src + j * d, acc.data(), d);
            }
            double* out = next.data() + i * d;
            for (std::size_t c = 0; c < d; ++c) {
                double db = sqrt_dt * driver.normal(i, m, static_cast<std::uint32_t>(c));
                double value = xi[c] + sqrt2 * db - dt * (vtmp[c] + acc[c] * inv_src);
                if (!std::isfinite(value)) abort_non_finite(m + 1);
                out[c] = value;
            }
        }
        cur.swap(next);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < d; ++c) {
                traj[(i * (steps + 1) + m + 1) * d + c] = cur[i * d + c];
            }
        }
    }
    return traj;
}

EmpiricalPathMeasure to_measure(const SimulationConfig& config, std::size_t n,
                                const std::vector<double>& traj) {
    const std::size_t d = config.dim;
    const std::size_t pts = config.grid.steps + 1;
    std::vector<Path> atoms;
    atoms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> values(traj.begin() + static_cast<std::ptrdiff_t>(i * pts * d),
                                   traj.begin() + static_cast<std::ptrdiff_t>((i + 1) * pts * d));
        atoms.emplace_back(config.grid, d, std::move(values));
    }
    return EmpiricalPathMeasure::uniform(std::move(atoms));
}

std::vector<double> draw_initial(const SimulationConfig& config, std::size_t n,
                                 std::uint64_t seed, Stream stream) {
    std::vector<double> init(n * config.dim);
    for (std::size_t i = 0; i < n; ++i) {
        sample_initial(config.initial, seed, stream, i, init.data() + i * config.dim);
    }
    return init;
}

std::vector<double> run_self_interacting(const SimulationConfig& config, std::size_t n,
                                         const BrownianDriver& driver) {
    SimulationConfig local = config;
    local.particles = n;
    auto init = draw_initial(local, n, driver.master_seed, driver.initial_stream);
    // zero interaction contributes nothing; skip the pairwise loop entirely
    const std::size_t src_count =
        std::holds_alternative<ZeroGradient>(config.interaction.gradient) ? 1 : n;
    return with_kernel(config.confinement.gradient, config.dim, [&](const auto& vk) {
        return with_kernel(config.interaction.gradient, config.dim, [&](const auto& wk) {
            return euler_run(local, driver, std::move(init), vk, wk,
                             [](std::size_t, const double* cur) { return cur; }, src_count);
        });
    });
}

}  // namespace

EmpiricalPathMeasure simulate_interacting(const SimulationConfig& config,
                                          const BrownianDriver& driver) {
    validate(config);
    auto traj = run_self_interacting(config, config.particles, driver);
    SimulationConfig local = config;
    local.particles = config.particles;
    return to_measure(local, config.particles, traj);
}

EmpiricalPathMeasure simulate_reference_ensemble(const SimulationConfig& config,
                                                 std::size_t reference_particles,
                                                 const BrownianDriver& driver) {
    validate(config);
    if (reference_particles < 1) {
        throw std::invalid_argument("reference ensemble: particle count must be >= 1");
    }
    auto traj = run_self_interacting(config, reference_particles, driver);
    return to_measure(config, reference_particles, traj);
}

CouplingRun simulate_coupled(const SimulationConfig& config, const BrownianDriver& driver,
                             const EmpiricalPathMeasure& reference) {
    validate(config);
    if (reference.dim() != config.dim || !(reference.grid() == config.grid)) {
        throw std::invalid_argument("coupling: reference must share grid and dimension");
    }
    const std::size_t n = config.particles;
    const std::size_t d = config.dim;
    const std::size_t pts = config.grid.steps + 1;
    const std::size_t m_ref = reference.size();

    // step-major copy of the reference atoms for contiguous access
    std::vector<double> ref_step(pts * m_ref * d);
    for (std::size_t k = 0; k < m_ref; ++k) {
        const Path& z = reference.atom(k);
        for (std::size_t m = 0; m < pts; ++m) {
            for (std::size_t c = 0; c < d; ++c) {
                ref_step[(m * m_ref + k) * d + c] = z.value(m, c);
            }
        }
    }

    auto init = draw_initial(config, n, driver.master_seed, driver.initial_stream);
    auto init_y = init;

    const bool zero_w = std::holds_alternative<ZeroGradient>(config.interaction.gradient);
    auto traj_x = with_kernel(config.confinement.gradient, d, [&](const auto& vk) {
        return with_kernel(config.interaction.gradient, d, [&](const auto& wk) {
            return euler_run(config, driver, std::move(init), vk, wk,
                             [](std::size_t, const double* cur) { return cur; },
                             zero_w ? 1 : n);
        });
    });
    auto traj_y = with_kernel(config.confinement.gradient, d, [&](const auto& vk) {
        return with_kernel(config.interaction.gradient, d, [&](const auto& wk) {
            return euler_run(config, driver, std::move(init_y), vk, wk,
                             [&](std::size_t m, const double*) {
                                 return ref_step.data() + m * m_ref * d;
                             },
                             zero_w ? 1 : m_ref);
        });
    });

    return CouplingRun{to_measure(config, n, traj_x), to_measure(config, n, traj_y)};
}

}  // namespace mfc
