#include "mfc/potentials.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mfc/rng.hpp"

namespace mfc {

namespace {

std::vector<double> checked_center(std::vector<double> center) {
    if (center.empty()) {
        throw std::invalid_argument("potential: center must have dimension >= 1");
    }
    for (double c : center) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument("potential: non-finite center");
        }
    }
    return center;
}

std::vector<double> gradient_at(const GradientField& g, std::size_t dim,
                                std::span<const double> x) {
    std::vector<double> out(dim, 0.0);
    evaluate_gradient(g, x, out);
    return out;
}

// Spot check of odd symmetry g(-z) = -g(z) on deterministic probe points.
void check_antisymmetry(const GradientField& g, std::size_t dim) {
    std::vector<double> z(dim), neg(dim);
    for (std::uint64_t probe = 0; probe < 8; ++probe) {
        for (std::size_t c = 0; c < dim; ++c) {
            z[c] = 2.0 * uniform01(0x5f3759df, Stream::test, probe, 0,
                                   static_cast<std::uint32_t>(c)) - 1.0;
            neg[c] = -z[c];
        }
        auto gz = gradient_at(g, dim, z);
        auto gneg = gradient_at(g, dim, neg);
        for (std::size_t c = 0; c < dim; ++c) {
            if (std::abs(gz[c] + gneg[c]) > 1e-12 * (1.0 + std::abs(gz[c]))) {
                throw std::invalid_argument("interaction: gradient must be odd");
            }
        }
    }
}

void check_vanishes_at_zero(const GradientField& g, std::size_t dim) {
    std::vector<double> zero(dim, 0.0);
    auto g0 = gradient_at(g, dim, zero);
    for (double v : g0) {
        if (v != 0.0) {
            throw std::invalid_argument("interaction: gradient must vanish at the origin");
        }
    }
}

}  // namespace

void evaluate_gradient(const GradientField& g, std::span<const double> x,
                       std::span<double> out) {
    std::visit(
        [&](const auto& field) {
            using T = std::decay_t<decltype(field)>;
            if constexpr (std::is_same_v<T, ZeroGradient>) {
                for (std::size_t c = 0; c < out.size(); ++c) out[c] = 0.0;
            } else if constexpr (std::is_same_v<T, QuadraticGradient>) {
                for (std::size_t c = 0; c < out.size(); ++c) {
                    out[c] = field.kappa * (x[c] - field.center[c]);
                }
            } else if constexpr (std::is_same_v<T, PerturbedQuadraticGradient>) {
                for (std::size_t c = 0; c < out.size(); ++c) {
                    double s = x[c] - field.center[c];
                    out[c] = field.kappa * s + field.amp * field.freq * std::sin(field.freq * s);
                }
            } else {
                field.eval(x, out);
            }
        },
        g);
}

ConfinementPotential make_zero_confinement(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("potential: dimension must be >= 1");
    ConfinementPotential v;
    v.dim = dim;
    v.gradient = ZeroGradient{};
    v.hessian_lower = 0.0;
    v.hessian_upper = 0.0;
    v.gradient_at_zero.assign(dim, 0.0);
    return v;
}

ConfinementPotential make_quadratic_confinement(double kappa, std::vector<double> center) {
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("quadratic confinement: kappa must be > 0");
    }
    center = checked_center(std::move(center));
    ConfinementPotential v;
    v.dim = center.size();
    v.gradient = QuadraticGradient{kappa, center};
    v.hessian_lower = kappa;
    v.hessian_upper = kappa;
    v.gradient_at_zero = gradient_at(v.gradient, v.dim, std::vector<double>(v.dim, 0.0));
    return v;
}

ConfinementPotential make_perturbed_confinement(double kappa, std::vector<double> center,
                                                double amp, double freq) {
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("perturbed confinement: kappa must be > 0");
    }
    if (!std::isfinite(amp) || !std::isfinite(freq)) {
        throw std::invalid_argument("perturbed confinement: non-finite perturbation");
    }
    center = checked_center(std::move(center));
    ConfinementPotential v;
    v.dim = center.size();
    v.gradient = PerturbedQuadraticGradient{kappa, center, amp, freq};
    double swing = std::abs(amp) * freq * freq;
    v.hessian_lower = kappa - swing;
    v.hessian_upper = kappa + swing;
    v.gradient_at_zero = gradient_at(v.gradient, v.dim, std::vector<double>(v.dim, 0.0));
    return v;
}

ConfinementPotential make_custom_confinement(
    std::size_t dim, std::function<void(std::span<const double>, std::span<double>)> eval,
    double hessian_lower, double hessian_upper) {
    if (dim == 0 || !eval) {
        throw std::invalid_argument("custom confinement: bad arguments");
    }
    if (!(hessian_lower <= hessian_upper)) {
        throw std::invalid_argument("custom confinement: bounds out of order");
    }
    ConfinementPotential v;
    v.dim = dim;
    v.gradient = CustomGradient{std::move(eval)};
    v.hessian_lower = hessian_lower;
    v.hessian_upper = hessian_upper;
    v.gradient_at_zero = gradient_at(v.gradient, dim, std::vector<double>(dim, 0.0));
    return v;
}

InteractionPotential make_zero_interaction(std::size_t dim) {
    if (dim == 0) throw std::invalid_argument("potential: dimension must be >= 1");
    InteractionPotential w;
    w.dim = dim;
    w.gradient = ZeroGradient{};
    w.hessian_lower = 0.0;
    w.hessian_upper = 0.0;
    return w;
}

InteractionPotential make_quadratic_interaction(std::size_t dim, double kappa) {
    if (dim == 0) throw std::invalid_argument("potential: dimension must be >= 1");
    if (!std::isfinite(kappa)) {
        throw std::invalid_argument("quadratic interaction: non-finite kappa");
    }
    InteractionPotential w;
    w.dim = dim;
    w.gradient = QuadraticGradient{kappa, std::vector<double>(dim, 0.0)};
    w.hessian_lower = kappa;
    w.hessian_upper = kappa;
    check_vanishes_at_zero(w.gradient, dim);
    return w;
}

InteractionPotential make_perturbed_interaction(std::size_t dim, double kappa, double amp,
                                                double freq) {
    if (dim == 0) throw std::invalid_argument("potential: dimension must be >= 1");
    if (!std::isfinite(kappa) || !std::isfinite(amp) || !std::isfinite(freq)) {
        throw std::invalid_argument("perturbed interaction: non-finite parameter");
    }
    InteractionPotential w;
    w.dim = dim;
    w.gradient = PerturbedQuadraticGradient{kappa, std::vector<double>(dim, 0.0), amp, freq};
    double swing = std::abs(amp) * freq * freq;
    w.hessian_lower = kappa - swing;
    w.hessian_upper = kappa + swing;
    check_vanishes_at_zero(w.gradient, dim);
    check_antisymmetry(w.gradient, dim);
    return w;
}

InteractionPotential make_custom_interaction(
    std::size_t dim, std::function<void(std::span<const double>, std::span<double>)> eval,
    double hessian_lower, double hessian_upper) {
    if (dim == 0 || !eval) {
        throw std::invalid_argument("custom interaction: bad arguments");
    }
    if (!(hessian_lower <= hessian_upper)) {
        throw std::invalid_argument("custom interaction: bounds out of order");
    }
    InteractionPotential w;
    w.dim = dim;
    w.gradient = CustomGradient{std::move(eval)};
    w.hessian_lower = hessian_lower;
    w.hessian_upper = hessian_upper;
    check_vanishes_at_zero(w.gradient, dim);
    check_antisymmetry(w.gradient, dim);
    return w;
}

LipschitzConstants lipschitz_constants(const ConfinementPotential& v,
                                       const InteractionPotential& w) {
    LipschitzConstants out;
    out.grad_v = std::max(std::abs(v.hessian_lower), std::abs(v.hessian_upper));
    out.grad_w = std::max(std::abs(w.hessian_lower), std::abs(w.hessian_upper));
    return out;
}

HessianCheckReport verify_hessian_bounds(const GradientField& g, std::size_t dim,
                                         double hessian_lower, double hessian_upper,
                                         double box_radius, std::size_t samples,
                                         std::uint64_t seed, double tolerance) {
    if (dim == 0 || samples == 0 || !(box_radius > 0.0)) {
        throw std::invalid_argument("verify_hessian_bounds: bad arguments");
    }
    HessianCheckReport report;
    report.samples = samples;
    report.tolerance = tolerance;
    report.min_eigenvalue = std::numeric_limits<double>::infinity();
    report.max_eigenvalue = -std::numeric_limits<double>::infinity();

    const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
    std::vector<double> x(dim), xp(dim), xm(dim), gp(dim), gm(dim);
    Eigen::MatrixXd hess(dim, dim);

    for (std::size_t s = 0; s < samples; ++s) {
        double norm2 = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            x[c] = box_radius * (2.0 * uniform01(seed, Stream::test, s, 0,
                                                 static_cast<std::uint32_t>(c)) - 1.0);
            norm2 += x[c] * x[c];
        }
        const double h = h0 * (1.0 + std::sqrt(norm2));
        for (std::size_t j = 0; j < dim; ++j) {
            xp = x; xm = x;
            xp[j] += h; xm[j] -= h;
            evaluate_gradient(g, xp, gp);
            evaluate_gradient(g, xm, gm);
            for (std::size_t i = 0; i < dim; ++i) {
                hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        Eigen::MatrixXd sym = 0.5 * (hess + hess.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
        double lo = eig.eigenvalues().minCoeff();
        double hi = eig.eigenvalues().maxCoeff();
        report.min_eigenvalue = std::min(report.min_eigenvalue, lo);
        report.max_eigenvalue = std::max(report.max_eigenvalue, hi);
        if (lo < hessian_lower - tolerance || hi > hessian_upper + tolerance) {
            ++report.violations;
        }
    }
    report.pass = report.violations == 0;
    return report;
}

HessianCheckReport verify_hessian_bounds(const ConfinementPotential& v, double box_radius,
                                         std::size_t samples, std::uint64_t seed,
                                         double tolerance) {
    return verify_hessian_bounds(v.gradient, v.dim, v.hessian_lower, v.hessian_upper,
                                 box_radius, samples, seed, tolerance);
}

HessianCheckReport verify_hessian_bounds(const InteractionPotential& w, double box_radius,
                                         std::size_t samples, std::uint64_t seed,
                                         double tolerance) {
    return verify_hessian_bounds(w.gradient, w.dim, w.hessian_lower, w.hessian_upper,
                                 box_radius, samples, seed, tolerance);
}

}  // namespace mfc
