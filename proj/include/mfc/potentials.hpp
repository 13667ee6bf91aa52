#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

namespace mfc {

// Gradient fields are tagged so simulation kernels can specialize the hot
// pairwise loops instead of paying an indirect call per particle pair.
struct ZeroGradient {};

// g(x) = kappa * (x - center)
struct QuadraticGradient {
    double kappa = 1.0;
    std::vector<double> center;
};

// g(x)_c = kappa * (x - center)_c + amp * freq * sin(freq * (x - center)_c);
// adds a smooth diagonal Hessian perturbation of magnitude amp * freq^2.
struct PerturbedQuadraticGradient {
    double kappa = 1.0;
    std::vector<double> center;
    double amp = 0.0;
    double freq = 1.0;
};

struct CustomGradient {
    std::function<void(std::span<const double>, std::span<double>)> eval;
};

using GradientField =
    std::variant<ZeroGradient, QuadraticGradient, PerturbedQuadraticGradient, CustomGradient>;

void evaluate_gradient(const GradientField& g, std::span<const double> x,
                       std::span<double> out);

// Confining potential V with declared Hessian bounds
// hessian_lower * I <= D^2 V <= hessian_upper * I.
struct ConfinementPotential {
    std::size_t dim = 1;
    GradientField gradient;
    double hessian_lower = 0.0;
    double hessian_upper = 0.0;
    std::vector<double> gradient_at_zero;

    void eval(std::span<const double> x, std::span<double> out) const {
        evaluate_gradient(gradient, x, out);
    }
};

// Interaction potential W, even with gradient vanishing at the origin, and
// declared Hessian bounds. The gradient is evaluated on differences z = x - y.
struct InteractionPotential {
    std::size_t dim = 1;
    GradientField gradient;
    double hessian_lower = 0.0;
    double hessian_upper = 0.0;

    void eval(std::span<const double> z, std::span<double> out) const {
        evaluate_gradient(gradient, z, out);
    }
};

ConfinementPotential make_zero_confinement(std::size_t dim);
// V(x) = (kappa/2)|x - center|^2, kappa > 0
ConfinementPotential make_quadratic_confinement(double kappa, std::vector<double> center);
ConfinementPotential make_perturbed_confinement(double kappa, std::vector<double> center,
                                                double amp, double freq);
// custom gradient with caller-declared bounds
ConfinementPotential make_custom_confinement(
    std::size_t dim, std::function<void(std::span<const double>, std::span<double>)> eval,
    double hessian_lower, double hessian_upper);

InteractionPotential make_zero_interaction(std::size_t dim);
// W(z) = (kappa/2)|z|^2
InteractionPotential make_quadratic_interaction(std::size_t dim, double kappa);
// W(z) = (kappa/2)|z|^2 + amp * sum_c (1 - cos(freq z_c))
InteractionPotential make_perturbed_interaction(std::size_t dim, double kappa, double amp,
                                                double freq);
InteractionPotential make_custom_interaction(
    std::size_t dim, std::function<void(std::span<const double>, std::span<double>)> eval,
    double hessian_lower, double hessian_upper);

// Lipschitz constants of the gradients implied by the declared Hessian bounds.
struct LipschitzConstants {
    double grad_v = 0.0;  // max(|hessian_lower|, |hessian_upper|) of V
    double grad_w = 0.0;  // same for W
};

LipschitzConstants lipschitz_constants(const ConfinementPotential& v,
                                       const InteractionPotential& w);

// Finite-difference audit of the declared Hessian bounds on random sample
// points in a box. Central differences on the gradient with per-point step
// h = cbrt(eps) * (1 + |x|).
struct HessianCheckReport {
    std::size_t samples = 0;
    double min_eigenvalue = 0.0;
    double max_eigenvalue = 0.0;
    double tolerance = 0.0;
    std::size_t violations = 0;
    bool pass = false;
};

HessianCheckReport verify_hessian_bounds(const GradientField& g, std::size_t dim,
                                         double hessian_lower, double hessian_upper,
                                         double box_radius, std::size_t samples,
                                         std::uint64_t seed, double tolerance = 1e-6);

HessianCheckReport verify_hessian_bounds(const ConfinementPotential& v, double box_radius,
                                         std::size_t samples, std::uint64_t seed,
                                         double tolerance = 1e-6);

HessianCheckReport verify_hessian_bounds(const InteractionPotential& w, double box_radius,
                                         std::size_t samples, std::uint64_t seed,
                                         double tolerance = 1e-6);

}  // namespace mfc
