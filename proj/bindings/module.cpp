#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "mfc/concentration.hpp"
#include "mfc/entropy.hpp"
#include "mfc/paths.hpp"
#include "mfc/potentials.hpp"
#include "mfc/rng.hpp"
#include "mfc/sde.hpp"
#include "mfc/transport.hpp"

namespace py = pybind11;

namespace {

mfc::EmpiricalPointMeasure make_cloud(std::size_t dim, const std::vector<double>& points,
                                      const std::vector<double>& weights) {
    if (weights.empty()) {
        return mfc::EmpiricalPointMeasure::uniform(dim, points);
    }
    return {dim, points, weights};
}

mfc::HolderBallSpec make_ball(std::size_t dim, double horizon, double radius,
                              double alpha) {
    mfc::HolderBallSpec spec;
    spec.dim = dim;
    spec.horizon = horizon;
    spec.radius = radius;
    spec.alpha = alpha;
    mfc::validate(spec);
    return spec;
}

mfc::TailBoundParameters make_params(double moment_order, double quadratic_rate,
                                     double working_rate, double square_exp_scale,
                                     double holder_exponent, double working_exponent,
                                     double threshold_constant) {
    mfc::TailBoundParameters params;
    params.moment_order = moment_order;
    params.quadratic_rate = quadratic_rate;
    params.working_rate = working_rate;
    params.square_exp_scale = square_exp_scale;
    params.holder_exponent = holder_exponent;
    params.working_exponent = working_exponent;
    params.threshold_constant = threshold_constant;
    return params;
}

mfc::SimulationConfig make_simulation(std::size_t particles, std::size_t dim,
                                      double horizon, std::size_t steps,
                                      const std::string& confinement,
                                      double confinement_rate,
                                      const std::string& interaction,
                                      double interaction_rate, double sigma) {
    mfc::SimulationConfig config;
    config.particles = particles;
    config.dim = dim;
    config.grid = mfc::TimeGrid(horizon, steps);
    const std::vector<double> center(dim, 0.0);
    if (confinement == "none") {
        config.confinement = mfc::make_zero_confinement(dim);
    } else if (confinement == "quadratic") {
        config.confinement = mfc::make_quadratic_confinement(confinement_rate, center);
    } else {
        throw std::invalid_argument("confinement must be 'none' or 'quadratic'");
    }
    if (interaction == "none") {
        config.interaction = mfc::make_zero_interaction(dim);
    } else if (interaction == "quadratic") {
        config.interaction = mfc::make_quadratic_interaction(dim, interaction_rate);
    } else {
        throw std::invalid_argument("interaction must be 'none' or 'quadratic'");
    }
    config.initial = mfc::gaussian_initial(center, sigma);
    mfc::validate(config);
    return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "mean field particle toolkit: transport distances, interacting "
              "diffusions, entropy bounds";

    m.def(
        "wasserstein",
        [](const std::vector<double>& a, const std::vector<double>& b, std::size_t dim,
           double p, const std::vector<double>& a_weights,
           const std::vector<double>& b_weights) {
            const auto result = mfc::wasserstein(make_cloud(dim, a, a_weights),
                                                 make_cloud(dim, b, b_weights), p);
            py::dict out;
            out["value"] = result.value;
            out["solver"] = result.solver;
            return out;
        },
        py::arg("a"), py::arg("b"), py::arg("dim") = 1, py::arg("p") = 1.0,
        py::arg("a_weights") = std::vector<double>{},
        py::arg("b_weights") = std::vector<double>{},
        "Exact W_p between two weighted point clouds given as flat, "
        "point-major coordinate lists.");

    m.def(
        "w1_dual_1d",
        [](const std::vector<double>& a, const std::vector<double>& b,
           const std::vector<double>& a_weights, const std::vector<double>& b_weights) {
            return mfc::w1_dual_1d(make_cloud(1, a, a_weights),
                                   make_cloud(1, b, b_weights));
        },
        py::arg("a"), py::arg("b"), py::arg("a_weights") = std::vector<double>{},
        py::arg("b_weights") = std::vector<double>{},
        "Closed-form W_1 on the line via quantile functions.");

    m.def("relative_entropy",
          py::overload_cast<const std::vector<double>&, const std::vector<double>&>(
              &mfc::relative_entropy),
          py::arg("nu_weights"), py::arg("mu_weights"),
          "Kullback-Leibler divergence of two weight vectors on shared atoms.");

    m.def("talagrand_margin",
          py::overload_cast<double, double, double>(&mfc::talagrand_margin),
          py::arg("entropy"), py::arg("wp"), py::arg("lam"),
          "W_p - sqrt(2 H / lambda); nonpositive when the transport "
          "inequality holds.");

    m.def("inverse_normal_cdf", &mfc::inverse_normal_cdf, py::arg("u"),
          "Quantile function of the standard normal distribution.");

    m.def(
        "simulate",
        [](std::size_t particles, std::size_t dim, double horizon, std::size_t steps,
           std::uint64_t seed, const std::string& confinement, double confinement_rate,
           const std::string& interaction, double interaction_rate, double sigma) {
            const auto config =
                make_simulation(particles, dim, horizon, steps, confinement,
                                confinement_rate, interaction, interaction_rate, sigma);
            const auto ensemble =
                mfc::simulate_interacting(config, mfc::BrownianDriver::main(seed));
            std::vector<double> times(config.grid.points());
            for (std::size_t u = 0; u < times.size(); ++u) {
                times[u] = config.grid.time(u);
            }
            std::vector<std::vector<double>> paths;
            paths.reserve(ensemble.size());
            for (const auto& atom : ensemble.atoms()) {
                paths.push_back(atom.values());
            }
            py::dict out;
            out["times"] = std::move(times);
            out["paths"] = std::move(paths);
            out["dim"] = dim;
            return out;
        },
        py::arg("particles"), py::arg("dim"), py::arg("horizon"), py::arg("steps"),
        py::arg("seed"), py::arg("confinement") = "none",
        py::arg("confinement_rate") = 1.0, py::arg("interaction") = "none",
        py::arg("interaction_rate") = 1.0, py::arg("sigma") = 1.0,
        "Euler scheme for the interacting ensemble; paths are returned "
        "particle-major as flat time-by-coordinate lists.");

    m.def(
        "tail_bound",
        [](double particles, double epsilon, double moment_order, double quadratic_rate,
           double working_rate, double square_exp_scale, double holder_exponent,
           double working_exponent, double threshold_constant) {
            const auto result = mfc::tail_bound(
                make_params(moment_order, quadratic_rate, working_rate, square_exp_scale,
                            holder_exponent, working_exponent, threshold_constant),
                particles, epsilon);
            py::dict out;
            out["log_bound"] = result.log_bound;
            out["bound"] = result.bound;
            out["min_particles"] = result.min_particles;
            out["condition_met"] = result.condition_met;
            return out;
        },
        py::arg("particles"), py::arg("epsilon"), py::arg("moment_order") = 1.0,
        py::arg("quadratic_rate") = 1.0, py::arg("working_rate") = 0.5,
        py::arg("square_exp_scale") = 1.0, py::arg("holder_exponent") = 1.0,
        py::arg("working_exponent") = 0.5, py::arg("threshold_constant") = 1.0,
        "Finite-sample deviation bound for the empirical path measure, with "
        "the sample-size threshold it requires.");

    m.def(
        "beta_factor",
        [](double moment_order, double quadratic_rate, double working_rate,
           double square_exp_scale, double holder_exponent, double working_exponent,
           double threshold_constant) {
            return mfc::beta_factor(make_params(moment_order, quadratic_rate,
                                                working_rate, square_exp_scale,
                                                holder_exponent, working_exponent,
                                                threshold_constant));
        },
        py::arg("moment_order") = 1.0, py::arg("quadratic_rate") = 1.0,
        py::arg("working_rate") = 0.5, py::arg("square_exp_scale") = 1.0,
        py::arg("holder_exponent") = 1.0, py::arg("working_exponent") = 0.5,
        py::arg("threshold_constant") = 1.0,
        "Order-dependent prefactor of the deviation exponent.");

    m.def(
        "covering_upper_bound_log",
        [](double r, std::size_t dim, double horizon, double radius, double alpha) {
            return mfc::covering_upper_bound_log(make_ball(dim, horizon, radius, alpha),
                                                 r);
        },
        py::arg("r"), py::arg("dim") = 1, py::arg("horizon") = 1.0,
        py::arg("radius") = 1.0, py::arg("alpha") = 1.0,
        "Log covering number upper bound for the Hoelder ball.");

    m.def(
        "covering_lower_bound_log",
        [](double r, std::size_t dim, double horizon, double radius, double alpha) {
            return mfc::covering_lower_bound_log(make_ball(dim, horizon, radius, alpha),
                                                 r);
        },
        py::arg("r"), py::arg("dim") = 1, py::arg("horizon") = 1.0,
        py::arg("radius") = 1.0, py::arg("alpha") = 1.0,
        "Log covering number lower bound; valid below "
        "covering_lower_bound_validity.");

    m.def(
        "covering_lower_bound_validity",
        [](std::size_t dim, double horizon, double radius, double alpha) {
            return mfc::covering_lower_bound_validity(
                make_ball(dim, horizon, radius, alpha));
        },
        py::arg("dim") = 1, py::arg("horizon") = 1.0, py::arg("radius") = 1.0,
        py::arg("alpha") = 1.0,
        "Largest radius the lower bound is stated for.");

    m.def("measure_cover_bound_log",
          py::overload_cast<double, double, double, double>(
              &mfc::measure_cover_bound_log),
          py::arg("p"), py::arg("diameter"), py::arg("cover_count_log"),
          py::arg("delta"),
          "Log covering number of the W_p space of measures over a covered "
          "base space.");

    m.def(
        "holder_norm",
        [](const std::vector<double>& values, double horizon, double alpha,
           std::size_t dim) {
            if (dim == 0 || values.size() % dim != 0 || values.size() / dim < 2) {
                throw std::invalid_argument(
                    "values must hold at least two points of width dim");
            }
            const std::size_t steps = values.size() / dim - 1;
            return mfc::holder_norm(mfc::Path(mfc::TimeGrid(horizon, steps), dim, values),
                                    alpha);
        },
        py::arg("values"), py::arg("horizon") = 1.0, py::arg("alpha") = 1.0,
        py::arg("dim") = 1,
        "max of the uniform norm and the discrete alpha-Hoelder seminorm of "
        "a sampled path.");

    m.attr("__version__") = "0.1.0";
}
