#include "mfc/runner.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "mfc/concentration.hpp"
#include "mfc/entropy.hpp"
#include "mfc/paths.hpp"
#include "mfc/potentials.hpp"
#include "mfc/sde.hpp"
#include "mfc/transport.hpp"

#include "artifacts.hpp"

namespace mfc {

const char* const kToolVersion = "0.1.0";

namespace {

using detail::CsvTable;
using detail::format_double;
using detail::SvgSeries;

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

bool valid_name(const std::string& s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
            return false;
        }
    }
    return true;
}

// ---- typed getters over the flat map ----

const std::string* find_value(const ConfigMap& values, const std::string& key) {
    auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
}

std::string get_string(const ConfigMap& values, const std::string& key,
                       std::optional<std::string> fallback = std::nullopt) {
    const std::string* raw = find_value(values, key);
    if (raw == nullptr) {
        if (fallback) {
            return *fallback;
        }
        throw ConfigError("missing required key '" + key + "'");
    }
    return *raw;
}

double parse_double(const std::string& raw, const std::string& key) {
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(value)) {
        throw ConfigError("key '" + key + "': cannot parse '" + raw + "' as a real number");
    }
    return value;
}

std::uint64_t parse_u64(const std::string& raw, const std::string& key) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long value = std::strtoull(raw.c_str(), &end, 10);
    if (end == raw.c_str() || *end != '\0' || errno == ERANGE || raw.find('-') != std::string::npos) {
        throw ConfigError("key '" + key + "': cannot parse '" + raw + "' as an unsigned integer");
    }
    return static_cast<std::uint64_t>(value);
}

double get_double(const ConfigMap& values, const std::string& key,
                  std::optional<double> fallback = std::nullopt) {
    const std::string* raw = find_value(values, key);
    if (raw == nullptr) {
        if (fallback) {
            return *fallback;
        }
        throw ConfigError("missing required key '" + key + "'");
    }
    return parse_double(*raw, key);
}

std::uint64_t get_u64(const ConfigMap& values, const std::string& key,
                      std::optional<std::uint64_t> fallback = std::nullopt) {
    const std::string* raw = find_value(values, key);
    if (raw == nullptr) {
        if (fallback) {
            return *fallback;
        }
        throw ConfigError("missing required key '" + key + "'");
    }
    return parse_u64(*raw, key);
}

std::size_t get_size(const ConfigMap& values, const std::string& key,
                     std::optional<std::size_t> fallback = std::nullopt) {
    if (fallback) {
        return static_cast<std::size_t>(get_u64(values, key, static_cast<std::uint64_t>(*fallback)));
    }
    return static_cast<std::size_t>(get_u64(values, key));
}

std::vector<std::string> split_ws(const std::string& raw) {
    std::vector<std::string> out;
    std::istringstream in(raw);
    std::string token;
    while (in >> token) {
        out.push_back(token);
    }
    return out;
}

std::vector<double> get_double_list(const ConfigMap& values, const std::string& key,
                                    bool required) {
    const std::string* raw = find_value(values, key);
    if (raw == nullptr) {
        if (required) {
            throw ConfigError("missing required key '" + key + "'");
        }
        return {};
    }
    std::vector<double> out;
    for (const auto& token : split_ws(*raw)) {
        out.push_back(parse_double(token, key));
    }
    if (required && out.empty()) {
        throw ConfigError("key '" + key + "' must list at least one value");
    }
    return out;
}

std::vector<std::size_t> get_size_list(const ConfigMap& values, const std::string& key,
                                       bool required) {
    const std::string* raw = find_value(values, key);
    if (raw == nullptr) {
        if (required) {
            throw ConfigError("missing required key '" + key + "'");
        }
        return {};
    }
    std::vector<std::size_t> out;
    for (const auto& token : split_ws(*raw)) {
        out.push_back(static_cast<std::size_t>(parse_u64(token, key)));
    }
    if (required && out.empty()) {
        throw ConfigError("key '" + key + "' must list at least one value");
    }
    return out;
}

double require_positive_cfg(double v, const std::string& key) {
    if (!(v > 0.0)) {
        throw ConfigError("key '" + key + "' must be positive");
    }
    return v;
}

// ---- schema ----

const std::map<std::string, std::set<std::string>>& known_schema() {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"run", {"seed", "out"}},
        {"grid", {"horizon", "steps"}},
        {"model",
         {"dim", "confinement", "confinement_rate", "confinement_center",
          "confinement_wobble", "confinement_frequency", "interaction",
          "interaction_rate", "interaction_wobble", "interaction_frequency"}},
        {"initial", {"kind", "center", "sigma", "radius"}},
        {"simulate", {"particles"}},
        {"coupling", {"particles", "reference_particles", "slack"}},
        {"concentration",
         {"reference_particles", "particles", "epsilons", "replicas", "pilot_quantiles"}},
        {"covering", {"alpha", "horizon", "radius", "r_values", "cap"}},
        {"chaos", {"reference_particles", "particles", "replicas", "pair_cap"}},
        {"bounds",
         {"moment_order", "quadratic_rate", "working_rate", "square_exp_scale",
          "holder_exponent", "working_exponent", "threshold_constant", "epsilons",
          "particles"}},
    };
    return schema;
}

const std::map<std::string, std::vector<std::string>>& required_sections() {
    static const std::map<std::string, std::vector<std::string>> req = {
        {"simulate", {"run", "grid", "model", "initial", "simulate"}},
        {"coupling", {"run", "grid", "model", "initial", "coupling"}},
        {"concentration", {"run", "grid", "model", "initial", "concentration"}},
        {"covering", {"run", "covering"}},
        {"chaos", {"run", "grid", "model", "initial", "chaos"}},
        {"bounds", {"run", "bounds"}},
    };
    return req;
}

std::vector<double> center_or_zero(const ConfigMap& values, const std::string& key,
                                   std::size_t dim) {
    std::vector<double> center = get_double_list(values, key, false);
    if (center.empty()) {
        center.assign(dim, 0.0);
    }
    if (center.size() != dim) {
        throw ConfigError("key '" + key + "' must list exactly dim entries");
    }
    return center;
}

SimulationConfig build_simulation(const ConfigMap& values) {
    SimulationConfig cfg;
    cfg.dim = get_size(values, "model.dim");
    if (cfg.dim == 0 || cfg.dim > 16) {
        throw ConfigError("key 'model.dim' must lie in [1, 16]");
    }
    const double horizon = require_positive_cfg(get_double(values, "grid.horizon"), "grid.horizon");
    const std::size_t steps = get_size(values, "grid.steps");
    if (steps == 0 || steps > 1'000'000) {
        throw ConfigError("key 'grid.steps' must lie in [1, 1000000]");
    }
    cfg.grid = TimeGrid(horizon, steps);

    const std::string conf = get_string(values, "model.confinement", std::string("none"));
    if (conf == "none") {
        cfg.confinement = make_zero_confinement(cfg.dim);
    } else if (conf == "quadratic") {
        cfg.confinement = make_quadratic_confinement(
            require_positive_cfg(get_double(values, "model.confinement_rate"),
                                 "model.confinement_rate"),
            center_or_zero(values, "model.confinement_center", cfg.dim));
    } else if (conf == "perturbed") {
        cfg.confinement = make_perturbed_confinement(
            require_positive_cfg(get_double(values, "model.confinement_rate"),
                                 "model.confinement_rate"),
            center_or_zero(values, "model.confinement_center", cfg.dim),
            get_double(values, "model.confinement_wobble"),
            require_positive_cfg(get_double(values, "model.confinement_frequency"),
                                 "model.confinement_frequency"));
    } else {
        throw ConfigError("key 'model.confinement' must be none, quadratic or perturbed");
    }

    const std::string inter = get_string(values, "model.interaction", std::string("none"));
    if (inter == "none") {
        cfg.interaction = make_zero_interaction(cfg.dim);
    } else if (inter == "quadratic") {
        cfg.interaction = make_quadratic_interaction(
            cfg.dim, get_double(values, "model.interaction_rate"));
    } else if (inter == "perturbed") {
        cfg.interaction = make_perturbed_interaction(
            cfg.dim, get_double(values, "model.interaction_rate"),
            get_double(values, "model.interaction_wobble"),
            require_positive_cfg(get_double(values, "model.interaction_frequency"),
                                 "model.interaction_frequency"));
    } else {
        throw ConfigError("key 'model.interaction' must be none, quadratic or perturbed");
    }

    const std::string kind = get_string(values, "initial.kind", std::string("gaussian"));
    if (kind == "gaussian") {
        cfg.initial = gaussian_initial(
            center_or_zero(values, "initial.center", cfg.dim),
            require_positive_cfg(get_double(values, "initial.sigma", 1.0), "initial.sigma"));
    } else if (kind == "uniform_ball") {
        cfg.initial = uniform_ball_initial(
            center_or_zero(values, "initial.center", cfg.dim),
            require_positive_cfg(get_double(values, "initial.radius", 1.0), "initial.radius"));
    } else {
        throw ConfigError("key 'initial.kind' must be gaussian or uniform_ball");
    }
    cfg.particles = 1;  // adjusted by each pipeline
    return cfg;
}

TailBoundParameters build_bound_parameters(const ConfigMap& values) {
    TailBoundParameters params;
    params.moment_order = get_double(values, "bounds.moment_order", 1.0);
    params.quadratic_rate = get_double(values, "bounds.quadratic_rate");
    params.working_rate = get_double(values, "bounds.working_rate");
    params.square_exp_scale = get_double(values, "bounds.square_exp_scale");
    params.holder_exponent = get_double(values, "bounds.holder_exponent", 1.0);
    params.working_exponent = get_double(values, "bounds.working_exponent");
    params.threshold_constant = get_double(values, "bounds.threshold_constant", 1.0);
    try {
        validate(params);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[bounds] ") + e.what());
    }
    return params;
}

void validate_for_subcommand(const std::string& subcommand, const ConfigMap& values) {
    get_u64(values, "run.seed");
    if (subcommand == "simulate") {
        build_simulation(values);
        if (get_size(values, "simulate.particles") == 0) {
            throw ConfigError("key 'simulate.particles' must be positive");
        }
    } else if (subcommand == "coupling") {
        build_simulation(values);
        if (get_size(values, "coupling.particles") == 0 ||
            get_size(values, "coupling.reference_particles") == 0) {
            throw ConfigError("coupling ensemble sizes must be positive");
        }
        if (get_double(values, "coupling.slack", 0.05) < 0.0) {
            throw ConfigError("key 'coupling.slack' must be nonnegative");
        }
    } else if (subcommand == "concentration") {
        build_simulation(values);
        if (get_size(values, "concentration.reference_particles") == 0) {
            throw ConfigError("key 'concentration.reference_particles' must be positive");
        }
        for (std::size_t n : get_size_list(values, "concentration.particles", true)) {
            if (n == 0) {
                throw ConfigError("key 'concentration.particles' entries must be positive");
            }
        }
        for (double e : get_double_list(values, "concentration.epsilons", false)) {
            if (e < 0.0) {
                throw ConfigError("key 'concentration.epsilons' entries must be nonnegative");
            }
        }
        for (double q : get_double_list(values, "concentration.pilot_quantiles", false)) {
            if (!(q > 0.0) || !(q < 1.0)) {
                throw ConfigError("key 'concentration.pilot_quantiles' entries must lie in (0,1)");
            }
        }
        if (get_size(values, "concentration.replicas") == 0) {
            throw ConfigError("key 'concentration.replicas' must be positive");
        }
    } else if (subcommand == "covering") {
        HolderBallSpec spec;
        spec.dim = 1;
        spec.horizon = get_double(values, "covering.horizon");
        spec.radius = get_double(values, "covering.radius");
        spec.alpha = get_double(values, "covering.alpha", 1.0);
        try {
            validate(spec);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("[covering] ") + e.what());
        }
        for (double r : get_double_list(values, "covering.r_values", true)) {
            if (!(r > 0.0)) {
                throw ConfigError("key 'covering.r_values' entries must be positive");
            }
        }
        get_size(values, "covering.cap", std::size_t{1'000'000});
    } else if (subcommand == "chaos") {
        build_simulation(values);
        const std::size_t m = get_size(values, "chaos.reference_particles");
        if (m < 4 || m % 2 != 0) {
            throw ConfigError("key 'chaos.reference_particles' must be even and at least 4");
        }
        for (std::size_t n : get_size_list(values, "chaos.particles", true)) {
            if (n < 2) {
                throw ConfigError("key 'chaos.particles' entries must be at least 2");
            }
        }
        if (get_size(values, "chaos.replicas") == 0) {
            throw ConfigError("key 'chaos.replicas' must be positive");
        }
        if (get_size(values, "chaos.pair_cap", std::size_t{4096}) == 0) {
            throw ConfigError("key 'chaos.pair_cap' must be positive");
        }
    } else if (subcommand == "bounds") {
        build_bound_parameters(values);
        for (double e : get_double_list(values, "bounds.epsilons", true)) {
            if (!(e > 0.0)) {
                throw ConfigError("key 'bounds.epsilons' entries must be positive");
            }
        }
        for (std::size_t n : get_size_list(values, "bounds.particles", true)) {
            if (n == 0) {
                throw ConfigError("key 'bounds.particles' entries must be positive");
            }
        }
    } else {
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    }
}

// ---- artifact assembly ----

struct Artifact {
    std::string name;
    std::string content;
};

std::string bool_cell(bool v) { return v ? "1" : "0"; }

void emit_simulate(const RunConfig& config, std::vector<Artifact>& artifacts) {
    SimulationConfig cfg = build_simulation(config.values);
    cfg.particles = get_size(config.values, "simulate.particles");
    const EmpiricalPathMeasure ensemble =
        simulate_interacting(cfg, BrownianDriver::main(config.master_seed));

    CsvTable table;
    table.header = {"particle", "time"};
    for (std::size_t c = 0; c < cfg.dim; ++c) {
        table.header.push_back("x" + std::to_string(c));
    }
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        const Path& path = ensemble.atom(i);
        for (std::size_t m = 0; m <= cfg.grid.steps; ++m) {
            std::vector<std::string> row = {std::to_string(i),
                                            format_double(cfg.grid.time(m))};
            for (std::size_t c = 0; c < cfg.dim; ++c) {
                row.push_back(format_double(path.value(m, c)));
            }
            table.rows.push_back(std::move(row));
        }
    }
    artifacts.push_back({"trajectories.csv", table.render()});

    if (cfg.dim == 1) {
        std::vector<SvgSeries> series;
        const std::size_t shown = std::min<std::size_t>(ensemble.size(), 16);
        for (std::size_t i = 0; i < shown; ++i) {
            SvgSeries s;
            for (std::size_t m = 0; m <= cfg.grid.steps; ++m) {
                s.x.push_back(cfg.grid.time(m));
                s.y.push_back(ensemble.atom(i).value(m, 0));
            }
            series.push_back(std::move(s));
        }
        artifacts.push_back(
            {"trajectories.svg",
             detail::render_line_svg("interacting particle paths", "t", "x", series)});
    }
}

void emit_coupling(const RunConfig& config, std::vector<Artifact>& artifacts) {
    SimulationConfig cfg = build_simulation(config.values);
    cfg.particles = get_size(config.values, "coupling.particles");
    const std::size_t reference_particles =
        get_size(config.values, "coupling.reference_particles");
    const double slack = get_double(config.values, "coupling.slack", 0.05);

    const EmpiricalPathMeasure reference = simulate_reference_ensemble(
        cfg, reference_particles, BrownianDriver::reference(config.master_seed));
    const CouplingRun run = simulate_coupled(
        cfg, BrownianDriver::main(config.master_seed), reference);
    const CouplingAuditReport report =
        coupling_audit(run, reference, lipschitz_constants(cfg.confinement, cfg.interaction),
                       cfg.confinement.hessian_lower, cfg.interaction.hessian_lower, slack);

    CsvTable audit;
    audit.header = {"time", "lhs", "rhs", "point_w1", "violation"};
    for (const auto& row : report.rows) {
        audit.rows.push_back({format_double(row.time), format_double(row.lhs),
                              format_double(row.rhs), format_double(row.point_w1),
                              bool_cell(row.violation)});
    }
    artifacts.push_back({"audit.csv", audit.render()});

    CsvTable summary;
    summary.header = {"violation_fraction", "slack",         "gronwall_factor",
                      "ratio_available",    "ratio",         "ratio_bound",
                      "ratio_ok"};
    summary.rows.push_back({format_double(report.violation_fraction),
                            format_double(report.slack),
                            format_double(report.gronwall_factor),
                            bool_cell(report.ratio_available), format_double(report.ratio),
                            format_double(report.ratio_bound), bool_cell(report.ratio_ok)});
    artifacts.push_back({"summary.csv", summary.render()});

    SvgSeries lhs{"lhs", {}, {}};
    SvgSeries rhs{"rhs", {}, {}};
    for (const auto& row : report.rows) {
        lhs.x.push_back(row.time);
        lhs.y.push_back(row.lhs);
        rhs.x.push_back(row.time);
        rhs.y.push_back(row.rhs);
    }
    artifacts.push_back(
        {"audit.svg", detail::render_line_svg("coupling audit", "t", "W1", {lhs, rhs})});
}

void emit_concentration(const RunConfig& config, std::vector<Artifact>& artifacts) {
    SimulationConfig cfg = build_simulation(config.values);
    const std::size_t reference_particles =
        get_size(config.values, "concentration.reference_particles");
    const std::vector<std::size_t> particle_grid =
        get_size_list(config.values, "concentration.particles", true);
    std::vector<double> epsilons = get_double_list(config.values, "concentration.epsilons", false);
    const std::size_t replicas = get_size(config.values, "concentration.replicas");

    if (epsilons.empty()) {
        // pilot pass: cut epsilons at quantiles of the smallest ensemble's distances
        std::vector<double> quantiles =
            get_double_list(config.values, "concentration.pilot_quantiles", false);
        if (quantiles.empty()) {
            quantiles = {0.25, 0.5, 0.75};
        }
        const TailTable pilot =
            estimate_tail(cfg, reference_particles, {particle_grid.front()}, {}, replicas,
                          config.master_seed, config.workers);
        std::vector<double> distances = pilot.distances.front();
        if (distances.empty()) {
            throw std::runtime_error("pilot pass produced no usable distances");
        }
        std::sort(distances.begin(), distances.end());
        for (double q : quantiles) {
            const auto idx = static_cast<std::size_t>(
                q * static_cast<double>(distances.size() - 1) + 0.5);
            epsilons.push_back(distances[std::min(idx, distances.size() - 1)]);
        }
    }

    const TailTable table =
        estimate_tail(cfg, reference_particles, particle_grid, epsilons, replicas,
                      config.master_seed, config.workers);

    CsvTable tail;
    tail.header = {"particles", "epsilon",    "replicas",  "hits",
                   "failures",  "p_hat",      "wilson_low", "wilson_high"};
    for (const auto& row : table.rows) {
        tail.rows.push_back({std::to_string(row.particles), format_double(row.epsilon),
                             std::to_string(row.replicas), std::to_string(row.hits),
                             std::to_string(row.failures), format_double(row.p_hat),
                             format_double(row.wilson_low), format_double(row.wilson_high)});
    }
    artifacts.push_back({"tail.csv", tail.render()});

    CsvTable fit_csv;
    fit_csv.header = {"k_hat", "intercept", "rows_used"};
    SvgSeries points{"-ln p_hat", {}, {}};
    SvgSeries line{"fit", {}, {}};
    try {
        const RateFit fit = fit_rate(table);
        fit_csv.rows.push_back({format_double(fit.k_hat), format_double(fit.intercept),
                                std::to_string(fit.rows_used)});
        std::vector<std::pair<double, double>> scatter;
        for (const auto& row : table.rows) {
            if (row.replicas == 0 || row.p_hat <= 0.0 || row.p_hat >= 1.0) {
                continue;
            }
            const double x = static_cast<double>(row.particles) * row.epsilon * row.epsilon;
            scatter.emplace_back(x, -std::log(row.p_hat));
        }
        std::sort(scatter.begin(), scatter.end());
        for (const auto& [x, y] : scatter) {
            points.x.push_back(x);
            points.y.push_back(y);
            line.x.push_back(x);
            line.y.push_back(fit.k_hat * x + fit.intercept);
        }
    } catch (const std::invalid_argument&) {
        // saturated table; emit the header only
    }
    artifacts.push_back({"fit.csv", fit_csv.render()});
    artifacts.push_back({"rate.svg", detail::render_line_svg("tail decay", "N eps^2",
                                                             "-ln p_hat", {points, line})});
}

void emit_covering(const RunConfig& config, std::vector<Artifact>& artifacts) {
    HolderBallSpec spec;
    spec.dim = 1;
    spec.horizon = get_double(config.values, "covering.horizon");
    spec.radius = get_double(config.values, "covering.radius");
    spec.alpha = get_double(config.values, "covering.alpha", 1.0);
    const std::vector<double> r_values = get_double_list(config.values, "covering.r_values", true);
    const std::size_t cap = get_size(config.values, "covering.cap", std::size_t{1'000'000});

    CsvTable sweep;
    sweep.header = {"r",           "lower_log",       "upper_log", "time_cells",
                    "level_cells", "formula_log_count", "enumerated_count"};
    SvgSeries upper{"upper log", {}, {}};
    SvgSeries lower{"lower log", {}, {}};
    for (double r : r_values) {
        std::vector<std::string> row(7, "");
        row[0] = format_double(r);
        if (r <= covering_lower_bound_validity(spec)) {
            const double lo = covering_lower_bound_log(spec, r);
            row[1] = format_double(lo);
            lower.x.push_back(r);
            lower.y.push_back(lo);
        }
        const double up = covering_upper_bound_log(spec, r);
        row[2] = format_double(up);
        upper.x.push_back(r);
        upper.y.push_back(up);
        const CoverFormula formula = cover_formula(spec, r);
        row[3] = std::to_string(formula.time_cells);
        row[4] = std::to_string(formula.level_cells);
        row[5] = format_double(formula.log_count);
        if (r <= spec.radius &&
            cover_count_log(spec, r) <= std::log(static_cast<double>(cap))) {
            row[6] = std::to_string(build_cover(spec, r, cap).size());
        }
        sweep.rows.push_back(std::move(row));
    }
    artifacts.push_back({"covering.csv", sweep.render()});
    artifacts.push_back({"covering.svg", detail::render_line_svg("entropy bounds", "r",
                                                                 "log count", {upper, lower})});
}

void emit_chaos(const RunConfig& config, std::vector<Artifact>& artifacts) {
    SimulationConfig cfg = build_simulation(config.values);
    const ChaosTable table = chaos_experiment(
        cfg, get_size(config.values, "chaos.reference_particles"),
        get_size_list(config.values, "chaos.particles", true),
        get_size(config.values, "chaos.replicas"), config.master_seed,
        get_size(config.values, "chaos.pair_cap", std::size_t{4096}), config.workers);

    CsvTable csv;
    csv.header = {"particles",      "pair_atoms", "subsampled",
                  "subsample_seed", "replicas",   "median_distance"};
    SvgSeries medians{"median", {}, {}};
    for (const auto& row : table.rows) {
        csv.rows.push_back({std::to_string(row.particles), std::to_string(row.pair_atoms),
                            bool_cell(row.subsampled), std::to_string(row.subsample_seed),
                            std::to_string(row.replicas),
                            format_double(row.median_distance)});
        medians.x.push_back(static_cast<double>(row.particles));
        medians.y.push_back(row.median_distance);
    }
    artifacts.push_back({"chaos.csv", csv.render()});
    artifacts.push_back({"chaos.svg", detail::render_line_svg("pair measure distance", "N",
                                                              "W1", {medians})});
}

void emit_bounds(const RunConfig& config, std::vector<Artifact>& artifacts) {
    const TailBoundParameters params = build_bound_parameters(config.values);
    const std::vector<double> epsilons = get_double_list(config.values, "bounds.epsilons", true);
    const std::vector<std::size_t> particles = get_size_list(config.values, "bounds.particles", true);

    CsvTable csv;
    csv.header = {"moment_order",  "quadratic_rate",    "working_rate",
                  "square_exp_scale", "holder_exponent", "working_exponent",
                  "threshold_constant", "particles",     "epsilon",
                  "beta",          "log_bound",         "bound",
                  "min_particles", "condition_met"};
    for (std::size_t n : particles) {
        for (double eps : epsilons) {
            const TailBoundResult result = tail_bound(params, static_cast<double>(n), eps);
            csv.rows.push_back({format_double(params.moment_order),
                                format_double(params.quadratic_rate),
                                format_double(params.working_rate),
                                format_double(params.square_exp_scale),
                                format_double(params.holder_exponent),
                                format_double(params.working_exponent),
                                format_double(params.threshold_constant),
                                std::to_string(n), format_double(eps),
                                format_double(beta_factor(params)),
                                format_double(result.log_bound), format_double(result.bound),
                                format_double(result.min_particles),
                                bool_cell(result.condition_met)});
        }
    }
    artifacts.push_back({"bounds.csv", csv.render()});
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap values;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') {
            continue;
        }
        if (t.front() == '[') {
            if (t.back() != ']') {
                throw ConfigError("line " + std::to_string(line_no) + ": unterminated section");
            }
            section = trim(t.substr(1, t.size() - 2));
            if (!valid_name(section)) {
                throw ConfigError("line " + std::to_string(line_no) + ": bad section name");
            }
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        if (section.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": key outside any section");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (!valid_name(key)) {
            throw ConfigError("line " + std::to_string(line_no) + ": bad key name");
        }
        const std::string flat = section + "." + key;
        if (values.count(flat) != 0) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + flat + "'");
        }
        values[flat] = value;
    }
    return values;
}

ConfigMap load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

RunConfig make_run_config(const std::string& subcommand, const std::string& config_path,
                          const std::string& out_override, std::size_t workers) {
    const auto& req = required_sections();
    if (req.find(subcommand) == req.end()) {
        throw ConfigError("unknown subcommand '" + subcommand + "'");
    }
    RunConfig config;
    config.subcommand = subcommand;
    config.values = load_config_file(config_path);

    // reject keys outside the documented schema
    const auto& schema = known_schema();
    for (const auto& [flat, value] : config.values) {
        (void)value;
        const auto dot = flat.find('.');
        const std::string section = flat.substr(0, dot);
        const std::string key = flat.substr(dot + 1);
        auto sec = schema.find(section);
        if (sec == schema.end()) {
            throw ConfigError("unknown section '[" + section + "]'");
        }
        if (sec->second.count(key) == 0) {
            throw ConfigError("unknown key '" + flat + "'");
        }
    }
    for (const auto& section : req.at(subcommand)) {
        bool seen = false;
        for (const auto& [flat, value] : config.values) {
            (void)value;
            if (flat.rfind(section + ".", 0) == 0) {
                seen = true;
                break;
            }
        }
        if (!seen) {
            throw ConfigError("missing required section '[" + section + "]'");
        }
    }

    config.master_seed = get_u64(config.values, "run.seed");
    if (const char* env = std::getenv("MFC_SEED")) {
        config.master_seed = parse_u64(env, "MFC_SEED");
    }
    config.out_dir = out_override.empty()
                         ? get_string(config.values, "run.out", std::string("out"))
                         : out_override;
    config.workers = workers == 0 ? 1 : workers;

    validate_for_subcommand(subcommand, config.values);
    return config;
}

RunManifest run(const RunConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<Artifact> artifacts;
    if (config.subcommand == "simulate") {
        emit_simulate(config, artifacts);
    } else if (config.subcommand == "coupling") {
        emit_coupling(config, artifacts);
    } else if (config.subcommand == "concentration") {
        emit_concentration(config, artifacts);
    } else if (config.subcommand == "covering") {
        emit_covering(config, artifacts);
    } else if (config.subcommand == "chaos") {
        emit_chaos(config, artifacts);
    } else if (config.subcommand == "bounds") {
        emit_bounds(config, artifacts);
    } else {
        throw ConfigError("unknown subcommand '" + config.subcommand + "'");
    }

    RunManifest manifest;
    manifest.subcommand = config.subcommand;
    manifest.master_seed = config.master_seed;
    manifest.tool_version = kToolVersion;

    const std::filesystem::path dir(config.out_dir);
    for (const auto& artifact : artifacts) {
        detail::write_file_atomic(dir, artifact.name, artifact.content);
        manifest.file_hashes[artifact.name] = detail::sha1_hex(artifact.content);
    }
    manifest.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    nlohmann::json j;
    j["subcommand"] = manifest.subcommand;
    j["master_seed"] = manifest.master_seed;
    j["tool_version"] = manifest.tool_version;
    j["config"] = nlohmann::json(config.values);
    j["workers"] = config.workers;
    nlohmann::json files = nlohmann::json::object();
    for (const auto& [name, hash] : manifest.file_hashes) {
        files[name] = hash;
    }
    j["files"] = files;
    j["duration_seconds"] = manifest.duration_seconds;
    detail::write_file_atomic(dir, "manifest.json", j.dump(2) + "\n");
    return manifest;
}

}  // namespace mfc
