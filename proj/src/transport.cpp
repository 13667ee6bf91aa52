#include "mfc/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "ot_solvers.hpp"

namespace mfc {

namespace {

constexpr std::int64_t kWeightScale = 1'000'000'000'000;  // 1e12

double power(double base, double p) {
    if (p == 1.0) return base;
    if (p == 2.0) return base * base;
    return std::pow(base, p);
}

bool near_uniform(const std::vector<double>& w) {
    double ref = 1.0 / static_cast<double>(w.size());
    for (double x : w) {
        if (std::abs(x - ref) > 1e-15) return false;
    }
    return true;
}

// round weights to integers summing exactly to `total`
std::vector<std::int64_t> integerize(const std::vector<double>& w, std::int64_t total) {
    std::vector<std::int64_t> out(w.size());
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        out[i] = std::llround(w[i] * static_cast<double>(total));
        sum += out[i];
    }
    std::int64_t drift = total - sum;
    if (drift != 0) {
        std::vector<std::size_t> order(w.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
        std::int64_t step = drift > 0 ? 1 : -1;
        std::size_t at = 0;
        while (drift != 0) {
            std::size_t i = order[at % order.size()];
            if (out[i] + step >= 0) {
                out[i] += step;
                drift -= step;
            }
            ++at;
            if (at > 4 * order.size() && drift != 0) {
                throw std::runtime_error("integerize: could not balance weights");
            }
        }
    }
    return out;
}

WassersteinResult finish(const CostMatrix& cost, TransportPlan plan) {
    long double total = 0.0L;
    for (const PlanEntry& e : plan.entries) {
        total += static_cast<long double>(e.mass) * cost.at(e.i, e.j);
    }
    WassersteinResult result;
    result.transport_cost = static_cast<double>(total);
    result.value = cost.p == 1.0 ? result.transport_cost
                                 : std::pow(result.transport_cost, 1.0 / cost.p);
    result.plan = std::move(plan);
    return result;
}

}  // namespace

CostMatrix cost_matrix(const EmpiricalPointMeasure& mu, const EmpiricalPointMeasure& nu,
                       double p) {
    if (mu.dim() != nu.dim()) {
        throw std::invalid_argument("cost_matrix: dimension mismatch");
    }
    if (!(p >= 1.0)) {
        throw std::invalid_argument("cost_matrix: p must be >= 1");
    }
    CostMatrix c;
    c.rows = mu.size();
    c.cols = nu.size();
    c.p = p;
    c.metric = MetricKind::point_euclidean;
    c.cost.resize(c.rows * c.cols);
    for (std::size_t i = 0; i < c.rows; ++i) {
        auto xi = mu.point(i);
        for (std::size_t j = 0; j < c.cols; ++j) {
            c.cost[i * c.cols + j] = power(euclidean_distance(xi, nu.point(j)), p);
        }
    }
    return c;
}

CostMatrix cost_matrix(const EmpiricalPathMeasure& mu, const EmpiricalPathMeasure& nu,
                       double p) {
    if (mu.dim() != nu.dim() || !(mu.grid() == nu.grid())) {
        throw std::invalid_argument("cost_matrix: paths must share grid and dimension");
    }
    if (!(p >= 1.0)) {
        throw std::invalid_argument("cost_matrix: p must be >= 1");
    }
    CostMatrix c;
    c.rows = mu.size();
    c.cols = nu.size();
    c.p = p;
    c.metric = MetricKind::path_sup;
    c.cost.resize(c.rows * c.cols);
    for (std::size_t i = 0; i < c.rows; ++i) {
        const Path& a = mu.atom(i);
        for (std::size_t j = 0; j < c.cols; ++j) {
            c.cost[i * c.cols + j] = power(sup_distance(a, nu.atom(j)), p);
        }
    }
    return c;
}

CostMatrix cost_matrix(const EmpiricalPathPairMeasure& mu, const EmpiricalPathPairMeasure& nu,
                       double p) {
    if (!(p >= 1.0)) {
        throw std::invalid_argument("cost_matrix: p must be >= 1");
    }
    CostMatrix c;
    c.rows = mu.size();
    c.cols = nu.size();
    c.p = p;
    c.metric = MetricKind::path_pair_sum;
    c.cost.resize(c.rows * c.cols);
    for (std::size_t i = 0; i < c.rows; ++i) {
        for (std::size_t j = 0; j < c.cols; ++j) {
            double d = sup_distance(mu.first(i), nu.first(j)) +
                       sup_distance(mu.second(i), nu.second(j));
            c.cost[i * c.cols + j] = power(d, p);
        }
    }
    return c;
}

std::vector<double> TransportPlan::row_sums() const {
    std::vector<double> out(rows, 0.0);
    for (const PlanEntry& e : entries) out[e.i] += e.mass;
    return out;
}

std::vector<double> TransportPlan::col_sums() const {
    std::vector<double> out(cols, 0.0);
    for (const PlanEntry& e : entries) out[e.j] += e.mass;
    return out;
}

WassersteinResult wasserstein(const CostMatrix& cost, const std::vector<double>& mu_weights,
                              const std::vector<double>& nu_weights) {
    if (mu_weights.size() != cost.rows || nu_weights.size() != cost.cols) {
        throw std::invalid_argument("wasserstein: weight sizes must match the cost matrix");
    }
    const bool uniform_mu = near_uniform(mu_weights);
    const bool uniform_nu = near_uniform(nu_weights);

    TransportPlan plan;
    plan.rows = cost.rows;
    plan.cols = cost.cols;

    if (cost.rows == cost.cols && uniform_mu && uniform_nu) {
        auto match = detail::solve_assignment(cost.rows, cost.cost);
        plan.entries.reserve(cost.rows);
        for (std::size_t i = 0; i < cost.rows; ++i) {
            plan.entries.push_back({i, match[i], mu_weights[i]});
        }
        auto result = finish(cost, std::move(plan));
        result.solver = "assignment";
        return result;
    }

    std::vector<std::int64_t> supply, demand;
    std::int64_t total;
    if (uniform_mu && uniform_nu) {
        // exact integerization: per-atom masses m and n with equal totals n*m
        total = static_cast<std::int64_t>(cost.rows) * static_cast<std::int64_t>(cost.cols);
        supply.assign(cost.rows, static_cast<std::int64_t>(cost.cols));
        demand.assign(cost.cols, static_cast<std::int64_t>(cost.rows));
    } else {
        total = kWeightScale;
        supply = integerize(mu_weights, total);
        demand = integerize(nu_weights, total);
    }
    auto flows = detail::solve_transportation(supply, demand, cost.cost);
    const double inv_total = 1.0 / static_cast<double>(total);
    plan.entries.reserve(flows.size());
    for (const auto& f : flows) {
        plan.entries.push_back({f.i, f.j, static_cast<double>(f.amount) * inv_total});
    }
    auto result = finish(cost, std::move(plan));
    result.solver = "network_simplex";
    return result;
}

WassersteinResult wasserstein(const EmpiricalPointMeasure& mu, const EmpiricalPointMeasure& nu,
                              double p) {
    return wasserstein(cost_matrix(mu, nu, p), mu.weights(), nu.weights());
}

WassersteinResult wasserstein(const EmpiricalPathMeasure& mu, const EmpiricalPathMeasure& nu,
                              double p) {
    return wasserstein(cost_matrix(mu, nu, p), mu.weights(), nu.weights());
}

WassersteinResult product_wasserstein(const EmpiricalPathPairMeasure& mu,
                                      const EmpiricalPathPairMeasure& nu, double p) {
    return wasserstein(cost_matrix(mu, nu, p), mu.weights(), nu.weights());
}

double w1_dual_1d(const EmpiricalPointMeasure& mu, const EmpiricalPointMeasure& nu) {
    if (mu.dim() != 1 || nu.dim() != 1) {
        throw std::invalid_argument("w1_dual_1d: measures must live on the line");
    }
    struct Site {
        double x;
        double w;
    };
    std::vector<Site> sites;
    sites.reserve(mu.size() + nu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        sites.push_back({mu.point(i)[0], mu.weights()[i]});
    }
    for (std::size_t j = 0; j < nu.size(); ++j) {
        sites.push_back({nu.point(j)[0], -nu.weights()[j]});
    }
    std::sort(sites.begin(), sites.end(),
              [](const Site& a, const Site& b) { return a.x < b.x; });
    // integral of |F_mu - F_nu| between consecutive support points
    long double integral = 0.0L;
    long double cdf_gap = 0.0L;
    for (std::size_t k = 0; k < sites.size(); ++k) {
        cdf_gap += sites[k].w;
        if (k + 1 < sites.size()) {
            integral += std::abs(static_cast<double>(cdf_gap)) * (sites[k + 1].x - sites[k].x);
        }
    }
    return static_cast<double>(integral);
}

double relative_entropy(const std::vector<double>& nu_weights,
                        const std::vector<double>& mu_weights) {
    if (nu_weights.size() != mu_weights.size()) {
        throw std::invalid_argument("relative_entropy: weight lists must align");
    }
    long double h = 0.0L;
    for (std::size_t i = 0; i < nu_weights.size(); ++i) {
        double nu = nu_weights[i];
        double mu = mu_weights[i];
        if (nu == 0.0) continue;  // 0 ln 0 = 0
        if (mu == 0.0) return std::numeric_limits<double>::infinity();
        h += static_cast<long double>(nu) * std::log(nu / mu);
    }
    return static_cast<double>(h);
}

double relative_entropy(const EmpiricalPointMeasure& nu, const EmpiricalPointMeasure& mu) {
    if (nu.size() != mu.size() || nu.dim() != mu.dim()) {
        throw std::invalid_argument("relative_entropy: measures must share the atom list");
    }
    for (std::size_t i = 0; i < nu.size(); ++i) {
        auto a = nu.point(i);
        auto b = mu.point(i);
        for (std::size_t c = 0; c < nu.dim(); ++c) {
            if (a[c] != b[c]) {
                throw std::invalid_argument("relative_entropy: measures must share the atom list");
            }
        }
    }
    return relative_entropy(nu.weights(), mu.weights());
}

double talagrand_margin(double entropy, double wp, double lambda) {
    if (!(lambda > 0.0)) {
        throw std::invalid_argument("talagrand_margin: lambda must be > 0");
    }
    if (entropy < 0.0) {
        throw std::invalid_argument("talagrand_margin: entropy must be >= 0");
    }
    if (std::isinf(entropy)) {
        return std::numeric_limits<double>::infinity();
    }
    return std::sqrt((2.0 / lambda) * entropy) - wp;
}

double talagrand_margin(const EmpiricalPointMeasure& mu, const EmpiricalPointMeasure& nu,
                        double p, double lambda) {
    double wp = wasserstein(mu, nu, p).value;
    double h = relative_entropy(nu, mu);
    return talagrand_margin(h, wp, lambda);
}

void write_cost_csv(const CostMatrix& cost, std::ostream& out) {
    out << "i,j,cost\n";
    char buf[40];
    for (std::size_t i = 0; i < cost.rows; ++i) {
        for (std::size_t j = 0; j < cost.cols; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", cost.at(i, j));
            out << i << "," << j << "," << buf << "\n";
        }
    }
}

void write_plan_csv(const TransportPlan& plan, std::ostream& out) {
    out << "i,j,mass\n";
    char buf[40];
    for (const PlanEntry& e : plan.entries) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.mass);
        out << e.i << "," << e.j << "," << buf << "\n";
    }
}

}  // namespace mfc
