#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mfc/paths.hpp"

namespace mfc {

enum class MetricKind { point_euclidean, path_sup, path_pair_sum };

// Dense matrix of pairwise costs d(x_i, y_j)^p.
struct CostMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    double p = 1.0;
    MetricKind metric = MetricKind::point_euclidean;
    std::vector<double> cost;  // row-major

    double at(std::size_t i, std::size_t j) const { return cost[i * cols + j]; }
};

CostMatrix cost_matrix(const EmpiricalPointMeasure& mu, const EmpiricalPointMeasure& nu,
                       double p);
CostMatrix cost_matrix(const EmpiricalPathMeasure& mu, const EmpiricalPathMeasure& nu,
                       double p);
// product space C x C with d((x,x'),(y,y')) = sup|x-y| + sup|x'-y'|
CostMatrix cost_matrix(const EmpiricalPathPairMeasure& mu, const EmpiricalPathPairMeasure& nu,
                       double p);

struct PlanEntry {
    std::size_t i = 0;
    std::size_t j = 0;
    double mass = 0.0;
};

struct TransportPlan {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<PlanEntry> entries;

    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
};

struct WassersteinResult {
    double value = 0.0;        // W_p = (sum_ij plan_ij cost_ij)^(1/p)
    double transport_cost = 0.0;  // sum_ij plan_ij cost_ij
    TransportPlan plan;
    std::string solver;        // "assignment" or "network_simplex"
};

// Exact discrete optimal transport. Equal-count equal-weight inputs go through
// an O(n^3) shortest-augmenting-path assignment solver, everything else through
// a network simplex on weights integerized at scale 1e12.
WassersteinResult wasserstein(const CostMatrix& cost, const std::vector<double>& mu_weights,
                              const std::vector<double>& nu_weights);

WassersteinResult wasserstein(const EmpiricalPointMeasure& mu, const EmpiricalPointMeasure& nu,
                              double p);
WassersteinResult wasserstein(const EmpiricalPathMeasure& mu, const EmpiricalPathMeasure& nu,
                              double p);
// W_p on pair measures with the sum product metric
WassersteinResult product_wasserstein(const EmpiricalPathPairMeasure& mu,
                                      const EmpiricalPathPairMeasure& nu, double p = 1.0);

// Exact W_1 on the line via the CDF-difference integral; independent of the
// primal solvers.
double w1_dual_1d(const EmpiricalPointMeasure& mu, const EmpiricalPointMeasure& nu);

// H(nu|mu) over a shared atom list; conventions 0 ln 0 = 0, and +infinity as
// soon as nu charges an atom with zero mu weight.
double relative_entropy(const std::vector<double>& nu_weights,
                        const std::vector<double>& mu_weights);
// requires bitwise-identical atom lists
double relative_entropy(const EmpiricalPointMeasure& nu, const EmpiricalPointMeasure& mu);

// sqrt((2/lambda) H) - W; nonnegative margin means the quadratic
// transport-entropy inequality with constant lambda holds for the pair.
double talagrand_margin(double entropy, double wp, double lambda);
double talagrand_margin(const EmpiricalPointMeasure& mu, const EmpiricalPointMeasure& nu,
                        double p, double lambda);

// audit dumps
void write_cost_csv(const CostMatrix& cost, std::ostream& out);
void write_plan_csv(const TransportPlan& plan, std::ostream& out);

}  // namespace mfc
