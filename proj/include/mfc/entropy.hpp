#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "mfc/paths.hpp"

namespace mfc {

// Ball of radius R in alpha-Hoelder norm over C([0,T], R^d).
struct HolderBallSpec {
    std::size_t dim = 1;
    double horizon = 1.0;  // T
    double radius = 1.0;   // R
    double alpha = 1.0;    // in (0,1]
};

void validate(const HolderBallSpec& spec);

// ln N(ball, r) <= d ln(10 sqrt(d) R/r)
//                + 5^(1/alpha) d^(1+1/(2 alpha)) T (R/r)^(1/alpha) ln 3,
// and 0 once r >= R.
double covering_upper_bound_log(const HolderBallSpec& spec, double r);

// Valid for r <= R T^alpha / (4 T^alpha + 4):
// ln N >= d ln(sqrt(d)/4 R/r) + 2^(-1/alpha) d^(1+1/(2 alpha)) T (R/r)^(1/alpha) ln 2.
double covering_lower_bound_log(const HolderBallSpec& spec, double r);
double covering_lower_bound_validity(const HolderBallSpec& spec);

// Lattice parameters behind the upper bound: J and K are the smallest
// integers >= 5^(1/alpha) T (sqrt(d) R/r)^(1/alpha) and 4 sqrt(d) R/r, and the
// product construction has at most (2K 3^(J-1))^d centers.
struct CoverFormula {
    std::size_t time_cells = 0;   // J
    std::size_t level_cells = 0;  // K
    double log_count = 0.0;       // d (ln 2K + (J-1) ln 3)
};

CoverFormula cover_formula(const HolderBallSpec& spec, double r);

// Materialized d=1 cover: piecewise-affine center c has value level(k_c(j)) at
// t_j = (j-1/2) tau and is flat on the end segments. Every ball element lies
// within r/2 of some center in uniform norm.
class CoverConstruction {
  public:
    CoverConstruction(double horizon, double tau, double eta, std::size_t time_cells,
                      std::size_t level_cells, std::vector<std::vector<int>> index_paths);

    std::size_t size() const { return index_paths_.size(); }
    std::size_t time_cells() const { return time_cells_; }
    std::size_t level_cells() const { return level_cells_; }
    double tau() const { return tau_; }
    double eta() const { return eta_; }
    double level(int k) const { return (static_cast<double>(k) - 0.5) * eta_; }
    const std::vector<std::vector<int>>& index_paths() const { return index_paths_; }

    double center_value(std::size_t center, double t) const;
    // distance sup_m |f(t_m) - center(t_m)| over the grid of f
    double center_distance(std::size_t center, const Path& f) const;
    Path center_path(std::size_t center, const TimeGrid& grid) const;

  private:
    double horizon_;
    double tau_;
    double eta_;
    std::size_t time_cells_;
    std::size_t level_cells_;
    std::vector<std::vector<int>> index_paths_;
};

// Enumerates the d=1 lattice cover (fails if the count exceeds cap).
CoverConstruction build_cover(const HolderBallSpec& spec, double r,
                              std::size_t cap = 1'000'000);

// Exact count of the d=1 lattice functions as a log; cheap for any size.
double cover_count_log(const HolderBallSpec& spec, double r);

// d=1 packing: piecewise-affine members with knot values (k(j)+l-1/2) eta;
// distinct members are separated by more than 2r in uniform norm.
class PackingConstruction {
  public:
    PackingConstruction(double horizon, double tau, double eta, std::size_t time_cells,
                        std::size_t shift_count, std::vector<std::vector<double>> knot_values);

    std::size_t size() const { return knot_values_.size(); }
    std::size_t time_cells() const { return time_cells_; }    // J
    std::size_t shift_count() const { return shift_count_; }  // L
    double tau() const { return tau_; }
    double eta() const { return eta_; }
    const std::vector<std::vector<double>>& knot_values() const { return knot_values_; }

    // exact uniform distance between members (piecewise-affine on shared knots)
    double member_distance(std::size_t a, std::size_t b) const;
    double member_value(std::size_t member, double t) const;
    Path member_path(std::size_t member, const TimeGrid& grid) const;
    // number of index pairs that coincide as functions
    std::size_t duplicate_pairs() const;

  private:
    double horizon_;
    double tau_;
    double eta_;
    std::size_t time_cells_;
    std::size_t shift_count_;
    std::vector<std::vector<double>> knot_values_;
};

PackingConstruction build_packing(const HolderBallSpec& spec, double r,
                                  std::size_t cap = 1'000'000);

// ln N_p(P(E), delta) <= p N(E, delta/2) ln(8 e D / delta) for a space of
// diameter D, and 0 once delta >= D. `cover_count_log` is ln N(E, delta/2).
double measure_cover_bound_log(double p, double diameter, double cover_count_log,
                               double delta);

// specialization to the Hoelder ball (diameter 2R) via its covering bound
double measure_cover_bound_log(const HolderBallSpec& spec, double p, double delta);

// Random piecewise-linear elements of the ball: Gaussian increments scaled to
// the grid, clipped to [-R, R], kept only if the discrete Hoelder norm is
// within R (rejection). Throws if more than 99% of proposals reject.
std::vector<Path> sample_holder_ball(const HolderBallSpec& spec, const TimeGrid& grid,
                                     std::size_t count, std::uint64_t seed,
                                     double amplitude = 1.0);

}  // namespace mfc
