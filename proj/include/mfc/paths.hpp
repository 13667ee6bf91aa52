#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mfc {

// Uniform grid 0 = t_0 < t_1 < ... < t_M = T with spacing T/M.
struct TimeGrid {
    double horizon = 1.0;
    std::size_t steps = 1;

    TimeGrid() = default;
    TimeGrid(double horizon, std::size_t steps);

    double dt() const { return horizon / static_cast<double>(steps); }
    double time(std::size_t m) const { return static_cast<double>(m) * dt(); }
    std::size_t points() const { return steps + 1; }

    bool operator==(const TimeGrid& other) const {
        return horizon == other.horizon && steps == other.steps;
    }
};

// Sampled R^d-valued path on a uniform grid, immutable after construction.
class Path {
  public:
    Path(TimeGrid grid, std::size_t dim, std::vector<double> values);

    const TimeGrid& grid() const { return grid_; }
    std::size_t dim() const { return dim_; }
    std::size_t points() const { return grid_.points(); }
    std::span<const double> point(std::size_t m) const {
        return {values_.data() + m * dim_, dim_};
    }
    double value(std::size_t m, std::size_t coord) const {
        return values_[m * dim_ + coord];
    }
    const std::vector<double>& values() const { return values_; }

  private:
    TimeGrid grid_;
    std::size_t dim_;
    std::vector<double> values_;
};

// max over grid points of the Euclidean norm of p(t_m)
double uniform_norm(const Path& p);

// sup over grid pairs s != t of |p(t)-p(s)| / |t-s|^alpha, alpha in (0,1]
double holder_seminorm(const Path& p, double alpha);

// max(uniform_norm, holder_seminorm)
double holder_norm(const Path& p, double alpha);

// max over grid points of the Euclidean distance |a(t_m) - b(t_m)|
double sup_distance(const Path& a, const Path& b);

double euclidean_distance(std::span<const double> a, std::span<const double> b);

// Path restricted to [0, t_u]; u must satisfy 1 <= u <= M.
Path restrict(const Path& p, std::size_t u);

// Weighted empirical measure on path space; atoms share one grid and dimension.
class EmpiricalPathMeasure {
  public:
    EmpiricalPathMeasure(std::vector<Path> atoms, std::vector<double> weights);

    // equal weights 1/N
    static EmpiricalPathMeasure uniform(std::vector<Path> atoms);

    std::size_t size() const { return atoms_.size(); }
    std::size_t dim() const { return atoms_.front().dim(); }
    const TimeGrid& grid() const { return atoms_.front().grid(); }
    const Path& atom(std::size_t i) const { return atoms_[i]; }
    const std::vector<Path>& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }
    bool equal_weights() const;

  private:
    std::vector<Path> atoms_;
    std::vector<double> weights_;
};

// Weighted empirical measure on R^d, flat point storage.
class EmpiricalPointMeasure {
  public:
    EmpiricalPointMeasure(std::size_t dim, std::vector<double> points,
                          std::vector<double> weights);

    static EmpiricalPointMeasure uniform(std::size_t dim, std::vector<double> points);

    std::size_t size() const { return weights_.size(); }
    std::size_t dim() const { return dim_; }
    std::span<const double> point(std::size_t i) const {
        return {points_.data() + i * dim_, dim_};
    }
    const std::vector<double>& weights() const { return weights_; }
    bool equal_weights() const;

  private:
    std::size_t dim_;
    std::vector<double> points_;
    std::vector<double> weights_;
};

// time-t marginal of an empirical path measure
EmpiricalPointMeasure project(const EmpiricalPathMeasure& mu, std::size_t t_index);

// all atoms restricted to [0, t_u]
EmpiricalPathMeasure restrict(const EmpiricalPathMeasure& mu, std::size_t u);

// Empirical measure on pairs of paths (atoms are aligned path pairs).
class EmpiricalPathPairMeasure {
  public:
    EmpiricalPathPairMeasure(std::vector<Path> first, std::vector<Path> second,
                             std::vector<double> weights);

    static EmpiricalPathPairMeasure uniform(std::vector<Path> first,
                                            std::vector<Path> second);

    std::size_t size() const { return weights_.size(); }
    const Path& first(std::size_t i) const { return first_[i]; }
    const Path& second(std::size_t i) const { return second_[i]; }
    const std::vector<double>& weights() const { return weights_; }

  private:
    std::vector<Path> first_;
    std::vector<Path> second_;
    std::vector<double> weights_;
};

// CSV with header t,x1,...,xd and one row per grid point, 17 significant digits.
void write_path_csv(const Path& p, std::ostream& out);
std::string path_to_csv(const Path& p);
Path path_from_csv(std::istream& in);

}  // namespace mfc
