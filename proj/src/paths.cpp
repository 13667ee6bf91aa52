#include "mfc/paths.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mfc {

namespace {

constexpr double kWeightSumTol = 1e-12;

void check_finite(const std::vector<double>& values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + ": non-finite entry");
        }
    }
}

void check_weights(const std::vector<double>& w, std::size_t n) {
    if (w.size() != n) {
        throw std::invalid_argument("weights: size mismatch with atom count");
    }
    if (n == 0) {
        throw std::invalid_argument("empirical measure: no atoms");
    }
    double sum = 0.0;
    for (double x : w) {
        if (!(x >= 0.0)) {
            throw std::invalid_argument("weights: negative or NaN entry");
        }
        sum += x;
    }
    if (std::abs(sum - 1.0) > kWeightSumTol) {
        throw std::invalid_argument("weights: sum differs from 1 beyond 1e-12");
    }
}

std::vector<double> uniform_weights(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("empirical measure: no atoms");
    }
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    // re-normalize so the stored sum is 1 up to one ulp
    for (double& x : w) x /= sum;
    return w;
}

}  // namespace

TimeGrid::TimeGrid(double horizon, std::size_t steps)
    : horizon(horizon), steps(steps) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("TimeGrid: horizon must be finite and >= 0");
    }
    if (steps < 1) {
        throw std::invalid_argument("TimeGrid: steps must be >= 1");
    }
}

Path::Path(TimeGrid grid, std::size_t dim, std::vector<double> values)
    : grid_(grid), dim_(dim), values_(std::move(values)) {
    if (dim_ == 0) {
        throw std::invalid_argument("Path: dimension must be >= 1");
    }
    if (values_.size() != grid_.points() * dim_) {
        throw std::invalid_argument("Path: values length must equal (steps+1)*dim");
    }
    check_finite(values_, "Path");
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) {
        double d = a[c] - b[c];
        s += d * d;
    }
    return std::sqrt(s);
}

double uniform_norm(const Path& p) {
    double best = 0.0;
    for (std::size_t m = 0; m < p.points(); ++m) {
        double s = 0.0;
        for (std::size_t c = 0; c < p.dim(); ++c) {
            double v = p.value(m, c);
            s += v * v;
        }
        best = std::max(best, s);
    }
    return std::sqrt(best);
}

double holder_seminorm(const Path& p, double alpha) {
    if (!(alpha > 0.0) || !(alpha <= 1.0)) {
        throw std::invalid_argument("holder_seminorm: alpha must lie in (0,1]");
    }
    const std::size_t n = p.points();
    const double dt = p.grid().dt();
    if (n < 2 || !(dt > 0.0)) {
        return 0.0;
    }
    // gap^alpha depends only on the index difference; precompute
    std::vector<double> gap_pow(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        gap_pow[k] = std::pow(static_cast<double>(k) * dt, alpha);
    }
    double best = 0.0;
    for (std::size_t m = 0; m + 1 < n; ++m) {
        for (std::size_t l = m + 1; l < n; ++l) {
            double d = euclidean_distance(p.point(m), p.point(l));
            best = std::max(best, d / gap_pow[l - m]);
        }
    }
    return best;
}

double holder_norm(const Path& p, double alpha) {
    return std::max(uniform_norm(p), holder_seminorm(p, alpha));
}

double sup_distance(const Path& a, const Path& b) {
    if (!(a.grid() == b.grid()) || a.dim() != b.dim()) {
        throw std::invalid_argument("sup_distance: paths must share grid and dimension");
    }
    double best = 0.0;
    for (std::size_t m = 0; m < a.points(); ++m) {
        best = std::max(best, euclidean_distance(a.point(m), b.point(m)));
    }
    return best;
}

Path restrict(const Path& p, std::size_t u) {
    if (u < 1 || u > p.grid().steps) {
        throw std::invalid_argument("restrict: index must satisfy 1 <= u <= steps");
    }
    TimeGrid sub(p.grid().time(u), u);
    std::vector<double> values(p.values().begin(),
                               p.values().begin() + static_cast<std::ptrdiff_t>((u + 1) * p.dim()));
    return Path(sub, p.dim(), std::move(values));
}

EmpiricalPathMeasure::EmpiricalPathMeasure(std::vector<Path> atoms,
                                           std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
    check_weights(weights_, atoms_.size());
    const TimeGrid& g = atoms_.front().grid();
    const std::size_t d = atoms_.front().dim();
    for (const Path& p : atoms_) {
        if (!(p.grid() == g) || p.dim() != d) {
            throw std::invalid_argument("EmpiricalPathMeasure: atoms must share grid and dimension");
        }
    }
}

EmpiricalPathMeasure EmpiricalPathMeasure::uniform(std::vector<Path> atoms) {
    auto w = uniform_weights(atoms.size());
    return EmpiricalPathMeasure(std::move(atoms), std::move(w));
}

bool EmpiricalPathMeasure::equal_weights() const {
    double ref = 1.0 / static_cast<double>(size());
    for (double w : weights_) {
        if (std::abs(w - ref) > 1e-15) return false;
    }
    return true;
}

EmpiricalPointMeasure::EmpiricalPointMeasure(std::size_t dim, std::vector<double> points,
                                             std::vector<double> weights)
    : dim_(dim), points_(std::move(points)), weights_(std::move(weights)) {
    if (dim_ == 0) {
        throw std::invalid_argument("EmpiricalPointMeasure: dimension must be >= 1");
    }
    if (points_.size() != weights_.size() * dim_) {
        throw std::invalid_argument("EmpiricalPointMeasure: point buffer size mismatch");
    }
    check_weights(weights_, weights_.size());
    check_finite(points_, "EmpiricalPointMeasure");
}

EmpiricalPointMeasure EmpiricalPointMeasure::uniform(std::size_t dim,
                                                     std::vector<double> points) {
    if (dim == 0 || points.size() % dim != 0) {
        throw std::invalid_argument("EmpiricalPointMeasure: point buffer size mismatch");
    }
    auto w = uniform_weights(points.size() / dim);
    return EmpiricalPointMeasure(dim, std::move(points), std::move(w));
}

bool EmpiricalPointMeasure::equal_weights() const {
    double ref = 1.0 / static_cast<double>(size());
    for (double w : weights_) {
        if (std::abs(w - ref) > 1e-15) return false;
    }
    return true;
}

EmpiricalPointMeasure project(const EmpiricalPathMeasure& mu, std::size_t t_index) {
    if (t_index > mu.grid().steps) {
        throw std::invalid_argument("project: time index out of range");
    }
    std::vector<double> pts;
    pts.reserve(mu.size() * mu.dim());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto p = mu.atom(i).point(t_index);
        pts.insert(pts.end(), p.begin(), p.end());
    }
    return EmpiricalPointMeasure(mu.dim(), std::move(pts), mu.weights());
}

EmpiricalPathMeasure restrict(const EmpiricalPathMeasure& mu, std::size_t u) {
    std::vector<Path> atoms;
    atoms.reserve(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        atoms.push_back(restrict(mu.atom(i), u));
    }
    return EmpiricalPathMeasure(std::move(atoms), mu.weights());
}

EmpiricalPathPairMeasure::EmpiricalPathPairMeasure(std::vector<Path> first,
                                                   std::vector<Path> second,
                                                   std::vector<double> weights)
    : first_(std::move(first)), second_(std::move(second)), weights_(std::move(weights)) {
    if (first_.size() != second_.size()) {
        throw std::invalid_argument("EmpiricalPathPairMeasure: component count mismatch");
    }
    check_weights(weights_, first_.size());
    const TimeGrid& g = first_.front().grid();
    const std::size_t d = first_.front().dim();
    for (std::size_t i = 0; i < first_.size(); ++i) {
        if (!(first_[i].grid() == g) || first_[i].dim() != d ||
            !(second_[i].grid() == g) || second_[i].dim() != d) {
            throw std::invalid_argument("EmpiricalPathPairMeasure: atoms must share grid and dimension");
        }
    }
}

EmpiricalPathPairMeasure EmpiricalPathPairMeasure::uniform(std::vector<Path> first,
                                                           std::vector<Path> second) {
    auto w = uniform_weights(first.size());
    return EmpiricalPathPairMeasure(std::move(first), std::move(second), std::move(w));
}

void write_path_csv(const Path& p, std::ostream& out) {
    out << "t";
    for (std::size_t c = 1; c <= p.dim(); ++c) {
        out << ",x" << c;
    }
    out << "\n";
    char buf[40];
    for (std::size_t m = 0; m < p.points(); ++m) {
        std::snprintf(buf, sizeof(buf), "%.17g", p.grid().time(m));
        out << buf;
        for (std::size_t c = 0; c < p.dim(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", p.value(m, c));
            out << "," << buf;
        }
        out << "\n";
    }
}

std::string path_to_csv(const Path& p) {
    std::ostringstream os;
    write_path_csv(p, os);
    return os.str();
}

Path path_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("path csv: empty input");
    }
    std::size_t dim = 0;
    for (char ch : line) {
        if (ch == ',') ++dim;
    }
    if (dim == 0) {
        throw std::invalid_argument("path csv: header must be t,x1,...,xd");
    }
    std::vector<double> times;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ls, cell, ',')) {
            double v = std::stod(cell);
            if (col == 0) {
                times.push_back(v);
            } else {
                values.push_back(v);
            }
            ++col;
        }
        if (col != dim + 1) {
            throw std::invalid_argument("path csv: ragged row");
        }
    }
    if (times.size() < 2) {
        throw std::invalid_argument("path csv: need at least two grid points");
    }
    TimeGrid grid(times.back(), times.size() - 1);
    return Path(grid, dim, std::move(values));
}

}  // namespace mfc
