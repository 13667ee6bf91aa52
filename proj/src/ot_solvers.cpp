#include "ot_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mfc::detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<std::size_t> solve_assignment(std::size_t n, const std::vector<double>& cost) {
    if (n == 0 || cost.size() != n * n) {
        throw std::invalid_argument("solve_assignment: bad matrix");
    }
    constexpr std::ptrdiff_t kFree = -1;
    std::vector<double> u(n, 0.0), v(n, 0.0), shortest(n);
    std::vector<std::ptrdiff_t> row4col(n, kFree), col4row(n, kFree), path(n);
    std::vector<char> sr(n), sc(n);
    std::vector<std::size_t> remaining(n);

    for (std::size_t cur_row = 0; cur_row < n; ++cur_row) {
        std::fill(shortest.begin(), shortest.end(), kInf);
        std::fill(sr.begin(), sr.end(), 0);
        std::fill(sc.begin(), sc.end(), 0);
        std::fill(path.begin(), path.end(), kFree);
        std::iota(remaining.begin(), remaining.end(), std::size_t{0});
        std::size_t num_remaining = n;

        double min_val = 0.0;
        std::size_t i = cur_row;
        std::ptrdiff_t sink = kFree;
        while (sink == kFree) {
            sr[i] = 1;
            std::size_t index = num_remaining;  // position in remaining[]
            double lowest = kInf;
            for (std::size_t it = 0; it < num_remaining; ++it) {
                std::size_t j = remaining[it];
                double r = min_val + cost[i * n + j] - u[i] - v[j];
                if (r < shortest[j]) {
                    shortest[j] = r;
                    path[j] = static_cast<std::ptrdiff_t>(i);
                }
                if (shortest[j] < lowest ||
                    (shortest[j] == lowest && index < num_remaining &&
                     row4col[j] == kFree && row4col[remaining[index]] != kFree)) {
                    lowest = shortest[j];
                    index = it;
                }
            }
            min_val = lowest;
            if (!(min_val < kInf)) {
                throw std::runtime_error("solve_assignment: infeasible matrix");
            }
            std::size_t j = remaining[index];
            sc[j] = 1;
            if (row4col[j] == kFree) {
                sink = static_cast<std::ptrdiff_t>(j);
            } else {
                i = static_cast<std::size_t>(row4col[j]);
            }
            // ordered removal keeps tie scans in ascending column order
            for (std::size_t it = index; it + 1 < num_remaining; ++it) {
                remaining[it] = remaining[it + 1];
            }
            --num_remaining;
        }

        u[cur_row] += min_val;
        for (std::size_t r = 0; r < n; ++r) {
            if (sr[r] && r != cur_row) {
                u[r] += min_val - shortest[static_cast<std::size_t>(col4row[r])];
            }
        }
        for (std::size_t c = 0; c < n; ++c) {
            if (sc[c]) {
                v[c] -= min_val - shortest[c];
            }
        }

        std::size_t j = static_cast<std::size_t>(sink);
        while (true) {
            std::size_t r = static_cast<std::size_t>(path[j]);
            row4col[j] = static_cast<std::ptrdiff_t>(r);
            std::ptrdiff_t old = col4row[r];
            col4row[r] = static_cast<std::ptrdiff_t>(j);
            if (r == cur_row) break;
            j = static_cast<std::size_t>(old);
        }
    }

    std::vector<std::size_t> out(n);
    for (std::size_t r = 0; r < n; ++r) {
        out[r] = static_cast<std::size_t>(col4row[r]);
    }
    return out;
}

namespace {

// Primal network simplex on the bipartite transportation graph plus an
// artificial root. Node ids: sources 0..n-1, sinks n..n+m-1, root n+m.
// Bipartite arc a < n*m runs source a/m -> sink a%m; artificial arcs follow.
// Costs are snapped to a 1e13 integer grid so potentials and reduced costs
// stay exact; otherwise rounding noise in degenerate instances (ubiquitous
// for collinear points) makes zero reduced costs look improving and the
// pivoting never settles.
class TransportationSimplex {
  public:
    static constexpr std::int64_t kCostScale = 10'000'000'000'000;

    TransportationSimplex(const std::vector<std::int64_t>& supply,
                          const std::vector<std::int64_t>& demand,
                          const std::vector<double>& cost)
        : n_(supply.size()), m_(demand.size()), root_(n_ + m_) {
        const std::size_t arcs = n_ * m_ + n_ + m_;
        const std::size_t nodes = n_ + m_ + 1;
        flow_.assign(arcs, 0);
        in_tree_.assign(arcs, 0);
        parent_.assign(nodes, kNone);
        parent_arc_.assign(nodes, arcs);
        pi_.assign(nodes, 0);
        depth_.assign(nodes, 0);
        child_offset_.assign(nodes + 1, 0);
        child_list_.assign(nodes, 0);
        stack_.reserve(nodes);

        double max_cost = 0.0;
        for (double c : cost) max_cost = std::max(max_cost, std::abs(c));
        icost_.resize(n_ * m_);
        const double scale =
            max_cost > 0.0 ? static_cast<double>(kCostScale) / max_cost : 0.0;
        for (std::size_t a = 0; a < n_ * m_; ++a) {
            icost_[a] = std::llround(cost[a] * scale);
        }
        // any root-to-node tree path crosses at most one artificial arc, so
        // potentials stay far below the int64 range
        big_m_ = kCostScale * static_cast<std::int64_t>(nodes) + 1;

        for (std::size_t i = 0; i < n_; ++i) {
            std::size_t a = n_ * m_ + i;
            flow_[a] = supply[i];
            in_tree_[a] = 1;
            parent_[i] = root_;
            parent_arc_[i] = a;
        }
        for (std::size_t j = 0; j < m_; ++j) {
            std::size_t a = n_ * m_ + n_ + j;
            flow_[a] = demand[j];
            in_tree_[a] = 1;
            parent_[n_ + j] = root_;
            parent_arc_[n_ + j] = a;
        }
        refresh_tree_order();

        block_size_ = std::max<std::size_t>(
            64, static_cast<std::size_t>(std::sqrt(static_cast<double>(n_ * m_))));
    }

    void run() {
        std::size_t degenerate_streak = 0;
        bool bland = false;
        std::size_t scan_start = 0;
        const std::size_t bipartite = n_ * m_;
        while (true) {
            std::size_t entering = bipartite;
            if (!bland) {
                // block search: most negative reduced cost within a block,
                // scanning cyclically from the previous hit
                std::int64_t best = 0;
                std::size_t seen = 0;
                for (std::size_t offset = 0; offset < bipartite; ++offset) {
                    std::size_t a = scan_start + offset;
                    if (a >= bipartite) a -= bipartite;
                    if (in_tree_[a]) continue;
                    std::int64_t rc = reduced_cost(a);
                    if (rc < best) {
                        best = rc;
                        entering = a;
                    }
                    if (++seen == block_size_) {
                        if (entering != bipartite) break;
                        seen = 0;
                    }
                }
                if (entering != bipartite) scan_start = entering;
            } else {
                for (std::size_t a = 0; a < bipartite; ++a) {
                    if (!in_tree_[a] && reduced_cost(a) < 0) {
                        entering = a;
                        break;
                    }
                }
            }
            if (entering == bipartite) break;  // optimal

            std::int64_t moved = pivot(entering);
            if (moved == 0) {
                if (++degenerate_streak > 4 * (n_ + m_ + 1)) bland = true;
            } else {
                degenerate_streak = 0;
            }
        }
        for (std::size_t i = 0; i < n_ + m_; ++i) {
            std::size_t a = n_ * m_ + i;
            if (flow_[a] != 0) {
                throw std::runtime_error("network simplex: artificial flow at optimum");
            }
        }
    }

    std::vector<Flow> flows() const {
        std::vector<Flow> out;
        for (std::size_t a = 0; a < n_ * m_; ++a) {
            if (flow_[a] > 0) {
                out.push_back({a / m_, a % m_, flow_[a]});
            }
        }
        return out;
    }

  private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    std::size_t tail(std::size_t a) const {
        if (a < n_ * m_) return a / m_;
        std::size_t k = a - n_ * m_;
        return k < n_ ? k : root_;
    }
    std::size_t head(std::size_t a) const {
        if (a < n_ * m_) return n_ + a % m_;
        std::size_t k = a - n_ * m_;
        return k < n_ ? root_ : n_ + (k - n_);
    }
    std::int64_t arc_cost(std::size_t a) const {
        return a < n_ * m_ ? icost_[a] : big_m_;
    }
    std::int64_t reduced_cost(std::size_t a) const {
        return arc_cost(a) - pi_[tail(a)] + pi_[head(a)];
    }

    // rebuild depth and potentials from the parent structure (flat buffers,
    // no allocation)
    void refresh_tree_order() {
        const std::size_t nodes = n_ + m_ + 1;
        std::fill(child_offset_.begin(), child_offset_.end(), 0);
        for (std::size_t x = 0; x < n_ + m_; ++x) {
            ++child_offset_[parent_[x] + 1];
        }
        for (std::size_t x = 0; x < nodes; ++x) {
            child_offset_[x + 1] += child_offset_[x];
        }
        std::vector<std::size_t>& cursor = child_cursor_;
        cursor.assign(child_offset_.begin(), child_offset_.end() - 1);
        for (std::size_t x = 0; x < n_ + m_; ++x) {
            child_list_[cursor[parent_[x]]++] = x;
        }
        pi_[root_] = 0;
        depth_[root_] = 0;
        stack_.clear();
        stack_.push_back(root_);
        while (!stack_.empty()) {
            std::size_t x = stack_.back();
            stack_.pop_back();
            for (std::size_t it = child_offset_[x]; it < child_offset_[x + 1]; ++it) {
                std::size_t c = child_list_[it];
                std::size_t a = parent_arc_[c];
                // tree arc has zero reduced cost
                pi_[c] = (tail(a) == c) ? arc_cost(a) + pi_[x] : pi_[x] - arc_cost(a);
                depth_[c] = depth_[x] + 1;
                stack_.push_back(c);
            }
        }
    }

    // Push along the cycle closed by `entering`; returns the amount moved.
    std::int64_t pivot(std::size_t entering) {
        const std::size_t u = tail(entering);
        const std::size_t w = head(entering);

        // locate apex
        std::size_t x = u, y = w;
        while (depth_[x] > depth_[y]) x = parent_[x];
        while (depth_[y] > depth_[x]) y = parent_[y];
        while (x != y) {
            x = parent_[x];
            y = parent_[y];
        }
        const std::size_t apex = x;

        // residual of the parent arc of `node` when flow is pushed around the
        // cycle; side +1 lies on the w..apex walk, side -1 on u..apex
        auto residual = [&](std::size_t node, int side) -> std::int64_t {
            std::size_t a = parent_arc_[node];
            bool arc_up = tail(a) == node;  // arc points node -> parent
            bool increases = (side > 0) ? arc_up : !arc_up;
            return increases ? std::numeric_limits<std::int64_t>::max() : flow_[a];
        };

        std::int64_t theta = std::numeric_limits<std::int64_t>::max();
        for (std::size_t v2 = u; v2 != apex; v2 = parent_[v2]) {
            theta = std::min(theta, residual(v2, -1));
        }
        for (std::size_t v2 = w; v2 != apex; v2 = parent_[v2]) {
            theta = std::min(theta, residual(v2, +1));
        }
        if (theta == std::numeric_limits<std::int64_t>::max()) {
            throw std::runtime_error("network simplex: unbounded pivot");
        }

        // leaving arc: smallest arc index among the blocking minima, which
        // pairs with the Bland entering fallback to rule out cycling
        std::size_t leave_node = kNone;
        int leave_side = 0;
        std::size_t leave_arc = std::numeric_limits<std::size_t>::max();
        for (std::size_t v2 = u; v2 != apex; v2 = parent_[v2]) {
            if (residual(v2, -1) == theta && parent_arc_[v2] < leave_arc) {
                leave_arc = parent_arc_[v2];
                leave_node = v2;
                leave_side = -1;
            }
        }
        for (std::size_t v2 = w; v2 != apex; v2 = parent_[v2]) {
            if (residual(v2, +1) == theta && parent_arc_[v2] < leave_arc) {
                leave_arc = parent_arc_[v2];
                leave_node = v2;
                leave_side = +1;
            }
        }

        if (theta > 0) {
            flow_[entering] += theta;
            for (std::size_t v2 = u; v2 != apex; v2 = parent_[v2]) {
                std::size_t a = parent_arc_[v2];
                flow_[a] += (tail(a) == v2) ? -theta : theta;
            }
            for (std::size_t v2 = w; v2 != apex; v2 = parent_[v2]) {
                std::size_t a = parent_arc_[v2];
                flow_[a] += (tail(a) == v2) ? theta : -theta;
            }
        }

        in_tree_[leave_arc] = 0;
        in_tree_[entering] = 1;

        // the orphan subtree hangs below leave_node; re-root it at the
        // entering arc endpoint inside it
        std::size_t inside = (leave_side < 0) ? u : w;
        std::size_t outside = (leave_side < 0) ? w : u;

        std::size_t node = inside;
        std::size_t new_parent = outside;
        std::size_t new_arc = entering;
        while (true) {
            std::size_t old_parent = parent_[node];
            std::size_t old_arc = parent_arc_[node];
            parent_[node] = new_parent;
            parent_arc_[node] = new_arc;
            if (node == leave_node) break;
            new_parent = node;
            new_arc = old_arc;
            node = old_parent;
        }
        refresh_tree_order();
        return theta;
    }

    std::size_t n_, m_, root_;
    std::vector<std::int64_t> icost_;
    std::int64_t big_m_ = 0;
    std::size_t block_size_ = 64;
    std::vector<std::int64_t> flow_;
    std::vector<char> in_tree_;
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> parent_arc_;
    std::vector<std::int64_t> pi_;
    std::vector<std::int64_t> depth_;
    std::vector<std::size_t> child_offset_;
    std::vector<std::size_t> child_list_;
    std::vector<std::size_t> child_cursor_;
    std::vector<std::size_t> stack_;
};

}  // namespace

std::vector<Flow> solve_transportation(const std::vector<std::int64_t>& supply,
                                       const std::vector<std::int64_t>& demand,
                                       const std::vector<double>& cost) {
    if (supply.empty() || demand.empty() || cost.size() != supply.size() * demand.size()) {
        throw std::invalid_argument("solve_transportation: bad inputs");
    }
    std::int64_t s = 0, d = 0;
    for (std::int64_t v : supply) {
        if (v < 0) throw std::invalid_argument("solve_transportation: negative supply");
        s += v;
    }
    for (std::int64_t v : demand) {
        if (v < 0) throw std::invalid_argument("solve_transportation: negative demand");
        d += v;
    }
    if (s != d) {
        throw std::invalid_argument("solve_transportation: unbalanced totals");
    }
    TransportationSimplex solver(supply, demand, cost);
    solver.run();
    return solver.flows();
}

}  // namespace mfc::detail
