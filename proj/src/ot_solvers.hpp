#pragma once

#include <cstdint>
#include <vector>

namespace mfc::detail {

// Minimal-cost perfect matching on a square cost matrix (row-major), via
// shortest augmenting paths with dual potentials. Ties prefer the lowest
// column index. Returns col4row.
std::vector<std::size_t> solve_assignment(std::size_t n, const std::vector<double>& cost);

struct Flow {
    std::size_t i;
    std::size_t j;
    std::int64_t amount;
};

// Uncapacitated transportation problem with integer supplies/demands (equal
// totals) and dense double costs, solved by primal network simplex from an
// artificial big-M star basis. Falls back to Bland's rule after a long
// degenerate stall so termination is guaranteed.
std::vector<Flow> solve_transportation(const std::vector<std::int64_t>& supply,
                                       const std::vector<std::int64_t>& demand,
                                       const std::vector<double>& cost);

}  // namespace mfc::detail
