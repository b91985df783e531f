#ifndef SR_PROBLEMS_FACILITY_HPP
#define SR_PROBLEMS_FACILITY_HPP

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sr/rng.hpp"
#include "sr/ruler.hpp"

namespace sr::problems {

struct GridSquare {
    int i = 1;
    int j = 1;
    auto operator<=>(const GridSquare&) const = default;
};

using FacilityState = std::array<GridSquare, 3>;

// Stochastic facility location on a 6x6 grid: place three facilities so the
// demand-weighted rectilinear distance to the nearest facility, averaged
// over the grid and the horizon, is minimized. Daily demand per square is
// independent Gaussian; non-positive draws are resampled.
struct FacilityConfig {
    int grid_side = 6;
    int facility_count = 3;
    double demand_mean = 180.0;
    double demand_sd = 30.0;
    int horizon_days = 30;  // T_0
    FacilityState initial_solution{GridSquare{1, 1}, GridSquare{2, 1}, GridSquare{1, 2}};

    Ruler ruler() const { return Ruler(250.0, 800.0); }
};

inline int rectilinear_distance(GridSquare a, GridSquare b) {
    return std::abs(a.i - b.i) + std::abs(a.j - b.j);
}

class FacilityProblem {
  public:
    using state_type = FacilityState;

    explicit FacilityProblem(FacilityConfig config = {}) : cfg_(config) {
        if (cfg_.grid_side < 2) throw std::invalid_argument("FacilityProblem: grid too small");
        if (!is_feasible(cfg_.initial_solution))
            throw std::invalid_argument("FacilityProblem: infeasible initial solution");
    }

    const FacilityConfig& config() const { return cfg_; }

    bool in_grid(GridSquare s) const {
        return s.i >= 1 && s.i <= cfg_.grid_side && s.j >= 1 && s.j <= cfg_.grid_side;
    }

    bool is_feasible(const FacilityState& x) const {
        for (const auto& s : x)
            if (!in_grid(s)) return false;
        return x[0] != x[1] && x[0] != x[2] && x[1] != x[2];
    }

    int nearest_distance(GridSquare from, const FacilityState& x) const {
        int best = rectilinear_distance(from, x[0]);
        for (std::size_t f = 1; f < x.size(); ++f)
            best = std::min(best, rectilinear_distance(from, x[f]));
        return best;
    }

    // One simulation replicate: T_0 days of demand, each square served by
    // its nearest facility, averaged per day and over the horizon.
    double sample(const FacilityState& x, RngStream& rng) const {
        if (!is_feasible(x)) throw std::invalid_argument("FacilityProblem: infeasible placement");
        const int side = cfg_.grid_side;
        const auto squares = static_cast<double>(side * side);
        double horizon_total = 0.0;
        for (int day = 0; day < cfg_.horizon_days; ++day) {
            double day_total = 0.0;
            for (int i = 1; i <= side; ++i) {
                for (int j = 1; j <= side; ++j) {
                    double demand = rng.normal(cfg_.demand_mean, cfg_.demand_sd);
                    while (demand <= 0.0) demand = rng.normal(cfg_.demand_mean, cfg_.demand_sd);
                    day_total += demand * nearest_distance(GridSquare{i, j}, x);
                }
            }
            horizon_total += day_total / squares;
        }
        return horizon_total / static_cast<double>(cfg_.horizon_days);
    }

    // Zero-noise value: mean demand times the grid-average nearest-facility
    // distance, computable by direct enumeration.
    double deterministic_objective(const FacilityState& x) const {
        if (!is_feasible(x)) throw std::invalid_argument("FacilityProblem: infeasible placement");
        const int side = cfg_.grid_side;
        double total = 0.0;
        for (int i = 1; i <= side; ++i)
            for (int j = 1; j <= side; ++j) total += nearest_distance(GridSquare{i, j}, x);
        return cfg_.demand_mean * total / static_cast<double>(side * side);
    }

  private:
    FacilityConfig cfg_;
};

// The four toroidal-wraparound moves of one grid square.
inline std::array<GridSquare, 4> square_neighbors(GridSquare s, int side) {
    auto wrap = [side](int v) { return (v - 1 + side) % side + 1; };
    return {GridSquare{wrap(s.i - 1), s.j}, GridSquare{wrap(s.i + 1), s.j},
            GridSquare{s.i, wrap(s.j - 1)}, GridSquare{s.i, wrap(s.j + 1)}};
}

// Single-square neighborhood over the full grid; the joint facility
// neighborhood is its threefold product.
class GridSquareNeighborhood {
  public:
    explicit GridSquareNeighborhood(int side) : side_(side) {
        if (side < 3) throw std::invalid_argument("GridSquareNeighborhood: grid too small");
    }

    GridSquare propose(const GridSquare& s, RngStream& rng) const {
        return square_neighbors(s, side_)[static_cast<std::size_t>(rng.uniform_int(0, 3))];
    }

    std::vector<GridSquare> states() const {
        std::vector<GridSquare> all;
        all.reserve(static_cast<std::size_t>(side_ * side_));
        for (int i = 1; i <= side_; ++i)
            for (int j = 1; j <= side_; ++j) all.push_back(GridSquare{i, j});
        return all;
    }

    std::vector<GridSquare> neighbors(const GridSquare& s) const {
        const auto n = square_neighbors(s, side_);
        return {n.begin(), n.end()};
    }

    double transition_probability(const GridSquare& s, const GridSquare& z) const {
        for (const auto& n : square_neighbors(s, side_))
            if (n == z) return 0.25;
        return 0.0;
    }

  private:
    int side_;
};

// Joint proposal: every facility moves to one of its four wraparound
// neighbors; candidates that collide two facilities on one square are
// redrawn (up to a cap, after which the current placement is returned).
class FacilityNeighborhood {
  public:
    explicit FacilityNeighborhood(int side, int max_redraws = 100)
        : side_(side), max_redraws_(max_redraws) {}

    FacilityState propose(const FacilityState& x, RngStream& rng) const {
        for (int attempt = 0; attempt < max_redraws_; ++attempt) {
            FacilityState cand;
            for (std::size_t f = 0; f < x.size(); ++f)
                cand[f] =
                    square_neighbors(x[f], side_)[static_cast<std::size_t>(rng.uniform_int(0, 3))];
            if (cand[0] != cand[1] && cand[0] != cand[2] && cand[1] != cand[2]) return cand;
        }
        return x;
    }

  private:
    int side_;
    int max_redraws_;
};

} // namespace sr::problems

#endif // SR_PROBLEMS_FACILITY_HPP
