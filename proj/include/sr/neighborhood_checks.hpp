#ifndef SR_NEIGHBORHOOD_CHECKS_HPP
#define SR_NEIGHBORHOOD_CHECKS_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "sr/search.hpp"

namespace sr {

// Results of the structural checks every neighborhood must satisfy:
// row-stochastic transition probabilities, a symmetric neighbor relation
// with symmetric probabilities, and a connected neighbor graph.
struct NeighborhoodCheck {
    bool stochastic = false;
    bool symmetric = false;
    bool connected = false;
    double max_row_error = 0.0;
    double max_asymmetry = 0.0;

    bool all_pass() const { return stochastic && symmetric && connected; }
};

template <class State, EnumerableNeighborhood<State> N>
NeighborhoodCheck check_neighborhood(const N& neighborhood, double tolerance = 1e-12) {
    NeighborhoodCheck out;
    const std::vector<State> states = neighborhood.states();
    std::map<State, std::size_t> index;
    for (std::size_t i = 0; i < states.size(); ++i) index[states[i]] = i;

    out.stochastic = true;
    out.symmetric = true;
    for (const State& x : states) {
        double row = 0.0;
        for (const State& z : states) {
            const double r = neighborhood.transition_probability(x, z);
            row += r;
            const double back = neighborhood.transition_probability(z, x);
            out.max_asymmetry = std::max(out.max_asymmetry, std::abs(r - back));
            if (r > 0.0) {
                // membership must match positive probability in both directions
                bool in_nbhd = false;
                for (const State& n : neighborhood.neighbors(x)) in_nbhd |= (n == z);
                if (!in_nbhd || back <= 0.0) out.symmetric = false;
            }
        }
        out.max_row_error = std::max(out.max_row_error, std::abs(row - 1.0));
    }
    out.stochastic = out.max_row_error <= tolerance;
    out.symmetric = out.symmetric && out.max_asymmetry <= tolerance;

    // Connectivity by breadth-first search over the neighbor relation.
    std::vector<bool> seen(states.size(), false);
    std::vector<std::size_t> frontier{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!frontier.empty()) {
        const std::size_t cur = frontier.back();
        frontier.pop_back();
        for (const State& z : neighborhood.neighbors(states[cur])) {
            const std::size_t zi = index.at(z);
            if (!seen[zi]) {
                seen[zi] = true;
                ++reached;
                frontier.push_back(zi);
            }
        }
    }
    out.connected = reached == states.size();
    return out;
}

} // namespace sr

#endif // SR_NEIGHBORHOOD_CHECKS_HPP
