#ifndef SR_SEARCH_HPP
#define SR_SEARCH_HPP

#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sr/rng.hpp"
#include "sr/ruler.hpp"
#include "sr/schedule.hpp"

namespace sr {

// A discrete simulation optimization problem: a feasible set and a
// replicate sampler for the random objective H(x).
template <class P>
concept SimulationProblem = requires(const P& p, const typename P::state_type& x, RngStream& g) {
    typename P::state_type;
    { p.sample(x, g) } -> std::convertible_to<double>;
    { p.is_feasible(x) } -> std::convertible_to<bool>;
};

// Neighborhood structure: proposes a candidate z from N(x) with
// probability R(x, z).
template <class N, class State>
concept NeighborhoodStructure = requires(const N& n, const State& x, RngStream& g) {
    { n.propose(x, g) } -> std::same_as<State>;
};

// Neighborhoods over an enumerable space additionally expose the state
// list, N(x) and the R(x, x') values; the analysis module builds exact
// transition matrices from these.
template <class N, class State>
concept EnumerableNeighborhood =
    NeighborhoodStructure<N, State> && requires(const N& n, const State& x, const State& z) {
        { n.states() } -> std::convertible_to<std::vector<State>>;
        { n.neighbors(x) } -> std::convertible_to<std::vector<State>>;
        { n.transition_probability(x, z) } -> std::convertible_to<double>;
    };

enum class Variant { original, relaxed };

inline std::string to_string(Variant v) {
    return v == Variant::original ? "original" : "relaxed";
}

// Success threshold n = ceil(alpha * M). alpha*M is within ~1e-13 of the
// exact rational value, so snap-to-integer before taking the ceiling.
inline std::int64_t success_threshold(double alpha, std::int64_t m) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("success_threshold: alpha must be in (0,1)");
    if (m < 1) throw std::invalid_argument("success_threshold: M must be >= 1");
    const double r = alpha * static_cast<double>(m);
    const auto nearest = static_cast<std::int64_t>(std::llround(r));
    std::int64_t n = (std::abs(r - static_cast<double>(nearest)) < 1e-9)
                         ? nearest
                         : static_cast<std::int64_t>(std::ceil(r));
    if (n < 1) n = 1;
    if (n > m) n = m;
    return n;
}

// Per-candidate tallies from one Step-2 evaluation.
struct EvaluationOutcome {
    bool accepted = false;
    std::int64_t tests_run = 0;
    std::int64_t successes = 0;
    std::vector<double> observations;  // sampled h values, in draw order
};

// One ruler test: draw h(z) and theta, succeed when h <= theta. Evaluation
// stops at the first counter to reach its threshold: n successes accept,
// m - n + 1 failures reject. The original rule is the n = m case.
template <SimulationProblem P>
EvaluationOutcome evaluate_candidate(const P& problem, const typename P::state_type& z,
                                     std::int64_t m, std::int64_t n, const Ruler& ruler,
                                     RngStream& simulation, RngStream& ruler_rng) {
    if (m < 1) throw std::invalid_argument("evaluate_candidate: M must be >= 1");
    if (n < 1 || n > m) throw std::invalid_argument("evaluate_candidate: need 1 <= n <= M");
    EvaluationOutcome out;
    out.observations.reserve(static_cast<std::size_t>(m));
    std::int64_t failures = 0;
    while (true) {
        const double h = problem.sample(z, simulation);
        const double theta = ruler.sample(ruler_rng);
        ++out.tests_run;
        out.observations.push_back(h);
        if (h <= theta) {
            ++out.successes;
            if (out.successes == n) {
                out.accepted = true;
                return out;
            }
        } else {
            ++failures;
            if (failures == m - n + 1) {
                out.accepted = false;
                return out;
            }
        }
    }
}

template <SimulationProblem P>
EvaluationOutcome evaluate_candidate_original(const P& problem, const typename P::state_type& z,
                                              std::int64_t m, const Ruler& ruler,
                                              RngStream& simulation, RngStream& ruler_rng) {
    return evaluate_candidate(problem, z, m, m, ruler, simulation, ruler_rng);
}

template <SimulationProblem P>
EvaluationOutcome evaluate_candidate_relaxed(const P& problem, const typename P::state_type& z,
                                             std::int64_t m, double alpha, const Ruler& ruler,
                                             RngStream& simulation, RngStream& ruler_rng) {
    return evaluate_candidate(problem, z, m, success_threshold(alpha, m), ruler, simulation,
                              ruler_rng);
}

enum class TerminationReason { optimum_hit, min_decrease_met, budget_exhausted };

inline std::string to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::optimum_hit: return "optimum-hit";
        case TerminationReason::min_decrease_met: return "min-decrease-met";
        case TerminationReason::budget_exhausted: return "budget-exhausted";
    }
    return "?";
}

// When to stop the search. The budget caps every policy; known_optimum
// additionally stops on x_k entering the problem's optimum set, and
// min_decrease stops once the estimated objective at the current state has
// dropped by the given fraction of the initial estimate.
struct TerminationPolicy {
    enum class Kind { known_optimum, min_decrease, budget_only };

    Kind kind = Kind::budget_only;
    double min_decrease = 0.0;
    std::int64_t budget = 1;
    std::int64_t warmup_replicates = 10;  // initial-estimate batch (min_decrease only)
    std::int64_t final_replicates = 10;   // fresh objective estimate at the final state

    static TerminationPolicy known_optimum(std::int64_t budget) {
        if (budget < 1) throw std::invalid_argument("TerminationPolicy: budget must be >= 1");
        return {Kind::known_optimum, 0.0, budget};
    }
    static TerminationPolicy min_decrease_of(double fraction, std::int64_t budget) {
        if (!(fraction > 0.0 && fraction < 1.0))
            throw std::invalid_argument("TerminationPolicy: min decrease must be in (0,1)");
        if (budget < 1) throw std::invalid_argument("TerminationPolicy: budget must be >= 1");
        return {Kind::min_decrease, fraction, budget};
    }
    static TerminationPolicy budget_only(std::int64_t budget) {
        if (budget < 1) throw std::invalid_argument("TerminationPolicy: budget must be >= 1");
        return {Kind::budget_only, 0.0, budget};
    }
};

// Everything one run produces.
template <class State>
struct RunRecord {
    std::vector<State> trajectory;   // x_0 then each newly accepted state
    std::int64_t iterations = 0;     // candidate evaluations (Step-2 count)
    std::int64_t total_test_replicates = 0;  // sum of tests_run over evaluations
    std::int64_t warmup_replicates = 0;
    std::int64_t final_replicates = 0;
    State final_solution{};
    TerminationReason reason = TerminationReason::budget_exhausted;
    std::optional<double> final_objective;       // mean of the fresh final batch
    std::optional<double> initial_estimate;      // warm-up estimate at x_0
    std::map<State, double> state_estimates;     // latest Step-2 sample mean per state
};

struct AcceptanceRule {
    Variant variant = Variant::original;
    double alpha = 0.75;  // used by the relaxed rule only

    std::int64_t threshold(std::int64_t m) const {
        return variant == Variant::original ? m : success_threshold(alpha, m);
    }
};

namespace detail {

template <class P, class State>
double sample_mean(const P& problem, const State& x, std::int64_t count, RngStream& rng) {
    double total = 0.0;
    for (std::int64_t i = 0; i < count; ++i) total += problem.sample(x, rng);
    return total / static_cast<double>(count);
}

} // namespace detail

// The search loop: propose from N(x_k), evaluate against the ruler with
// M_k tests, move on acceptance, repeat until the termination policy
// fires. The accepted-state sequence realizes the chain whose transition
// law the analysis module computes in closed form.
template <SimulationProblem P, NeighborhoodStructure<typename P::state_type> N>
RunRecord<typename P::state_type> run(const P& problem, const N& neighborhood,
                                      const Ruler& ruler, const TestSchedule& schedule,
                                      const AcceptanceRule& rule,
                                      const TerminationPolicy& policy,
                                      const typename P::state_type& x0, RunStreams& streams) {
    using State = typename P::state_type;
    if (!problem.is_feasible(x0))
        throw std::invalid_argument("run: initial solution is infeasible");

    RunRecord<State> record;
    record.trajectory.push_back(x0);
    State x = x0;

    double initial_estimate = 0.0;
    if (policy.kind == TerminationPolicy::Kind::min_decrease) {
        // x_0 is never a Step-2 candidate, so its estimate comes from a
        // dedicated warm-up batch.
        initial_estimate =
            detail::sample_mean(problem, x0, policy.warmup_replicates, streams.simulation);
        record.warmup_replicates = policy.warmup_replicates;
        record.initial_estimate = initial_estimate;
        record.state_estimates[x0] = initial_estimate;
    }

    auto is_optimal = [&](const State& s) {
        if constexpr (requires { problem.is_known_optimum(s); }) {
            return problem.is_known_optimum(s);
        } else {
            throw std::invalid_argument(
                "run: known-optimum termination needs a problem with a known optimum set");
            return false;
        }
    };

    auto finished = [&]() -> std::optional<TerminationReason> {
        if (policy.kind == TerminationPolicy::Kind::known_optimum && is_optimal(x))
            return TerminationReason::optimum_hit;
        if (policy.kind == TerminationPolicy::Kind::min_decrease) {
            const double current = record.state_estimates.at(x);
            if (initial_estimate - current >= policy.min_decrease * initial_estimate)
                return TerminationReason::min_decrease_met;
        }
        if (record.iterations >= policy.budget) return TerminationReason::budget_exhausted;
        return std::nullopt;
    };

    std::optional<TerminationReason> reason = finished();
    while (!reason) {
        const State z = neighborhood.propose(x, streams.proposal);
        const std::int64_t m = schedule.tests_at(record.iterations);
        const EvaluationOutcome outcome = evaluate_candidate(
            problem, z, m, rule.threshold(m), ruler, streams.simulation, streams.ruler);
        record.total_test_replicates += outcome.tests_run;

        double obs_total = 0.0;
        for (double h : outcome.observations) obs_total += h;
        record.state_estimates[z] =
            obs_total / static_cast<double>(outcome.observations.size());

        if (outcome.accepted && !(z == x)) {
            x = z;
            record.trajectory.push_back(x);
        }
        ++record.iterations;
        reason = finished();
    }

    record.reason = *reason;
    record.final_solution = x;
    if (policy.final_replicates > 0) {
        record.final_objective =
            detail::sample_mean(problem, x, policy.final_replicates, streams.simulation);
        record.final_replicates = policy.final_replicates;
    }
    return record;
}

} // namespace sr

#endif // SR_SEARCH_HPP
