#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "sr/analysis.hpp"
#include "sr/problems/toy.hpp"
#include "sr/search.hpp"

using namespace sr;
using sr::problems::FullExchangeNeighborhood;
using sr::problems::TableObjective;

namespace {

// Deterministic problem: every state x maps to a fixed observation value.
struct FixedValueProblem {
    using state_type = int;
    std::map<int, double> values;

    double sample(const int& x, RngStream&) const { return values.at(x); }
    bool is_feasible(const int& x) const { return values.count(x) > 0; }
};

RunStreams make_streams(std::uint64_t seed, std::uint64_t rep = 0) {
    return RunStreams::derive(seed, rep);
}

} // namespace

TEST_CASE("success threshold rounds up and clamps", "[search]") {
    REQUIRE(success_threshold(0.75, 1) == 1);
    REQUIRE(success_threshold(0.75, 2) == 2);
    REQUIRE(success_threshold(0.75, 3) == 3);
    REQUIRE(success_threshold(0.75, 4) == 3);
    REQUIRE(success_threshold(0.75, 10) == 8);
    REQUIRE(success_threshold(0.65, 2) == 2);
    REQUIRE(success_threshold(0.65, 20) == 13);
    REQUIRE(success_threshold(0.5, 2) == 1);
    REQUIRE(success_threshold(0.2, 5) == 1);
    REQUIRE(success_threshold(0.1, 10) == 1);
    REQUIRE(success_threshold(0.9, 10) == 9);
    REQUIRE_THROWS_AS(success_threshold(0.0, 5), std::invalid_argument);
    REQUIRE_THROWS_AS(success_threshold(1.0, 5), std::invalid_argument);
}

TEST_CASE("original rule on degenerate problems", "[search]") {
    Ruler theta(0.0, 1.0);
    FixedValueProblem low{{{1, -1.0}}};   // always below the ruler range
    FixedValueProblem high{{{1, 2.0}}};   // always above

    auto streams = make_streams(3);
    for (std::int64_t m : {1, 3, 8}) {
        auto win = evaluate_candidate_original(low, 1, m, theta, streams.simulation,
                                               streams.ruler);
        REQUIRE(win.accepted);
        REQUIRE(win.tests_run == m);
        REQUIRE(win.successes == m);

        auto lose = evaluate_candidate_original(high, 1, m, theta, streams.simulation,
                                                streams.ruler);
        REQUIRE_FALSE(lose.accepted);
        REQUIRE(lose.tests_run == 1);
        REQUIRE(lose.observations.size() == 1);
    }
}

TEST_CASE("relaxed rule stops at the first threshold", "[search]") {
    Ruler theta(0.0, 1.0);
    FixedValueProblem low{{{1, -1.0}}};
    FixedValueProblem high{{{1, 2.0}}};
    auto streams = make_streams(4);

    // n = ceil(0.75 * 10) = 8 straight successes
    auto win = evaluate_candidate_relaxed(low, 1, 10, 0.75, theta, streams.simulation,
                                          streams.ruler);
    REQUIRE(win.accepted);
    REQUIRE(win.tests_run == 8);

    // M - n + 1 = 3 straight failures
    auto lose = evaluate_candidate_relaxed(high, 1, 10, 0.75, theta, streams.simulation,
                                           streams.ruler);
    REQUIRE_FALSE(lose.accepted);
    REQUIRE(lose.tests_run == 3);
}

TEST_CASE("outcome invariants hold for random single-test win probabilities", "[search]") {
    Ruler theta(0.0, 1.0);
    FixedValueProblem mid{{{1, 0.35}}};  // p = 0.65
    auto streams = make_streams(5);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::int64_t m = 1 + trial % 12;
        const std::int64_t n = success_threshold(0.55, m);
        auto out = evaluate_candidate(mid, 1, m, n, theta, streams.simulation, streams.ruler);
        REQUIRE(out.tests_run <= m);
        REQUIRE(out.tests_run == static_cast<std::int64_t>(out.observations.size()));
        const std::int64_t failures = out.tests_run - out.successes;
        if (out.accepted) {
            REQUIRE(out.successes == n);
            REQUIRE(failures <= m - n);
        } else {
            REQUIRE(failures == m - n + 1);
            REQUIRE(out.successes < n);
        }
    }
}

TEST_CASE("acceptance frequencies match the closed forms", "[search]") {
    Ruler theta(0.0, 1.0);
    FixedValueProblem mid{{{1, 0.5}}};  // p = 0.5 exactly
    auto streams = make_streams(6);
    const int trials = 100000;

    int accepted = 0;
    for (int i = 0; i < trials; ++i)
        accepted += evaluate_candidate_original(mid, 1, 3, theta, streams.simulation,
                                                streams.ruler)
                        .accepted;
    double freq = static_cast<double>(accepted) / trials;
    double se = std::sqrt(0.125 * 0.875 / trials);
    REQUIRE(std::abs(freq - 0.125) < 4.0 * se);

    accepted = 0;
    for (int i = 0; i < trials; ++i)
        accepted += evaluate_candidate_relaxed(mid, 1, 2, 0.5, theta, streams.simulation,
                                               streams.ruler)
                        .accepted;
    freq = static_cast<double>(accepted) / trials;
    se = std::sqrt(0.75 * 0.25 / trials);
    REQUIRE(std::abs(freq - 0.75) < 4.0 * se);
}

TEST_CASE("acceptance is pathwise monotone in the success threshold", "[search]") {
    // On a fixed test-outcome sequence, lowering n can only keep or gain
    // acceptance: the accepting sequences for larger n are a subset.
    RngStream g(8);
    for (int trial = 0; trial < 500; ++trial) {
        const std::int64_t m = 1 + trial % 10;
        std::vector<bool> outcomes(static_cast<std::size_t>(m));
        for (auto&& o : outcomes) o = g.uniform01() < 0.5;
        bool prev_accepted = true;  // n = 1 accepts whenever any success exists... checked below
        for (std::int64_t n = 1; n <= m; ++n) {
            std::int64_t succ = 0, fail = 0;
            bool accepted = false;
            for (std::int64_t t = 0; t < m; ++t) {
                if (outcomes[static_cast<std::size_t>(t)]) {
                    if (++succ == n) {
                        accepted = true;
                        break;
                    }
                } else if (++fail == m - n + 1) {
                    break;
                }
            }
            if (n > 1 && accepted) REQUIRE(prev_accepted);
            prev_accepted = accepted;
        }
    }
}

TEST_CASE("chain transition frequencies follow the exact matrices", "[search]") {
    // Two states, R(1,2) = R(2,1) = 1, deterministic values giving win
    // probabilities 0.25 and 0.5.
    FixedValueProblem prob{{{1, 0.75}, {2, 0.5}}};
    Ruler theta(0.0, 1.0);
    struct Swap {
        int propose(const int& x, RngStream&) const { return 3 - x; }
        std::vector<int> states() const { return {1, 2}; }
        std::vector<int> neighbors(const int& x) const { return {3 - x}; }
        double transition_probability(const int& x, const int& z) const {
            return x != z ? 1.0 : 0.0;
        }
    } nbhd;

    for (auto variant : {Variant::original, Variant::relaxed}) {
        const std::optional<double> alpha =
            variant == Variant::relaxed ? std::optional<double>(0.5) : std::nullopt;
        auto matrix = analysis::transition_matrix<int>({1, 2}, {0.25, 0.5}, nbhd, 3, variant,
                                                       alpha);
        auto streams = make_streams(variant == Variant::original ? 11 : 12);
        const int steps = 100000;
        int x = 1;
        std::array<std::array<int, 2>, 2> counts{};
        std::array<int, 2> visits{};
        for (int k = 0; k < steps; ++k) {
            const int z = nbhd.propose(x, streams.proposal);
            const std::int64_t n = variant == Variant::original ? 3 : success_threshold(0.5, 3);
            auto out = evaluate_candidate(prob, z, 3, n, theta, streams.simulation,
                                          streams.ruler);
            const int next = out.accepted ? z : x;
            ++visits[static_cast<std::size_t>(x - 1)];
            ++counts[static_cast<std::size_t>(x - 1)][static_cast<std::size_t>(next - 1)];
            x = next;
        }
        for (int from = 0; from < 2; ++from) {
            for (int to = 0; to < 2; ++to) {
                const double expected =
                    matrix(static_cast<std::size_t>(from), static_cast<std::size_t>(to));
                const double observed = static_cast<double>(counts[from][to]) /
                                        static_cast<double>(visits[from]);
                const double se = std::sqrt(expected * (1.0 - expected) /
                                            static_cast<double>(visits[from]));
                REQUIRE(std::abs(observed - expected) < 4.0 * se + 1e-9);
            }
        }
    }
}

TEST_CASE("the accepted-state process is Markov given the current state", "[search]") {
    // Three-state chain at constant M: a chi-square homogeneity test of
    // next-state counts grouped by the previous state, run conditional on
    // each current state.
    FixedValueProblem prob{{{1, 0.7}, {2, 0.5}, {3, 0.3}}};
    Ruler theta(0.0, 1.0);
    FullExchangeNeighborhood nbhd(3);
    auto streams = make_streams(13);

    const int steps = 200000;
    int prev = 1;
    int cur = 2;
    // counts[cur][prev][next]
    std::array<std::array<std::array<double, 3>, 3>, 3> counts{};
    for (int k = 0; k < steps; ++k) {
        const int z = nbhd.propose(cur, streams.proposal);
        auto out = evaluate_candidate(prob, z, 2, 1, theta, streams.simulation, streams.ruler);
        const int next = out.accepted ? z : cur;
        counts[static_cast<std::size_t>(cur - 1)][static_cast<std::size_t>(prev - 1)]
              [static_cast<std::size_t>(next - 1)] += 1.0;
        prev = cur;
        cur = next;
    }

    for (int s = 0; s < 3; ++s) {
        const auto& table = counts[static_cast<std::size_t>(s)];
        std::array<double, 3> row_total{};
        std::array<double, 3> col_total{};
        double total = 0.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                row_total[r] += table[r][c];
                col_total[c] += table[r][c];
                total += table[r][c];
            }
        double chi2 = 0.0;
        for (int r = 0; r < 3; ++r) {
            for (int c = 0; c < 3; ++c) {
                const double expected = row_total[r] * col_total[c] / total;
                if (expected > 0.0) {
                    const double d = table[r][c] - expected;
                    chi2 += d * d / expected;
                }
            }
        }
        // df = 4, 99.9th percentile
        REQUIRE(chi2 < 18.467);
    }
}

TEST_CASE("run terminates on the known optimum of the 10-state example", "[search]") {
    const auto prob = TableObjective::example1();
    FullExchangeNeighborhood nbhd(10);
    auto streams = make_streams(1001, 3);
    auto record = sr::run(prob, nbhd, prob.ruler(), TestSchedule::default_schedule(),
                          AcceptanceRule{Variant::relaxed, 0.75},
                          TerminationPolicy::known_optimum(10000), 2, streams);
    REQUIRE(record.reason == TerminationReason::optimum_hit);
    REQUIRE(record.final_solution == 9);
    REQUIRE(record.trajectory.front() == 2);
    REQUIRE(record.trajectory.back() == 9);
    REQUIRE(record.iterations >= 1);
    REQUIRE(record.final_objective.has_value());
    // the fresh final batch estimates f(9) = 0 within the uniform noise
    REQUIRE(std::abs(*record.final_objective) < 0.5);
}

TEST_CASE("a single-state space terminates immediately", "[search]") {
    struct OneState {
        using state_type = int;
        double sample(const int&, RngStream&) const { return 0.0; }
        bool is_feasible(const int& x) const { return x == 1; }
        bool is_known_optimum(const int& x) const { return x == 1; }
    } prob;
    struct SelfLoop {
        int propose(const int& x, RngStream&) const { return x; }
    } nbhd;
    auto streams = make_streams(7);
    auto record = sr::run(prob, nbhd, Ruler(0.0, 1.0), TestSchedule::constant(3),
                          AcceptanceRule{Variant::original, 0.0},
                          TerminationPolicy::known_optimum(100), 1, streams);
    REQUIRE(record.iterations == 0);
    REQUIRE(record.reason == TerminationReason::optimum_hit);
    REQUIRE(record.total_test_replicates == 0);
}

TEST_CASE("identical seeds reproduce identical runs", "[search]") {
    const auto prob = TableObjective::example1();
    FullExchangeNeighborhood nbhd(10);
    auto run_once = [&] {
        auto streams = make_streams(555, 8);
        return sr::run(prob, nbhd, prob.ruler(), TestSchedule::default_schedule(),
                       AcceptanceRule{Variant::relaxed, 0.75},
                       TerminationPolicy::known_optimum(10000), 4, streams);
    };
    auto a = run_once();
    auto b = run_once();
    REQUIRE(a.trajectory == b.trajectory);
    REQUIRE(a.iterations == b.iterations);
    REQUIRE(a.total_test_replicates == b.total_test_replicates);
    REQUIRE(a.final_objective == b.final_objective);
    REQUIRE(a.state_estimates == b.state_estimates);
}

TEST_CASE("replicate totals follow the schedule", "[search]") {
    // A problem that always loses runs exactly one test per evaluation under
    // the original rule; one that always wins runs exactly M_k.
    FixedValueProblem lose{{{1, 5.0}, {2, 5.0}}};
    FixedValueProblem win{{{1, -5.0}, {2, -5.0}}};
    struct Swap {
        int propose(const int& x, RngStream&) const { return 3 - x; }
    } nbhd;
    Ruler theta(0.0, 1.0);
    const auto schedule = TestSchedule::default_schedule();
    const std::int64_t budget = 50;

    auto streams1 = make_streams(21);
    auto rec_lose = sr::run(lose, nbhd, theta, schedule, AcceptanceRule{Variant::original, 0.0},
                            TerminationPolicy::budget_only(budget), 1, streams1);
    REQUIRE(rec_lose.iterations == budget);
    REQUIRE(rec_lose.total_test_replicates == budget);
    REQUIRE(rec_lose.reason == TerminationReason::budget_exhausted);

    auto streams2 = make_streams(22);
    auto rec_win = sr::run(win, nbhd, theta, schedule, AcceptanceRule{Variant::original, 0.0},
                           TerminationPolicy::budget_only(budget), 1, streams2);
    std::int64_t expected = 0;
    for (std::int64_t k = 0; k < budget; ++k) expected += schedule.tests_at(k);
    REQUIRE(rec_win.total_test_replicates == expected);
    REQUIRE(static_cast<std::int64_t>(rec_win.trajectory.size()) == budget + 1);
}

TEST_CASE("minimum-decrease termination uses the step-2 estimates", "[search]") {
    // Deterministic objective 1.0 - 0.05 x on a 10-state ring; every
    // observation sits below the ruler so every candidate is accepted, and
    // estimates are exact.
    FixedValueProblem prob;
    for (int x = 1; x <= 10; ++x) prob.values[x] = 1.0 - 0.05 * x;
    FullExchangeNeighborhood nbhd(10);
    Ruler theta(0.0, 2.0);

    auto streams = make_streams(31);
    auto policy = TerminationPolicy::min_decrease_of(0.2, 10000);
    auto record = sr::run(prob, nbhd, theta, TestSchedule::constant(1),
                          AcceptanceRule{Variant::original, 0.0}, policy, 1, streams);
    REQUIRE(record.reason == TerminationReason::min_decrease_met);
    REQUIRE(record.initial_estimate.has_value());
    REQUIRE_THAT(*record.initial_estimate, Catch::Matchers::WithinAbs(0.95, 1e-12));
    // first state whose value drops 20% below 0.95 is x >= 5 (0.75 <= 0.76)
    REQUIRE(prob.values.at(record.final_solution) <= 0.8 * 0.95);
    REQUIRE(record.warmup_replicates == 10);

    // an unreachable decrease exhausts the budget instead
    auto streams2 = make_streams(32);
    auto hopeless = sr::run(prob, nbhd, theta, TestSchedule::constant(1),
                            AcceptanceRule{Variant::original, 0.0},
                            TerminationPolicy::min_decrease_of(0.9, 25), 1, streams2);
    REQUIRE(hopeless.reason == TerminationReason::budget_exhausted);
    REQUIRE(hopeless.iterations == 25);
}

TEST_CASE("infeasible initial solutions are rejected", "[search]") {
    const auto prob = TableObjective::example1();
    FullExchangeNeighborhood nbhd(10);
    auto streams = make_streams(41);
    REQUIRE_THROWS_AS(sr::run(prob, nbhd, prob.ruler(), TestSchedule::default_schedule(),
                              AcceptanceRule{Variant::original, 0.0},
                              TerminationPolicy::known_optimum(100), 42, streams),
                      std::invalid_argument);
}
