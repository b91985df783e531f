#ifndef SR_HARNESS_EXPERIMENT_HPP
#define SR_HARNESS_EXPERIMENT_HPP

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sr/problems/calibrator.hpp"
#include "sr/problems/facility.hpp"
#include "sr/problems/toy.hpp"
#include "sr/schedule.hpp"
#include "sr/search.hpp"

namespace sr::harness {

enum class ProblemId { example1, example2, calibrator, facility };

inline std::string to_string(ProblemId id) {
    switch (id) {
        case ProblemId::example1: return "example1";
        case ProblemId::example2: return "example2";
        case ProblemId::calibrator: return "calibrator";
        case ProblemId::facility: return "facility";
    }
    return "?";
}

inline ProblemId problem_from_string(const std::string& name) {
    if (name == "example1") return ProblemId::example1;
    if (name == "example2") return ProblemId::example2;
    if (name == "calibrator") return ProblemId::calibrator;
    if (name == "facility") return ProblemId::facility;
    throw std::invalid_argument("unknown problem: " + name);
}

// One experiment = one problem, a set of variants, and a sweep over either
// alpha values (known-optimum experiments) or minimum-decrease levels
// (budgeted experiments). Every (row, variant) cell runs the same count of
// independently seeded replications.
struct ExperimentConfig {
    ProblemId problem = ProblemId::example1;
    std::vector<Variant> variants{Variant::relaxed, Variant::original};
    std::vector<double> alphas{0.75};
    TestSchedule schedule = TestSchedule::default_schedule();
    TerminationPolicy::Kind termination = TerminationPolicy::Kind::known_optimum;
    std::vector<double> min_decrease_levels;
    std::int64_t budget = 10000;
    std::int64_t replications = 100;
    std::uint64_t master_seed = 1;
    std::string label;
    std::string out_dir = ".";

    std::string effective_label() const { return label.empty() ? to_string(problem) : label; }

    void validate() const {
        if (replications < 1) throw std::invalid_argument("config: replications must be >= 1");
        if (budget < 1) throw std::invalid_argument("config: budget must be >= 1");
        if (variants.empty()) throw std::invalid_argument("config: no variants selected");
        if (alphas.empty()) throw std::invalid_argument("config: no alpha values");
        for (double a : alphas)
            if (!(a > 0.0 && a < 1.0))
                throw std::invalid_argument("config: alpha must be in (0,1)");
        if (termination == TerminationPolicy::Kind::min_decrease) {
            if (min_decrease_levels.empty())
                throw std::invalid_argument("config: min-decrease experiment needs levels");
            for (double d : min_decrease_levels)
                if (!(d > 0.0 && d < 1.0))
                    throw std::invalid_argument("config: min decrease must be in (0,1)");
        }
    }
};

struct ReplicationResult {
    std::int64_t replication = 0;
    std::int64_t iterations = 0;
    std::int64_t test_replicates = 0;
    TerminationReason reason = TerminationReason::budget_exhausted;
    double final_objective = 0.0;
};

// Aggregates follow the failure-accounting convention: a failure is a run
// that exhausted its budget; iteration/replicate/objective means are taken
// over the successful runs only.
struct ExperimentSummary {
    ProblemId problem = ProblemId::example1;
    Variant variant = Variant::original;
    double alpha = 0.75;
    std::optional<double> min_decrease;
    std::int64_t replications = 0;
    std::uint64_t master_seed = 0;
    std::vector<ReplicationResult> runs;

    std::int64_t failure_count = 0;
    std::int64_t success_count = 0;
    std::optional<double> mean_iterations;
    std::optional<double> sd_iterations;
    std::optional<double> mean_test_replicates;
    std::optional<double> mean_final_objective;
    double wall_seconds = 0.0;  // informational only; never serialized to CSV

    void finalize_aggregates() {
        failure_count = 0;
        double sum_k = 0.0, sum_k2 = 0.0, sum_reps = 0.0, sum_obj = 0.0;
        for (const auto& r : runs) {
            if (r.reason == TerminationReason::budget_exhausted) {
                ++failure_count;
                continue;
            }
            sum_k += static_cast<double>(r.iterations);
            sum_k2 += static_cast<double>(r.iterations) * static_cast<double>(r.iterations);
            sum_reps += static_cast<double>(r.test_replicates);
            sum_obj += r.final_objective;
        }
        success_count = static_cast<std::int64_t>(runs.size()) - failure_count;
        if (success_count > 0) {
            const auto n = static_cast<double>(success_count);
            mean_iterations = sum_k / n;
            mean_test_replicates = sum_reps / n;
            mean_final_objective = sum_obj / n;
            const double var = sum_k2 / n - (sum_k / n) * (sum_k / n);
            sd_iterations = std::sqrt(var > 0.0 ? var : 0.0);
        } else {
            mean_iterations.reset();
            sd_iterations.reset();
            mean_test_replicates.reset();
            mean_final_objective.reset();
        }
    }
};

namespace detail {

// Runs one (variant, alpha, level) cell: `replications` independent runs
// with streams derived from (master_seed, replication), spread over a
// worker pool. Results are committed by replication index, so aggregation
// is deterministic regardless of scheduling.
template <SimulationProblem P, NeighborhoodStructure<typename P::state_type> N, class MakeStart>
ExperimentSummary run_cell(const P& problem, const N& neighborhood, const Ruler& ruler,
                           const ExperimentConfig& cfg, Variant variant, double alpha,
                           std::optional<double> min_decrease, MakeStart&& make_start) {
    ExperimentSummary summary;
    summary.problem = cfg.problem;
    summary.variant = variant;
    summary.alpha = alpha;
    summary.min_decrease = min_decrease;
    summary.replications = cfg.replications;
    summary.master_seed = cfg.master_seed;
    summary.runs.resize(static_cast<std::size_t>(cfg.replications));

    TerminationPolicy policy;
    switch (cfg.termination) {
        case TerminationPolicy::Kind::known_optimum:
            policy = TerminationPolicy::known_optimum(cfg.budget);
            break;
        case TerminationPolicy::Kind::min_decrease:
            policy = TerminationPolicy::min_decrease_of(*min_decrease, cfg.budget);
            break;
        case TerminationPolicy::Kind::budget_only:
            policy = TerminationPolicy::budget_only(cfg.budget);
            break;
    }
    const AcceptanceRule rule{variant, alpha};

    const auto started = std::chrono::steady_clock::now();
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::int64_t rep = next.fetch_add(1);
            if (rep >= cfg.replications) return;
            RunStreams streams =
                RunStreams::derive(cfg.master_seed, static_cast<std::uint64_t>(rep));
            const auto x0 = make_start(problem, streams.init);
            const auto record =
                sr::run(problem, neighborhood, ruler, cfg.schedule, rule, policy, x0, streams);
            ReplicationResult result;
            result.replication = rep;
            result.iterations = record.iterations;
            result.test_replicates = record.total_test_replicates;
            result.reason = record.reason;
            result.final_objective = record.final_objective.value_or(0.0);
            summary.runs[static_cast<std::size_t>(rep)] = result;
        }
    };

    const unsigned hw = std::thread::hardware_concurrency();
    const std::int64_t want = std::min<std::int64_t>(
        cfg.replications, hw == 0 ? 4 : static_cast<std::int64_t>(hw));
    std::vector<std::thread> pool;
    for (std::int64_t t = 1; t < want; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    summary.finalize_aggregates();
    return summary;
}

template <class ProblemT, class NbhdT, class MakeStart>
std::vector<ExperimentSummary> run_cells(const ProblemT& problem, const NbhdT& neighborhood,
                                         const Ruler& ruler, const ExperimentConfig& cfg,
                                         MakeStart&& make_start) {
    std::vector<ExperimentSummary> cells;
    const bool sweep_levels = cfg.termination == TerminationPolicy::Kind::min_decrease;
    const std::vector<double> rows =
        sweep_levels ? cfg.min_decrease_levels : cfg.alphas;
    for (double row : rows) {
        for (Variant variant : cfg.variants) {
            const double alpha = sweep_levels ? cfg.alphas.front() : row;
            const std::optional<double> level =
                sweep_levels ? std::optional<double>(row) : std::nullopt;
            cells.push_back(
                run_cell(problem, neighborhood, ruler, cfg, variant, alpha, level, make_start));
        }
    }
    return cells;
}

} // namespace detail

inline std::vector<ExperimentSummary> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    switch (cfg.problem) {
        case ProblemId::example1: {
            const auto problem = problems::TableObjective::example1();
            problems::FullExchangeNeighborhood nbhd(problem.state_count());
            auto start = [](const problems::TableObjective& p, RngStream& init) {
                return static_cast<int>(init.uniform_int(1, p.state_count()));
            };
            return detail::run_cells(problem, nbhd, problem.ruler(), cfg, start);
        }
        case ProblemId::example2: {
            const auto problem = problems::TableObjective::example2();
            problems::WrapOffsetNeighborhood nbhd(problem.state_count(), 5);
            auto start = [](const problems::TableObjective& p, RngStream& init) {
                return static_cast<int>(init.uniform_int(1, p.state_count()));
            };
            return detail::run_cells(problem, nbhd, problem.ruler(), cfg, start);
        }
        case ProblemId::calibrator: {
            const problems::CalibratorProblem problem;
            problems::CalibratorNeighborhood nbhd(problem);
            auto start = [](const problems::CalibratorProblem& p, RngStream&) {
                return p.config().initial_solution;
            };
            return detail::run_cells(problem, nbhd, problem.config().ruler(), cfg, start);
        }
        case ProblemId::facility: {
            const problems::FacilityProblem problem;
            problems::FacilityNeighborhood nbhd(problem.config().grid_side);
            auto start = [](const problems::FacilityProblem& p, RngStream&) {
                return p.config().initial_solution;
            };
            return detail::run_cells(problem, nbhd, problem.config().ruler(), cfg, start);
        }
    }
    throw std::logic_error("run_experiment: unreachable");
}

// The four shipped experiment designs. Schedules differ by design: the
// known-optimum tables need slow growth to terminate, while the budgeted
// tables need fast growth for budget pressure to bite within 60-150
// iterations.
inline ExperimentConfig preset(ProblemId id) {
    ExperimentConfig cfg;
    cfg.problem = id;
    switch (id) {
        case ProblemId::example1:
            cfg.termination = TerminationPolicy::Kind::known_optimum;
            cfg.schedule = TestSchedule::default_schedule();
            cfg.replications = 500;
            cfg.budget = 10000;
            cfg.alphas = {0.75};
            break;
        case ProblemId::example2:
            cfg.termination = TerminationPolicy::Kind::known_optimum;
            cfg.schedule = TestSchedule::log_growth(0, 3);
            cfg.replications = 100;
            cfg.budget = 1000000;
            cfg.alphas = {0.60, 0.65, 0.70, 0.75};
            break;
        case ProblemId::calibrator:
            cfg.termination = TerminationPolicy::Kind::min_decrease;
            cfg.schedule = TestSchedule::linear();
            cfg.replications = 100;
            cfg.budget = 60;
            cfg.alphas = {0.75};
            cfg.min_decrease_levels = {0.05, 0.075, 0.10, 0.125};
            break;
        case ProblemId::facility:
            cfg.termination = TerminationPolicy::Kind::min_decrease;
            cfg.schedule = TestSchedule::linear();
            cfg.replications = 100;
            cfg.budget = 150;
            cfg.alphas = {0.75};
            cfg.min_decrease_levels = {0.05, 0.10, 0.15, 0.25, 0.50};
            break;
    }
    return cfg;
}

} // namespace sr::harness

#endif // SR_HARNESS_EXPERIMENT_HPP
