#ifndef SR_PROBLEMS_CALIBRATOR_HPP
#define SR_PROBLEMS_CALIBRATOR_HPP

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sr/rng.hpp"
#include "sr/ruler.hpp"

namespace sr::problems {

using CalibratorState = std::array<int, 6>;

// Assay calibrator selection: pick six integer calibrator concentrations so
// that the measurement uncertainty of a fixed test sample is minimized.
// Each uncertainty replicate perturbs the calibrators and their
// measurements, refits the quadratic calibration curve, and pushes N noisy
// test-sample measurements back through it.
struct CalibratorConfig {
    int domain_lo = 10;
    int domain_hi = 200;
    double min_relative_gap = 0.1;       // (m_{i+1} - m_i) / m_i >= gap
    double relative_sd = 0.05;           // every noise source, as a fraction of its target
    double test_sample = 6.0;            // s_t; sits below the initial calibrator range
    int sample_measurements = 100;       // N per uncertainty replicate
    int uncertainty_replicates = 10;     // T replicates averaged per objective evaluation
    // Reference curve l(m) = c0 + c1 m + c2 m^2, strictly increasing on the domain.
    double ref_c0 = 5.0;
    double ref_c1 = 0.8;
    double ref_c2 = 0.002;
    CalibratorState initial_solution{20, 40, 60, 80, 100, 120};

    Ruler ruler() const { return Ruler(0.0, 2.0); }
};

class CalibratorProblem {
  public:
    using state_type = CalibratorState;

    explicit CalibratorProblem(CalibratorConfig config = {}) : cfg_(config) {
        if (cfg_.ref_c1 <= 0.0 || cfg_.ref_c2 < 0.0)
            throw std::invalid_argument("CalibratorProblem: reference curve must be increasing");
        if (!is_feasible(cfg_.initial_solution))
            throw std::invalid_argument("CalibratorProblem: infeasible initial solution");
    }

    CalibratorProblem(const CalibratorProblem& other) : cfg_(other.cfg_) {
        failed_fits_.store(other.failed_fits_.load());
    }

    const CalibratorConfig& config() const { return cfg_; }

    double reference(double m) const { return cfg_.ref_c0 + cfg_.ref_c1 * m + cfg_.ref_c2 * m * m; }

    double reference_inverse(double c) const {
        if (cfg_.ref_c2 == 0.0) return (c - cfg_.ref_c0) / cfg_.ref_c1;
        const double disc = cfg_.ref_c1 * cfg_.ref_c1 - 4.0 * cfg_.ref_c2 * (cfg_.ref_c0 - c);
        if (disc < 0.0)
            throw std::invalid_argument("CalibratorProblem: value below the reference curve range");
        return (-cfg_.ref_c1 + std::sqrt(disc)) / (2.0 * cfg_.ref_c2);
    }

    bool is_feasible(const CalibratorState& m) const {
        for (int v : m)
            if (v < cfg_.domain_lo || v > cfg_.domain_hi) return false;
        for (std::size_t i = 0; i + 1 < m.size(); ++i) {
            const double gap = static_cast<double>(m[i + 1] - m[i]) / static_cast<double>(m[i]);
            if (gap < cfg_.min_relative_gap) return false;
        }
        return true;
    }

    // One uncertainty replicate u_s(m). A replicate whose fitted curve
    // cannot be inverted for some measurement is discarded and redrawn;
    // discards are counted.
    double measure_uncertainty(const CalibratorState& m, RngStream& rng) const {
        for (int attempt = 0; attempt < 100; ++attempt) {
            const auto u = try_measure_uncertainty(m, rng);
            if (u) return *u;
            failed_fits_.fetch_add(1, std::memory_order_relaxed);
        }
        throw std::runtime_error("CalibratorProblem: fitted curve repeatedly non-invertible");
    }

    // Objective replicate H(m): the mean of T uncertainty replicates.
    double sample(const CalibratorState& m, RngStream& rng) const {
        double total = 0.0;
        for (int t = 0; t < cfg_.uncertainty_replicates; ++t) total += measure_uncertainty(m, rng);
        return total / static_cast<double>(cfg_.uncertainty_replicates);
    }

    std::uint64_t failed_fit_count() const { return failed_fits_.load(); }

  private:
    std::optional<double> try_measure_uncertainty(const CalibratorState& m,
                                                  RngStream& rng) const {
        // Calibration: perturb the calibrators, read them through the
        // reference curve, perturb the readings, then fit the quadratic.
        std::array<double, 6> mp{};
        std::array<double, 6> cp{};
        for (std::size_t j = 0; j < 6; ++j) {
            const double mj = static_cast<double>(m[j]);
            mp[j] = rng.normal(mj, cfg_.relative_sd * mj);
            const double cj = reference(mp[j]);
            cp[j] = rng.normal(cj, cfg_.relative_sd * std::abs(cj));
        }
        std::array<double, 3> q{};
        if (!fit_quadratic(mp, cp, q)) return std::nullopt;

        // Measurement: noisy readings of the test sample, inverted through
        // the fitted curve; the root nearest the reference inverse is the
        // reported value.
        const double ct = reference(cfg_.test_sample);
        std::vector<double> reported(static_cast<std::size_t>(cfg_.sample_measurements));
        for (auto& s_out : reported) {
            const double c_obs = rng.normal(ct, cfg_.relative_sd * std::abs(ct));
            const double disc = q[1] * q[1] - 4.0 * q[2] * (q[0] - c_obs);
            if (std::abs(q[2]) < 1e-14 || disc < 0.0) return std::nullopt;
            const double root = std::sqrt(disc);
            const double r1 = (-q[1] + root) / (2.0 * q[2]);
            const double r2 = (-q[1] - root) / (2.0 * q[2]);
            const double ref = reference_inverse(c_obs);
            s_out = std::abs(r1 - ref) <= std::abs(r2 - ref) ? r1 : r2;
        }

        double mean = 0.0;
        for (double v : reported) mean += v;
        mean /= static_cast<double>(reported.size());
        double ss = 0.0;
        for (double v : reported) ss += (v - mean) * (v - mean);
        return std::sqrt(ss / (static_cast<double>(reported.size()) - 1.0));
    }

    // Ordinary least squares for y ~ q0 + q1 x + q2 x^2 via the 3x3 normal
    // equations.
    static bool fit_quadratic(const std::array<double, 6>& x, const std::array<double, 6>& y,
                              std::array<double, 3>& q) {
        double s[5] = {6.0, 0.0, 0.0, 0.0, 0.0};
        double t[3] = {0.0, 0.0, 0.0};
        for (std::size_t j = 0; j < 6; ++j) {
            const double x1 = x[j], x2 = x1 * x1;
            s[1] += x1;
            s[2] += x2;
            s[3] += x2 * x1;
            s[4] += x2 * x2;
            t[0] += y[j];
            t[1] += y[j] * x1;
            t[2] += y[j] * x2;
        }
        double a[3][4] = {{s[0], s[1], s[2], t[0]},
                          {s[1], s[2], s[3], t[1]},
                          {s[2], s[3], s[4], t[2]}};
        // Gaussian elimination with partial pivoting.
        for (int col = 0; col < 3; ++col) {
            int pivot = col;
            for (int row = col + 1; row < 3; ++row)
                if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
            if (std::abs(a[pivot][col]) < 1e-12) return false;
            if (pivot != col)
                for (int k = 0; k < 4; ++k) std::swap(a[pivot][k], a[col][k]);
            for (int row = 0; row < 3; ++row) {
                if (row == col) continue;
                const double factor = a[row][col] / a[col][col];
                for (int k = col; k < 4; ++k) a[row][k] -= factor * a[col][k];
            }
        }
        for (int i = 0; i < 3; ++i) q[static_cast<std::size_t>(i)] = a[i][3] / a[i][i];
        return true;
    }

    CalibratorConfig cfg_;
    mutable std::atomic<std::uint64_t> failed_fits_{0};
};

// Joint proposal over the componentwise box: each calibrator draws an
// offset from {-2, -1, 0, +1, +2} and the moves are applied together. A
// draw that changes nothing or breaks feasibility keeps the current vector
// (every calibrator stays). This gives an exactly symmetric transition
// probability, R(m, z) = R(z, m) = 5^-6 for every feasible z reachable in
// one proposal: the offset box is sign-symmetric and both endpoints'
// feasibility is required either way.
class CalibratorNeighborhood {
  public:
    static constexpr double kMoveProbability = 1.0 / 15625.0;  // 5^-6

    explicit CalibratorNeighborhood(const CalibratorProblem& problem) : problem_(&problem) {}

    CalibratorState propose(const CalibratorState& m, RngStream& rng) const {
        CalibratorState out = m;
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = m[i] + static_cast<int>(rng.uniform_int(-2, 2));
        if (out == m || !problem_->is_feasible(out)) return m;
        return out;
    }

    bool contains(const CalibratorState& from, const CalibratorState& to) const {
        if (to == from || !problem_->is_feasible(from) || !problem_->is_feasible(to))
            return false;
        for (std::size_t i = 0; i < from.size(); ++i)
            if (std::abs(to[i] - from[i]) > 2) return false;
        return true;
    }

    // Exact off-diagonal proposal probability; zero when to is not a
    // one-proposal neighbor of from.
    double proposal_probability(const CalibratorState& from, const CalibratorState& to) const {
        return contains(from, to) ? kMoveProbability : 0.0;
    }

    // Neighbor count by enumerating the 5^6 offset box; the remaining
    // probability mass stays on the current vector.
    std::size_t neighbor_count(const CalibratorState& m) const {
        std::size_t count = 0;
        std::array<int, 6> offset{-2, -2, -2, -2, -2, -2};
        while (true) {
            CalibratorState z = m;
            for (std::size_t i = 0; i < 6; ++i) z[i] = m[i] + offset[i];
            if (z != m && problem_->is_feasible(z)) ++count;
            std::size_t digit = 0;
            while (digit < 6 && ++offset[digit] > 2) offset[digit++] = -2;
            if (digit == 6) break;
        }
        return count;
    }

  private:
    const CalibratorProblem* problem_;
};

} // namespace sr::problems

#endif // SR_PROBLEMS_CALIBRATOR_HPP
