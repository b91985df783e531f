#ifndef SR_ANALYSIS_HPP
#define SR_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sr/ruler.hpp"
#include "sr/search.hpp"

namespace sr::analysis {

// ---------------------------------------------------------------------------
// Win probabilities
// ---------------------------------------------------------------------------

struct UniformSpec {
    double lo;
    double hi;  // lo == hi is a point mass
};

struct EmpiricalSpec {
    std::span<const double> samples;
};

using DistributionSpec = std::variant<UniformSpec, EmpiricalSpec>;

enum class WinProbMethod { closed_form, monte_carlo };

// P(x, a, b) = Pr(h(x) <= theta(a, b)), the single-test success probability.
struct WinProbability {
    double value = 0.0;
    WinProbMethod method = WinProbMethod::closed_form;
    double std_error = 0.0;
    bool ruler_covers_support = true;  // Assumption-3 diagnostic
};

namespace detail {

// Pr(theta >= h) for theta uniform on [a, b], clamped outside the ruler.
inline double theta_exceeds(double h, const Ruler& ruler) {
    if (h <= ruler.a()) return 1.0;
    if (h >= ruler.b()) return 0.0;
    return (ruler.b() - h) / ruler.width();
}

} // namespace detail

inline WinProbability win_probability(const DistributionSpec& spec, const Ruler& ruler) {
    WinProbability result;
    if (const auto* u = std::get_if<UniformSpec>(&spec)) {
        if (u->lo > u->hi) throw std::invalid_argument("win_probability: requires lo <= hi");
        result.method = WinProbMethod::closed_form;
        result.ruler_covers_support = ruler.covers(u->lo) && ruler.covers(u->hi);
        if (u->lo == u->hi) {
            result.value = detail::theta_exceeds(u->lo, ruler);
            return result;
        }
        // E_h[Pr(theta >= h)] integrated piecewise: 1 below a, linear on
        // [a, b], 0 above b.
        const double lo = u->lo, hi = u->hi;
        const double a = ruler.a(), b = ruler.b();
        double integral = 0.0;
        if (lo < a) integral += std::min(hi, a) - lo;
        const double u1 = std::max(lo, a);
        const double v1 = std::min(hi, b);
        if (u1 < v1)
            integral += ((b - u1) * (b - u1) - (b - v1) * (b - v1)) / (2.0 * ruler.width());
        result.value = integral / (hi - lo);
        return result;
    }
    const auto& e = std::get<EmpiricalSpec>(spec);
    if (e.samples.empty()) throw std::invalid_argument("win_probability: empty sample set");
    result.method = WinProbMethod::monte_carlo;
    // Per-sample conditional win probabilities; theta is integrated out
    // analytically, so the estimate is the sample mean of those.
    double mean = 0.0;
    for (double h : e.samples) mean += detail::theta_exceeds(h, ruler);
    mean /= static_cast<double>(e.samples.size());
    double var = 0.0;
    for (double h : e.samples) {
        const double d = detail::theta_exceeds(h, ruler) - mean;
        var += d * d;
    }
    const auto n = static_cast<double>(e.samples.size());
    result.value = mean;
    result.std_error = e.samples.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
    result.ruler_covers_support = ruler.count_outside(e.samples) == 0;
    return result;
}

// ---------------------------------------------------------------------------
// Acceptance probabilities
// ---------------------------------------------------------------------------

namespace detail {

// Binomial coefficients: exact multiplicative form for small M, log-gamma
// above M = 30 where the exact products would overflow or lose precision.
inline double log_choose(std::int64_t n, std::int64_t k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(static_cast<double>(n) + 1.0) -
           std::lgamma(static_cast<double>(k) + 1.0) -
           std::lgamma(static_cast<double>(n - k) + 1.0);
}

} // namespace detail

// Probability that the relaxed rule accepts: the n-th success arrives on
// some test t <= m, the t-th test being the success.
//   sum_{t=n}^{m} C(t-1, t-n) p^n (1-p)^(t-n)
inline double relaxed_acceptance_probability(double p, std::int64_t m, std::int64_t n) {
    if (m < 1) throw std::invalid_argument("relaxed_acceptance_probability: M must be >= 1");
    if (n < 1 || n > m)
        throw std::invalid_argument("relaxed_acceptance_probability: need 1 <= n <= M");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("relaxed_acceptance_probability: p must be in [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;

    double total = 0.0;
    if (m <= 30) {
        double coeff = 1.0;  // C(t-1, n-1) at t = n
        double qpow = 1.0;   // (1-p)^(t-n)
        const double pn = std::pow(p, static_cast<double>(n));
        for (std::int64_t t = n; t <= m; ++t) {
            if (t > n) {
                coeff *= static_cast<double>(t - 1) / static_cast<double>(t - n);
                qpow *= 1.0 - p;
            }
            total += coeff * pn * qpow;
        }
    } else {
        const double logp = std::log(p);
        const double logq = std::log1p(-p);
        for (std::int64_t t = n; t <= m; ++t) {
            total += std::exp(detail::log_choose(t - 1, t - n) +
                              static_cast<double>(n) * logp +
                              static_cast<double>(t - n) * logq);
        }
    }
    return std::min(total, 1.0);
}

// Acceptance probability of one Step-2 evaluation given the single-test win
// probability p: p^M for the original rule, the negative-binomial tail sum
// above for the relaxed rule with n = ceil(alpha M).
inline double acceptance_probability(double p, std::int64_t m, Variant variant,
                                     std::optional<double> alpha = std::nullopt) {
    if (m < 1) throw std::invalid_argument("acceptance_probability: M must be >= 1");
    if (variant == Variant::original) return std::pow(p, static_cast<double>(m));
    if (!alpha) throw std::invalid_argument("acceptance_probability: relaxed variant needs alpha");
    return relaxed_acceptance_probability(p, m, success_threshold(*alpha, m));
}

// Independent oracle: enumerate every success/failure prefix the stopping
// rule can produce and add up the accepting ones. Exact to floating
// precision; enumeration is capped at M = 20.
inline double brute_force_acceptance(double p, std::int64_t m, std::int64_t n) {
    if (m > 20) throw std::invalid_argument("brute_force_acceptance: enumeration bound is M = 20");
    if (m < 1 || n < 1 || n > m)
        throw std::invalid_argument("brute_force_acceptance: need 1 <= n <= M");
    struct Frame {
        std::int64_t successes;
        std::int64_t failures;
        double prob;
    };
    double accepted = 0.0;
    std::vector<Frame> stack{{0, 0, 1.0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        if (f.successes == n) {
            accepted += f.prob;
            continue;
        }
        if (f.failures == m - n + 1) continue;
        stack.push_back({f.successes + 1, f.failures, f.prob * p});
        stack.push_back({f.successes, f.failures + 1, f.prob * (1.0 - p)});
    }
    return accepted;
}

// ---------------------------------------------------------------------------
// Expected number of tests for accepted candidates
// ---------------------------------------------------------------------------

// E[A|B]: expected test count of a relaxed evaluation conditioned on
// acceptance, with s the single-test failure probability. Strictly below M
// whenever n < M.
inline double expected_tests_given_accept(double s, double alpha, std::int64_t m) {
    if (!(s >= 0.0 && s < 1.0))
        throw std::invalid_argument("expected_tests_given_accept: need 0 <= s < 1");
    if (m < 1) throw std::invalid_argument("expected_tests_given_accept: M must be >= 1");
    const std::int64_t n = success_threshold(alpha, m);
    const double p = 1.0 - s;
    double norm = 0.0;
    double weighted = 0.0;
    if (m <= 30) {
        double coeff = 1.0;
        double spow = 1.0;
        const double pn = std::pow(p, static_cast<double>(n));
        for (std::int64_t t = n; t <= m; ++t) {
            if (t > n) {
                coeff *= static_cast<double>(t - 1) / static_cast<double>(t - n);
                spow *= s;
            }
            const double term = coeff * pn * spow;
            norm += term;
            weighted += static_cast<double>(t) * term;
        }
    } else {
        const double logp = std::log(p);
        const double logs = s > 0.0 ? std::log(s) : 0.0;
        for (std::int64_t t = n; t <= m; ++t) {
            if (s == 0.0 && t > n) break;
            const double term = std::exp(detail::log_choose(t - 1, t - n) +
                                         static_cast<double>(n) * logp +
                                         static_cast<double>(t - n) * logs);
            norm += term;
            weighted += static_cast<double>(t) * term;
        }
    }
    return weighted / norm;
}

// ---------------------------------------------------------------------------
// Transition matrices and stationary distributions
// ---------------------------------------------------------------------------

// Row-stochastic one-step transition matrix of the constant-M chain.
struct TransitionMatrix {
    std::size_t size = 0;
    std::vector<double> values;  // row-major
    Variant variant = Variant::original;
    std::int64_t m = 1;
    std::optional<double> alpha;

    double operator()(std::size_t row, std::size_t col) const {
        return values[row * size + col];
    }
    double& at(std::size_t row, std::size_t col) { return values[row * size + col]; }

    double row_sum(std::size_t row) const {
        double total = 0.0;
        for (std::size_t j = 0; j < size; ++j) total += (*this)(row, j);
        return total;
    }
};

enum class StationarySource { formula, eigen };

struct StationaryVector {
    std::vector<double> probabilities;
    StationarySource source = StationarySource::formula;

    double mass_on(std::span<const std::size_t> indices) const {
        double total = 0.0;
        for (std::size_t i : indices) total += probabilities.at(i);
        return total;
    }
};

inline double max_abs_difference(const StationaryVector& a, const StationaryVector& b) {
    if (a.probabilities.size() != b.probabilities.size())
        throw std::invalid_argument("max_abs_difference: size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.probabilities.size(); ++i)
        worst = std::max(worst, std::abs(a.probabilities[i] - b.probabilities[i]));
    return worst;
}

// Off-diagonal (x, x'): R(x, x') times the acceptance probability of x';
// diagonal: the complement. The neighborhood must be symmetric.
template <class State, EnumerableNeighborhood<State> N>
TransitionMatrix transition_matrix(const std::vector<State>& states,
                                   const std::vector<double>& win_probs, const N& neighborhood,
                                   std::int64_t m, Variant variant,
                                   std::optional<double> alpha = std::nullopt) {
    if (states.size() != win_probs.size())
        throw std::invalid_argument("transition_matrix: need one win probability per state");
    if (variant == Variant::relaxed && !alpha)
        throw std::invalid_argument("transition_matrix: relaxed variant needs alpha");

    const std::size_t kappa = states.size();
    std::vector<double> r(kappa * kappa, 0.0);
    for (std::size_t i = 0; i < kappa; ++i)
        for (std::size_t j = 0; j < kappa; ++j)
            r[i * kappa + j] = neighborhood.transition_probability(states[i], states[j]);

    for (std::size_t i = 0; i < kappa; ++i)
        for (std::size_t j = i + 1; j < kappa; ++j)
            if (std::abs(r[i * kappa + j] - r[j * kappa + i]) > 1e-12)
                throw std::invalid_argument("transition_matrix: asymmetric neighborhood");

    TransitionMatrix t;
    t.size = kappa;
    t.values.assign(kappa * kappa, 0.0);
    t.variant = variant;
    t.m = m;
    t.alpha = alpha;

    std::vector<double> accept(kappa);
    for (std::size_t j = 0; j < kappa; ++j)
        accept[j] = acceptance_probability(win_probs[j], m, variant, alpha);

    for (std::size_t i = 0; i < kappa; ++i) {
        double off = 0.0;
        for (std::size_t j = 0; j < kappa; ++j) {
            if (i == j) continue;
            const double p = r[i * kappa + j] * accept[j];
            t.at(i, j) = p;
            off += p;
        }
        t.at(i, i) = 1.0 - off;
    }
    return t;
}

// Stationary vector from the closed forms: entries proportional to p^M for
// the original chain and to the relaxed acceptance sum for the relaxed
// chain. Weights are formed relative to the largest win probability to stay
// stable at large M.
inline StationaryVector stationary_formula(const std::vector<double>& win_probs, std::int64_t m,
                                           Variant variant,
                                           std::optional<double> alpha = std::nullopt) {
    if (win_probs.empty()) throw std::invalid_argument("stationary_formula: no states");
    for (double p : win_probs)
        if (!(p > 0.0 && p < 1.0))
            throw std::invalid_argument("stationary_formula: win probabilities must lie in (0,1)");

    StationaryVector pi;
    pi.source = StationarySource::formula;
    pi.probabilities.resize(win_probs.size());

    if (variant == Variant::original) {
        const double log_pmax = std::log(*std::max_element(win_probs.begin(), win_probs.end()));
        double total = 0.0;
        for (std::size_t i = 0; i < win_probs.size(); ++i) {
            const double w =
                std::exp(static_cast<double>(m) * (std::log(win_probs[i]) - log_pmax));
            pi.probabilities[i] = w;
            total += w;
        }
        for (double& v : pi.probabilities) v /= total;
        return pi;
    }

    if (!alpha) throw std::invalid_argument("stationary_formula: relaxed variant needs alpha");
    const std::int64_t n = success_threshold(*alpha, m);
    double total = 0.0;
    for (std::size_t i = 0; i < win_probs.size(); ++i) {
        const double w = relaxed_acceptance_probability(win_probs[i], m, n);
        pi.probabilities[i] = w;
        total += w;
    }
    for (double& v : pi.probabilities) v /= total;
    return pi;
}

// Verification oracle for the closed forms: power iteration on pi <- pi T.
// The default residual is tighter than the 1e-12 contract so that slowly
// mixing chains still land within 1e-8 of the fixed point.
inline StationaryVector stationary_eig(const TransitionMatrix& t,
                                       double residual_tolerance = 1e-13,
                                       std::int64_t max_iterations = 5'000'000) {
    const std::size_t kappa = t.size;
    if (kappa == 0) throw std::invalid_argument("stationary_eig: empty matrix");
    std::vector<double> pi(kappa, 1.0 / static_cast<double>(kappa));
    std::vector<double> next(kappa, 0.0);
    double residual = std::numeric_limits<double>::infinity();
    for (std::int64_t iter = 0; iter < max_iterations; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t i = 0; i < kappa; ++i) {
            const double w = pi[i];
            const double* row = t.values.data() + i * kappa;
            for (std::size_t j = 0; j < kappa; ++j) next[j] += w * row[j];
        }
        double total = 0.0;
        for (double v : next) total += v;
        for (double& v : next) v /= total;
        residual = 0.0;
        for (std::size_t j = 0; j < kappa; ++j)
            residual = std::max(residual, std::abs(next[j] - pi[j]));
        pi.swap(next);
        if (residual <= residual_tolerance) {
            StationaryVector out;
            out.probabilities = std::move(pi);
            out.source = StationarySource::eigen;
            return out;
        }
    }
    throw std::runtime_error("stationary_eig: no convergence within iteration cap, residual = " +
                             std::to_string(residual));
}

// ---------------------------------------------------------------------------
// Optimal sets and the M -> infinity limit
// ---------------------------------------------------------------------------

// S*: argmin of the known means. S*(a, b): argmax of the win probabilities.
struct OptimalSet {
    std::vector<std::size_t> s_star;
    std::vector<std::size_t> s_star_ab;
    std::size_t state_count = 0;
};

inline OptimalSet optimal_set(const std::vector<double>& known_means,
                              const std::vector<double>& win_probs) {
    if (known_means.size() != win_probs.size() || known_means.empty())
        throw std::invalid_argument("optimal_set: need matching nonempty inputs");
    OptimalSet out;
    out.state_count = known_means.size();
    const double fmin = *std::min_element(known_means.begin(), known_means.end());
    const double pmax = *std::max_element(win_probs.begin(), win_probs.end());
    for (std::size_t i = 0; i < known_means.size(); ++i) {
        if (known_means[i] == fmin) out.s_star.push_back(i);
        if (win_probs[i] == pmax) out.s_star_ab.push_back(i);
    }
    return out;
}

// The limit of the stationary distribution as M grows: uniform over
// S*(a, b), zero elsewhere.
inline StationaryVector limit_vector(const OptimalSet& optimal) {
    if (optimal.s_star_ab.empty()) throw std::invalid_argument("limit_vector: empty optimal set");
    StationaryVector out;
    out.source = StationarySource::formula;
    out.probabilities.assign(optimal.state_count, 0.0);
    const double mass = 1.0 / static_cast<double>(optimal.s_star_ab.size());
    for (std::size_t i : optimal.s_star_ab) out.probabilities.at(i) = mass;
    return out;
}

} // namespace sr::analysis

#endif // SR_ANALYSIS_HPP
