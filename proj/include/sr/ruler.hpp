#ifndef SR_RULER_HPP
#define SR_RULER_HPP

#include <span>
#include <stdexcept>
#include <string>

#include "sr/rng.hpp"

namespace sr {

// The uniform random variable theta(a, b) that observations are tested
// against. A test of an observation h succeeds when h <= theta.
class Ruler {
  public:
    Ruler(double a, double b) : a_(a), b_(b) {
        if (!(a < b))
            throw std::invalid_argument("Ruler: requires a < b, got a=" + std::to_string(a) +
                                        " b=" + std::to_string(b));
    }

    double a() const { return a_; }
    double b() const { return b_; }
    double width() const { return b_ - a_; }

    double sample(RngStream& rng) const { return rng.uniform(a_, b_); }

    bool covers(double h) const { return a_ <= h && h <= b_; }

    // Coverage diagnostic: observations falling outside [a, b] indicate the
    // bounds were chosen too tight for this problem.
    std::size_t count_outside(std::span<const double> observations) const {
        std::size_t n = 0;
        for (double h : observations)
            if (!covers(h)) ++n;
        return n;
    }

  private:
    double a_;
    double b_;
};

} // namespace sr

#endif // SR_RULER_HPP
