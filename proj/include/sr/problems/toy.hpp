#ifndef SR_PROBLEMS_TOY_HPP
#define SR_PROBLEMS_TOY_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sr/rng.hpp"
#include "sr/ruler.hpp"

namespace sr::problems {

// Table-valued objective with uniform replicate noise: H(x) is uniform on
// mean(x) +/- half_width. States are 1-based indices into the table.
class TableObjective {
  public:
    using state_type = int;

    TableObjective(std::vector<double> means, double noise_half_width, Ruler ruler)
        : means_(std::move(means)), half_width_(noise_half_width), ruler_(ruler) {
        if (means_.empty()) throw std::invalid_argument("TableObjective: empty mean table");
        if (half_width_ < 0.0)
            throw std::invalid_argument("TableObjective: negative noise half-width");
        const double fmin = *std::min_element(means_.begin(), means_.end());
        for (std::size_t i = 0; i < means_.size(); ++i)
            if (means_[i] == fmin) optima_.push_back(static_cast<int>(i) + 1);
    }

    // 10 states, global minimum at x = 9, ruler theta(-0.5, 1.9).
    static TableObjective example1() {
        return TableObjective({0.3, 0.7, 0.9, 0.5, 1.0, 1.4, 0.7, 0.8, 0.0, 0.6}, 0.5,
                              Ruler(-0.5, 1.9));
    }

    // 100 states, single global minimum at x = 46, maximum mean 2.2; the
    // ruler bounds extend the extreme means by the noise half-width.
    static TableObjective example2() {
        return TableObjective(example2_means(), 0.5, Ruler(-0.5, 2.7));
    }

    static const std::vector<double>& example2_means();

    int state_count() const { return static_cast<int>(means_.size()); }

    bool is_feasible(int x) const { return x >= 1 && x <= state_count(); }

    double mean(int x) const {
        require_state(x);
        return means_[static_cast<std::size_t>(x) - 1];
    }

    const std::vector<double>& means() const { return means_; }
    double noise_half_width() const { return half_width_; }
    const Ruler& ruler() const { return ruler_; }

    double sample(int x, RngStream& rng) const {
        require_state(x);
        const double f = means_[static_cast<std::size_t>(x) - 1];
        return rng.uniform(f - half_width_, f + half_width_);
    }

    const std::vector<int>& optima() const { return optima_; }
    bool is_known_optimum(int x) const {
        return std::find(optima_.begin(), optima_.end(), x) != optima_.end();
    }

  private:
    void require_state(int x) const {
        if (!is_feasible(x))
            throw std::invalid_argument("TableObjective: state out of range: " +
                                        std::to_string(x));
    }

    std::vector<double> means_;
    double half_width_;
    Ruler ruler_;
    std::vector<int> optima_;
};

inline const std::vector<double>& TableObjective::example2_means() {
    static const std::vector<double> table = {
        0.3, 0.7, 0.9, 0.9, 1.0, 1.1, 1.1, 1.1, 1.0, 0.9,  //   1..10
        0.8, 0.7, 0.6, 0.5, 0.5, 0.6, 0.7, 0.8, 0.8, 0.8,  //  11..20
        1.0, 1.1, 1.3, 1.3, 1.3, 1.2, 1.0, 1.0, 1.0, 1.2,  //  21..30
        1.3, 1.5, 1.5, 1.4, 1.2, 0.9, 0.7, 0.6, 0.6, 0.5,  //  31..40
        0.3, 0.3, 0.3, 0.2, 0.1, 0.0, 0.1, 0.2, 0.3, 0.3,  //  41..50
        0.3, 0.4, 0.6, 0.6, 0.7, 0.8, 0.9, 1.0, 1.0, 1.1,  //  51..60
        1.3, 1.3, 1.3, 1.2, 1.2, 1.2, 1.3, 1.5, 1.7, 1.8,  //  61..70
        2.0, 2.2, 2.1, 2.0, 1.9, 1.6, 1.4, 1.3, 1.2, 1.1,  //  71..80
        1.0, 0.9, 0.8, 0.6, 0.5, 0.5, 0.6, 0.7, 0.7, 0.8,  //  81..90
        0.9, 1.0, 1.1, 1.2, 1.4, 1.5, 1.6, 1.8, 1.9, 1.4,  //  91..100
    };
    return table;
}

// N(x) = S - {x} with uniform selection, the neighborhood of the 10-state
// example.
class FullExchangeNeighborhood {
  public:
    explicit FullExchangeNeighborhood(int state_count) : count_(state_count) {
        if (state_count < 2)
            throw std::invalid_argument("FullExchangeNeighborhood: need at least two states");
    }

    int propose(const int& x, RngStream& rng) const {
        auto z = static_cast<int>(rng.uniform_int(1, count_ - 1));
        if (z >= x) ++z;
        return z;
    }

    std::vector<int> states() const {
        std::vector<int> all(static_cast<std::size_t>(count_));
        for (int i = 0; i < count_; ++i) all[static_cast<std::size_t>(i)] = i + 1;
        return all;
    }

    std::vector<int> neighbors(const int& x) const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(count_) - 1);
        for (int z = 1; z <= count_; ++z)
            if (z != x) out.push_back(z);
        return out;
    }

    double transition_probability(const int& x, const int& z) const {
        if (x == z || z < 1 || z > count_) return 0.0;
        return 1.0 / static_cast<double>(count_ - 1);
    }

  private:
    int count_;
};

// Ring neighborhood: x +/- 1 .. +/- max_offset with wraparound, uniform
// selection. The 100-state example uses max_offset = 5.
class WrapOffsetNeighborhood {
  public:
    WrapOffsetNeighborhood(int state_count, int max_offset)
        : count_(state_count), max_offset_(max_offset) {
        if (max_offset < 1 || 2 * max_offset >= state_count)
            throw std::invalid_argument("WrapOffsetNeighborhood: offsets must fit in the ring");
    }

    int propose(const int& x, RngStream& rng) const {
        auto d = static_cast<int>(rng.uniform_int(0, 2 * max_offset_ - 1));
        d = d < max_offset_ ? d - max_offset_ : d - max_offset_ + 1;  // skips 0
        return wrap(x + d);
    }

    std::vector<int> states() const {
        std::vector<int> all(static_cast<std::size_t>(count_));
        for (int i = 0; i < count_; ++i) all[static_cast<std::size_t>(i)] = i + 1;
        return all;
    }

    std::vector<int> neighbors(const int& x) const {
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(2 * max_offset_));
        for (int d = -max_offset_; d <= max_offset_; ++d)
            if (d != 0) out.push_back(wrap(x + d));
        return out;
    }

    double transition_probability(const int& x, const int& z) const {
        if (x == z || z < 1 || z > count_) return 0.0;
        const int forward = (z - x + count_) % count_;
        const int dist = std::min(forward, count_ - forward);
        return dist <= max_offset_ ? 1.0 / static_cast<double>(2 * max_offset_) : 0.0;
    }

  private:
    int wrap(int x) const {
        int v = (x - 1) % count_;
        if (v < 0) v += count_;
        return v + 1;
    }

    int count_;
    int max_offset_;
};

} // namespace sr::problems

#endif // SR_PROBLEMS_TOY_HPP
