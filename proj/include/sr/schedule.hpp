#ifndef SR_SCHEDULE_HPP
#define SR_SCHEDULE_HPP

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sr {

// The test-count sequence {M_k}. Growing kinds are unbounded and
// nondecreasing in k; every kind yields M_k >= 1.
//
//   constant     M_k = m
//   log_growth   M_k = max(1, ceil((ceil(log2(k+2)) - offset) / divisor))
//   linear       M_k = max(1, ceil(k / divisor))
//
// The default is log_growth with offset 1, divisor 1, i.e.
// M_k = max(1, ceil(log2(k+2)) - 1): 1, 1, 1, 2, 2, 2, 2, 3, ... Slow early
// growth keeps exploration cheap while M_k still tends to infinity.
class TestSchedule {
  public:
    enum class Kind { constant, log_growth, linear };

    static TestSchedule constant(std::int64_t m) {
        if (m < 1) throw std::invalid_argument("TestSchedule: constant M must be >= 1");
        return TestSchedule(Kind::constant, m, 0, 1);
    }

    static TestSchedule log_growth(std::int64_t offset = 1, std::int64_t divisor = 1) {
        if (offset < 0) throw std::invalid_argument("TestSchedule: offset must be >= 0");
        if (divisor < 1) throw std::invalid_argument("TestSchedule: divisor must be >= 1");
        return TestSchedule(Kind::log_growth, 0, offset, divisor);
    }

    static TestSchedule linear(std::int64_t divisor = 1) {
        if (divisor < 1) throw std::invalid_argument("TestSchedule: divisor must be >= 1");
        return TestSchedule(Kind::linear, 0, 0, divisor);
    }

    static TestSchedule default_schedule() { return log_growth(); }

    std::int64_t tests_at(std::int64_t k) const {
        if (k < 0) throw std::invalid_argument("TestSchedule: k must be >= 0");
        switch (kind_) {
            case Kind::constant:
                return m_;
            case Kind::log_growth: {
                // ceil(log2(k+2)) == bit_width(k+1) for k >= 0
                const auto l = static_cast<std::int64_t>(
                    std::bit_width(static_cast<std::uint64_t>(k) + 1));
                const std::int64_t v = (l - offset_ + divisor_ - 1) / divisor_;
                return v < 1 ? 1 : v;
            }
            case Kind::linear: {
                const std::int64_t v = (k + divisor_ - 1) / divisor_;
                return v < 1 ? 1 : v;
            }
        }
        throw std::logic_error("TestSchedule: unreachable");
    }

    Kind kind() const { return kind_; }
    bool growing() const { return kind_ != Kind::constant; }

    std::string describe() const {
        switch (kind_) {
            case Kind::constant:
                return "constant:" + std::to_string(m_);
            case Kind::log_growth:
                return "log2:" + std::to_string(offset_) + ":" + std::to_string(divisor_);
            case Kind::linear:
                return "linear:" + std::to_string(divisor_);
        }
        return "?";
    }

    // Parses the describe() format: "constant:M" | "log2[:offset[:divisor]]"
    // | "linear[:divisor]".
    static TestSchedule parse(const std::string& spec);

  private:
    TestSchedule(Kind kind, std::int64_t m, std::int64_t offset, std::int64_t divisor)
        : kind_(kind), m_(m), offset_(offset), divisor_(divisor) {}

    Kind kind_;
    std::int64_t m_;
    std::int64_t offset_;
    std::int64_t divisor_;
};

inline TestSchedule TestSchedule::parse(const std::string& spec) {
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (pos <= s.size()) {
            const auto next = s.find(':', pos);
            if (next == std::string::npos) {
                parts.push_back(s.substr(pos));
                break;
            }
            parts.push_back(s.substr(pos, next - pos));
            pos = next + 1;
        }
        return parts;
    };
    const auto parts = split(spec);
    try {
        if (parts.at(0) == "constant") return constant(std::stoll(parts.at(1)));
        if (parts.at(0) == "log2") {
            const std::int64_t off = parts.size() > 1 ? std::stoll(parts[1]) : 1;
            const std::int64_t div = parts.size() > 2 ? std::stoll(parts[2]) : 1;
            return log_growth(off, div);
        }
        if (parts.at(0) == "linear")
            return linear(parts.size() > 1 ? std::stoll(parts[1]) : 1);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        // fall through to the error below
    }
    throw std::invalid_argument("TestSchedule: cannot parse '" + spec + "'");
}

} // namespace sr

#endif // SR_SCHEDULE_HPP
