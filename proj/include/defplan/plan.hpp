#pragma once

#include <optional>
#include <string>
#include <vector>

#include "defplan/data.hpp"

namespace defplan {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

// Per-feature target intervals in normalized [0,1] space; a disengaged
// entry means "no change".
struct Plan {
    std::vector<std::optional<Interval>> targets{kNumMetrics};
    std::string provenance;
    int support = 0;  // TimeLIME only

    size_t size() const {
        size_t n = 0;
        for (const auto& t : targets) n += t.has_value() ? 1 : 0;
        return n;
    }
};

enum class FlipMode {
    kMirror,      // reflection about 0.5; an involution
    kComplement,  // move to the larger region outside the interval
};

Interval flip(const Interval& interval, FlipMode mode = FlipMode::kMirror);

}  // namespace defplan
