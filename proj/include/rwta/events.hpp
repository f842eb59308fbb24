#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rwta {

// Sorted upward threshold-crossing times of one channel.
struct EventTrain {
    std::string channel;
    std::vector<double> times;

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }

    friend bool operator==(const EventTrain&, const EventTrain&) = default;
};

class InsufficientEvents : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Sample k is an event iff v[k-1] < threshold <= v[k]; the event time is
// the linearly interpolated crossing instant between the two samples.
inline EventTrain detect_events(std::span<const double> times, std::span<const double> values,
                                double threshold, std::string channel = {}) {
    if (times.size() != values.size()) throw std::invalid_argument("detect_events: length mismatch");
    EventTrain train{std::move(channel), {}};
    for (std::size_t k = 1; k < values.size(); ++k) {
        const double a = values[k - 1];
        const double b = values[k];
        if (a < threshold && threshold <= b) {
            const double frac = (threshold - a) / (b - a);
            double t = times[k - 1] + frac * (times[k] - times[k - 1]);
            // Interpolation may land on the previous event when samples are
            // exactly representable; keep the train strictly increasing.
            if (!train.times.empty() && t <= train.times.back()) t = std::nextafter(train.times.back(), INFINITY);
            train.times.push_back(t);
        }
    }
    return train;
}

struct WinnerEvent {
    double time;
    std::size_t neuron;  // index into the trains passed to winner_sequence

    friend bool operator==(const WinnerEvent&, const WinnerEvent&) = default;
};

// Merge of all trains in time order. A neuron's event that follows its own
// previous winning event within `burst_window` is folded into it.
inline std::vector<WinnerEvent> winner_sequence(std::span<const EventTrain> trains, double burst_window = 5.0) {
    std::vector<WinnerEvent> all;
    for (std::size_t i = 0; i < trains.size(); ++i) {
        for (double t : trains[i].times) all.push_back({t, i});
    }
    std::sort(all.begin(), all.end(), [](const WinnerEvent& a, const WinnerEvent& b) {
        return a.time < b.time || (a.time == b.time && a.neuron < b.neuron);
    });
    std::vector<WinnerEvent> seq;
    for (const auto& e : all) {
        if (!seq.empty() && seq.back().neuron == e.neuron && e.time - seq.back().time < burst_window) continue;
        seq.push_back(e);
    }
    return seq;
}

inline std::vector<std::size_t> winner_ids(std::span<const WinnerEvent> seq) {
    std::vector<std::size_t> ids;
    ids.reserve(seq.size());
    for (const auto& e : seq) ids.push_back(e.neuron);
    return ids;
}

struct PeriodEstimate {
    double mean = 0.0;  // mean inter-event interval
    double std = 0.0;   // population standard deviation of the intervals
    std::size_t intervals = 0;

    double frequency() const { return 1.0 / mean; }
};

inline PeriodEstimate estimate_period(std::span<const double> times, std::size_t discard = 0) {
    if (times.size() < discard + 3) {
        throw InsufficientEvents("estimate_period: need at least " + std::to_string(discard + 3)
                                 + " events, have " + std::to_string(times.size()));
    }
    std::vector<double> d;
    for (std::size_t k = discard + 1; k < times.size(); ++k) d.push_back(times[k] - times[k - 1]);
    PeriodEstimate p;
    p.intervals = d.size();
    p.mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
    double ss = 0.0;
    for (double x : d) ss += (x - p.mean) * (x - p.mean);
    p.std = std::sqrt(ss / static_cast<double>(d.size()));
    return p;
}

inline PeriodEstimate estimate_period(const EventTrain& train, std::size_t discard = 0) {
    return estimate_period(std::span<const double>(train.times), discard);
}

// Maps x to [-0.5, 0.5).
inline double wrap_half(double x) {
    double w = x - std::floor(x + 0.5);
    if (w >= 0.5) w -= 1.0;
    return w;
}

// For each reference event that has a following reference event (its local
// period) and lies within the observed train's span padded by one period:
// the offset to the nearest observed event in units of that period,
// wrapped to [-0.5, 0.5).
inline std::vector<double> phase_difference(const EventTrain& reference, const EventTrain& observed) {
    if (reference.size() < 2 || observed.size() < 2) {
        throw InsufficientEvents("phase_difference: both trains need at least two events");
    }
    const auto& obs = observed.times;
    std::vector<double> offsets;
    for (std::size_t i = 0; i + 1 < reference.size(); ++i) {
        const double r = reference.times[i];
        const double period = reference.times[i + 1] - r;
        if (r < obs.front() - period || r > obs.back() + period) continue;
        auto it = std::lower_bound(obs.begin(), obs.end(), r);
        double best = INFINITY;
        if (it != obs.end()) best = *it - r;
        if (it != obs.begin() && std::abs(*std::prev(it) - r) < std::abs(best)) best = *std::prev(it) - r;
        offsets.push_back(wrap_half(best / period));
    }
    if (offsets.empty()) throw InsufficientEvents("phase_difference: trains do not overlap in time");
    return offsets;
}

// Removes the +-1 cycle wraps from a phase series so steady drift shows up
// as growth rather than a sawtooth.
inline std::vector<double> unwrap_phase(std::span<const double> phases) {
    std::vector<double> out;
    out.reserve(phases.size());
    double shift = 0.0;
    for (std::size_t k = 0; k < phases.size(); ++k) {
        if (k > 0) shift -= std::round(phases[k] - phases[k - 1]);
        out.push_back(phases[k] + shift);
    }
    return out;
}

// Number of transitions in a ring's winner sequence that do not follow the
// cyclic order i -> (i + 1) mod n.
inline std::size_t phase_jumps(std::span<const std::size_t> ids, std::size_t n) {
    std::size_t jumps = 0;
    for (std::size_t k = 1; k < ids.size(); ++k) {
        if (ids[k] != (ids[k - 1] + 1) % n) ++jumps;
    }
    return jumps;
}

// Number of places where a neuron wins twice in a row.
inline std::size_t immediate_repeats(std::span<const std::size_t> ids) {
    std::size_t r = 0;
    for (std::size_t k = 1; k < ids.size(); ++k) {
        if (ids[k] == ids[k - 1]) ++r;
    }
    return r;
}

// True when ids has period n and its first n entries are a permutation of
// 0..n-1, i.e. the same cyclic order repeats throughout.
inline bool is_cyclic_permutation(std::span<const std::size_t> ids, std::size_t n) {
    if (n == 0 || ids.size() < n) return false;
    std::vector<bool> seen(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        if (ids[k] >= n || seen[ids[k]]) return false;
        seen[ids[k]] = true;
    }
    for (std::size_t k = n; k < ids.size(); ++k) {
        if (ids[k] != ids[k - n]) return false;
    }
    return true;
}

struct Interval {
    double begin;
    double end;
};

// Maximal spans where the sampled signal is strictly above threshold,
// bounded by the interpolated crossing instants.
inline std::vector<Interval> active_intervals(std::span<const double> times, std::span<const double> values,
                                              double threshold) {
    std::vector<Interval> out;
    if (values.empty()) return out;
    auto crossing = [&](std::size_t k) {
        const double a = values[k - 1];
        const double b = values[k];
        return times[k - 1] + (threshold - a) / (b - a) * (times[k] - times[k - 1]);
    };
    bool active = values[0] > threshold;
    double start = times[0];
    for (std::size_t k = 1; k < values.size(); ++k) {
        const bool now = values[k] > threshold;
        if (now && !active) start = crossing(k);
        if (!now && active) out.push_back({start, crossing(k)});
        active = now;
    }
    if (active) out.push_back({start, times.back()});
    return out;
}

// Longest overlap between any two active intervals belonging to different
// channels.
inline double max_pairwise_overlap(std::span<const std::vector<Interval>> channels) {
    struct Tagged {
        Interval iv;
        std::size_t channel;
    };
    std::vector<Tagged> all;
    for (std::size_t c = 0; c < channels.size(); ++c) {
        for (const auto& iv : channels[c]) all.push_back({iv, c});
    }
    std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.iv.begin < b.iv.begin; });
    double worst = 0.0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size() && all[j].iv.begin < all[i].iv.end; ++j) {
            if (all[j].channel == all[i].channel) continue;
            const double ov = std::min(all[i].iv.end, all[j].iv.end) - all[j].iv.begin;
            worst = std::max(worst, ov);
        }
    }
    return worst;
}

}  // namespace rwta
