#pragma once

// Test-only reference computations. Nothing here calls into the library's
// planner or belief code: hypotheses are plain (threshold, blicket list)
// pairs, sets are std::set<int>, and arithmetic is exact where it matters.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include <boost/rational.hpp>

namespace oracle {

using Rational = boost::rational<long long>;
using Set = std::set<int>;

struct Hyp {
    int threshold;  // 1 disjunctive, 2 conjunctive
    Set blickets;
};

inline std::vector<Set> all_subsets(int n) {
    std::vector<Set> out;
    for (int m = 0; m < (1 << n); ++m) {
        Set s;
        for (int i = 0; i < n; ++i)
            if (m & (1 << i)) s.insert(i);
        out.push_back(s);
    }
    return out;
}

inline bool lights(const Hyp& h, const Set& placed) {
    int hits = 0;
    for (int o : placed) hits += h.blickets.count(o) ? 1 : 0;
    return hits >= h.threshold;
}

inline std::vector<Hyp> default_space(int n) {
    std::vector<Hyp> out;
    for (const Set& s : all_subsets(n))
        if (s.size() == 1) out.push_back({1, s});
    for (const Set& s : all_subsets(n))
        if (s.size() == 2) out.push_back({2, s});
    return out;
}

inline std::vector<Hyp> extended_space(int n) {
    std::vector<Hyp> out;
    for (const Set& s : all_subsets(n))
        if (!s.empty()) out.push_back({1, s});
    for (const Set& s : all_subsets(n))
        if (s.size() >= 2) out.push_back({2, s});
    return out;
}

// Expected checks to a singleton support under a uniform prior over `alive`,
// by plain recursion over every informative placement (no memoization).
inline Rational expectimax(const std::vector<Hyp>& space, const std::vector<int>& alive, int n) {
    if (alive.size() <= 1) return Rational(0);
    bool found = false;
    Rational best(0);
    for (const Set& p : all_subsets(n)) {
        std::vector<int> on, off;
        for (int i : alive) (lights(space[i], p) ? on : off).push_back(i);
        if (on.empty() || off.empty()) continue;
        const long long total = static_cast<long long>(alive.size());
        const Rational v = Rational(1) + Rational(static_cast<long long>(on.size()), total) * expectimax(space, on, n) +
                           Rational(static_cast<long long>(off.size()), total) * expectimax(space, off, n);
        if (!found || v < best) {
            best = v;
            found = true;
        }
    }
    return best;
}

inline double binary_entropy(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

// For deterministic detectors the expected information from one check is the
// entropy of its outcome.
inline double info_gain_uniform(const std::vector<Hyp>& space, const std::vector<int>& alive, const Set& placed) {
    int on = 0;
    for (int i : alive) on += lights(space[i], placed) ? 1 : 0;
    return binary_entropy(static_cast<double>(on) / static_cast<double>(alive.size()));
}

}  // namespace oracle
