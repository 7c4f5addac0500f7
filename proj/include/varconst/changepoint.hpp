/*
   Copyright 2026 The varconst Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Localization of variance change points by recursive binary segmentation:
// test the segment; on rejection pick the adjacent block pair with the
// largest jump in log variance, refine the split inside those two blocks,
// and recurse on both sides.

#include "varconst/errors.hpp"
#include "varconst/series.hpp"
#include "varconst/variance_test.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace varconst {

/// A split of the series into [0, index) and [index, n). `index` equals the
/// 1-based position of the last observation before the change.
struct ChangePoint {
    std::size_t index = 0;
    std::size_t block_pair = 0; // 0-based j*: the change lies in blocks j*, j*+1 of its segment
    double left_var = 0.0;
    double right_var = 0.0;
    std::size_t depth = 0;
};

enum class SegmentOutcome { split, not_rejected, too_short };

[[nodiscard]] inline std::string to_string(SegmentOutcome o) {
    switch (o) {
    case SegmentOutcome::split: return "split";
    case SegmentOutcome::not_rejected: return "not rejected";
    case SegmentOutcome::too_short: return "skipped: too short";
    }
    return "?";
}

struct SegmentTrace {
    std::size_t begin = 0; // [begin, end) in the original series
    std::size_t end = 0;
    std::size_t depth = 0;
    SegmentOutcome outcome = SegmentOutcome::not_rejected;
    std::optional<double> t_stat;
    std::optional<double> p_value;
    std::optional<std::size_t> split_at;
};

struct ChangePointSet {
    std::vector<ChangePoint> points;
    std::vector<SegmentTrace> trace;
};

/// 0-based j maximizing |nu_j - nu_{j+1}|; ties go to the smallest j.
[[nodiscard]] inline std::size_t dominant_block_pair(std::span<const double> nu) {
    if (nu.size() < 2) throw StatisticalError("need at least two blocks");
    std::size_t best = 0;
    double best_gap = -1.0;
    for (std::size_t j = 0; j + 1 < nu.size(); ++j) {
        const double gap = std::abs(nu[j] - nu[j + 1]);
        if (gap > best_gap) {
            best_gap = gap;
            best = j;
        }
    }
    return best;
}

[[nodiscard]] inline std::size_t dominant_block_pair(const BlockStats& stats) {
    return dominant_block_pair(stats.log_local_vars);
}

/// max(10, ceil(0.05 * window length)).
[[nodiscard]] inline std::size_t boundary_margin(std::size_t window_len) {
    const auto frac = static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(window_len)));
    return std::max<std::size_t>(10, frac);
}

struct WindowSplit {
    std::size_t left_len = 0;
    double left_var = 0.0;
    double right_var = 0.0;
};

/**
 * Best split of a window into [0, k) and [k, W) by the absolute difference of
 * the two empirical variances (divisor = segment length), for k in
 * [margin, W - margin]. Ties go to the smallest k.
 */
[[nodiscard]] inline WindowSplit best_variance_split(std::span<const double> w, std::size_t margin) {
    const std::size_t len = w.size();
    if (margin == 0 || len < 2 * margin + 2) throw StatisticalError("window too short for margin");

    // Welford passes: left_var[k] over w[0,k), right_var[k] over w[k,len).
    std::vector<double> left_var(len + 1, 0.0);
    std::vector<double> right_var(len + 1, 0.0);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t k = 1; k <= len; ++k) {
        const double d = w[k - 1] - mean;
        mean += d / static_cast<double>(k);
        m2 += d * (w[k - 1] - mean);
        left_var[k] = m2 / static_cast<double>(k);
    }
    mean = 0.0;
    m2 = 0.0;
    for (std::size_t c = 1; c <= len; ++c) {
        const double v = w[len - c];
        const double d = v - mean;
        mean += d / static_cast<double>(c);
        m2 += d * (v - mean);
        right_var[len - c] = m2 / static_cast<double>(c);
    }

    WindowSplit best;
    double best_gap = -1.0;
    for (std::size_t k = margin; k <= len - margin; ++k) {
        const double gap = std::abs(left_var[k] - right_var[k]);
        if (gap > best_gap) {
            best_gap = gap;
            best = {k, left_var[k], right_var[k]};
        }
    }
    return best;
}

/// Refines the change inside blocks j*, j*+1 of partition p (0-based j*).
[[nodiscard]] inline ChangePoint refine_within_window(const TimeSeries& x, const BlockPartition& p, std::size_t j_star,
                                                      std::size_t margin) {
    if (p.n != x.size()) throw InputError("partition does not match series length");
    if (j_star + 1 >= p.block_count) throw InputError("block pair index out of range");
    const std::size_t lo = p.block_begin(j_star);
    const auto window = x.values().subspan(lo, 2 * p.block_len);
    const WindowSplit split = best_variance_split(window, margin);
    return ChangePoint{lo + split.left_len, j_star, split.left_var, split.right_var, 0};
}

/// Smallest sample length whose partition with exponent s has at least 4 blocks.
[[nodiscard]] inline std::size_t min_segment_length(double s) {
    for (std::size_t n = 4;; ++n) {
        const std::size_t ell = floor_power(n, s);
        if (ell >= 2 && n / ell >= 4) return n;
        if (n > (1u << 26)) throw InputError("no usable segment length for this s");
    }
}

namespace detail {

inline void locate_segment(const TimeSeries& x, std::size_t begin, std::size_t end, std::size_t depth,
                           const TestConfig& cfg, std::size_t min_len, ChangePointSet& out) {
    SegmentTrace tr{begin, end, depth, SegmentOutcome::too_short, {}, {}, {}};
    const std::size_t len = end - begin;
    if (len < min_len) {
        out.trace.push_back(tr);
        return;
    }
    const BlockPartition p = make_partition(len, cfg.s);
    try {
        (void)make_partition(p.covered(), cfg.q);
    } catch (const StatisticalError&) {
        out.trace.push_back(tr);
        return;
    }

    const TimeSeries seg = x.slice(begin, len);
    const TestResult res = run_test(seg, cfg);
    tr.t_stat = res.t_stat;
    tr.p_value = res.p_value;
    if (!res.reject) {
        tr.outcome = SegmentOutcome::not_rejected;
        out.trace.push_back(tr);
        return;
    }

    const std::size_t j_star = dominant_block_pair(res.block_stats);
    ChangePoint cp = refine_within_window(seg, p, j_star, boundary_margin(2 * p.block_len));
    cp.index += begin;
    cp.depth = depth;
    tr.outcome = SegmentOutcome::split;
    tr.split_at = cp.index;
    out.trace.push_back(tr);
    out.points.push_back(cp);

    locate_segment(x, begin, cp.index, depth + 1, cfg, min_len, out);
    locate_segment(x, cp.index, end, depth + 1, cfg, min_len, out);
}

} // namespace detail

[[nodiscard]] inline ChangePointSet locate_all(const TimeSeries& x, const TestConfig& cfg = {}) {
    cfg.validate();
    ChangePointSet out;
    detail::locate_segment(x, 0, x.size(), 0, cfg, min_segment_length(cfg.s), out);
    std::sort(out.points.begin(), out.points.end(),
              [](const ChangePoint& a, const ChangePoint& b) { return a.index < b.index; });
    std::sort(out.trace.begin(), out.trace.end(), [](const SegmentTrace& a, const SegmentTrace& b) {
        return a.begin != b.begin ? a.begin < b.begin : a.end > b.end;
    });
    return out;
}

} // namespace varconst
