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

// Subsampling estimator of the long-run standard deviation kappa of Y^2,
// computed from observations centered by their local (block) means.

#include "varconst/dgp.hpp"
#include "varconst/errors.hpp"
#include "varconst/series.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace varconst {

struct LrvEstimate {
    double kappa_hat = 0.0;
    double sigma_h_sq = 0.0;          // mean of the squared centered observations
    BlockPartition partition;         // exponent s, used for centering
    BlockPartition sub_partition;     // exponent q, on the centered length b*ell
};

/// X_i minus the mean of its s-block, over the b*ell covered observations.
[[nodiscard]] inline std::vector<double> center_values(std::span<const double> x, const BlockPartition& p) {
    if (x.size() != p.n) throw InputError("partition does not match series length");
    std::vector<double> out(p.covered());
    for (std::size_t j = 0; j < p.block_count; ++j) {
        const std::size_t lo = p.block_begin(j);
        double mean = 0.0;
        for (std::size_t i = lo; i < lo + p.block_len; ++i) mean += x[i];
        mean /= static_cast<double>(p.block_len);
        for (std::size_t i = lo; i < lo + p.block_len; ++i) out[i] = x[i] - mean;
    }
    return out;
}

[[nodiscard]] inline TimeSeries center_by_block_means(const TimeSeries& x, const BlockPartition& p) {
    return TimeSeries(center_values(x.values(), p));
}

inline void check_exponents(double s, double q) {
    if (!(q > 0.0 && s < 1.0)) throw InputError("exponents must satisfy 0 < q < s < 1");
    if (!(q < s)) throw InputError("q must be smaller than s");
}

/**
 * kappa_hat = (1/b~) sqrt(pi/2) (1/sigma_H^2) sum_j | ell~^{-1/2} sum_{i in sub-block j} (X~_i^2 - sigma_H^2) |
 *
 * with sub-blocks of length ell~ = floor(n'^q) over the n' = b*ell centered
 * observations; the trailing partial sub-block is dropped.
 */
[[nodiscard]] inline LrvEstimate estimate_kappa(const TimeSeries& x, const BlockPartition& p, double q) {
    check_exponents(p.s, q);
    const auto centered = center_values(x.values(), p);
    const std::size_t n_prime = centered.size();

    LrvEstimate est;
    est.partition = p;
    est.sub_partition = make_partition(n_prime, q);

    double ss = 0.0;
    for (double v : centered) ss += v * v;
    est.sigma_h_sq = ss / static_cast<double>(n_prime);
    if (!(est.sigma_h_sq > 0.0)) throw StatisticalError("constant input: centered observations are all zero");

    const auto& sub = est.sub_partition;
    const double inv_sqrt_len = 1.0 / std::sqrt(static_cast<double>(sub.block_len));
    double abs_sum = 0.0;
    for (std::size_t j = 0; j < sub.block_count; ++j) {
        const std::size_t lo = sub.block_begin(j);
        double block = 0.0;
        for (std::size_t i = lo; i < lo + sub.block_len; ++i) block += centered[i] * centered[i] - est.sigma_h_sq;
        abs_sum += std::abs(block * inv_sqrt_len);
    }
    constexpr double root_half_pi = 1.2533141373155002512; // sqrt(pi/2)
    est.kappa_hat = root_half_pi * abs_sum / (static_cast<double>(sub.block_count) * est.sigma_h_sq);
    return est;
}

[[nodiscard]] inline LrvEstimate estimate_kappa(const TimeSeries& x, double s, double q) {
    check_exponents(s, q);
    return estimate_kappa(x, make_partition(x.size(), s), q);
}

/**
 * Probability limit of kappa_hat / sqrt(ell~) under a fixed alternative:
 * sqrt(pi/2) * int |sigma^2(x) - int sigma^2| dx / int sigma^2.
 * Midpoint rule on `grid` cells.
 */
[[nodiscard]] inline double kappa_growth_limit(const VarianceFn& v, std::size_t grid = 100000) {
    if (grid < 2) throw InputError("grid must be at least 2");
    std::vector<double> var(grid);
    double mean = 0.0;
    for (std::size_t i = 0; i < grid; ++i) {
        const double s = v((static_cast<double>(i) + 0.5) / static_cast<double>(grid));
        var[i] = s * s;
        mean += var[i];
    }
    mean /= static_cast<double>(grid);
    double dev = 0.0;
    for (double w : var) dev += std::abs(w - mean);
    dev /= static_cast<double>(grid);
    return std::sqrt(std::numbers::pi / 2.0) * dev / mean;
}

} // namespace varconst
