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

#include "varconst/errors.hpp"

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace varconst {

/**
 * Gini's mean difference, (1/(b(b-1))) * sum_{j != k} |v_j - v_k|.
 *
 * O(b log b): after sorting, the k-th order statistic (1-based) enters
 * the sum over ordered pairs j<k with weight (2k - b - 1). Values are
 * shifted by the minimum first; the weights sum to zero so the shift
 * cancels exactly and only reduces round-off.
 */
[[nodiscard]] inline double gini_mean_difference(std::span<const double> v) {
    const std::size_t b = v.size();
    if (b < 2) throw StatisticalError("need at least two blocks");

    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front();

    double acc = 0.0;
    double comp = 0.0; // Kahan compensation
    for (std::size_t k = 0; k < b; ++k) {
        const double w = 2.0 * static_cast<double>(k) + 1.0 - static_cast<double>(b);
        const double term = w * (sorted[k] - lo) - comp;
        const double t = acc + term;
        comp = (t - acc) - term;
        acc = t;
    }
    return 2.0 * acc / (static_cast<double>(b) * static_cast<double>(b - 1));
}

} // namespace varconst
