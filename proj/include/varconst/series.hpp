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
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace varconst {

/**
 * An ordered sequence of finite observations X_1..X_n.
 *
 * Construction validates every value; a TimeSeries never holds NaN or
 * infinity and is never empty. Internally indices are 0-based.
 */
class TimeSeries {
public:
    explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) {
            throw InputError("time series must contain at least one observation");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw InputError("non-finite value at index " + std::to_string(i));
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Contiguous sub-series [first, first + count).
    [[nodiscard]] TimeSeries slice(std::size_t first, std::size_t count) const {
        if (first + count > values_.size() || count == 0) {
            throw InputError("slice out of range");
        }
        return TimeSeries(std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(first),
                                              values_.begin() + static_cast<std::ptrdiff_t>(first + count)));
    }

    [[nodiscard]] TimeSeries scaled(double c) const {
        std::vector<double> out(values_);
        for (double& v : out) v *= c;
        return TimeSeries(std::move(out));
    }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<double> values_;
};

/**
 * Block geometry for a sample of length n: block length ell = floor(n^s),
 * block count b = floor(n / ell), and the unused trailing remainder r.
 *
 * Block j (0-based) covers indices [j*ell, (j+1)*ell).
 */
struct BlockPartition {
    std::size_t n = 0;
    double s = 0.0;
    std::size_t block_len = 0;
    std::size_t block_count = 0;
    std::size_t remainder = 0;

    [[nodiscard]] std::size_t covered() const noexcept { return block_len * block_count; }
    [[nodiscard]] std::size_t block_begin(std::size_t j) const noexcept { return j * block_len; }

    friend bool operator==(const BlockPartition&, const BlockPartition&) = default;
};

/// floor(n^s), guarded against pow() landing a hair below an exact integer.
[[nodiscard]] inline std::size_t floor_power(std::size_t n, double s) {
    const double p = std::pow(static_cast<double>(n), s);
    return static_cast<std::size_t>(std::floor(p * (1.0 + 1e-12)));
}

[[nodiscard]] inline BlockPartition make_partition(std::size_t n, double s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw InputError("block exponent must lie in (0,1), got " + std::to_string(s));
    }
    const auto too_short = [&] {
        return StatisticalError("sample too short for chosen s (n=" + std::to_string(n) +
                                ", s=" + std::to_string(s) + ")");
    };
    if (n < 4) throw too_short();
    const std::size_t ell = floor_power(n, s);
    if (ell < 2) throw too_short();
    const std::size_t b = n / ell;
    if (b < 2) throw too_short();
    return BlockPartition{n, s, ell, b, n - b * ell};
}

/// Z_i = X_{i+1} - X_i.
[[nodiscard]] inline TimeSeries difference(const TimeSeries& x) {
    if (x.size() < 2) throw InputError("series too short to difference");
    std::vector<double> z(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) z[i] = x[i + 1] - x[i];
    return TimeSeries(std::move(z));
}

/// Z_i = X_{i+lag} - X_i, e.g. lag 52 for annual differences of weekly data.
[[nodiscard]] inline TimeSeries seasonal_difference(const TimeSeries& x, std::size_t lag) {
    if (lag == 0) throw InputError("lag must be positive");
    if (x.size() <= lag) throw InputError("lag exceeds series length");
    std::vector<double> z(x.size() - lag);
    for (std::size_t i = 0; i + lag < x.size(); ++i) z[i] = x[i + lag] - x[i];
    return TimeSeries(std::move(z));
}

/// Removes the observations at the given 0-based indices (duplicates allowed).
[[nodiscard]] inline TimeSeries drop_indices(const TimeSeries& x, std::vector<std::size_t> indices) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    if (!indices.empty() && indices.back() >= x.size()) {
        throw InputError("drop index " + std::to_string(indices.back()) + " out of range");
    }
    std::vector<double> out;
    out.reserve(x.size() - indices.size());
    auto next = indices.begin();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (next != indices.end() && *next == i) {
            ++next;
            continue;
        }
        out.push_back(x[i]);
    }
    if (out.empty()) throw InputError("dropping indices left an empty series");
    return TimeSeries(std::move(out));
}

} // namespace varconst
