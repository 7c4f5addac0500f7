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

#include <stdexcept>
#include <string>

namespace varconst {

/// Malformed input: bad file, unparsable cell, invalid parameter.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// The data is well-formed but the statistic cannot be computed on it
/// (too few observations, zero local variance, zero long-run variance).
class StatisticalError : public std::runtime_error {
public:
    explicit StatisticalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace varconst
