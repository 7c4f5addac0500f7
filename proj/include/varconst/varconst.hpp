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

#include "varconst/changepoint.hpp"
#include "varconst/dgp.hpp"
#include "varconst/errors.hpp"
#include "varconst/gini.hpp"
#include "varconst/lrv.hpp"
#include "varconst/montecarlo.hpp"
#include "varconst/normal.hpp"
#include "varconst/rng.hpp"
#include "varconst/series.hpp"
#include "varconst/variance_test.hpp"
