// Copyright 2026 The ReviBranch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REVIBRANCH_METRICS_H_
#define REVIBRANCH_METRICS_H_

#include <span>
#include <vector>

namespace revibranch {

// exp(mean(log(max(x, 1)))): counts of zero are shifted to one.
double geometric_mean(std::span<const double> values);

// Population standard deviation over mean, in percent; 0 when the mean is 0.
double std_percent(std::span<const double> values);

double arithmetic_mean(std::span<const double> values);

// Two-sided Wilcoxon signed-rank test on paired samples (zero differences
// dropped, normal approximation with tie correction).
double wilcoxon_signed_rank_p(std::span<const double> a, std::span<const double> b);

// Two-sided Mann-Whitney U test (normal approximation with tie correction).
double mann_whitney_p(std::span<const double> a, std::span<const double> b);

}  // namespace revibranch

#endif  // REVIBRANCH_METRICS_H_
