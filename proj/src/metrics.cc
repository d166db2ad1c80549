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

#include "revibranch/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace revibranch {

namespace {

// Average ranks (1-based) with ties sharing the mean rank; also returns
// sum over tie groups of (t^3 - t).
std::vector<double> average_ranks(const std::vector<double>& values, double* tie_term) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  *tie_term = 0.0;
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    const double t = static_cast<double>(j - i + 1);
    *tie_term += t * t * t - t;
    i = j + 1;
  }
  return ranks;
}

double two_sided_normal_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

}  // namespace

double geometric_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("geometric_mean: no values");
  // exp(log(x)) does not round-trip exactly.
  if (values.size() == 1) return std::max(values[0], 1.0);
  double total = 0.0;
  for (double x : values) total += std::log(std::max(x, 1.0));
  return std::exp(total / static_cast<double>(values.size()));
}

double arithmetic_mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("arithmetic_mean: no values");
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double std_percent(std::span<const double> values) {
  const double mu = arithmetic_mean(values);
  if (mu == 0.0) return 0.0;
  double var = 0.0;
  for (double x : values) var += (x - mu) * (x - mu);
  var /= static_cast<double>(values.size());
  return 100.0 * std::sqrt(var) / std::abs(mu);
}

double wilcoxon_signed_rank_p(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: unpaired samples");
  std::vector<double> magnitude;
  std::vector<int> sign;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d == 0.0) continue;
    magnitude.push_back(std::abs(d));
    sign.push_back(d > 0 ? 1 : -1);
  }
  const double n = static_cast<double>(magnitude.size());
  if (n == 0) return 1.0;
  double tie_term = 0.0;
  const std::vector<double> ranks = average_ranks(magnitude, &tie_term);
  double w_plus = 0.0;
  for (size_t i = 0; i < ranks.size(); ++i) {
    if (sign[i] > 0) w_plus += ranks[i];
  }
  const double mean = n * (n + 1.0) / 4.0;
  const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) return 1.0;
  return two_sided_normal_p((w_plus - mean) / std::sqrt(var));
}

double mann_whitney_p(std::span<const double> a, std::span<const double> b) {
  const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  if (n1 == 0 || n2 == 0) throw std::invalid_argument("mann_whitney: empty sample");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  double tie_term = 0.0;
  const std::vector<double> ranks = average_ranks(pooled, &tie_term);
  double r1 = 0.0;
  for (size_t i = 0; i < a.size(); ++i) r1 += ranks[i];
  const double u = r1 - n1 * (n1 + 1.0) / 2.0;
  const double n = n1 + n2;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return 1.0;
  return two_sided_normal_p((u - n1 * n2 / 2.0) / std::sqrt(var));
}

}  // namespace revibranch
