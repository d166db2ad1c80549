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

#include "revibranch/generators.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "revibranch/instance_io.h"
#include "revibranch/random.h"

namespace revibranch {

namespace {

constexpr int kMaxRowResamples = 1000;

std::vector<int> sample_distinct(Rng& rng, int population, int count) {
  std::vector<int> pool(population);
  std::iota(pool.begin(), pool.end(), 0);
  for (int k = 0; k < count; ++k) {
    const int pick = static_cast<int>(rng.uniform_int(k, population - 1));
    std::swap(pool[k], pool[pick]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

void make_all_integer(MilpInstance& instance, int count) {
  instance.integer_set.resize(count);
  std::iota(instance.integer_set.begin(), instance.integer_set.end(), 0);
}

}  // namespace

std::string family_name(Family family) {
  switch (family) {
    case Family::kSetCovering:
      return "setcover";
    case Family::kCombinatorialAuction:
      return "cauction";
    case Family::kFacilityLocation:
      return "facility";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  if (name == "setcover" || name == "set_covering") return Family::kSetCovering;
  if (name == "cauction" || name == "combinatorial_auction") {
    return Family::kCombinatorialAuction;
  }
  if (name == "facility" || name == "facility_location") {
    return Family::kFacilityLocation;
  }
  throw std::invalid_argument("unknown family '" + name + "'");
}

MilpInstance generate_set_covering(int rows, int cols, double density,
                                   uint64_t seed) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("set covering needs rows, cols >= 1");
  }
  if (!(density > 0.0 && density <= 1.0)) {
    throw std::invalid_argument("set covering density must be in (0, 1]");
  }
  if (cols < 2) {
    throw std::invalid_argument(
        "set covering needs at least two columns per row");
  }
  Rng rng(seed);
  MilpInstance instance;
  instance.name = "setcover-" + std::to_string(rows) + "x" +
                  std::to_string(cols) + "-d" + format_double(density) +
                  "-s" + std::to_string(seed);
  instance.objective.resize(cols);
  for (double& c : instance.objective) {
    c = static_cast<double>(rng.uniform_int(1, 100));
  }
  for (int i = 0; i < rows; ++i) {
    std::vector<int> support;
    int attempts = 0;
    do {
      if (++attempts > kMaxRowResamples) {
        throw std::invalid_argument(
            "density " + format_double(density) +
            " too low: could not give every row two entries");
      }
      support.clear();
      for (int j = 0; j < cols; ++j) {
        if (rng.bernoulli(density)) support.push_back(j);
      }
    } while (support.size() < 2);
    instance.add_row(support, std::vector<double>(support.size(), -1.0), -1.0);
  }
  instance.lower_bounds.assign(cols, 0.0);
  instance.upper_bounds.assign(cols, 1.0);
  make_all_integer(instance, cols);
  instance.validate();
  return instance;
}

MilpInstance generate_combinatorial_auction(int items, int bids,
                                            uint64_t seed) {
  if (items < 1 || bids < 1) {
    throw std::invalid_argument("combinatorial auction needs items, bids >= 1");
  }
  Rng rng(seed);
  MilpInstance instance;
  instance.name = "cauction-" + std::to_string(items) + "x" +
                  std::to_string(bids) + "-s" + std::to_string(seed);
  std::vector<std::vector<int>> bids_on_item(items);
  instance.objective.resize(bids);
  for (int b = 0; b < bids; ++b) {
    const int size =
        std::min<int>(items, static_cast<int>(rng.uniform_int(2, 4)));
    for (int item : sample_distinct(rng, items, size)) {
      bids_on_item[item].push_back(b);
    }
    const double price = std::max(1.0, std::round(size * rng.uniform(8.0, 12.0)));
    instance.objective[b] = -price;
  }
  for (int item = 0; item < items; ++item) {
    const std::vector<int>& on = bids_on_item[item];
    if (on.empty()) continue;
    instance.add_row(on, std::vector<double>(on.size(), 1.0), 1.0);
  }
  instance.lower_bounds.assign(bids, 0.0);
  instance.upper_bounds.assign(bids, 1.0);
  make_all_integer(instance, bids);
  instance.validate();
  return instance;
}

MilpInstance generate_facility_location(int facilities, int customers,
                                        uint64_t seed) {
  if (facilities < 1 || customers < 1) {
    throw std::invalid_argument(
        "facility location needs facilities, customers >= 1");
  }
  Rng rng(seed);
  const int nf = facilities;
  const int nc = customers;
  std::vector<double> fx(nf), fy(nf), cx(nc), cy(nc);
  for (int c = 0; c < nc; ++c) {
    cx[c] = rng.uniform();
    cy[c] = rng.uniform();
  }
  for (int f = 0; f < nf; ++f) {
    fx[f] = rng.uniform();
    fy[f] = rng.uniform();
  }
  std::vector<double> demand(nc), capacity(nf), fixed_cost(nf);
  for (double& d : demand) d = static_cast<double>(rng.uniform_int(5, 35));
  for (double& s : capacity) s = static_cast<double>(rng.uniform_int(10, 160));
  const double total_demand = std::accumulate(demand.begin(), demand.end(), 0.0);
  const double total_capacity =
      std::accumulate(capacity.begin(), capacity.end(), 0.0);
  if (total_capacity < 1.2 * total_demand) {
    const double factor = 1.2 * total_demand / total_capacity;
    for (double& s : capacity) s = std::ceil(s * factor);
  }
  for (int f = 0; f < nf; ++f) {
    fixed_cost[f] = std::round(rng.uniform(100.0, 110.0) * std::sqrt(capacity[f]) +
                               static_cast<double>(rng.uniform_int(0, 90)));
  }

  MilpInstance instance;
  instance.name = "facility-" + std::to_string(nf) + "x" + std::to_string(nc) +
                  "-s" + std::to_string(seed);
  const int n = nf + nf * nc;
  auto assign = [&](int f, int c) { return nf + f * nc + c; };
  instance.objective.assign(n, 0.0);
  for (int f = 0; f < nf; ++f) {
    instance.objective[f] = fixed_cost[f];
    for (int c = 0; c < nc; ++c) {
      const double dist = std::hypot(fx[f] - cx[c], fy[f] - cy[c]);
      instance.objective[assign(f, c)] = std::round(10.0 * dist * demand[c]);
    }
  }
  // Every customer fully served.
  for (int c = 0; c < nc; ++c) {
    std::vector<int> cols;
    for (int f = 0; f < nf; ++f) cols.push_back(assign(f, c));
    instance.add_row(cols, std::vector<double>(nf, -1.0), -1.0);
  }
  // Capacity of open facilities.
  for (int f = 0; f < nf; ++f) {
    std::vector<int> cols{f};
    std::vector<double> coefs{-capacity[f]};
    for (int c = 0; c < nc; ++c) {
      cols.push_back(assign(f, c));
      coefs.push_back(demand[c]);
    }
    instance.add_row(cols, coefs, 0.0);
  }
  // Open capacity covers total demand.
  {
    std::vector<int> cols(nf);
    std::iota(cols.begin(), cols.end(), 0);
    std::vector<double> coefs(nf);
    for (int f = 0; f < nf; ++f) coefs[f] = -capacity[f];
    instance.add_row(cols, coefs, -total_demand);
  }
  // x_fc <= y_f.
  for (int f = 0; f < nf; ++f) {
    for (int c = 0; c < nc; ++c) {
      instance.add_row({f, assign(f, c)}, {-1.0, 1.0}, 0.0);
    }
  }
  instance.lower_bounds.assign(n, 0.0);
  instance.upper_bounds.assign(n, 1.0);
  make_all_integer(instance, nf);
  instance.validate();
  return instance;
}

MilpInstance generate_instance(const InstanceSpec& spec, uint64_t seed) {
  switch (spec.family) {
    case Family::kSetCovering:
      return generate_set_covering(spec.size1, spec.size2, spec.density, seed);
    case Family::kCombinatorialAuction:
      return generate_combinatorial_auction(spec.size1, spec.size2, seed);
    case Family::kFacilityLocation:
      return generate_facility_location(spec.size1, spec.size2, seed);
  }
  throw std::invalid_argument("unknown family");
}

std::string describe(const InstanceSpec& spec) {
  std::string out = family_name(spec.family) + "-" + std::to_string(spec.size1) + "x" +
                    std::to_string(spec.size2);
  if (spec.family == Family::kSetCovering) out += "-d" + format_double(spec.density);
  return out;
}

}  // namespace revibranch
