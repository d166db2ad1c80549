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

#ifndef REVIBRANCH_GENERATORS_H_
#define REVIBRANCH_GENERATORS_H_

#include <cstdint>
#include <string>

#include "revibranch/milp.h"

namespace revibranch {

enum class Family { kSetCovering, kCombinatorialAuction, kFacilityLocation };

std::string family_name(Family family);
Family parse_family(const std::string& name);

// Binary set covering. Row i reads -sum_{j in S_i} x_j <= -1. Each row
// draws its support with Bernoulli(density) per column and is resampled
// until it has at least two entries. Costs are integers in [1, 100].
MilpInstance generate_set_covering(int rows, int cols, double density,
                                   uint64_t seed);

// Winner determination: one binary per bid, one "<= 1" packing row per item
// that appears in some bundle. Bundles hold 2-4 distinct items (capped at
// `items`); integer prices are the bundle size times a U(8, 12) unit price.
// The objective stores negated prices.
MilpInstance generate_combinatorial_auction(int items, int bids, uint64_t seed);

// Capacitated facility location with binary open variables y_f (columns
// 0..F-1) and continuous assignment fractions x_fc in [0, 1] (column
// F + f*C + c). Total capacity is at least 1.2x total demand.
MilpInstance generate_facility_location(int facilities, int customers,
                                        uint64_t seed);

// A family plus its two size parameters: rows x cols for set covering,
// items x bids for auctions, facilities x customers for facility location.
// density only applies to set covering.
struct InstanceSpec {
  Family family = Family::kSetCovering;
  int size1 = 20;
  int size2 = 40;
  double density = 0.05;

  bool operator==(const InstanceSpec&) const = default;
};

MilpInstance generate_instance(const InstanceSpec& spec, uint64_t seed);
std::string describe(const InstanceSpec& spec);

}  // namespace revibranch

#endif  // REVIBRANCH_GENERATORS_H_
