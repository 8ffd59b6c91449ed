/* Copyright 2026 The Partlift Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Deliberately naive reimplementations used as oracles by the tests. They
// work on std::set and plain loops so they share no code with the library.

#ifndef PARTLIFT_TESTS_REFERENCE_HPP_
#define PARTLIFT_TESTS_REFERENCE_HPP_

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

namespace reference {

using Set = std::set<std::uint32_t>;

inline double iou(const Set& a, const Set& b) {
  std::size_t inter = 0;
  for (auto v : a) inter += b.count(v);
  const std::size_t uni = a.size() + b.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Sort by size (larger first, earlier first on ties), fold into the first
// accumulated set above the threshold, then give shared points to later sets.
inline std::vector<Set> merge(const std::vector<Set>& groups, double t) {
  std::vector<std::pair<std::size_t, std::size_t>> order;  // (-size, index)
  for (std::size_t i = 0; i < groups.size(); ++i) order.push_back({i, i});
  for (std::size_t i = 1; i < order.size(); ++i) {
    // insertion sort keeps it stable
    for (std::size_t j = i; j > 0; --j) {
      if (groups[order[j].first].size() > groups[order[j - 1].first].size()) {
        std::swap(order[j], order[j - 1]);
      } else {
        break;
      }
    }
  }
  std::vector<Set> b;
  for (auto [g, unused] : order) {
    (void)unused;
    bool flag = false;
    for (Set& m : b) {
      if (iou(groups[g], m) > t) {
        m.insert(groups[g].begin(), groups[g].end());
        flag = true;
        break;
      }
    }
    if (!flag) b.push_back(groups[g]);
  }
  std::vector<Set> c;
  for (const Set& m : b) {
    for (Set& p : c) {
      for (auto v : m) p.erase(v);
    }
    c.push_back(m);
  }
  std::vector<Set> out;
  for (Set& p : c) {
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

// Row-wise suppression written with the ratio, not integers.
inline std::vector<double> cnvp_row(const std::vector<long>& row) {
  long mx = 0;
  for (long v : row) mx = std::max(mx, v);
  std::vector<double> out(row.size(), 0.0);
  if (mx == 0) return out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    const double r = static_cast<double>(row[i]) / static_cast<double>(mx);
    if (r == 1.0) {
      out[i] = static_cast<double>(row[i]);
    } else if (r >= 0.5) {
      out[i] = 0.5 * static_cast<double>(row[i]);
    }
  }
  return out;
}

}  // namespace reference

#endif  // PARTLIFT_TESTS_REFERENCE_HPP_
