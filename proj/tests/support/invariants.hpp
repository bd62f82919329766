// Copyright 2026 The Tempas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Structural checks over an opened index. Each returns an empty string on
// success and a description of the first violation otherwise.

#pragma once

#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "oracle.hpp"
#include "tempas/index.hpp"

namespace tempas::testing {

inline std::vector<Month> indexed_months(const IndexSet& index) {
  const auto& meta = index.meta();
  if (!meta.month_min) return {};
  return months_in(TimePeriod(*meta.month_min, *meta.month_max));
}

// Ids are dense, alphabetical and invertible.
inline std::string check_id_bijection(const IndexSet& index) {
  const auto& meta = index.meta();
  for (std::uint32_t i = 0; i < meta.tag_count; ++i) {
    const Tag t = index.resolve_tag(TagId{i});
    const auto back = index.tag_id(t);
    if (!back || back->value != i) return "tag id " + std::to_string(i) + " does not round-trip";
    if (i > 0 && !(index.resolve_tag(TagId{i - 1}) < t)) {
      return "tag ids not in lexicographic order at " + std::to_string(i);
    }
  }
  for (std::uint32_t i = 0; i < meta.url_count; ++i) {
    const SiteUrl u = index.resolve_url(UrlId{i});
    const auto back = index.url_id(u);
    if (!back || back->value != i) return "url id " + std::to_string(i) + " does not round-trip";
    if (i > 0 && !(index.resolve_url(UrlId{i - 1}) < u)) {
      return "url ids not in lexicographic order at " + std::to_string(i);
    }
  }
  return {};
}

// tag_tag symmetry, month/year totals, tag_url sums against month_tag, and
// url_tag_freq against url_tag.
inline std::string check_consistency(const IndexSet& index) {
  const auto& meta = index.meta();
  const auto months = indexed_months(index);
  std::map<int, std::map<std::uint32_t, std::uint64_t>> year_sums;
  for (Month m : months) {
    std::map<std::uint32_t, std::uint64_t> month_totals;
    for (const TagCount& c : index.lookup_month_tag(m)) {
      month_totals[c.tag.value] = c.count;
      year_sums[m.year][c.tag.value] += c.count;
    }
    for (std::uint32_t a = 0; a < meta.tag_count; ++a) {
      for (const TagCount& c : index.lookup_tag_tag(TagId{a}, m)) {
        if (c.tag.value == a) return "self pair in tag_tag for tag " + std::to_string(a);
        bool mirrored = false;
        for (const TagCount& back : index.lookup_tag_tag(c.tag, m)) {
          if (back.tag.value == a) mirrored = back.count == c.count;
        }
        if (!mirrored) {
          return "tag_tag asymmetric for (" + std::to_string(a) + ", " +
                 std::to_string(c.tag.value) + ") in " + m.to_string();
        }
      }
      std::uint64_t url_sum = 0;
      for (const UrlCount& c : index.lookup_tag_url(TagId{a}, m)) url_sum += c.count;
      const auto it = month_totals.find(a);
      const std::uint64_t expected = it == month_totals.end() ? 0 : it->second;
      if (url_sum != expected) {
        return "tag_url sum " + std::to_string(url_sum) + " != month_tag " +
               std::to_string(expected) + " for tag " + std::to_string(a) + " in " +
               m.to_string();
      }
    }
    for (std::uint32_t u = 0; u < meta.url_count; ++u) {
      const auto stamps = index.lookup_url_tag(UrlId{u}, m);
      const auto freq = index.lookup_url_tag_freq(UrlId{u}, m);
      if (stamps.size() != freq.size()) return "url_tag_freq size mismatch in " + m.to_string();
      for (std::size_t i = 0; i < stamps.size(); ++i) {
        if (stamps[i].tag != freq[i].tag || stamps[i].times.size() != freq[i].versions ||
            freq[i].taggings < freq[i].versions) {
          return "url_tag_freq disagrees with url_tag for url " + std::to_string(u);
        }
        for (Timestamp t : stamps[i].times) {
          if (month_of(t) != m) return "url_tag timestamp outside its month";
        }
      }
    }
  }
  for (const auto& [year, sums] : year_sums) {
    std::map<std::uint32_t, std::uint64_t> stored;
    for (const TagCount& c : index.lookup_year_tag(year)) stored[c.tag.value] = c.count;
    if (stored != sums) return "year_tag " + std::to_string(year) + " != sum of months";
  }
  return {};
}

// Every stored posting list equals a brute-force recount of the records.
inline std::string check_against_records(const IndexSet& index,
                                         const std::vector<Record>& records) {
  using Key = std::tuple<std::string, int, int>;  // text, year, month
  std::map<Key, std::map<std::string, std::uint64_t>> tag_tag, tag_url, month_tag_by;
  std::map<Key, std::map<std::string, std::set<std::int64_t>>> url_tag;
  std::set<std::string> all_tags, all_urls;
  for (const Record& r : records) {
    const auto [y, m] = oracle_month(r.time.seconds);
    all_urls.insert(r.url.text());
    for (const Tag& a : r.tags) {
      all_tags.insert(a.text());
      month_tag_by[{"", y, m}][a.text()] += 1;
      tag_url[{a.text(), y, m}][r.url.text()] += 1;
      url_tag[{r.url.text(), y, m}][a.text()].insert(r.time.seconds);
      for (const Tag& b : r.tags) {
        if (a != b) tag_tag[{a.text(), y, m}][b.text()] += 1;
      }
    }
  }
  const auto& meta = index.meta();
  if (meta.record_count != records.size() || meta.tag_count != all_tags.size() ||
      meta.url_count != all_urls.size()) {
    return "meta counts differ from the records";
  }
  std::ostringstream err;
  auto tag_text = [&](TagId id) { return index.resolve_tag(id).text(); };
  for (Month m : indexed_months(index)) {
    std::map<std::string, std::uint64_t> got_month;
    for (const TagCount& c : index.lookup_month_tag(m)) got_month[tag_text(c.tag)] = c.count;
    if (got_month != month_tag_by[{"", m.year, m.month}]) return "month_tag " + m.to_string();
    for (const std::string& t : all_tags) {
      const TagId id = *index.tag_id(Tag(t));
      std::map<std::string, std::uint64_t> got_tt, got_tu;
      for (const TagCount& c : index.lookup_tag_tag(id, m)) got_tt[tag_text(c.tag)] = c.count;
      for (const UrlCount& c : index.lookup_tag_url(id, m)) {
        got_tu[index.resolve_url(c.url).text()] = c.count;
      }
      if (got_tt != tag_tag[{t, m.year, m.month}]) return "tag_tag " + t + " " + m.to_string();
      if (got_tu != tag_url[{t, m.year, m.month}]) return "tag_url " + t + " " + m.to_string();
    }
    for (const std::string& u : all_urls) {
      std::map<std::string, std::set<std::int64_t>> got;
      for (const TagTimestamps& e : index.lookup_url_tag(*index.url_id(SiteUrl(u)), m)) {
        for (Timestamp t : e.times) got[tag_text(e.tag)].insert(t.seconds);
      }
      if (got != url_tag[{u, m.year, m.month}]) return "url_tag " + u + " " + m.to_string();
    }
  }
  return {};
}

}  // namespace tempas::testing
