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

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tempas/index.hpp"
#include "tempas/model.hpp"

namespace tempas {

struct RankedTag {
  Tag tag;
  std::uint64_t score = 0;
  bool operator==(const RankedTag&) const = default;
};

struct RankedSite {
  SiteUrl url;
  std::uint64_t score = 0;
  std::vector<Tag> title;
  bool operator==(const RankedSite&) const = default;
};

struct RankedVersion {
  Timestamp time;
  std::vector<Tag> tags;  // alphabetical
  std::uint32_t overlap = 0;
  std::uint32_t total_tags = 0;
  bool operator==(const RankedVersion&) const = default;
};

struct EngineDefaults {
  std::size_t tag_limit = 50;
  std::size_t site_limit = 20;
  std::size_t title_length = 5;
};

// Ranked retrieval over an open index. Periods are whole months; a record
// belongs to a period iff its UTC month does.
//
// Ordering:
//   tags, sites  score desc, then text asc
//   versions     overlap desc, total tags asc, time desc
//   titles       version frequency desc, then tag asc
class QueryEngine {
 public:
  explicit QueryEngine(std::shared_ptr<const IndexSet> index, EngineDefaults defaults = {});

  const IndexSet& index() const noexcept { return *index_; }
  const EngineDefaults& defaults() const noexcept { return defaults_; }

  // Tags co-occurring with every query tag somewhere in the period (not
  // necessarily in the same record). Score: sum over query tags of the
  // number of records in which the tag co-occurs with that query tag. Query
  // tags themselves are never returned. Empty query tags yield [].
  std::vector<RankedTag> retrieve_tags(const Query& q, std::size_t limit) const;

  // Most used tags of the period, served from whole years where possible.
  std::vector<RankedTag> explore_tags(const TimePeriod& p, std::size_t limit) const;

  // Sites tagged with every query tag in the period. Score: sum over query
  // tags of the site's tagging counts. Titles come from url_tag_freq only.
  std::vector<RankedSite> retrieve_sites(const Query& q, std::size_t limit,
                                         std::size_t offset = 0) const;

  // Versions of `site` in the period carrying at least one query tag.
  std::vector<RankedVersion> retrieve_versions(const SiteUrl& site, const Query& q) const;

  // Up to k most frequently used tags of `site` in the period, independent of
  // any query.
  std::vector<Tag> generate_title(const SiteUrl& site, const TimePeriod& p,
                                  std::size_t k) const;

  // n(s) * sum_t ln(N * n(s,t) / (n(s) * n(t))), counts taken over the
  // period: N all taggings, n(s,t) taggings of s with t, n(s) taggings of s,
  // n(t) taggings with t. Terms with n(s,t) = 0 are skipped. Returns 0 for
  // a site with no taggings in the period.
  double score_site_pmi(const SiteUrl& site, const Query& q) const;

 private:
  std::vector<Tag> title_for(UrlId url, const std::vector<Month>& months,
                             std::size_t k) const;

  std::shared_ptr<const IndexSet> index_;
  EngineDefaults defaults_;
};

// https://web.archive.org/web/<YYYYMMDDhhmmss>/<url>
std::string wayback_url(const SiteUrl& site, Timestamp t);

}  // namespace tempas
