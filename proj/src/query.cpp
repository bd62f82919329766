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

#include "tempas/query.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace tempas {
namespace {

// (id, score) accumulator, sorted by id.
using Scored = std::vector<std::pair<std::uint32_t, std::uint64_t>>;

template <typename Posting, typename IdOf>
Scored sum_by_id(std::vector<Posting>& all, IdOf id_of) {
  std::sort(all.begin(), all.end(),
            [&](const Posting& a, const Posting& b) { return id_of(a) < id_of(b); });
  Scored out;
  for (const Posting& p : all) {
    if (!out.empty() && out.back().first == id_of(p)) {
      out.back().second += p.count;
    } else {
      out.emplace_back(id_of(p), p.count);
    }
  }
  return out;
}

// Keeps ids present in both lists, adding their scores.
Scored intersect(const Scored& a, const Scored& b) {
  Scored out;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      out.emplace_back(i->first, i->second + j->second);
      ++i;
      ++j;
    }
  }
  return out;
}

// Score desc, then id asc. Ids follow text order, so this is also the
// text tie-break. Returns the [offset, offset + limit) window.
Scored top_window(Scored scored, std::size_t offset, std::size_t limit) {
  auto better = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  if (offset >= scored.size() || limit == 0) return {};
  const std::size_t end = std::min(scored.size(), offset + std::min(limit, scored.size()));
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(end),
                    scored.end(), better);
  return Scored(scored.begin() + static_cast<std::ptrdiff_t>(offset),
                scored.begin() + static_cast<std::ptrdiff_t>(end));
}

}  // namespace

QueryEngine::QueryEngine(std::shared_ptr<const IndexSet> index, EngineDefaults defaults)
    : index_(std::move(index)), defaults_(defaults) {}

std::vector<RankedTag> QueryEngine::retrieve_tags(const Query& q, std::size_t limit) const {
  if (q.tags.empty() || limit == 0) return {};
  std::vector<std::uint32_t> query_ids;
  for (const Tag& t : q.tags) {
    auto id = index_->tag_id(t);
    if (!id) return {};
    query_ids.push_back(id->value);
  }

  const std::vector<Month> months = months_in(q.period);
  Scored candidates;
  for (std::size_t i = 0; i < query_ids.size(); ++i) {
    std::vector<TagCount> all;
    for (Month m : months) {
      auto list = index_->lookup_tag_tag(TagId{query_ids[i]}, m);
      all.insert(all.end(), list.begin(), list.end());
    }
    Scored per_tag = sum_by_id(all, [](const TagCount& c) { return c.tag.value; });
    candidates = i == 0 ? std::move(per_tag) : intersect(candidates, per_tag);
    if (candidates.empty()) return {};
  }
  std::erase_if(candidates, [&](const auto& c) {
    return std::binary_search(query_ids.begin(), query_ids.end(), c.first);
  });

  std::vector<RankedTag> out;
  for (const auto& [id, score] : top_window(std::move(candidates), 0, limit)) {
    out.push_back({index_->resolve_tag(TagId{id}), score});
  }
  return out;
}

std::vector<RankedTag> QueryEngine::explore_tags(const TimePeriod& p, std::size_t limit) const {
  if (limit == 0) return {};
  std::vector<TagCount> all;
  const std::uint32_t last = p.end().index();
  for (std::uint32_t i = p.start().index(); i <= last;) {
    const Month m = Month::from_index(i);
    std::vector<TagCount> list;
    if (m.month == 1 && i + 11 <= last) {
      list = index_->lookup_year_tag(m.year);
      i += 12;
    } else {
      list = index_->lookup_month_tag(m);
      i += 1;
    }
    all.insert(all.end(), list.begin(), list.end());
  }
  Scored totals = sum_by_id(all, [](const TagCount& c) { return c.tag.value; });

  std::vector<RankedTag> out;
  for (const auto& [id, score] : top_window(std::move(totals), 0, limit)) {
    out.push_back({index_->resolve_tag(TagId{id}), score});
  }
  return out;
}

std::vector<RankedSite> QueryEngine::retrieve_sites(const Query& q, std::size_t limit,
                                                    std::size_t offset) const {
  if (q.tags.empty() || limit == 0) return {};
  std::vector<TagId> query_ids;
  for (const Tag& t : q.tags) {
    auto id = index_->tag_id(t);
    if (!id) return {};
    query_ids.push_back(*id);
  }

  const std::vector<Month> months = months_in(q.period);
  Scored sites;
  for (std::size_t i = 0; i < query_ids.size(); ++i) {
    std::vector<UrlCount> all;
    for (Month m : months) {
      auto list = index_->lookup_tag_url(query_ids[i], m);
      all.insert(all.end(), list.begin(), list.end());
    }
    Scored per_tag = sum_by_id(all, [](const UrlCount& c) { return c.url.value; });
    sites = i == 0 ? std::move(per_tag) : intersect(sites, per_tag);
    if (sites.empty()) return {};
  }

  std::vector<RankedSite> out;
  for (const auto& [id, score] : top_window(std::move(sites), offset, limit)) {
    out.push_back({index_->resolve_url(UrlId{id}), score,
                   title_for(UrlId{id}, months, defaults_.title_length)});
  }
  return out;
}

std::vector<RankedVersion> QueryEngine::retrieve_versions(const SiteUrl& site,
                                                          const Query& q) const {
  auto url = index_->url_id(site);
  if (!url) return {};
  std::vector<std::uint32_t> query_ids;
  for (const Tag& t : q.tags) {
    if (auto id = index_->tag_id(t)) query_ids.push_back(id->value);
  }
  if (query_ids.empty()) return {};
  std::sort(query_ids.begin(), query_ids.end());

  // A timestamp belongs to exactly one month, so grouping per month is
  // enough to rebuild each version's tag set.
  std::map<std::int64_t, std::vector<std::uint32_t>> by_time;
  for (Month m : months_in(q.period)) {
    for (const TagTimestamps& entry : index_->lookup_url_tag(*url, m)) {
      for (Timestamp t : entry.times) by_time[t.seconds].push_back(entry.tag.value);
    }
  }

  struct Candidate {
    std::int64_t time;
    std::vector<std::uint32_t> tags;
    std::uint32_t overlap;
  };
  std::vector<Candidate> candidates;
  for (auto& [time, tags] : by_time) {
    std::sort(tags.begin(), tags.end());
    std::uint32_t overlap = 0;
    for (std::uint32_t t : tags) {
      if (std::binary_search(query_ids.begin(), query_ids.end(), t)) ++overlap;
    }
    if (overlap > 0) candidates.push_back({time, std::move(tags), overlap});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.tags.size() != b.tags.size()) return a.tags.size() < b.tags.size();
    return a.time > b.time;
  });

  std::vector<RankedVersion> out;
  out.reserve(candidates.size());
  for (const Candidate& c : candidates) {
    RankedVersion v;
    v.time = Timestamp{c.time};
    v.overlap = c.overlap;
    v.total_tags = static_cast<std::uint32_t>(c.tags.size());
    for (std::uint32_t t : c.tags) v.tags.push_back(index_->resolve_tag(TagId{t}));
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Tag> QueryEngine::title_for(UrlId url, const std::vector<Month>& months,
                                        std::size_t k) const {
  std::vector<TagCount> all;
  for (Month m : months) {
    for (const TagFrequency& f : index_->lookup_url_tag_freq(url, m)) {
      all.push_back({f.tag, f.versions});
    }
  }
  Scored freq = sum_by_id(all, [](const TagCount& c) { return c.tag.value; });
  std::vector<Tag> title;
  for (const auto& [id, count] : top_window(std::move(freq), 0, k)) {
    title.push_back(index_->resolve_tag(TagId{id}));
  }
  return title;
}

std::vector<Tag> QueryEngine::generate_title(const SiteUrl& site, const TimePeriod& p,
                                             std::size_t k) const {
  auto url = index_->url_id(site);
  if (!url) return {};
  return title_for(*url, months_in(p), k);
}

double QueryEngine::score_site_pmi(const SiteUrl& site, const Query& q) const {
  auto url = index_->url_id(site);
  if (!url) return 0.0;
  const std::vector<Month> months = months_in(q.period);

  std::uint64_t total = 0;
  std::unordered_map<std::uint32_t, std::uint64_t> tag_totals;
  for (Month m : months) {
    for (const TagCount& c : index_->lookup_month_tag(m)) {
      total += c.count;
      tag_totals[c.tag.value] += c.count;
    }
  }
  std::uint64_t site_total = 0;
  std::unordered_map<std::uint32_t, std::uint64_t> site_tag;
  for (Month m : months) {
    for (const TagFrequency& f : index_->lookup_url_tag_freq(*url, m)) {
      site_total += f.taggings;
      site_tag[f.tag.value] += f.taggings;
    }
  }
  if (site_total == 0) return 0.0;

  double pmi = 0.0;
  for (const Tag& t : q.tags) {
    auto id = index_->tag_id(t);
    if (!id) continue;
    const auto st = site_tag.find(id->value);
    if (st == site_tag.end() || st->second == 0) continue;
    const double joint = static_cast<double>(total) * static_cast<double>(st->second);
    const double marginals = static_cast<double>(site_total) *
                             static_cast<double>(tag_totals.at(id->value));
    pmi += std::log(joint / marginals);
  }
  return static_cast<double>(site_total) * pmi;
}

std::string wayback_url(const SiteUrl& site, Timestamp t) {
  return "https://web.archive.org/web/" + compact_utc(t) + "/" + site.text();
}

}  // namespace tempas
