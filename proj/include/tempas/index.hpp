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

// Month-partitioned tag/url index.
//
// An index directory holds a MANIFEST plus one file per mapping:
//
//   id_tag        TagId              -> tag text (alphabetical ids)
//   id_url        UrlId              -> url text (alphabetical ids)
//   tag_tag       (TagId, Month)     -> [(TagId, co-occurrence count)]
//   year_tag      year               -> [(TagId, occurrence count)]
//   month_tag     Month              -> [(TagId, occurrence count)]
//   tag_url       (TagId, Month)     -> [(UrlId, tagging count)]
//   url_tag       (UrlId, Month)     -> [(TagId, {timestamps})]
//   url_tag_freq  (UrlId, Month)     -> [(TagId, taggings, versions)]
//
// url_tag_freq is derived from url_tag: `versions` is the size of the
// timestamp set and `taggings` the number of source records. It lets site
// ranking build titles without touching version timestamps.
//
// Every posting list is sorted by id. An opened IndexSet is immutable and
// safe for concurrent readers.

#pragma once

#include <atomic>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tempas/model.hpp"

namespace tempas {

struct TagId {
  std::uint32_t value = 0;
  auto operator<=>(const TagId&) const = default;
};

struct UrlId {
  std::uint32_t value = 0;
  auto operator<=>(const UrlId&) const = default;
};

struct TagCount {
  TagId tag;
  std::uint32_t count = 0;
  bool operator==(const TagCount&) const = default;
};

struct UrlCount {
  UrlId url;
  std::uint32_t count = 0;
  bool operator==(const UrlCount&) const = default;
};

struct TagTimestamps {
  TagId tag;
  std::vector<Timestamp> times;  // ascending, unique
  bool operator==(const TagTimestamps&) const = default;
};

struct TagFrequency {
  TagId tag;
  std::uint32_t taggings = 0;
  std::uint32_t versions = 0;
  bool operator==(const TagFrequency&) const = default;
};

enum class Mapping : std::uint8_t {
  kIdTag = 1,
  kIdUrl = 2,
  kTagTag = 3,
  kYearTag = 4,
  kMonthTag = 5,
  kTagUrl = 6,
  kUrlTag = 7,
  kUrlTagFreq = 8,
};

inline constexpr Mapping kAllMappings[] = {
    Mapping::kIdTag,    Mapping::kIdUrl,  Mapping::kTagTag, Mapping::kYearTag,
    Mapping::kMonthTag, Mapping::kTagUrl, Mapping::kUrlTag, Mapping::kUrlTagFreq};

// File name inside the index directory, e.g. "tag_tag.bin".
std::string mapping_file_name(Mapping m);

struct MappingInfo {
  Mapping mapping{};
  std::string file;
  std::uint64_t entries = 0;
  std::uint64_t bytes = 0;
  std::uint32_t crc32 = 0;
  bool operator==(const MappingInfo&) const = default;
};

struct IndexMeta {
  std::uint64_t record_count = 0;
  std::uint64_t tag_count = 0;
  std::uint64_t url_count = 0;
  std::optional<Month> month_min;
  std::optional<Month> month_max;
  bool operator==(const IndexMeta&) const = default;
};

struct BuildReport {
  IndexMeta meta;
  std::vector<MappingInfo> mappings;
};

// Missing, truncated or corrupt index files. The message names the file.
class IndexError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BuildOptions {
  // Upper bound on bytes held by the in-memory sort buffers; runs beyond it
  // spill to disk next to the output.
  std::size_t memory_cap = std::size_t{1} << 30;
  // Worker threads for the final merge, one mapping per worker. 0 = one per
  // mapping.
  unsigned threads = 0;
};

// Two-pass builder. add() records the vocabularies and spills the records;
// finish() assigns ids, sorts every mapping externally and writes the
// directory. The MANIFEST is written last, so a failed build never looks
// complete.
class IndexBuilder {
 public:
  explicit IndexBuilder(std::filesystem::path out_dir, BuildOptions options = {});
  ~IndexBuilder();
  IndexBuilder(const IndexBuilder&) = delete;
  IndexBuilder& operator=(const IndexBuilder&) = delete;

  void add(const Record& record);
  BuildReport finish();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

BuildReport build_index(std::span<const Record> records,
                        const std::filesystem::path& out_dir,
                        BuildOptions options = {});

// Per-mapping lookup counters, used to check which mappings a request path
// touches.
struct LookupCounts {
  std::uint64_t tag_tag = 0;
  std::uint64_t year_tag = 0;
  std::uint64_t month_tag = 0;
  std::uint64_t tag_url = 0;
  std::uint64_t url_tag = 0;
  std::uint64_t url_tag_freq = 0;
};

class IndexSet {
 public:
  // Verifies the manifest and every file checksum. Throws IndexError.
  static std::shared_ptr<const IndexSet> open(const std::filesystem::path& dir);

  ~IndexSet();
  IndexSet(const IndexSet&) = delete;
  IndexSet& operator=(const IndexSet&) = delete;

  const IndexMeta& meta() const noexcept;
  const std::vector<MappingInfo>& mappings() const noexcept;

  std::vector<TagCount> lookup_tag_tag(TagId tag, Month m) const;
  std::vector<UrlCount> lookup_tag_url(TagId tag, Month m) const;
  std::vector<TagTimestamps> lookup_url_tag(UrlId url, Month m) const;
  std::vector<TagFrequency> lookup_url_tag_freq(UrlId url, Month m) const;
  std::vector<TagCount> lookup_month_tag(Month m) const;
  std::vector<TagCount> lookup_year_tag(int year) const;

  // Throws IndexError for ids outside [0, count).
  Tag resolve_tag(TagId id) const;
  SiteUrl resolve_url(UrlId id) const;
  std::optional<TagId> tag_id(const Tag& tag) const;
  std::optional<UrlId> url_id(const SiteUrl& url) const;

  LookupCounts lookup_counts() const noexcept;
  void reset_lookup_counts() const noexcept;

 private:
  struct Impl;
  explicit IndexSet(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace tempas
