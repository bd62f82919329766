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

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tempas {

// Thrown when a value violates a domain invariant (bad month text, empty
// tag, inverted period, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A normalized tag: non-empty, lowercase, no whitespace or commas.
class Tag {
 public:
  // Trims and lowercases `raw`. Returns nullopt if nothing is left or the
  // result still contains a delimiter character.
  static std::optional<Tag> normalize(std::string_view raw);

  // Throws InvalidArgument if `raw` does not normalize.
  explicit Tag(std::string_view raw);

  const std::string& text() const noexcept { return text_; }

  auto operator<=>(const Tag&) const = default;

 private:
  struct Trusted {};
  Tag(Trusted, std::string text) : text_(std::move(text)) {}

  std::string text_;
};

// Website URL, kept verbatim from the dataset.
class SiteUrl {
 public:
  explicit SiteUrl(std::string_view text);

  const std::string& text() const noexcept { return text_; }

  auto operator<=>(const SiteUrl&) const = default;

 private:
  std::string text_;
};

// Unix epoch seconds, UTC.
struct Timestamp {
  std::int64_t seconds = 0;

  auto operator<=>(const Timestamp&) const = default;
};

// A UTC calendar month. Ordered lexicographically by (year, month).
struct Month {
  int year = 1970;
  int month = 1;  // 1..12

  auto operator<=>(const Month&) const = default;

  // Months since 0000-01; strictly monotone in (year, month).
  std::uint32_t index() const noexcept {
    return static_cast<std::uint32_t>(year * 12 + (month - 1));
  }
  static Month from_index(std::uint32_t index) noexcept {
    return Month{static_cast<int>(index / 12), static_cast<int>(index % 12) + 1};
  }

  // "YYYY-MM".
  std::string to_string() const;
  // Parses "YYYY-MM"; throws InvalidArgument on anything else.
  static Month parse(std::string_view text);
};

// Inclusive range of whole months.
class TimePeriod {
 public:
  TimePeriod(Month start, Month end);

  Month start() const noexcept { return start_; }
  Month end() const noexcept { return end_; }

  bool contains(Month m) const noexcept { return start_ <= m && m <= end_; }

  auto operator<=>(const TimePeriod&) const = default;

 private:
  Month start_;
  Month end_;
};

// One bookmarking event: a version of `url` at `time`. Tags are sorted and
// unique.
struct Record {
  SiteUrl url;
  Timestamp time;
  std::vector<Tag> tags;

  Record(SiteUrl url, Timestamp time, std::vector<Tag> tags);

  bool operator==(const Record&) const = default;
};

struct Query {
  std::vector<Tag> tags;  // sorted, unique; may be empty
  TimePeriod period;

  Query(std::vector<Tag> tags, TimePeriod period);
};

// Sorts and deduplicates a tag list in place.
void canonicalize(std::vector<Tag>& tags);

Month month_of(Timestamp t);
std::vector<Month> months_in(const TimePeriod& p);
bool record_in_period(const Record& r, const TimePeriod& p);

// "YYYYMMDDhhmmss" in UTC.
std::string compact_utc(Timestamp t);
// "YYYY-MM-DDThh:mm:ssZ".
std::string iso_utc(Timestamp t);

}  // namespace tempas
