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

#include "tempas/model.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>

namespace tempas {
namespace {

bool is_delimiter(char c) {
  return c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
         c == '\v' || c == '\f';
}

struct CivilTime {
  int year, month, day, hour, minute, second;
};

CivilTime civil(Timestamp t) {
  using namespace std::chrono;
  const sys_seconds tp{seconds{t.seconds}};
  const auto day = floor<days>(tp);
  const year_month_day ymd{day};
  const hh_mm_ss hms{tp - day};
  return {static_cast<int>(ymd.year()), static_cast<int>(unsigned(ymd.month())),
          static_cast<int>(unsigned(ymd.day())), static_cast<int>(hms.hours().count()),
          static_cast<int>(hms.minutes().count()),
          static_cast<int>(hms.seconds().count())};
}

}  // namespace

std::optional<Tag> Tag::normalize(std::string_view raw) {
  while (!raw.empty() && is_delimiter(raw.front())) raw.remove_prefix(1);
  while (!raw.empty() && is_delimiter(raw.back())) raw.remove_suffix(1);
  if (raw.empty()) return std::nullopt;
  std::string text(raw);
  for (char& c : text) {
    if (is_delimiter(c)) return std::nullopt;
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return Tag(Trusted{}, std::move(text));
}

Tag::Tag(std::string_view raw) {
  auto tag = normalize(raw);
  if (!tag) throw InvalidArgument("invalid tag '" + std::string(raw) + "'");
  text_ = std::move(tag->text_);
}

SiteUrl::SiteUrl(std::string_view text) : text_(text) {
  if (text_.empty()) throw InvalidArgument("empty url");
  if (text_.find('\t') != std::string::npos) {
    throw InvalidArgument("url contains a tab character");
  }
}

std::string Month::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
  return buf;
}

Month Month::parse(std::string_view text) {
  auto fail = [&] {
    return InvalidArgument("bad month '" + std::string(text) + "', expected YYYY-MM");
  };
  if (text.size() != 7 || text[4] != '-') throw fail();
  for (std::size_t i : {0, 1, 2, 3, 5, 6}) {
    if (text[i] < '0' || text[i] > '9') throw fail();
  }
  int year = 0, month = 0;
  auto [p1, e1] = std::from_chars(text.data(), text.data() + 4, year);
  auto [p2, e2] = std::from_chars(text.data() + 5, text.data() + 7, month);
  if (e1 != std::errc{} || p1 != text.data() + 4 || e2 != std::errc{} ||
      p2 != text.data() + 7 || month < 1 || month > 12) {
    throw fail();
  }
  return Month{year, month};
}

TimePeriod::TimePeriod(Month start, Month end) : start_(start), end_(end) {
  if (start.month < 1 || start.month > 12 || end.month < 1 || end.month > 12) {
    throw InvalidArgument("month out of range");
  }
  if (end < start) {
    throw InvalidArgument("period start " + start.to_string() + " is after end " +
                          end.to_string());
  }
}

void canonicalize(std::vector<Tag>& tags) {
  std::sort(tags.begin(), tags.end());
  tags.erase(std::unique(tags.begin(), tags.end()), tags.end());
}

Record::Record(SiteUrl url_, Timestamp time_, std::vector<Tag> tags_)
    : url(std::move(url_)), time(time_), tags(std::move(tags_)) {
  if (time.seconds < 0) throw InvalidArgument("negative timestamp");
  canonicalize(tags);
  if (tags.empty()) throw InvalidArgument("record without tags");
}

Query::Query(std::vector<Tag> tags_, TimePeriod period_)
    : tags(std::move(tags_)), period(period_) {
  canonicalize(tags);
}

Month month_of(Timestamp t) {
  const CivilTime c = civil(t);
  return Month{c.year, c.month};
}

std::vector<Month> months_in(const TimePeriod& p) {
  std::vector<Month> out;
  out.reserve(p.end().index() - p.start().index() + 1);
  for (std::uint32_t i = p.start().index(); i <= p.end().index(); ++i) {
    out.push_back(Month::from_index(i));
  }
  return out;
}

bool record_in_period(const Record& r, const TimePeriod& p) {
  return p.contains(month_of(r.time));
}

std::string compact_utc(Timestamp t) {
  const CivilTime c = civil(t);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d%02d%02d%02d%02d%02d", c.year, c.month, c.day,
                c.hour, c.minute, c.second);
  return buf;
}

std::string iso_utc(Timestamp t) {
  const CivilTime c = civil(t);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", c.year, c.month,
                c.day, c.hour, c.minute, c.second);
  return buf;
}

}  // namespace tempas
