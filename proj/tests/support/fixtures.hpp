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

// Shared test fixtures: the five-record corpus F1, temporary directories and
// a random corpus generator.

#pragma once

#include <stdlib.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tempas/ingest.hpp"
#include "tempas/model.hpp"

namespace tempas::testing {

// Midnight UTC timestamps, checked with `date -u -d <day> +%s`.
inline constexpr std::int64_t kR1 = 1199491200;  // 2008-01-05
inline constexpr std::int64_t kR2 = 1202601600;  // 2008-02-10
inline constexpr std::int64_t kR3 = 1200787200;  // 2008-01-20
inline constexpr std::int64_t kR4 = 1235865600;  // 2009-03-01
inline constexpr std::int64_t kR5 = 1201219200;  // 2008-01-25

inline std::vector<Tag> tags(std::initializer_list<const char*> texts) {
  std::vector<Tag> out;
  for (const char* t : texts) out.emplace_back(t);
  return out;
}

inline Record make_record(const char* url, std::int64_t t,
                          std::initializer_list<const char*> texts) {
  return Record(SiteUrl(url), Timestamp{t}, tags(texts));
}

inline std::vector<Record> f1_records() {
  return {
      make_record("http://a.com/", kR1, {"obama", "election"}),
      make_record("http://a.com/", kR2, {"obama", "politics"}),
      make_record("http://b.com/", kR3, {"election", "news"}),
      make_record("http://a.com/", kR4, {"obama"}),
      make_record("http://c.com/", kR5, {"obama", "election", "news", "blog"}),
  };
}

inline TimePeriod period(const char* from, const char* to) {
  return TimePeriod(Month::parse(from), Month::parse(to));
}

class TempDir {
 public:
  TempDir() {
    std::string pattern = (std::filesystem::temp_directory_path() / "tempas-test-XXXXXX").string();
    if (!::mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

struct CorpusShape {
  std::size_t records = 1000;
  std::size_t tags = 50;
  std::size_t urls = 200;
  int months = 36;
  Month first{2006, 1};
  // Probability that a record reuses the (url, time) of an earlier record.
  double same_second = 0.03;
};

// Random corpus with skewed tag popularity so that co-occurrences are dense
// enough to make multi-tag queries non-trivial.
inline std::vector<Record> random_corpus(std::mt19937_64& rng, const CorpusShape& shape) {
  std::vector<std::string> vocab;
  std::set<std::string> seen;
  std::uniform_int_distribution<int> len(2, 7);
  std::uniform_int_distribution<int> letter('a', 'z');
  while (vocab.size() < shape.tags) {
    std::string w;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) w.push_back(static_cast<char>(letter(rng)));
    if (seen.insert(w).second) vocab.push_back(w);
  }
  std::vector<std::string> urls;
  for (std::size_t i = 0; i < shape.urls; ++i) {
    urls.push_back("http://site" + std::to_string(rng() % 100000) + "-" + std::to_string(i) +
                   ".example/p" + std::to_string(i % 7));
  }

  std::vector<double> weights;
  for (std::size_t i = 0; i < vocab.size(); ++i) weights.push_back(1.0 / (1.0 + i));
  std::discrete_distribution<std::size_t> pick_tag(weights.begin(), weights.end());
  std::vector<double> url_weights;
  for (std::size_t i = 0; i < urls.size(); ++i) url_weights.push_back(1.0 / (1.0 + 0.2 * i));
  std::discrete_distribution<std::size_t> pick_url(url_weights.begin(), url_weights.end());
  std::uniform_int_distribution<int> pick_month(0, shape.months - 1);
  std::uniform_int_distribution<int> tag_count(1, 5);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  std::vector<Record> out;
  out.reserve(shape.records);
  for (std::size_t r = 0; r < shape.records; ++r) {
    std::vector<Tag> tags;
    const int k = tag_count(rng);
    for (int i = 0; i < k; ++i) tags.emplace_back(vocab[pick_tag(rng)]);

    if (!out.empty() && coin(rng) < shape.same_second) {
      const Record& prev = out[rng() % out.size()];
      out.emplace_back(prev.url, prev.time, std::move(tags));
      continue;
    }
    const Month m = Month::from_index(shape.first.index() + static_cast<std::uint32_t>(pick_month(rng)));
    // Days 1..28 keep every month valid; seconds cover the whole day.
    const std::int64_t day = static_cast<std::int64_t>(rng() % 28);
    const std::int64_t second = static_cast<std::int64_t>(rng() % 86400);
    // Midnight of the first of the month via the days-from-civil formula.
    const int y = m.month <= 2 ? m.year - 1 : m.year;
    const int era = y / 400;
    const int yoe = y - era * 400;
    const int mp = (m.month + 9) % 12;
    const int doy = (153 * mp + 2) / 5;
    const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    const std::int64_t days = static_cast<std::int64_t>(era) * 146097 + doe - 719468;
    out.emplace_back(SiteUrl(urls[pick_url(rng)]), Timestamp{(days + day) * 86400 + second},
                     std::move(tags));
  }
  return out;
}

// Random subset of the corpus vocabulary, size 1..max_size.
inline std::vector<Tag> random_query_tags(std::mt19937_64& rng, const std::vector<Record>& corpus,
                                          std::size_t max_size) {
  std::vector<Tag> out;
  const std::size_t n = 1 + rng() % max_size;
  for (std::size_t i = 0; i < n; ++i) {
    const Record& r = corpus[rng() % corpus.size()];
    out.push_back(r.tags[rng() % r.tags.size()]);
  }
  canonicalize(out);
  return out;
}

inline TimePeriod random_period(std::mt19937_64& rng, const CorpusShape& shape) {
  const std::uint32_t base = shape.first.index();
  // Slightly wider than the data so empty edges are exercised.
  const std::uint32_t a = base - 2 + static_cast<std::uint32_t>(rng() % (shape.months + 4));
  const std::uint32_t b = base - 2 + static_cast<std::uint32_t>(rng() % (shape.months + 4));
  return TimePeriod(Month::from_index(std::min(a, b)), Month::from_index(std::max(a, b)));
}

}  // namespace tempas::testing
