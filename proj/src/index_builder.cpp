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

#include <algorithm>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "external_sort.hpp"
#include "index_format.hpp"
#include "tempas/index.hpp"

namespace tempas {
namespace {

using detail::Combine;
using detail::ExternalSorter;
using detail::Posting;
namespace fs = std::filesystem;

constexpr const char* kTmpDirName = ".build-tmp";
constexpr const char* kSpillName = "records.spill";

std::uint32_t to_u32(std::uint64_t v, const char* what) {
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw IndexError(std::string(what) + " overflows 32 bits");
  }
  return static_cast<std::uint32_t>(v);
}

void write_string(std::ofstream& out, std::string_view s) {
  const auto len = static_cast<std::uint32_t>(s.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

bool read_string(std::ifstream& in, std::string& s) {
  std::uint32_t len = 0;
  if (!in.read(reinterpret_cast<char*>(&len), sizeof(len))) return false;
  s.resize(len);
  return static_cast<bool>(in.read(s.data(), len));
}

// Writes sorted (key, month, item, value) postings as one entry per
// (key, month) with value = [(item u32, count u32)].
class CountListWriter {
 public:
  explicit CountListWriter(format::MappingWriter& out) : out_(out) {}

  void operator()(const Posting& p) {
    if (open_ && (p.key != key_ || p.month != month_)) flush();
    if (!open_) {
      key_ = p.key;
      month_ = p.month;
      open_ = true;
    }
    format::put_le32(value_, p.item);
    format::put_le32(value_, to_u32(static_cast<std::uint64_t>(p.value), "count"));
  }

  void flush() {
    if (!open_) return;
    out_.add(format::key_id_month(key_, Month::from_index(month_)), value_);
    value_.clear();
    open_ = false;
  }

 private:
  format::MappingWriter& out_;
  std::string value_;
  std::uint32_t key_ = 0, month_ = 0;
  bool open_ = false;
};

// month_tag postings (key unused) -> month_tag entries plus per-year totals.
class MonthYearWriter {
 public:
  MonthYearWriter(format::MappingWriter& months, format::MappingWriter& years)
      : months_(months), years_(years) {}

  void operator()(const Posting& p) {
    if (open_ && p.month != month_) flush_month();
    const int year = Month::from_index(p.month).year;
    if (!year_totals_.empty() && year != year_) flush_year();
    year_ = year;
    month_ = p.month;
    open_ = true;
    format::put_le32(value_, p.item);
    format::put_le32(value_, to_u32(static_cast<std::uint64_t>(p.value), "count"));
    year_totals_[p.item] += static_cast<std::uint64_t>(p.value);
  }

  void finish() {
    flush_month();
    flush_year();
  }

 private:
  void flush_month() {
    if (!open_) return;
    months_.add(format::key_month(Month::from_index(month_)), value_);
    value_.clear();
    open_ = false;
  }
  void flush_year() {
    if (year_totals_.empty()) return;
    std::string v;
    for (const auto& [tag, count] : year_totals_) {
      format::put_le32(v, tag);
      format::put_le32(v, to_u32(count, "year count"));
    }
    years_.add(format::key_year(year_), v);
    year_totals_.clear();
  }

  format::MappingWriter& months_;
  format::MappingWriter& years_;
  std::string value_;
  std::map<std::uint32_t, std::uint64_t> year_totals_;
  std::uint32_t month_ = 0;
  int year_ = 0;
  bool open_ = false;
};

// url_tag postings (url, month, tag, timestamp), duplicates kept. Emits the
// timestamp sets and the derived frequency list.
class UrlTagWriter {
 public:
  UrlTagWriter(format::MappingWriter& sets, format::MappingWriter& freqs)
      : sets_(sets), freqs_(freqs) {}

  void operator()(const Posting& p) {
    if (open_ && (p.key != key_ || p.month != month_)) flush_entry();
    if (open_ && p.item != tag_) flush_tag();
    if (!open_) {
      key_ = p.key;
      month_ = p.month;
      open_ = true;
    }
    tag_ = p.item;
    ++taggings_;
    if (times_.empty() || times_.back() != p.value) times_.push_back(p.value);
  }

  void finish() { flush_entry(); }

 private:
  void flush_tag() {
    if (times_.empty()) return;
    format::put_le32(set_value_, tag_);
    format::put_le32(set_value_, to_u32(times_.size(), "timestamp set"));
    for (std::int64_t t : times_) format::put_le64(set_value_, static_cast<std::uint64_t>(t));
    format::put_le32(freq_value_, tag_);
    format::put_le32(freq_value_, to_u32(taggings_, "tagging count"));
    format::put_le32(freq_value_, static_cast<std::uint32_t>(times_.size()));
    times_.clear();
    taggings_ = 0;
  }
  void flush_entry() {
    if (!open_) return;
    flush_tag();
    const std::string key = format::key_id_month(key_, Month::from_index(month_));
    sets_.add(key, set_value_);
    freqs_.add(key, freq_value_);
    set_value_.clear();
    freq_value_.clear();
    open_ = false;
  }

  format::MappingWriter& sets_;
  format::MappingWriter& freqs_;
  std::string set_value_, freq_value_;
  std::vector<std::int64_t> times_;
  std::uint64_t taggings_ = 0;
  std::uint32_t key_ = 0, month_ = 0, tag_ = 0;
  bool open_ = false;
};

}  // namespace

struct IndexBuilder::State {
  fs::path out_dir;
  fs::path tmp_dir;
  BuildOptions options;
  std::ofstream spill;
  std::unordered_set<std::string> tags;
  std::unordered_set<std::string> urls;
  IndexMeta meta;
  bool finished = false;

  fs::path file(Mapping m) const { return out_dir / mapping_file_name(m); }

  void cleanup() noexcept {
    std::error_code ec;
    spill.close();
    fs::remove_all(tmp_dir, ec);
    for (Mapping m : kAllMappings) fs::remove(file(m), ec);
    fs::remove(out_dir / (std::string(format::kManifestName) + ".tmp"), ec);
  }
};

IndexBuilder::IndexBuilder(fs::path out_dir, BuildOptions options)
    : state_(std::make_unique<State>()) {
  State& s = *state_;
  s.out_dir = std::move(out_dir);
  s.tmp_dir = s.out_dir / kTmpDirName;
  s.options = options;
  fs::create_directories(s.out_dir);
  // An old manifest would advertise files we are about to overwrite.
  fs::remove(s.out_dir / format::kManifestName);
  s.cleanup();
  fs::create_directories(s.tmp_dir);
  s.spill.open(s.tmp_dir / kSpillName, std::ios::binary | std::ios::trunc);
  if (!s.spill) throw IndexError("cannot create " + (s.tmp_dir / kSpillName).string());
}

IndexBuilder::~IndexBuilder() {
  if (state_ && !state_->finished) state_->cleanup();
}

void IndexBuilder::add(const Record& record) {
  State& s = *state_;
  if (s.finished) throw std::logic_error("IndexBuilder::add after finish");
  write_string(s.spill, record.url.text());
  s.spill.write(reinterpret_cast<const char*>(&record.time.seconds),
                sizeof(record.time.seconds));
  const auto n = static_cast<std::uint32_t>(record.tags.size());
  s.spill.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (const Tag& t : record.tags) {
    write_string(s.spill, t.text());
    if (!s.tags.contains(t.text())) s.tags.insert(t.text());
  }
  if (!s.spill) throw IndexError("write failed: record spill");
  if (!s.urls.contains(record.url.text())) s.urls.insert(record.url.text());

  const Month m = month_of(record.time);
  format::checked_year(m.year);
  if (!s.meta.month_min || m < *s.meta.month_min) s.meta.month_min = m;
  if (!s.meta.month_max || *s.meta.month_max < m) s.meta.month_max = m;
  ++s.meta.record_count;
}

BuildReport IndexBuilder::finish() {
  State& s = *state_;
  if (s.finished) throw std::logic_error("IndexBuilder::finish called twice");
  try {
    s.spill.close();
    if (!s.spill) throw IndexError("write failed: record spill");

    // Pass 1 result: alphabetical vocabularies define the ids.
    std::vector<std::string> tags(s.tags.begin(), s.tags.end());
    std::vector<std::string> urls(s.urls.begin(), s.urls.end());
    s.tags.clear();
    s.urls.clear();
    std::sort(tags.begin(), tags.end());
    std::sort(urls.begin(), urls.end());
    s.meta.tag_count = tags.size();
    s.meta.url_count = urls.size();
    to_u32(tags.size(), "tag vocabulary");
    to_u32(urls.size(), "url vocabulary");

    std::vector<MappingInfo> infos;
    {
      format::MappingWriter w(s.file(Mapping::kIdTag), Mapping::kIdTag);
      for (std::uint32_t i = 0; i < tags.size(); ++i) w.add(format::key_id(i), tags[i]);
      infos.push_back(w.finish());
    }
    {
      format::MappingWriter w(s.file(Mapping::kIdUrl), Mapping::kIdUrl);
      for (std::uint32_t i = 0; i < urls.size(); ++i) w.add(format::key_id(i), urls[i]);
      infos.push_back(w.finish());
    }

    // Pass 2: emit postings from the spilled records.
    const std::size_t per_sorter =
        std::max<std::size_t>(s.options.memory_cap / 4 / sizeof(Posting), 16);
    ExternalSorter tag_tag(s.tmp_dir, "tag_tag", per_sorter, Combine::kSum);
    ExternalSorter month_tag(s.tmp_dir, "month_tag", per_sorter, Combine::kSum);
    ExternalSorter tag_url(s.tmp_dir, "tag_url", per_sorter, Combine::kSum);
    ExternalSorter url_tag(s.tmp_dir, "url_tag", per_sorter, Combine::kKeep);
    {
      std::unordered_map<std::string_view, std::uint32_t> tag_ids, url_ids;
      tag_ids.reserve(tags.size());
      url_ids.reserve(urls.size());
      for (std::uint32_t i = 0; i < tags.size(); ++i) tag_ids.emplace(tags[i], i);
      for (std::uint32_t i = 0; i < urls.size(); ++i) url_ids.emplace(urls[i], i);

      std::ifstream in(s.tmp_dir / kSpillName, std::ios::binary);
      std::string url, tag;
      std::vector<std::uint32_t> ids;
      while (read_string(in, url)) {
        std::int64_t ts = 0;
        std::uint32_t n = 0;
        in.read(reinterpret_cast<char*>(&ts), sizeof(ts));
        in.read(reinterpret_cast<char*>(&n), sizeof(n));
        ids.clear();
        for (std::uint32_t i = 0; i < n; ++i) {
          if (!read_string(in, tag)) throw IndexError("record spill truncated");
          ids.push_back(tag_ids.at(tag));
        }
        if (!in) throw IndexError("record spill truncated");
        const std::uint32_t u = url_ids.at(url);
        const std::uint32_t month = month_of(Timestamp{ts}).index();
        for (std::uint32_t a : ids) {
          month_tag.push({1, 0, month, a, 0});
          tag_url.push({1, a, month, u, 0});
          url_tag.push({ts, u, month, a, 0});
          for (std::uint32_t b : ids) {
            if (a != b) tag_tag.push({1, a, month, b, 0});
          }
        }
      }
      if (in.bad()) throw IndexError("read error: record spill");
    }
    tags.clear();
    tags.shrink_to_fit();
    urls.clear();
    urls.shrink_to_fit();
    fs::remove(s.tmp_dir / kSpillName);

    // Each job owns disjoint output files.
    std::vector<std::function<std::vector<MappingInfo>()>> jobs;
    jobs.emplace_back([&] {
      format::MappingWriter w(s.file(Mapping::kTagTag), Mapping::kTagTag);
      CountListWriter sink(w);
      tag_tag.drain(std::ref(sink));
      sink.flush();
      return std::vector<MappingInfo>{w.finish()};
    });
    jobs.emplace_back([&] {
      format::MappingWriter years(s.file(Mapping::kYearTag), Mapping::kYearTag);
      format::MappingWriter months(s.file(Mapping::kMonthTag), Mapping::kMonthTag);
      MonthYearWriter sink(months, years);
      month_tag.drain(std::ref(sink));
      sink.finish();
      return std::vector<MappingInfo>{years.finish(), months.finish()};
    });
    jobs.emplace_back([&] {
      format::MappingWriter w(s.file(Mapping::kTagUrl), Mapping::kTagUrl);
      CountListWriter sink(w);
      tag_url.drain(std::ref(sink));
      sink.flush();
      return std::vector<MappingInfo>{w.finish()};
    });
    jobs.emplace_back([&] {
      format::MappingWriter sets(s.file(Mapping::kUrlTag), Mapping::kUrlTag);
      format::MappingWriter freqs(s.file(Mapping::kUrlTagFreq), Mapping::kUrlTagFreq);
      UrlTagWriter sink(sets, freqs);
      url_tag.drain(std::ref(sink));
      sink.finish();
      return std::vector<MappingInfo>{sets.finish(), freqs.finish()};
    });

    const unsigned threads = s.options.threads == 0
                                 ? static_cast<unsigned>(jobs.size())
                                 : s.options.threads;
    std::vector<std::vector<MappingInfo>> results(jobs.size());
    for (std::size_t first = 0; first < jobs.size(); first += threads) {
      std::vector<std::future<std::vector<MappingInfo>>> running;
      const std::size_t last = std::min(jobs.size(), first + threads);
      for (std::size_t j = first; j < last; ++j) {
        running.push_back(std::async(threads == 1 ? std::launch::deferred
                                                  : std::launch::async,
                                     jobs[j]));
      }
      // get() everything before rethrowing so no job outlives the sorters.
      std::exception_ptr error;
      for (std::size_t j = first; j < last; ++j) {
        try {
          results[j] = running[j - first].get();
        } catch (...) {
          if (!error) error = std::current_exception();
        }
      }
      if (error) std::rethrow_exception(error);
    }
    for (auto& r : results) infos.insert(infos.end(), r.begin(), r.end());
    std::sort(infos.begin(), infos.end(),
              [](const MappingInfo& a, const MappingInfo& b) { return a.mapping < b.mapping; });

    fs::remove_all(s.tmp_dir);
    format::write_manifest(s.out_dir, {s.meta, infos});
    s.finished = true;
    return BuildReport{s.meta, infos};
  } catch (...) {
    s.cleanup();
    s.finished = true;
    throw;
  }
}

BuildReport build_index(std::span<const Record> records, const fs::path& out_dir,
                        BuildOptions options) {
  IndexBuilder builder(out_dir, options);
  for (const Record& r : records) builder.add(r);
  return builder.finish();
}

}  // namespace tempas
