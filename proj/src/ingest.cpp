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

#include "tempas/ingest.hpp"

#include <zlib.h>

#include <array>
#include <charconv>
#include <fstream>

namespace tempas {
namespace {

constexpr std::size_t kChunk = 1 << 16;

bool is_tag_separator(char c) {
  return c == ',' || c == ' ' || c == '\t' || c == '\v' || c == '\f' || c == '\r' ||
         c == '\n';
}

}  // namespace

std::vector<Tag> parse_tags(std::string_view field) {
  std::vector<Tag> tags;
  std::size_t i = 0;
  while (i < field.size()) {
    while (i < field.size() && is_tag_separator(field[i])) ++i;
    std::size_t j = i;
    while (j < field.size() && !is_tag_separator(field[j])) ++j;
    if (j > i) {
      if (auto tag = Tag::normalize(field.substr(i, j - i))) {
        tags.push_back(std::move(*tag));
      }
    }
    i = j;
  }
  canonicalize(tags);
  return tags;
}

LineResult parse_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

  std::array<std::string_view, 5> fields;
  std::size_t count = 0;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    const std::string_view field =
        line.substr(start, tab == std::string_view::npos ? std::string_view::npos
                                                          : tab - start);
    if (count < fields.size()) fields[count] = field;
    ++count;
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (count != 5) {
    return Malformed{"expected 5 tab-separated fields, got " + std::to_string(count)};
  }

  const std::string_view url = fields[2];
  if (url.empty()) return Malformed{"empty url"};

  const std::string_view ts = fields[3];
  std::int64_t seconds = 0;
  auto [ptr, ec] = std::from_chars(ts.data(), ts.data() + ts.size(), seconds);
  if (ts.empty() || ec != std::errc{} || ptr != ts.data() + ts.size()) {
    return Malformed{"timestamp is not an integer: '" + std::string(ts) + "'"};
  }
  if (seconds < 0) return Malformed{"negative timestamp"};

  std::vector<Tag> tags = parse_tags(fields[4]);
  if (tags.empty()) return EmptyTags{};
  return Record(SiteUrl(url), Timestamp{seconds}, std::move(tags));
}

std::string format_line(const Record& r) {
  std::string line = "-\t-\t" + r.url.text() + "\t" + std::to_string(r.time.seconds) + "\t";
  for (std::size_t i = 0; i < r.tags.size(); ++i) {
    if (i) line += ',';
    line += r.tags[i].text();
  }
  return line;
}

struct LineReader::Inflater {
  z_stream zs{};
  std::string in_buf = std::string(kChunk, '\0');
  bool finished_member = false;
  bool saw_input = false;

  Inflater() {
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
      throw std::runtime_error("inflateInit2 failed");
    }
  }
  ~Inflater() { inflateEnd(&zs); }
};

LineReader::LineReader(std::istream& in, bool gzip) : in_(in) {
  if (gzip) inflater_ = std::make_unique<Inflater>();
}

LineReader::~LineReader() = default;

// Appends more decoded bytes to buffer_. Returns false once input is exhausted.
bool LineReader::fill() {
  if (eof_) return false;
  if (!inflater_) {
    char chunk[kChunk];
    in_.read(chunk, sizeof(chunk));
    const auto got = in_.gcount();
    if (in_.bad()) throw std::runtime_error("read error");
    if (got <= 0) {
      eof_ = true;
      return false;
    }
    buffer_.append(chunk, static_cast<std::size_t>(got));
    return true;
  }

  Inflater& z = *inflater_;
  char out[kChunk];
  while (true) {
    if (z.zs.avail_in == 0) {
      in_.read(z.in_buf.data(), static_cast<std::streamsize>(z.in_buf.size()));
      const auto got = in_.gcount();
      if (in_.bad()) throw std::runtime_error("read error");
      if (got <= 0) {
        eof_ = true;
        if (!z.finished_member && z.saw_input) {
          throw std::runtime_error("truncated gzip stream");
        }
        return false;
      }
      z.saw_input = true;
      z.zs.next_in = reinterpret_cast<Bytef*>(z.in_buf.data());
      z.zs.avail_in = static_cast<uInt>(got);
    }
    if (z.finished_member) {
      // Another gzip member follows.
      inflateReset(&z.zs);
      z.finished_member = false;
    }
    z.zs.next_out = reinterpret_cast<Bytef*>(out);
    z.zs.avail_out = sizeof(out);
    const int rc = inflate(&z.zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END && rc != Z_BUF_ERROR) {
      eof_ = true;
      throw std::runtime_error(std::string("gzip decompression failed: ") +
                               (z.zs.msg ? z.zs.msg : "unknown error"));
    }
    if (rc == Z_STREAM_END) z.finished_member = true;
    const std::size_t produced = sizeof(out) - z.zs.avail_out;
    if (produced > 0) {
      buffer_.append(out, produced);
      return true;
    }
  }
}

bool LineReader::next(std::string& line) {
  while (true) {
    const std::size_t nl = buffer_.find('\n', pos_);
    if (nl != std::string::npos) {
      line.assign(buffer_, pos_, nl - pos_);
      pos_ = nl + 1;
      return true;
    }
    buffer_.erase(0, pos_);
    pos_ = 0;
    if (!fill()) {
      if (buffer_.empty()) return false;
      line.swap(buffer_);
      buffer_.clear();
      return true;
    }
  }
}

IngestStats parse_stream(std::istream& in, bool gzip, const RecordSink& sink) {
  IngestStats stats;
  try {
    LineReader reader(in, gzip);
    std::string line;
    while (reader.next(line)) {
      ++stats.lines_read;
      LineResult result = parse_line(line);
      if (auto* record = std::get_if<Record>(&result)) {
        ++stats.records_emitted;
        sink(std::move(*record));
      } else if (std::holds_alternative<EmptyTags>(result)) {
        ++stats.skipped_empty_tags;
      } else {
        ++stats.skipped_malformed;
      }
    }
  } catch (const IngestError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw IngestError(e.what(), stats);
  }
  return stats;
}

IngestStats parse_file(const std::filesystem::path& path, bool gzip,
                       const RecordSink& sink) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError("cannot open " + path.string(), {});
  return parse_stream(in, gzip, sink);
}

bool looks_gzipped(const std::filesystem::path& path) {
  return path.extension() == ".gz";
}

}  // namespace tempas
