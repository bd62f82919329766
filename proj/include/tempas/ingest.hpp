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

// Reader for the tab-separated bookmark dump format:
//
//   <url_md5> \t <user_id> \t <url> \t <unix_timestamp> \t <tag,tag,...>
//
// Only url, timestamp and tags are kept.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "tempas/model.hpp"

namespace tempas {

struct IngestStats {
  std::uint64_t lines_read = 0;
  std::uint64_t records_emitted = 0;
  std::uint64_t skipped_empty_tags = 0;
  std::uint64_t skipped_malformed = 0;

  bool balanced() const noexcept {
    return lines_read == records_emitted + skipped_empty_tags + skipped_malformed;
  }
  bool operator==(const IngestStats&) const = default;
};

// I/O or decompression failure. `stats` holds the counters up to the failure.
class IngestError : public std::runtime_error {
 public:
  IngestError(const std::string& what, IngestStats stats)
      : std::runtime_error(what), stats(stats) {}
  IngestStats stats;
};

struct EmptyTags {};
struct Malformed {
  std::string reason;
};
using LineResult = std::variant<Record, EmptyTags, Malformed>;

// Parses one line (trailing '\r' tolerated, no '\n').
LineResult parse_line(std::string_view line);

// Splits a tag field on commas and whitespace, normalizes, sorts and
// deduplicates.
std::vector<Tag> parse_tags(std::string_view field);

// Serializes a record back into the five-field format with placeholder md5
// and user columns.
std::string format_line(const Record& r);

// Yields text lines from a plain or gzip-compressed byte stream. Concatenated
// gzip members are read as one stream.
class LineReader {
 public:
  LineReader(std::istream& in, bool gzip);
  ~LineReader();
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  // Returns false at end of input. Throws std::runtime_error on read or
  // inflate failure.
  bool next(std::string& line);

 private:
  struct Inflater;
  bool fill();

  std::istream& in_;
  std::unique_ptr<Inflater> inflater_;
  std::string buffer_;
  std::size_t pos_ = 0;
  bool eof_ = false;
};

using RecordSink = std::function<void(Record&&)>;

// Streams every valid record of `in` into `sink` in input order.
IngestStats parse_stream(std::istream& in, bool gzip, const RecordSink& sink);

// Opens `path` and streams it. Throws IngestError if it cannot be opened.
IngestStats parse_file(const std::filesystem::path& path, bool gzip,
                       const RecordSink& sink);

// True for names ending in ".gz".
bool looks_gzipped(const std::filesystem::path& path);

}  // namespace tempas
