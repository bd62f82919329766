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

// On-disk layout of one mapping file:
//
//   header   8 bytes magic "TMPSMAP\0", u8 format version, u8 mapping kind,
//            6 zero bytes
//   entries  u32 key_len, key bytes, u32 value_len, value bytes   (repeated)
//   footer   u64 offset of every entry, u64 entry count, 8 bytes "TMPSEND\0"
//
// Keys are fixed-width big-endian so that memcmp order is (id, year, month)
// order; entries are strictly ascending by key. Everything else, including
// value payloads and the footer, is little-endian.
//
// MANIFEST:
//
//   8 bytes "TMPSMANI", u8 format version,
//   u64 record_count, u64 tag_count, u64 url_count,
//   u8 has_months, u16 min year, u8 min month, u16 max year, u8 max month,
//   u32 file count, then per file:
//     u16 name_len, name, u8 kind, u64 entries, u64 bytes, u32 crc32
//   u32 crc32 of all preceding manifest bytes

#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tempas/index.hpp"

namespace tempas::format {

inline constexpr char kMapMagic[8] = {'T', 'M', 'P', 'S', 'M', 'A', 'P', '\0'};
inline constexpr char kEndMagic[8] = {'T', 'M', 'P', 'S', 'E', 'N', 'D', '\0'};
inline constexpr char kManifestMagic[8] = {'T', 'M', 'P', 'S', 'M', 'A', 'N', 'I'};
inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 16;
inline constexpr std::size_t kFooterTail = 16;  // entry count + end magic
inline constexpr const char* kManifestName = "MANIFEST";

inline void put_le32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_le64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_le16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>(v >> 8));
}
inline void put_be32(std::string& out, std::uint32_t v) {
  for (int i = 3; i >= 0; --i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_be16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v & 0xff));
}

inline std::uint32_t get_le32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}
inline std::uint64_t get_le64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}
inline std::uint16_t get_le16(const char* p) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(p[0]) |
                                    (static_cast<unsigned char>(p[1]) << 8));
}
inline std::uint32_t get_be32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | static_cast<unsigned char>(p[i]);
  return v;
}

// Years are stored as u16; months outside 0..65535 cannot be indexed.
std::uint16_t checked_year(int year);

std::string key_id(std::uint32_t id);
std::string key_id_month(std::uint32_t id, Month m);
std::string key_month(Month m);
std::string key_year(int year);

// Streams entries to a file, tracking offsets and a running CRC-32.
class MappingWriter {
 public:
  MappingWriter(std::filesystem::path path, Mapping kind);

  // Keys must be strictly ascending.
  void add(std::string_view key, std::string_view value);
  MappingInfo finish();

 private:
  void write(std::string_view bytes);

  std::filesystem::path path_;
  Mapping kind_;
  std::ofstream out_;
  std::uint64_t bytes_ = 0;
  std::uint32_t crc_ = 0;
  std::vector<std::uint64_t> offsets_;
  std::string last_key_;
  std::string scratch_;
};

// Read-only memory map of a whole file.
class MappedFile {
 public:
  explicit MappedFile(const std::filesystem::path& path);
  ~MappedFile();
  MappedFile(const MappedFile&) = delete;
  MappedFile& operator=(const MappedFile&) = delete;

  std::string_view bytes() const noexcept { return {data_, size_}; }

 private:
  const char* data_ = nullptr;
  std::size_t size_ = 0;
};

// Structurally validated view over one mapping file.
class MappingFile {
 public:
  MappingFile(const std::filesystem::path& path, Mapping kind);

  std::uint64_t size() const noexcept { return count_; }
  std::string_view key(std::uint64_t i) const;
  std::string_view value(std::uint64_t i) const;
  std::optional<std::string_view> find(std::string_view key) const;

 private:
  const char* entry(std::uint64_t i) const;

  std::string name_;
  MappedFile file_;
  std::uint64_t count_ = 0;
  const char* offsets_ = nullptr;
};

std::uint32_t crc32_of(std::string_view bytes);

struct Manifest {
  IndexMeta meta;
  std::vector<MappingInfo> files;
};

void write_manifest(const std::filesystem::path& dir, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& dir);

}  // namespace tempas::format
