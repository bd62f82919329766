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

#include "index_format.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <system_error>

namespace tempas {

std::string mapping_file_name(Mapping m) {
  switch (m) {
    case Mapping::kIdTag: return "id_tag.bin";
    case Mapping::kIdUrl: return "id_url.bin";
    case Mapping::kTagTag: return "tag_tag.bin";
    case Mapping::kYearTag: return "year_tag.bin";
    case Mapping::kMonthTag: return "month_tag.bin";
    case Mapping::kTagUrl: return "tag_url.bin";
    case Mapping::kUrlTag: return "url_tag.bin";
    case Mapping::kUrlTagFreq: return "url_tag_freq.bin";
  }
  throw std::logic_error("unknown mapping");
}

namespace format {

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large inputs in slices.
  constexpr std::size_t kSlice = 1u << 30;
  for (std::size_t pos = 0; pos < bytes.size(); pos += kSlice) {
    const std::size_t n = std::min(kSlice, bytes.size() - pos);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + pos),
                static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

std::uint16_t checked_year(int year) {
  if (year < 0 || year > 0xffff) {
    throw IndexError("year " + std::to_string(year) + " outside indexable range");
  }
  return static_cast<std::uint16_t>(year);
}

std::string key_id(std::uint32_t id) {
  std::string k;
  put_be32(k, id);
  return k;
}

std::string key_id_month(std::uint32_t id, Month m) {
  std::string k;
  k.reserve(7);
  put_be32(k, id);
  put_be16(k, checked_year(m.year));
  k.push_back(static_cast<char>(m.month));
  return k;
}

std::string key_month(Month m) {
  std::string k;
  put_be16(k, checked_year(m.year));
  k.push_back(static_cast<char>(m.month));
  return k;
}

std::string key_year(int year) {
  std::string k;
  put_be16(k, checked_year(year));
  return k;
}

MappingWriter::MappingWriter(std::filesystem::path path, Mapping kind)
    : path_(std::move(path)), kind_(kind), crc_(crc32_of({})) {
  out_.open(path_, std::ios::binary | std::ios::trunc);
  if (!out_) throw IndexError("cannot create " + path_.string());
  std::string header(kMapMagic, sizeof(kMapMagic));
  header.push_back(static_cast<char>(kFormatVersion));
  header.push_back(static_cast<char>(kind));
  header.append(6, '\0');
  write(header);
}

void MappingWriter::write(std::string_view bytes) {
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out_) throw IndexError("write failed: " + path_.string());
  crc_ = static_cast<std::uint32_t>(
      crc32(crc_, reinterpret_cast<const Bytef*>(bytes.data()),
            static_cast<uInt>(bytes.size())));
  bytes_ += bytes.size();
}

void MappingWriter::add(std::string_view key, std::string_view value) {
  if (!offsets_.empty() && key <= std::string_view(last_key_)) {
    throw std::logic_error("mapping keys out of order in " + path_.string());
  }
  last_key_.assign(key);
  offsets_.push_back(bytes_);
  scratch_.clear();
  put_le32(scratch_, static_cast<std::uint32_t>(key.size()));
  scratch_.append(key);
  put_le32(scratch_, static_cast<std::uint32_t>(value.size()));
  write(scratch_);
  write(value);
}

MappingInfo MappingWriter::finish() {
  std::string footer;
  footer.reserve(offsets_.size() * 8 + kFooterTail);
  for (std::uint64_t off : offsets_) put_le64(footer, off);
  put_le64(footer, offsets_.size());
  footer.append(kEndMagic, sizeof(kEndMagic));
  write(footer);
  out_.flush();
  out_.close();
  if (!out_) throw IndexError("write failed: " + path_.string());
  return MappingInfo{kind_, path_.filename().string(), offsets_.size(), bytes_, crc_};
}

MappedFile::MappedFile(const std::filesystem::path& path) {
  const int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) {
    throw IndexError(path.filename().string() + ": " +
                     std::system_category().message(errno));
  }
  struct stat st {};
  if (::fstat(fd, &st) != 0) {
    ::close(fd);
    throw IndexError(path.filename().string() + ": stat failed");
  }
  size_ = static_cast<std::size_t>(st.st_size);
  if (size_ > 0) {
    void* p = ::mmap(nullptr, size_, PROT_READ, MAP_PRIVATE, fd, 0);
    if (p == MAP_FAILED) {
      ::close(fd);
      throw IndexError(path.filename().string() + ": mmap failed");
    }
    data_ = static_cast<const char*>(p);
  }
  ::close(fd);
}

MappedFile::~MappedFile() {
  if (data_) ::munmap(const_cast<char*>(data_), size_);
}

MappingFile::MappingFile(const std::filesystem::path& path, Mapping kind)
    : name_(path.filename().string()), file_(path) {
  const std::string_view b = file_.bytes();
  auto corrupt = [&](const std::string& why) {
    return IndexError(name_ + ": corrupt mapping file (" + why + ")");
  };
  if (b.size() < kHeaderSize + kFooterTail) throw corrupt("too short");
  if (std::memcmp(b.data(), kMapMagic, 8) != 0) throw corrupt("bad magic");
  if (static_cast<std::uint8_t>(b[8]) != kFormatVersion) throw corrupt("version");
  if (static_cast<std::uint8_t>(b[9]) != static_cast<std::uint8_t>(kind)) {
    throw corrupt("mapping kind");
  }
  const char* tail = b.data() + b.size() - kFooterTail;
  if (std::memcmp(tail + 8, kEndMagic, 8) != 0) throw corrupt("bad end marker");
  count_ = get_le64(tail);
  const std::uint64_t table = count_ * 8;
  if (table > b.size() - kHeaderSize - kFooterTail) throw corrupt("entry count");
  offsets_ = tail - table;
  const std::uint64_t limit = static_cast<std::uint64_t>(offsets_ - b.data());
  std::uint64_t expected = kHeaderSize;
  for (std::uint64_t i = 0; i < count_; ++i) {
    const std::uint64_t off = get_le64(offsets_ + 8 * i);
    if (off != expected || off + 4 > limit) throw corrupt("offset table");
    const std::uint64_t klen = get_le32(b.data() + off);
    if (off + 8 + klen > limit) throw corrupt("key length");
    const std::uint64_t vlen = get_le32(b.data() + off + 4 + klen);
    expected = off + 8 + klen + vlen;
    if (expected > limit) throw corrupt("value length");
  }
  if (expected != limit) throw corrupt("trailing bytes");
}

const char* MappingFile::entry(std::uint64_t i) const {
  return file_.bytes().data() + get_le64(offsets_ + 8 * i);
}

std::string_view MappingFile::key(std::uint64_t i) const {
  const char* p = entry(i);
  return {p + 4, get_le32(p)};
}

std::string_view MappingFile::value(std::uint64_t i) const {
  const char* p = entry(i);
  const std::uint32_t klen = get_le32(p);
  return {p + 8 + klen, get_le32(p + 4 + klen)};
}

std::optional<std::string_view> MappingFile::find(std::string_view k) const {
  std::uint64_t lo = 0, hi = count_;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (key(mid) < k) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < count_ && key(lo) == k) return value(lo);
  return std::nullopt;
}

void write_manifest(const std::filesystem::path& dir, const Manifest& manifest) {
  std::string b(kManifestMagic, sizeof(kManifestMagic));
  b.push_back(static_cast<char>(kFormatVersion));
  put_le64(b, manifest.meta.record_count);
  put_le64(b, manifest.meta.tag_count);
  put_le64(b, manifest.meta.url_count);
  const bool has_months = manifest.meta.month_min.has_value();
  b.push_back(has_months ? 1 : 0);
  const Month lo = manifest.meta.month_min.value_or(Month{0, 1});
  const Month hi = manifest.meta.month_max.value_or(Month{0, 1});
  put_le16(b, checked_year(lo.year));
  b.push_back(static_cast<char>(lo.month));
  put_le16(b, checked_year(hi.year));
  b.push_back(static_cast<char>(hi.month));
  put_le32(b, static_cast<std::uint32_t>(manifest.files.size()));
  for (const MappingInfo& f : manifest.files) {
    put_le16(b, static_cast<std::uint16_t>(f.file.size()));
    b.append(f.file);
    b.push_back(static_cast<char>(f.mapping));
    put_le64(b, f.entries);
    put_le64(b, f.bytes);
    put_le32(b, f.crc32);
  }
  put_le32(b, crc32_of(b));

  const auto tmp = dir / (std::string(kManifestName) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
    out.flush();
    if (!out) throw IndexError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, dir / kManifestName);
}

Manifest read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / kManifestName;
  if (!std::filesystem::exists(path)) {
    throw IndexError("manifest missing in " + dir.string());
  }
  std::ifstream in(path, std::ios::binary);
  std::string b((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto corrupt = [](const std::string& why) {
    return IndexError(std::string(kManifestName) + ": corrupt manifest (" + why + ")");
  };
  if (b.size() < 8 + 1 + 24 + 7 + 4 + 4) throw corrupt("too short");
  if (std::memcmp(b.data(), kManifestMagic, 8) != 0) throw corrupt("bad magic");
  const std::size_t body = b.size() - 4;
  if (get_le32(b.data() + body) != crc32_of(std::string_view(b).substr(0, body))) {
    throw corrupt("checksum mismatch");
  }
  if (static_cast<std::uint8_t>(b[8]) != kFormatVersion) {
    throw corrupt("unsupported format version " + std::to_string(b[8]));
  }

  std::size_t pos = 9;
  auto need = [&](std::size_t n) {
    if (pos + n > body) throw corrupt("truncated");
  };
  auto u8 = [&] { need(1); return static_cast<std::uint8_t>(b[pos++]); };
  auto u16 = [&] { need(2); auto v = get_le16(b.data() + pos); pos += 2; return v; };
  auto u32 = [&] { need(4); auto v = get_le32(b.data() + pos); pos += 4; return v; };
  auto u64 = [&] { need(8); auto v = get_le64(b.data() + pos); pos += 8; return v; };

  Manifest m;
  m.meta.record_count = u64();
  m.meta.tag_count = u64();
  m.meta.url_count = u64();
  const bool has_months = u8() != 0;
  Month lo;
  lo.year = u16();
  lo.month = u8();
  Month hi;
  hi.year = u16();
  hi.month = u8();
  if (has_months) {
    m.meta.month_min = lo;
    m.meta.month_max = hi;
  }
  const std::uint32_t files = u32();
  for (std::uint32_t i = 0; i < files; ++i) {
    MappingInfo f;
    const std::uint16_t len = u16();
    need(len);
    f.file.assign(b.data() + pos, len);
    pos += len;
    f.mapping = static_cast<Mapping>(u8());
    f.entries = u64();
    f.bytes = u64();
    f.crc32 = u32();
    m.files.push_back(std::move(f));
  }
  if (pos != body) throw corrupt("trailing bytes");
  return m;
}

}  // namespace format
}  // namespace tempas
