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
#include <atomic>

#include "index_format.hpp"
#include "tempas/index.hpp"

namespace tempas {
namespace {

namespace fs = std::filesystem;
using format::get_be32;
using format::get_le32;
using format::get_le64;

IndexError corrupt_value(Mapping m) {
  return IndexError(mapping_file_name(m) + ": malformed posting list");
}

std::vector<TagCount> decode_tag_counts(std::string_view v, Mapping m) {
  if (v.size() % 8 != 0) throw corrupt_value(m);
  std::vector<TagCount> out(v.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = {TagId{get_le32(v.data() + 8 * i)}, get_le32(v.data() + 8 * i + 4)};
  }
  return out;
}

}  // namespace

struct IndexSet::Impl {
  fs::path dir;
  format::Manifest manifest;
  std::unique_ptr<format::MappingFile> id_tag, id_url, tag_tag, year_tag, month_tag,
      tag_url, url_tag, url_tag_freq;

  mutable std::atomic<std::uint64_t> n_tag_tag{0}, n_year_tag{0}, n_month_tag{0},
      n_tag_url{0}, n_url_tag{0}, n_url_tag_freq{0};
};

IndexSet::IndexSet(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
IndexSet::~IndexSet() = default;

std::shared_ptr<const IndexSet> IndexSet::open(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw IndexError("index directory not found: " + dir.string());
  }
  auto impl = std::make_unique<Impl>();
  impl->dir = dir;
  impl->manifest = format::read_manifest(dir);

  for (Mapping m : kAllMappings) {
    const std::string name = mapping_file_name(m);
    auto it = std::find_if(impl->manifest.files.begin(), impl->manifest.files.end(),
                           [&](const MappingInfo& f) { return f.mapping == m; });
    if (it == impl->manifest.files.end() || it->file != name) {
      throw IndexError(name + ": not listed in manifest");
    }
    const fs::path path = dir / name;
    if (!fs::exists(path)) throw IndexError(name + ": file missing");
    {
      format::MappedFile raw(path);
      if (raw.bytes().size() != it->bytes) {
        throw IndexError(name + ": checksum error (size " +
                         std::to_string(raw.bytes().size()) + ", manifest says " +
                         std::to_string(it->bytes) + ")");
      }
      if (format::crc32_of(raw.bytes()) != it->crc32) {
        throw IndexError(name + ": checksum error (crc32 mismatch)");
      }
    }
    auto file = std::make_unique<format::MappingFile>(path, m);
    if (file->size() != it->entries) {
      throw IndexError(name + ": entry count does not match manifest");
    }
    switch (m) {
      case Mapping::kIdTag: impl->id_tag = std::move(file); break;
      case Mapping::kIdUrl: impl->id_url = std::move(file); break;
      case Mapping::kTagTag: impl->tag_tag = std::move(file); break;
      case Mapping::kYearTag: impl->year_tag = std::move(file); break;
      case Mapping::kMonthTag: impl->month_tag = std::move(file); break;
      case Mapping::kTagUrl: impl->tag_url = std::move(file); break;
      case Mapping::kUrlTag: impl->url_tag = std::move(file); break;
      case Mapping::kUrlTagFreq: impl->url_tag_freq = std::move(file); break;
    }
  }
  if (impl->id_tag->size() != impl->manifest.meta.tag_count ||
      impl->id_url->size() != impl->manifest.meta.url_count) {
    throw IndexError("MANIFEST: vocabulary sizes disagree with id mappings");
  }
  return std::shared_ptr<const IndexSet>(new IndexSet(std::move(impl)));
}

const IndexMeta& IndexSet::meta() const noexcept { return impl_->manifest.meta; }

const std::vector<MappingInfo>& IndexSet::mappings() const noexcept {
  return impl_->manifest.files;
}

std::vector<TagCount> IndexSet::lookup_tag_tag(TagId tag, Month m) const {
  impl_->n_tag_tag.fetch_add(1, std::memory_order_relaxed);
  auto v = impl_->tag_tag->find(format::key_id_month(tag.value, m));
  return v ? decode_tag_counts(*v, Mapping::kTagTag) : std::vector<TagCount>{};
}

std::vector<UrlCount> IndexSet::lookup_tag_url(TagId tag, Month m) const {
  impl_->n_tag_url.fetch_add(1, std::memory_order_relaxed);
  auto v = impl_->tag_url->find(format::key_id_month(tag.value, m));
  if (!v) return {};
  if (v->size() % 8 != 0) throw corrupt_value(Mapping::kTagUrl);
  std::vector<UrlCount> out(v->size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = {UrlId{get_le32(v->data() + 8 * i)}, get_le32(v->data() + 8 * i + 4)};
  }
  return out;
}

std::vector<TagTimestamps> IndexSet::lookup_url_tag(UrlId url, Month m) const {
  impl_->n_url_tag.fetch_add(1, std::memory_order_relaxed);
  auto v = impl_->url_tag->find(format::key_id_month(url.value, m));
  if (!v) return {};
  std::vector<TagTimestamps> out;
  std::size_t pos = 0;
  while (pos < v->size()) {
    if (pos + 8 > v->size()) throw corrupt_value(Mapping::kUrlTag);
    TagTimestamps entry{TagId{get_le32(v->data() + pos)}, {}};
    const std::uint32_t n = get_le32(v->data() + pos + 4);
    pos += 8;
    if (pos + std::size_t{8} * n > v->size()) throw corrupt_value(Mapping::kUrlTag);
    entry.times.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i, pos += 8) {
      entry.times.push_back(Timestamp{static_cast<std::int64_t>(get_le64(v->data() + pos))});
    }
    out.push_back(std::move(entry));
  }
  return out;
}

std::vector<TagFrequency> IndexSet::lookup_url_tag_freq(UrlId url, Month m) const {
  impl_->n_url_tag_freq.fetch_add(1, std::memory_order_relaxed);
  auto v = impl_->url_tag_freq->find(format::key_id_month(url.value, m));
  if (!v) return {};
  if (v->size() % 12 != 0) throw corrupt_value(Mapping::kUrlTagFreq);
  std::vector<TagFrequency> out(v->size() / 12);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const char* p = v->data() + 12 * i;
    out[i] = {TagId{get_le32(p)}, get_le32(p + 4), get_le32(p + 8)};
  }
  return out;
}

std::vector<TagCount> IndexSet::lookup_month_tag(Month m) const {
  impl_->n_month_tag.fetch_add(1, std::memory_order_relaxed);
  auto v = impl_->month_tag->find(format::key_month(m));
  return v ? decode_tag_counts(*v, Mapping::kMonthTag) : std::vector<TagCount>{};
}

std::vector<TagCount> IndexSet::lookup_year_tag(int year) const {
  impl_->n_year_tag.fetch_add(1, std::memory_order_relaxed);
  if (year < 0 || year > 0xffff) return {};
  auto v = impl_->year_tag->find(format::key_year(year));
  return v ? decode_tag_counts(*v, Mapping::kYearTag) : std::vector<TagCount>{};
}

Tag IndexSet::resolve_tag(TagId id) const {
  const auto& f = *impl_->id_tag;
  if (id.value >= f.size()) {
    throw IndexError("tag id " + std::to_string(id.value) + " out of range");
  }
  if (get_be32(f.key(id.value).data()) != id.value) {
    throw IndexError("id_tag.bin: id sequence broken at " + std::to_string(id.value));
  }
  return Tag(f.value(id.value));
}

SiteUrl IndexSet::resolve_url(UrlId id) const {
  const auto& f = *impl_->id_url;
  if (id.value >= f.size()) {
    throw IndexError("url id " + std::to_string(id.value) + " out of range");
  }
  if (get_be32(f.key(id.value).data()) != id.value) {
    throw IndexError("id_url.bin: id sequence broken at " + std::to_string(id.value));
  }
  return SiteUrl(f.value(id.value));
}

namespace {

// Ids are assigned in byte-wise text order, so the id files are sorted by
// value as well as by key.
std::optional<std::uint32_t> find_text(const format::MappingFile& f, std::string_view text) {
  std::uint64_t lo = 0, hi = f.size();
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (f.value(mid) < text) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < f.size() && f.value(lo) == text) return static_cast<std::uint32_t>(lo);
  return std::nullopt;
}

}  // namespace

std::optional<TagId> IndexSet::tag_id(const Tag& tag) const {
  auto id = find_text(*impl_->id_tag, tag.text());
  return id ? std::optional<TagId>(TagId{*id}) : std::nullopt;
}

std::optional<UrlId> IndexSet::url_id(const SiteUrl& url) const {
  auto id = find_text(*impl_->id_url, url.text());
  return id ? std::optional<UrlId>(UrlId{*id}) : std::nullopt;
}

LookupCounts IndexSet::lookup_counts() const noexcept {
  const auto r = std::memory_order_relaxed;
  return {impl_->n_tag_tag.load(r),   impl_->n_year_tag.load(r), impl_->n_month_tag.load(r),
          impl_->n_tag_url.load(r),   impl_->n_url_tag.load(r),
          impl_->n_url_tag_freq.load(r)};
}

void IndexSet::reset_lookup_counts() const noexcept {
  const auto r = std::memory_order_relaxed;
  impl_->n_tag_tag.store(0, r);
  impl_->n_year_tag.store(0, r);
  impl_->n_month_tag.store(0, r);
  impl_->n_tag_url.store(0, r);
  impl_->n_url_tag.store(0, r);
  impl_->n_url_tag_freq.store(0, r);
}

}  // namespace tempas
