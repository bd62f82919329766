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
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace tempas::detail {

// One emitted posting before aggregation. `month` is Month::index().
struct Posting {
  std::int64_t value = 0;
  std::uint32_t key = 0;
  std::uint32_t month = 0;
  std::uint32_t item = 0;
  std::uint32_t pad = 0;

  friend bool operator<(const Posting& a, const Posting& b) noexcept {
    if (a.key != b.key) return a.key < b.key;
    if (a.month != b.month) return a.month < b.month;
    if (a.item != b.item) return a.item < b.item;
    return a.value < b.value;
  }
  bool same_slot(const Posting& o) const noexcept {
    return key == o.key && month == o.month && item == o.item;
  }
};
static_assert(sizeof(Posting) == 24);

enum class Combine {
  kSum,   // postings in the same (key, month, item) slot are summed
  kKeep,  // all postings are kept, ordered by value within a slot
};

// Sorts an unbounded stream of postings with a bounded buffer. Full buffers
// are sorted, combined and spilled as runs; drain() k-way merges the runs.
class ExternalSorter {
 public:
  ExternalSorter(std::filesystem::path run_dir, std::string name,
                 std::size_t max_buffered, Combine combine);
  ~ExternalSorter();
  ExternalSorter(const ExternalSorter&) = delete;
  ExternalSorter& operator=(const ExternalSorter&) = delete;

  void push(const Posting& p) {
    buffer_.push_back(p);
    if (buffer_.size() >= max_buffered_) spill();
  }

  // Emits every posting in sorted order. May be called once.
  void drain(const std::function<void(const Posting&)>& visit);

  std::size_t runs() const noexcept { return runs_.size(); }

 private:
  void sort_buffer();
  void spill();

  std::filesystem::path run_dir_;
  std::string name_;
  std::size_t max_buffered_;
  Combine combine_;
  std::vector<Posting> buffer_;
  std::vector<std::filesystem::path> runs_;
};

}  // namespace tempas::detail
