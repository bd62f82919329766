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

#include "external_sort.hpp"

#include <algorithm>
#include <fstream>
#include <memory>
#include <queue>
#include <stdexcept>

#include "tempas/index.hpp"

namespace tempas::detail {
namespace {

constexpr std::size_t kReadBatch = 4096;

class RunReader {
 public:
  explicit RunReader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw IndexError("cannot reopen sort run " + path.string());
    batch_.resize(kReadBatch);
  }

  bool next(Posting& out) {
    if (pos_ == size_) {
      in_.read(reinterpret_cast<char*>(batch_.data()),
               static_cast<std::streamsize>(batch_.size() * sizeof(Posting)));
      if (in_.bad()) throw IndexError("read error in sort run");
      size_ = static_cast<std::size_t>(in_.gcount()) / sizeof(Posting);
      pos_ = 0;
      if (size_ == 0) return false;
    }
    out = batch_[pos_++];
    return true;
  }

 private:
  std::ifstream in_;
  std::vector<Posting> batch_;
  std::size_t pos_ = 0;
  std::size_t size_ = 0;
};

// Folds equal slots together when combining by sum.
class Combiner {
 public:
  Combiner(Combine mode, const std::function<void(const Posting&)>& visit)
      : mode_(mode), visit_(visit) {}

  void operator()(const Posting& p) {
    if (mode_ == Combine::kKeep) {
      visit_(p);
      return;
    }
    if (have_ && pending_.same_slot(p)) {
      pending_.value += p.value;
      return;
    }
    flush();
    pending_ = p;
    have_ = true;
  }

  void flush() {
    if (have_) visit_(pending_);
    have_ = false;
  }

 private:
  Combine mode_;
  const std::function<void(const Posting&)>& visit_;
  Posting pending_;
  bool have_ = false;
};

}  // namespace

ExternalSorter::ExternalSorter(std::filesystem::path run_dir, std::string name,
                               std::size_t max_buffered, Combine combine)
    : run_dir_(std::move(run_dir)),
      name_(std::move(name)),
      max_buffered_(std::max<std::size_t>(max_buffered, 16)),
      combine_(combine) {
  buffer_.reserve(std::min<std::size_t>(max_buffered_, 1 << 16));
}

ExternalSorter::~ExternalSorter() {
  std::error_code ec;
  for (const auto& run : runs_) std::filesystem::remove(run, ec);
}

void ExternalSorter::sort_buffer() {
  std::sort(buffer_.begin(), buffer_.end());
  if (combine_ == Combine::kSum && !buffer_.empty()) {
    std::size_t out = 0;
    for (std::size_t i = 1; i < buffer_.size(); ++i) {
      if (buffer_[out].same_slot(buffer_[i])) {
        buffer_[out].value += buffer_[i].value;
      } else {
        buffer_[++out] = buffer_[i];
      }
    }
    buffer_.resize(out + 1);
  }
}

void ExternalSorter::spill() {
  sort_buffer();
  const auto path = run_dir_ / (name_ + ".run" + std::to_string(runs_.size()));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(buffer_.data()),
            static_cast<std::streamsize>(buffer_.size() * sizeof(Posting)));
  out.close();
  if (!out) throw IndexError("cannot write sort run " + path.string());
  runs_.push_back(path);
  buffer_.clear();
}

void ExternalSorter::drain(const std::function<void(const Posting&)>& visit) {
  Combiner combiner(combine_, visit);
  if (runs_.empty()) {
    sort_buffer();
    for (const Posting& p : buffer_) combiner(p);
    combiner.flush();
    buffer_.clear();
    buffer_.shrink_to_fit();
    return;
  }
  if (!buffer_.empty()) spill();
  buffer_.shrink_to_fit();

  std::vector<std::unique_ptr<RunReader>> readers;
  using Head = std::pair<Posting, std::size_t>;
  auto greater = [](const Head& a, const Head& b) {
    if (b.first < a.first) return true;
    if (a.first < b.first) return false;
    return a.second > b.second;
  };
  std::priority_queue<Head, std::vector<Head>, decltype(greater)> heap(greater);
  for (std::size_t i = 0; i < runs_.size(); ++i) {
    readers.push_back(std::make_unique<RunReader>(runs_[i]));
    Posting p;
    if (readers.back()->next(p)) heap.emplace(p, i);
  }
  while (!heap.empty()) {
    auto [p, run] = heap.top();
    heap.pop();
    combiner(p);
    Posting nextp;
    if (readers[run]->next(nextp)) heap.emplace(nextp, run);
  }
  combiner.flush();
}

}  // namespace tempas::detail
