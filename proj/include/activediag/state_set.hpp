// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ACTIVEDIAG_STATE_SET_HPP_
#define ACTIVEDIAG_STATE_SET_HPP_

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace activediag {

// Fixed-width bit vector over state positions. Width is set at construction
// and every binary operation requires equal widths.
class StateSet {
 public:
  StateSet() = default;
  explicit StateSet(std::size_t width, bool full = false)
      : width_(width), words_((width + 63) / 64, full ? ~std::uint64_t{0} : 0) {
    if (full) TrimTail();
  }

  static StateSet Full(std::size_t width) { return StateSet(width, true); }

  std::size_t width() const { return width_; }

  bool test(std::size_t i) const {
    assert(i < width_);
    return (words_[i / 64] >> (i % 64)) & 1u;
  }
  void set(std::size_t i) {
    assert(i < width_);
    words_[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  void reset(std::size_t i) {
    assert(i < width_);
    words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool none() const {
    for (std::uint64_t w : words_) {
      if (w != 0) return false;
    }
    return true;
  }
  bool any() const { return !none(); }

  bool is_subset_of(const StateSet& other) const {
    assert(width_ == other.width_);
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if ((words_[i] & ~other.words_[i]) != 0) return false;
    }
    return true;
  }

  StateSet& operator&=(const StateSet& other) {
    assert(width_ == other.width_);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
    return *this;
  }
  StateSet& operator|=(const StateSet& other) {
    assert(width_ == other.width_);
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
  }
  friend StateSet operator&(StateSet a, const StateSet& b) { return a &= b; }
  friend StateSet operator|(StateSet a, const StateSet& b) { return a |= b; }
  friend bool operator==(const StateSet&, const StateSet&) = default;

  // Calls fn(i) for every member in increasing order.
  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int tz = std::countr_zero(bits);
        fn(w * 64 + static_cast<std::size_t>(tz));
        bits &= bits - 1;
      }
    }
  }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  std::span<const std::uint64_t> words() const { return words_; }

  std::size_t hash() const {
    std::size_t h = width_;
    for (std::uint64_t w : words_) {
      h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }

 private:
  void TrimTail() {
    if (width_ % 64 != 0 && !words_.empty()) {
      words_.back() &= (std::uint64_t{1} << (width_ % 64)) - 1;
    }
  }

  std::size_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace activediag

#endif  // ACTIVEDIAG_STATE_SET_HPP_
