#pragma once

#include <cassert>
#include <cstddef>
#include <limits>
#include <vector>

namespace biopepa {

/// Indexed binary min-heap over a fixed key range [0, n). Supports peeking the
/// minimum and reprioritising any key in O(log n) — the structure the
/// next-reaction method hangs its putative firing times on. Every key is
/// always present; disabled entries sit at +inf.
class IndexedPriorityQueue {
 public:
  explicit IndexedPriorityQueue(std::size_t n)
      : heap_(n), pos_(n), value_(n, std::numeric_limits<double>::infinity()) {
    for (std::size_t i = 0; i < n; ++i) {
      heap_[i] = i;
      pos_[i] = i;
    }
  }

  std::size_t size() const { return heap_.size(); }
  double value(std::size_t key) const { return value_[key]; }

  std::size_t min_key() const { return heap_[0]; }
  double min_value() const { return value_[heap_[0]]; }

  void update(std::size_t key, double v) {
    const double old = value_[key];
    value_[key] = v;
    if (v < old)
      sift_up(pos_[key]);
    else
      sift_down(pos_[key]);
  }

  /// Heap-order check for debug assertions.
  bool valid() const {
    for (std::size_t i = 1; i < heap_.size(); ++i) {
      if (value_[heap_[i]] < value_[heap_[(i - 1) / 2]]) return false;
      if (pos_[heap_[i]] != i) return false;
    }
    return heap_.empty() || pos_[heap_[0]] == 0;
  }

 private:
  void swap_nodes(std::size_t a, std::size_t b) {
    std::swap(heap_[a], heap_[b]);
    pos_[heap_[a]] = a;
    pos_[heap_[b]] = b;
  }
  void sift_up(std::size_t i) {
    while (i > 0) {
      std::size_t parent = (i - 1) / 2;
      if (value_[heap_[parent]] <= value_[heap_[i]]) break;
      swap_nodes(parent, i);
      i = parent;
    }
  }
  void sift_down(std::size_t i) {
    const std::size_t n = heap_.size();
    for (;;) {
      std::size_t smallest = i;
      std::size_t l = 2 * i + 1, r = 2 * i + 2;
      if (l < n && value_[heap_[l]] < value_[heap_[smallest]]) smallest = l;
      if (r < n && value_[heap_[r]] < value_[heap_[smallest]]) smallest = r;
      if (smallest == i) break;
      swap_nodes(i, smallest);
      i = smallest;
    }
  }

  std::vector<std::size_t> heap_;  // heap position -> key
  std::vector<std::size_t> pos_;   // key -> heap position
  std::vector<double> value_;
};

}  // namespace biopepa
