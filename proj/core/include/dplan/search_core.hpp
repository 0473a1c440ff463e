#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dplan/errors.hpp"

namespace dplan {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Priority of a queued node. Arity-1 keys compare on k1 only; arity-2 keys
/// compare lexicographically on (k1, k2).
class SearchKey {
 public:
  static SearchKey one(double k1) { return SearchKey(k1, 0.0, 1); }
  static SearchKey two(double k1, double k2) { return SearchKey(k1, k2, 2); }

  double k1() const noexcept { return k1_; }
  double k2() const noexcept { return k2_; }
  int arity() const noexcept { return arity_; }

  friend std::partial_ordering key_compare(const SearchKey& a, const SearchKey& b);
  friend bool operator<(const SearchKey& a, const SearchKey& b) { return key_compare(a, b) < 0; }
  friend bool operator<=(const SearchKey& a, const SearchKey& b) { return key_compare(a, b) <= 0; }
  friend bool operator>(const SearchKey& a, const SearchKey& b) { return key_compare(a, b) > 0; }
  friend bool operator>=(const SearchKey& a, const SearchKey& b) { return key_compare(a, b) >= 0; }
  friend bool operator==(const SearchKey& a, const SearchKey& b) { return key_compare(a, b) == 0; }

 private:
  SearchKey(double k1, double k2, int arity) : k1_(k1), k2_(k2), arity_(arity) {
    if (std::isnan(k1) || std::isnan(k2)) throw std::invalid_argument("NaN in search key");
  }

  double k1_;
  double k2_;
  int arity_;
};

/// Lexicographic comparison. Comparing keys of different arity is a logic error.
inline std::partial_ordering key_compare(const SearchKey& a, const SearchKey& b) {
  if (a.arity_ != b.arity_) throw std::logic_error("key_compare on keys of different arity");
  if (a.k1_ < b.k1_) return std::partial_ordering::less;
  if (a.k1_ > b.k1_) return std::partial_ordering::greater;
  if (a.arity_ == 1) return std::partial_ordering::equivalent;
  if (a.k2_ < b.k2_) return std::partial_ordering::less;
  if (a.k2_ > b.k2_) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

/// Mutable min-priority queue keyed by node id.
///
/// Binary heap with lazy invalidation: an update pushes a fresh entry and
/// bumps the node's sequence number, so older heap entries for the same id
/// become stale and are dropped when they reach the top. Equal keys pop in
/// insertion (or last-update) order.
template <typename Id, typename Hash = std::hash<Id>>
class KeyedQueue {
 public:
  struct Entry {
    Id id;
    SearchKey key;
  };

  void insert_or_update(const Id& id, const SearchKey& key) {
    auto it = live_.find(id);
    if (it != live_.end() && it->second.key.arity() == key.arity() &&
        it->second.key.k1() == key.k1() && it->second.key.k2() == key.k2()) {
      return;
    }
    const std::uint64_t seq = next_seq_++;
    live_.insert_or_assign(id, Live{key, seq});
    heap_.push_back(HeapEntry{key, seq, id});
    std::push_heap(heap_.begin(), heap_.end(), HeapGreater{});
    maybe_compact();
  }

  /// Removes and returns the entry with the smallest key.
  Entry pop_min() {
    purge_top();
    if (heap_.empty()) throw EmptyQueueError();
    std::pop_heap(heap_.begin(), heap_.end(), HeapGreater{});
    HeapEntry top = std::move(heap_.back());
    heap_.pop_back();
    live_.erase(top.id);
    return Entry{std::move(top.id), top.key};
  }

  /// Smallest key, or nullopt when empty.
  std::optional<SearchKey> top_key() {
    purge_top();
    if (heap_.empty()) return std::nullopt;
    return heap_.front().key;
  }

  std::optional<Id> top_id() {
    purge_top();
    if (heap_.empty()) return std::nullopt;
    return heap_.front().id;
  }

  bool contains(const Id& id) const { return live_.count(id) != 0; }

  std::optional<SearchKey> key_of(const Id& id) const {
    auto it = live_.find(id);
    if (it == live_.end()) return std::nullopt;
    return it->second.key;
  }

  bool erase(const Id& id) {
    if (live_.erase(id) == 0) return false;
    maybe_compact();
    return true;
  }

  std::size_t size() const noexcept { return live_.size(); }
  bool empty() const noexcept { return live_.empty(); }

  void clear() {
    live_.clear();
    heap_.clear();
  }

  /// Live entries in queue-order of arrival (oldest first).
  std::vector<Entry> entries() const {
    std::vector<std::pair<std::uint64_t, Entry>> tmp;
    tmp.reserve(live_.size());
    for (const auto& [id, live] : live_) tmp.push_back({live.seq, Entry{id, live.key}});
    std::sort(tmp.begin(), tmp.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Entry> out;
    out.reserve(tmp.size());
    for (auto& [seq, e] : tmp) out.push_back(std::move(e));
    return out;
  }

  /// Recomputes every key with `fn(id)`. Relative FIFO order of ties is kept.
  template <typename KeyFn>
  void rekey(KeyFn&& fn) {
    auto all = entries();
    clear();
    for (auto& e : all) insert_or_update(e.id, fn(e.id));
  }

 private:
  struct Live {
    SearchKey key;
    std::uint64_t seq;
  };
  struct HeapEntry {
    SearchKey key;
    std::uint64_t seq;
    Id id;
  };
  struct HeapGreater {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
      auto c = key_compare(a.key, b.key);
      if (c != 0) return c > 0;
      return a.seq > b.seq;
    }
  };

  bool is_live(const HeapEntry& e) const {
    auto it = live_.find(e.id);
    return it != live_.end() && it->second.seq == e.seq;
  }

  void purge_top() {
    while (!heap_.empty() && !is_live(heap_.front())) {
      std::pop_heap(heap_.begin(), heap_.end(), HeapGreater{});
      heap_.pop_back();
    }
  }

  void maybe_compact() {
    if (heap_.size() < 64 || heap_.size() < 4 * live_.size()) return;
    std::vector<HeapEntry> kept;
    kept.reserve(live_.size());
    for (auto& e : heap_) {
      if (is_live(e)) kept.push_back(std::move(e));
    }
    heap_ = std::move(kept);
    std::make_heap(heap_.begin(), heap_.end(), HeapGreater{});
  }

  std::vector<HeapEntry> heap_;
  std::unordered_map<Id, Live, Hash> live_;
  std::uint64_t next_seq_ = 0;
};

template <typename Cost>
struct CostTraits {
  static Cost infinity() { return Cost::infinity(); }
};

template <>
struct CostTraits<double> {
  static double infinity() { return kInfinity; }
};

/// Per-node search bookkeeping. `rhs` is only meaningful for the
/// lookahead-based replanners; `pred` is -1 when unset.
template <typename Cost = double>
struct NodeRecord {
  Cost g = CostTraits<Cost>::infinity();
  Cost rhs = CostTraits<Cost>::infinity();
  int pred = -1;
  bool in_open = false;
  bool in_closed = false;
  bool in_incons = false;
};

/// Inflation factor schedule of the anytime planners: starts at eps0 and
/// decreases by `step` per cycle, clamped at 1.
class InflationSchedule {
 public:
  InflationSchedule() : InflationSchedule(1.0, 1.0) {}
  InflationSchedule(double eps0, double step) : eps0_(eps0), step_(step), current_(eps0) {
    if (!(eps0 >= 1.0) || !std::isfinite(eps0)) throw ValidationError("eps0 must be a finite value >= 1");
    if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("eps step must be > 0");
  }

  double eps0() const noexcept { return eps0_; }
  double step() const noexcept { return step_; }
  double current() const noexcept { return current_; }
  int decreases() const noexcept { return decreases_; }
  bool at_floor() const noexcept { return current_ == 1.0; }

  /// Moves one step down. Computed from the decrease count, so repeated
  /// steps do not accumulate rounding drift.
  double decrease() {
    if (at_floor()) return current_;
    ++decreases_;
    double next = eps0_ - step_ * static_cast<double>(decreases_);
    if (next < 1.0 + 1e-9) next = 1.0;
    current_ = next;
    return current_;
  }

  void reset() {
    current_ = eps0_;
    decreases_ = 0;
  }

 private:
  double eps0_;
  double step_;
  double current_;
  int decreases_ = 0;
};

}  // namespace dplan
