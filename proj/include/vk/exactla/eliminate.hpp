#pragma once

// Sparse structured elimination shared by the mod-p rank and the integer
// Smith normal form. The domain policy decides which entries may serve as
// pivots (anything nonzero mod p; only +-1 over Z) and how rows combine.

#include <chrono>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "vk/core/error.hpp"

namespace vk::exactla {

struct EliminationOptions {
  /// Leave the sparse phase once the active block is at least this dense.
  double dense_density = 0.2;
  /// ... or once it has at most this many nonempty columns. Unit pivots
  /// usually keep the core far smaller than any useful bound, so this is off
  /// by default.
  std::size_t dense_max_cols = 0;
  /// Upper bound on rows*cols of any dense block (memory guard).
  std::size_t max_dense_cells = std::size_t{1} << 27;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

inline void check_deadline(const EliminationOptions& opt) {
  if (opt.deadline && std::chrono::steady_clock::now() > *opt.deadline)
    throw BudgetExceeded("elimination exceeded its wall-clock budget");
}

template <class Dom>
class SparseEliminator {
 public:
  using V = typename Dom::Value;
  struct Entry {
    std::uint32_t col;
    V val;
  };
  using Row = std::vector<Entry>;

  SparseEliminator(std::size_t ncols, std::vector<Row> rows, Dom dom, EliminationOptions opt)
      : dom_(std::move(dom)),
        opt_(opt),
        rows_(std::move(rows)),
        row_active_(rows_.size(), 1),
        col_active_(ncols, 1),
        col_rows_(ncols),
        count_(ncols, 0),
        parked_(ncols, 0),
        dirty_(ncols, 1),
        queued_(ncols, 0),
        seen_(rows_.size(), 0) {
    for (std::uint32_t r = 0; r < rows_.size(); ++r) {
      nnz_ += rows_[r].size();
      if (!rows_[r].empty()) ++nonempty_rows_;
      for (const auto& e : rows_[r]) {
        col_rows_[e.col].push_back(r);
        ++count_[e.col];
      }
    }
    for (std::uint32_t c = 0; c < ncols; ++c) {
      if (count_[c] > 0) {
        ++nonempty_cols_;
        heap_.push({count_[c], c});
      }
    }
  }

  /// Eliminates until no admissible pivot remains or the active block
  /// becomes dense enough for the dense endgame. Returns pivots taken.
  std::size_t run() {
    std::size_t pivots = 0;
    while (!heap_.empty()) {
      if ((pivots & 1023) == 0) {
        check_deadline(opt_);
        if (pivots > 0 && should_go_dense()) break;
      }
      auto [cnt, c] = heap_.top();
      heap_.pop();
      if (!col_active_[c] || cnt != count_[c] || count_[c] == 0) continue;
      if (parked_[c] && !dirty_[c]) continue;
      dirty_[c] = 0;
      auto pivot_row = choose_pivot_row(c);
      if (!pivot_row) {
        parked_[c] = 1;
        continue;
      }
      parked_[c] = 0;
      eliminate(*pivot_row, c);
      ++pivots;
      pivot_values_.push_back(pivot_value_);
    }
    return pivots;
  }

  /// Pivot values in elimination order (units for the integer domain).
  const std::vector<V>& pivot_values() const { return pivot_values_; }

  /// Remaining active rows, with columns renumbered densely 0..k-1.
  std::pair<std::vector<Row>, std::size_t> core() const {
    std::vector<std::int64_t> remap(col_active_.size(), -1);
    std::size_t k = 0;
    for (std::size_t c = 0; c < col_active_.size(); ++c)
      if (col_active_[c] && count_[c] > 0) remap[c] = static_cast<std::int64_t>(k++);
    std::vector<Row> out;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (!row_active_[r] || rows_[r].empty()) continue;
      Row row;
      for (const auto& e : rows_[r]) row.push_back({static_cast<std::uint32_t>(remap[e.col]), e.val});
      out.push_back(std::move(row));
    }
    return {std::move(out), k};
  }

  std::size_t active_nnz() const { return nnz_; }

 private:
  bool should_go_dense() const {
    if (nonempty_rows_ == 0 || nonempty_cols_ == 0) return false;
    const double cells = static_cast<double>(nonempty_rows_) * static_cast<double>(nonempty_cols_);
    if (cells > static_cast<double>(opt_.max_dense_cells)) return false;
    return static_cast<double>(nnz_) / cells >= opt_.dense_density || nonempty_cols_ <= opt_.dense_max_cols;
  }

  static const Entry* find(const Row& row, std::uint32_t c) {
    std::size_t lo = 0, hi = row.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (row[mid].col < c)
        lo = mid + 1;
      else
        hi = mid;
    }
    return (lo < row.size() && row[lo].col == c) ? &row[lo] : nullptr;
  }

  std::optional<std::uint32_t> choose_pivot_row(std::uint32_t c) {
    auto& lst = col_rows_[c];
    std::size_t w = 0;
    std::optional<std::uint32_t> best;
    std::size_t best_len = 0;
    ++stamp_;
    for (std::size_t i = 0; i < lst.size(); ++i) {
      std::uint32_t r = lst[i];
      if (!row_active_[r] || seen_[r] == stamp_) continue;
      const Entry* e = find(rows_[r], c);
      if (!e) continue;
      seen_[r] = stamp_;
      lst[w++] = r;
      if (!dom_.is_pivot(e->val)) continue;
      if (!best || rows_[r].size() < best_len || (rows_[r].size() == best_len && r < *best)) {
        best = r;
        best_len = rows_[r].size();
      }
    }
    lst.resize(w);
    return best;
  }

  // Columns touched by the current pivot are queued once each.
  void touch(std::uint32_t c) {
    dirty_[c] = 1;
    if (!queued_[c]) {
      queued_[c] = 1;
      touched_.push_back(c);
    }
  }

  void flush_touched() {
    for (auto c : touched_) {
      queued_[c] = 0;
      if (col_active_[c] && count_[c] > 0) heap_.push({count_[c], c});
    }
    touched_.clear();
    // Stale entries dominate once the heap outgrows the live columns.
    if (heap_.size() > 4 * nonempty_cols_ + 1024) {
      std::vector<HeapItem> live;
      live.reserve(nonempty_cols_);
      for (std::uint32_t c = 0; c < count_.size(); ++c)
        if (col_active_[c] && count_[c] > 0) live.push_back({count_[c], c});
      heap_ = decltype(heap_)(std::greater<>{}, std::move(live));
    }
  }

  void dec_count(std::uint32_t c) {
    if (--count_[c] == 0) --nonempty_cols_;
  }
  void inc_count(std::uint32_t c) {
    if (count_[c]++ == 0) ++nonempty_cols_;
  }

  void eliminate(std::uint32_t pr, std::uint32_t pc) {
    const Row pivot = rows_[pr];
    const Entry* pe = find(pivot, pc);
    pivot_value_ = pe->val;
    const V inv = dom_.inverse(pe->val);
    // choose_pivot_row has just compacted this list to distinct live rows.
    std::vector<std::uint32_t> targets;
    for (std::uint32_t r : col_rows_[pc])
      if (r != pr) targets.push_back(r);
    for (std::uint32_t r : targets) {
      Row& row = rows_[r];
      const V factor = dom_.mul(find(row, pc)->val, inv);
      Row merged;
      merged.reserve(row.size() + pivot.size());
      std::size_t i = 0, j = 0;
      while (i < row.size() || j < pivot.size()) {
        if (j == pivot.size() || (i < row.size() && row[i].col < pivot[j].col)) {
          merged.push_back(std::move(row[i++]));
        } else if (i == row.size() || pivot[j].col < row[i].col) {
          std::uint32_t c = pivot[j].col;
          V v = dom_.neg_mul(factor, pivot[j].val);
          ++j;
          if (dom_.is_zero(v)) continue;
          merged.push_back({c, std::move(v)});
          col_rows_[c].push_back(r);
          inc_count(c);
          ++nnz_;
          touch(c);
        } else {
          std::uint32_t c = row[i].col;
          V v = dom_.sub_mul(row[i].val, factor, pivot[j].val);
          ++i;
          ++j;
          if (dom_.is_zero(v)) {
            dec_count(c);
            --nnz_;
            touch(c);
            continue;
          }
          merged.push_back({c, std::move(v)});
          touch(c);
        }
      }
      if (merged.empty()) --nonempty_rows_;
      row = std::move(merged);
    }
    // Drop the pivot row and column.
    for (const auto& e : pivot) {
      dec_count(e.col);
      --nnz_;
      touch(e.col);
    }
    row_active_[pr] = 0;
    rows_[pr].clear();
    --nonempty_rows_;
    col_active_[pc] = 0;
    if (count_[pc] > 0) {
      nonempty_cols_ -= 1;
      count_[pc] = 0;
    }
    col_rows_[pc].clear();
    col_rows_[pc].shrink_to_fit();
    flush_touched();
  }

  struct HeapItem {
    std::size_t count;
    std::uint32_t col;
    bool operator>(const HeapItem& o) const { return count != o.count ? count > o.count : col > o.col; }
  };

  Dom dom_;
  EliminationOptions opt_;
  std::vector<Row> rows_;
  std::vector<char> row_active_;
  std::vector<char> col_active_;
  std::vector<std::vector<std::uint32_t>> col_rows_;
  std::vector<std::size_t> count_;
  std::vector<char> parked_;
  std::vector<char> dirty_;
  std::vector<char> queued_;
  std::vector<std::uint32_t> touched_;
  std::vector<std::uint64_t> seen_;
  std::uint64_t stamp_ = 0;
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap_;
  std::vector<V> pivot_values_;
  V pivot_value_{};
  std::size_t nnz_ = 0;
  std::size_t nonempty_rows_ = 0;
  std::size_t nonempty_cols_ = 0;
};

}  // namespace vk::exactla
