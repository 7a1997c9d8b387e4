#pragma once

#include <cstdint>
#include <future>
#include <map>
#include <vector>

#include "vk/core/error.hpp"
#include "vk/exactla/domains.hpp"
#include "vk/exactla/eliminate.hpp"
#include "vk/exactla/sparse.hpp"

namespace vk::exactla {

/// Splits a column-stored matrix into sorted rows for the eliminator.
template <class Dom, class Convert>
std::vector<typename SparseEliminator<Dom>::Row> to_rows(const SparseIntMatrix& m, Convert convert) {
  std::vector<typename SparseEliminator<Dom>::Row> rows(m.rows());
  for (std::size_t c = 0; c < m.cols(); ++c)
    for (const auto& [r, v] : m.column(c)) {
      auto x = convert(v);
      if (x != 0) rows[r].push_back({static_cast<std::uint32_t>(c), std::move(x)});
    }
  return rows;
}

/// Dense Gaussian elimination mod p; `a` is row-major rows x cols.
inline std::size_t dense_rank_mod_p(std::vector<std::uint64_t> a, std::size_t rows, std::size_t cols,
                                    const ModPDomain& dom, const EliminationOptions& opt = {}) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    if ((c & 63) == 0) check_deadline(opt);
    std::size_t p = rank;
    while (p < rows && a[p * cols + c] == 0) ++p;
    if (p == rows) continue;
    if (p != rank)
      for (std::size_t j = c; j < cols; ++j) std::swap(a[p * cols + j], a[rank * cols + j]);
    const std::uint64_t inv = dom.inverse(a[rank * cols + c]);
    for (std::size_t j = c; j < cols; ++j) a[rank * cols + j] = dom.mul(a[rank * cols + j], inv);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      const std::uint64_t f = a[r * cols + c];
      if (f == 0) continue;
      for (std::size_t j = c; j < cols; ++j) a[r * cols + j] = dom.sub_mul(a[r * cols + j], f, a[rank * cols + j]);
    }
    ++rank;
  }
  return rank;
}

/// Rank over F_p: sparse Markowitz-style elimination, dense on the core.
inline std::size_t rank_mod_p(const SparseIntMatrix& m, std::uint64_t p, const EliminationOptions& opt = {}) {
  if (p < 2) throw InvalidInput("rank_mod_p needs a prime");
  ModPDomain dom(p);
  auto rows = to_rows<ModPDomain>(m, [&](const Int& v) { return dom.reduce(v); });
  SparseEliminator<ModPDomain> elim(m.cols(), std::move(rows), dom, opt);
  std::size_t rank = elim.run();
  auto [core, k] = elim.core();
  if (!core.empty()) {
    std::vector<std::uint64_t> a(core.size() * k, 0);
    for (std::size_t r = 0; r < core.size(); ++r)
      for (const auto& e : core[r]) a[r * k + e.col] = e.val;
    rank += dense_rank_mod_p(std::move(a), core.size(), k, dom, opt);
  }
  return rank;
}

/// Ranks at several primes, computed concurrently.
inline std::map<std::uint64_t, std::size_t> ranks_mod_primes(const SparseIntMatrix& m,
                                                             const std::vector<std::uint64_t>& primes,
                                                             const EliminationOptions& opt = {}) {
  std::vector<std::future<std::size_t>> jobs;
  for (auto p : primes) jobs.push_back(std::async(std::launch::async, [&m, p, opt] { return rank_mod_p(m, p, opt); }));
  std::map<std::uint64_t, std::size_t> out;
  for (std::size_t i = 0; i < primes.size(); ++i) out[primes[i]] = jobs[i].get();
  return out;
}

}  // namespace vk::exactla
