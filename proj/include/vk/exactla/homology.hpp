#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vk/core/error.hpp"
#include "vk/exactla/rank.hpp"
#include "vk/exactla/smith.hpp"
#include "vk/exactla/sparse.hpp"

namespace vk::exactla {

struct HomologyOptions {
  SnfOptions snf;
  /// Primes used for the fast rank of d_k; disagreement triggers an SNF rank.
  std::vector<std::uint64_t> primes{1000000007ULL, 998244353ULL, 2147483647ULL};
  /// Exact rank of d_k when the caller already knows it (e.g. from its SNF).
  std::optional<std::size_t> known_rank_dk;
  /// Precomputed SNF of d_{k+1}.
  std::optional<ElementaryDivisors> known_snf_dk1;
};

struct HomologyResult {
  std::size_t betti = 0;
  ElementaryDivisors torsion;
  std::size_t rank_dk = 0;
  std::size_t rank_dk1 = 0;
};

/// Integral homology ker d_k / im d_{k+1} at a chain group of rank
/// cols(d_k) = rows(d_{k+1}). The torsion is the nontrivial part of the
/// Smith form of d_{k+1}: ker d_k is saturated, so the whole torsion of
/// coker d_{k+1} already lies in it.
inline HomologyResult homology_of_pair(const SparseIntMatrix& dk, const SparseIntMatrix& dk1,
                                       const HomologyOptions& opt = {}) {
  if (dk.cols() != dk1.rows())
    throw InvalidInput("chain group sizes disagree: d_k has " + std::to_string(dk.cols()) +
                       " columns, d_{k+1} has " + std::to_string(dk1.rows()) + " rows");
  if (!multiply(dk, dk1).is_zero()) throw InvalidInput("d_k * d_{k+1} != 0");

  HomologyResult out;
  out.torsion = opt.known_snf_dk1 ? *opt.known_snf_dk1 : smith_normal_form(dk1, opt.snf);
  out.rank_dk1 = out.torsion.rank;

  if (opt.known_rank_dk) {
    out.rank_dk = *opt.known_rank_dk;
  } else if (dk.is_zero()) {
    out.rank_dk = 0;
  } else {
    auto ranks = ranks_mod_primes(dk, opt.primes, opt.snf.elimination);
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto& [p, r] : ranks) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    out.rank_dk = (lo == hi) ? hi : smith_normal_form(dk, opt.snf).rank;
  }

  const std::size_t n = dk.cols();
  if (out.rank_dk + out.rank_dk1 > n)
    throw InternalError("ranks of d_k and d_{k+1} exceed the chain group rank");
  out.betti = n - out.rank_dk - out.rank_dk1;
  return out;
}

}  // namespace vk::exactla
