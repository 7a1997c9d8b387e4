#pragma once

#include <gmpxx.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "vk/algebra/field.hpp"
#include "vk/core/error.hpp"

namespace vk::algebra {

/// |det| of the logarithmic embedding of the fundamental units, one place dropped.
inline long double regulator(const NumberField& F) {
  const int rank = F.unit_rank();
  if (rank == 0) return 1.0L;
  const auto& units = F.fundamental_units();
  if (static_cast<int>(units.size()) != rank)
    throw ConfigError("field " + F.label() + " needs " + std::to_string(rank) + " fundamental units");
  std::vector<std::vector<long double>> m(rank, std::vector<long double>(rank));
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j) {
      const long double w = i < F.r() ? 1.0L : 2.0L;
      m[i][j] = w * std::log(std::abs(F.embed(units[j], i)));
    }
  long double det = 1;
  for (int c = 0; c < rank; ++c) {
    int piv = c;
    for (int i = c + 1; i < rank; ++i)
      if (std::fabs(m[i][c]) > std::fabs(m[piv][c])) piv = i;
    if (m[piv][c] == 0) throw ConfigError("fundamental units of " + F.label() + " are dependent");
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (int i = c + 1; i < rank; ++i) {
      const long double f = m[i][c] / m[c][c];
      for (int j = c; j < rank; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return std::fabs(det);
}

/// [O^x : (O^x)^n] = gcd(n, w) * n^rank with w the number of roots of unity.
inline Int unit_index(const NumberField& F, unsigned long n) {
  if (n == 0) throw InvalidInput("unit_index needs n >= 1");
  Int idx = std::gcd(n, static_cast<unsigned long>(F.torsion_order()));
  for (int k = 0; k < F.unit_rank(); ++k) idx *= n;
  return idx;
}

}  // namespace vk::algebra
