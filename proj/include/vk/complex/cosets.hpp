#pragma once

// Gamma_0(level)\GL_n(O) as the projective space P^{n-1}(O/level) of bottom
// rows modulo units, with GL_n(O) acting on the right. A row is canonical
// when, at every prime power p^a dividing the level, its first coordinate
// that is a unit mod p equals 1 mod p^a.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "vk/algebra/field.hpp"
#include "vk/algebra/ideal.hpp"
#include "vk/algebra/residue.hpp"
#include "vk/core/error.hpp"
#include "vk/core/linalg.hpp"

namespace vk::complex {

using algebra::Elem;
using algebra::NumberField;
using algebra::OIdeal;
using OMat = std::vector<std::vector<Elem>>;

class CosetSpace {
 public:
  using Row = std::vector<std::uint32_t>;

  CosetSpace(std::shared_ptr<const NumberField> F, int n, const OIdeal& level)
      : F_(std::move(F)), n_(n), level_(level), ring_(level) {
    if (n_ < 1) throw InvalidInput("rank n must be positive");
    if (level_.norm() == 0) throw InvalidInput("level must be a nonzero ideal");
    q_ = ring_.size();
    if (q_ > UINT32_MAX) throw InvalidInput("level norm too large");
    long double packed = 1;
    for (int i = 0; i < n_; ++i) packed *= static_cast<long double>(q_);
    if (packed > 9.0e18L) throw InvalidInput("coset space too large for level of norm " + level_.norm().get_str());
    elems_.reserve(q_);
    for (std::uint64_t i = 0; i < q_; ++i) elems_.push_back(ring_.element(i));
    if (q_ <= kTableLimit) {
      mul_.resize(q_ * q_);
      add_.resize(q_ * q_);
      for (std::uint64_t a = 0; a < q_; ++a)
        for (std::uint64_t b = 0; b < q_; ++b) {
          mul_[a * q_ + b] = static_cast<std::uint32_t>(ring_.index(ring_.mul(elems_[a], elems_[b])));
          add_[a * q_ + b] = static_cast<std::uint32_t>(ring_.index(ring_.add(elems_[a], elems_[b])));
        }
    }
    inv_.assign(q_, kNone);
    for (std::uint64_t a = 0; a < q_; ++a)
      if (inv_[a] == kNone && ring_.is_unit(elems_[a])) {
        auto b = idx(ring_.inverse(elems_[a]));
        inv_[a] = b;
        inv_[b] = static_cast<std::uint32_t>(a);
      }
    build_local_data();
    enumerate();
  }

  const NumberField& field() const { return *F_; }
  int n() const { return n_; }
  const OIdeal& level() const { return level_; }
  std::size_t size() const { return points_.size(); }
  const Row& point(std::size_t i) const { return points_[i]; }
  const std::vector<Row>& points() const { return points_; }

  /// Ring index of an element of O.
  std::uint32_t idx(const Elem& a) const { return static_cast<std::uint32_t>(ring_.index(ring_.reduce(a))); }
  const Elem& element(std::uint32_t i) const { return elems_[i]; }

  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    if (!mul_.empty()) return mul_[static_cast<std::uint64_t>(a) * q_ + b];
    return idx(ring_.mul(elems_[a], elems_[b]));
  }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    if (!add_.empty()) return add_[static_cast<std::uint64_t>(a) * q_ + b];
    return idx(ring_.add(elems_[a], elems_[b]));
  }

  /// Canonical representative of the class of a row with unit content.
  Row normalize(const Row& x) const {
    if (static_cast<int>(x.size()) != n_) throw InvalidInput("row has wrong length");
    // z is congruent to the local pivot at every prime power.
    std::uint32_t z = zero_;
    for (std::size_t p = 0; p < locals_.size(); ++p) {
      const auto& L = locals_[p];
      int piv = -1;
      for (int i = 0; i < n_ && piv < 0; ++i)
        if (!L.in_prime[x[i]]) piv = i;
      if (piv < 0) throw InvalidInput("row does not have unit content modulo the level");
      z = add(z, mul(L.idempotent, x[piv]));
    }
    std::uint32_t u = inverse(z);
    Row out(n_);
    for (int i = 0; i < n_; ++i) out[i] = mul(u, x[i]);
    return out;
  }

  std::size_t index_of(const Row& x) const {
    auto it = index_.find(pack(normalize(x)));
    if (it == index_.end()) throw InternalError("normalized row missing from the coset table");
    return it->second;
  }

  /// Row of ring indices reduced from an O-row.
  Row row(const std::vector<Elem>& xs) const {
    Row r;
    for (const auto& x : xs) r.push_back(idx(x));
    return r;
  }

  /// Index of x . g for the point with index i.
  std::size_t act(std::size_t i, const std::vector<std::vector<std::uint32_t>>& g) const {
    const Row& x = points_[i];
    Row y(n_, zero_);
    for (int j = 0; j < n_; ++j)
      for (int k = 0; k < n_; ++k) y[j] = add(y[j], mul(x[k], g[k][j]));
    return index_of(y);
  }

  /// Permutation of the points induced by right multiplication by g.
  std::vector<std::uint32_t> permutation(const OMat& g) const {
    std::vector<std::vector<std::uint32_t>> gi(n_, std::vector<std::uint32_t>(n_));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) gi[i][j] = idx(g[i][j]);
    std::vector<std::uint32_t> perm(size());
    std::vector<char> hit(size(), 0);
    for (std::size_t i = 0; i < size(); ++i) {
      auto j = act(i, gi);
      if (hit[j]) throw InvalidInput("matrix does not act bijectively on the coset space");
      hit[j] = 1;
      perm[i] = static_cast<std::uint32_t>(j);
    }
    return perm;
  }

  /// Same space with the points listed in a shuffled order.
  CosetSpace shuffled(std::uint64_t seed) const {
    CosetSpace c = *this;
    std::mt19937_64 rng(seed);
    std::shuffle(c.points_.begin(), c.points_.end(), rng);
    c.index_.clear();
    for (std::size_t i = 0; i < c.points_.size(); ++i) c.index_.emplace(c.pack(c.points_[i]), i);
    return c;
  }

 private:
  static constexpr std::uint64_t kTableLimit = 2048;
  static constexpr std::uint32_t kNone = UINT32_MAX;

  struct Local {
    OIdeal prime;
    std::uint32_t idempotent = 0;  // 1 mod p^a, 0 mod the rest of the level
    std::vector<char> in_prime;    // per ring element
    std::vector<std::uint32_t> component;  // ring elements congruent to 0 away from p
  };

  std::uint64_t pack(const Row& r) const {
    std::uint64_t v = 0;
    for (auto x : r) v = v * q_ + x;
    return v;
  }

  std::uint32_t inverse(std::uint32_t a) const {
    if (inv_[a] == kNone) throw InternalError("normalization hit a non-unit");
    return inv_[a];
  }

  void build_local_data() {
    zero_ = idx(F_->zero());
    if (level_.is_unit_ideal()) return;
    auto factors = algebra::ideal_factor(level_);
    for (const auto& f : factors) {
      Local L;
      L.prime = f.prime.ideal;
      const OIdeal pa = f.prime.ideal.pow(f.exponent);
      OIdeal rest = OIdeal::unit(*F_);
      for (const auto& g : factors)
        if (!(g.prime.ideal == f.prime.ideal)) rest = rest * g.prime.ideal.pow(g.exponent);
      bool found = false;
      for (std::uint64_t t = 0; t < q_ && !found; ++t)
        if (rest.contains(elems_[t]) && pa.contains(F_->sub(elems_[t], F_->one()))) {
          L.idempotent = static_cast<std::uint32_t>(t);
          found = true;
        }
      if (!found) throw InternalError("no CRT idempotent for " + f.prime.ideal.hnf_string());
      L.in_prime.resize(q_);
      for (std::uint64_t t = 0; t < q_; ++t) {
        L.in_prime[t] = f.prime.ideal.contains(elems_[t]);
        if (rest.contains(elems_[t])) L.component.push_back(static_cast<std::uint32_t>(t));
      }
      locals_.push_back(std::move(L));
    }
  }

  // Local canonical rows, combined across primes by CRT addition.
  void enumerate() {
    if (locals_.empty()) {
      points_.push_back(Row(n_, zero_));
      index_.emplace(pack(points_.back()), 0);
      return;
    }
    std::vector<Row> acc{Row(n_, zero_)};
    for (const auto& L : locals_) {
      std::vector<std::uint32_t> nonunit;
      for (auto c : L.component)
        if (L.in_prime[c]) nonunit.push_back(c);
      std::vector<Row> local;
      for (int piv = 0; piv < n_; ++piv) {
        Row r(n_, zero_);
        r[piv] = L.idempotent;
        // Coordinates before the pivot are non-units, after it arbitrary.
        auto rec = [&](auto&& self, int i) -> void {
          if (i == n_) {
            local.push_back(r);
            return;
          }
          if (i == piv) return self(self, i + 1);
          for (auto c : (i < piv ? nonunit : L.component)) {
            r[i] = c;
            self(self, i + 1);
          }
        };
        rec(rec, 0);
      }
      std::vector<Row> next;
      next.reserve(acc.size() * local.size());
      for (const auto& a : acc)
        for (const auto& b : local) {
          Row s(n_);
          for (int i = 0; i < n_; ++i) s[i] = add(a[i], b[i]);
          next.push_back(std::move(s));
        }
      acc = std::move(next);
    }
    std::sort(acc.begin(), acc.end());
    points_ = std::move(acc);
    index_.reserve(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (normalize(points_[i]) != points_[i]) throw InternalError("coset enumeration produced a non-canonical row");
      index_.emplace(pack(points_[i]), i);
    }
  }

  std::shared_ptr<const NumberField> F_;
  int n_;
  OIdeal level_;
  algebra::ResidueRing ring_;
  std::uint64_t q_ = 1;
  std::vector<Elem> elems_;
  std::vector<std::uint32_t> mul_, add_;
  std::uint32_t zero_ = 0;
  std::vector<Local> locals_;
  std::vector<Row> points_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::vector<std::uint32_t> inv_;
};

inline CosetSpace gamma0_cosets(std::shared_ptr<const NumberField> F, int n, const OIdeal& level) {
  return CosetSpace(std::move(F), n, level);
}

}  // namespace vk::complex
