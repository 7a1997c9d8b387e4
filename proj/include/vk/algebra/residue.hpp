#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "vk/algebra/field.hpp"
#include "vk/algebra/ideal.hpp"
#include "vk/core/error.hpp"

namespace vk::algebra {

/// O / I with elements kept in canonical reduced form (0 <= x_i < h_ii).
class ResidueRing {
 public:
  explicit ResidueRing(const OIdeal& modulus) : mod_(modulus), F_(&modulus.field()) {
    const int d = F_->degree();
    radix_.resize(d);
    std::uint64_t acc = 1;
    for (int i = 0; i < d; ++i) {
      const Int& h = mod_.hnf()(i, i);
      if (!h.fits_ulong_p()) throw InvalidInput("residue ring too large");
      radix_[i] = h.get_ui();
      if (acc > UINT64_MAX / radix_[i]) throw InvalidInput("residue ring too large");
      acc *= radix_[i];
    }
    size_ = acc;
    unit_count_ = mod_.norm();
    for (const auto& f : ideal_factor(mod_)) {
      const Int q = f.prime.norm();
      unit_count_ = unit_count_ / q * (q - 1);
      primes_.push_back(f.prime.ideal);
    }
  }

  const OIdeal& modulus() const { return mod_; }
  const NumberField& field() const { return *F_; }
  std::uint64_t size() const { return size_; }
  /// Order of the unit group (O/I)^x.
  const Int& unit_count() const { return unit_count_; }

  Elem reduce(const Elem& a) const { return mod_.reduce(a); }
  Elem add(const Elem& a, const Elem& b) const { return reduce(F_->add(a, b)); }
  Elem sub(const Elem& a, const Elem& b) const { return reduce(F_->sub(a, b)); }
  Elem neg(const Elem& a) const { return reduce(F_->neg(a)); }
  Elem mul(const Elem& a, const Elem& b) const { return reduce(F_->mul(a, b)); }
  Elem one() const { return reduce(F_->one()); }
  Elem zero() const { return F_->zero(); }
  bool is_zero(const Elem& a) const { return mod_.contains(a); }

  Elem pow(Elem a, Int e) const {
    Elem r = one();
    a = reduce(a);
    while (e > 0) {
      if (mpz_odd_p(e.get_mpz_t())) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  /// a is a unit iff it lies in no prime dividing the modulus.
  bool is_unit(const Elem& a) const {
    for (const auto& P : primes_)
      if (P.contains(a)) return false;
    return true;
  }

  Elem inverse(const Elem& a) const {
    if (!is_unit(a)) throw InvalidInput("element is not a unit modulo the ideal");
    return pow(a, unit_count_ - 1);
  }

  /// Mixed-radix index of a reduced element, in [0, size).
  std::uint64_t index(const Elem& reduced) const {
    std::uint64_t idx = 0, scale = 1;
    for (std::size_t i = 0; i < radix_.size(); ++i) {
      idx += reduced[i].get_ui() * scale;
      scale *= radix_[i];
    }
    return idx;
  }

  Elem element(std::uint64_t idx) const {
    Elem e(radix_.size());
    for (std::size_t i = 0; i < radix_.size(); ++i) {
      e[i] = static_cast<unsigned long>(idx % radix_[i]);
      idx /= radix_[i];
    }
    return e;
  }

 private:
  OIdeal mod_;
  const NumberField* F_;
  std::vector<std::uint64_t> radix_;
  std::uint64_t size_ = 1;
  Int unit_count_;
  std::vector<OIdeal> primes_;
};

}  // namespace vk::algebra
