#pragma once

// Arithmetic policies for SparseEliminator.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>

namespace vk::exactla {

/// Thrown by the machine-integer domains when a result leaves int64.
struct Overflow : std::overflow_error {
  Overflow() : std::overflow_error("int64 overflow during elimination") {}
};

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow();
  return r;
}
inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw Overflow();
  return r;
}

/// Arithmetic in Z/p for word-size primes.
struct ModPDomain {
  using Value = std::uint64_t;
  std::uint64_t p;

  explicit ModPDomain(std::uint64_t prime) : p(prime) {}

  std::uint64_t reduce(const mpz_class& v) const {
    mpz_class r;
    mpz_fdiv_r_ui(r.get_mpz_t(), v.get_mpz_t(), p);
    return r.get_ui();
  }
  std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) const {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
  }
  bool is_zero(Value v) const { return v == 0; }
  bool is_pivot(Value v) const { return v != 0; }
  Value inverse(Value a) const {
    // Extended Euclid on signed 128-bit to stay exact for any word prime.
    __int128 t = 0, nt = 1, r = p, nr = a;
    while (nr != 0) {
      __int128 q = r / nr;
      __int128 tmp = t - q * nt;
      t = nt;
      nt = tmp;
      tmp = r - q * nr;
      r = nr;
      nr = tmp;
    }
    if (t < 0) t += p;
    return static_cast<Value>(t);
  }
  Value mul(Value a, Value b) const { return mulmod(a, b); }
  Value neg_mul(Value f, Value b) const {
    Value m = mulmod(f, b);
    return m == 0 ? 0 : p - m;
  }
  Value sub_mul(Value a, Value f, Value b) const {
    Value m = mulmod(f, b);
    return a >= m ? a - m : a + (p - m);
  }
};

/// Exact integers in int64 with overflow detection; only +-1 pivots.
struct Int64UnitDomain {
  using Value = std::int64_t;
  bool is_zero(Value v) const { return v == 0; }
  bool is_pivot(Value v) const { return v == 1 || v == -1; }
  Value inverse(Value a) const { return a; }
  Value mul(Value a, Value b) const { return checked_mul(a, b); }
  Value neg_mul(Value f, Value b) const { return checked_sub(0, checked_mul(f, b)); }
  Value sub_mul(Value a, Value f, Value b) const { return checked_sub(a, checked_mul(f, b)); }
};

/// Exact arbitrary-precision integers; only +-1 pivots.
struct MpzUnitDomain {
  using Value = mpz_class;
  bool is_zero(const Value& v) const { return v == 0; }
  bool is_pivot(const Value& v) const { return v == 1 || v == -1; }
  Value inverse(const Value& a) const { return a; }
  Value mul(const Value& a, const Value& b) const { return a * b; }
  Value neg_mul(const Value& f, const Value& b) const { return -(f * b); }
  Value sub_mul(const Value& a, const Value& f, const Value& b) const { return a - f * b; }
};

}  // namespace vk::exactla
