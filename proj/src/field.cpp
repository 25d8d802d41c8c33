#include "nca/field.hpp"

namespace nca::gf {

namespace {

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp,
                         std::uint64_t m) {
  std::uint64_t acc = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) acc = mulmod_u64(acc, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return acc;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                          23ull, 29ull, 31ull, 37ull}) {
    if (n % q == 0) return n == q;
  }
  std::uint64_t d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // This witness set decides primality exactly for all n < 2^64.
  for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                          23ull, 29ull, 31ull, 37ull}) {
    std::uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

FieldContext::FieldContext(Elem p) : p_(p) {
  if (p <= 2) throw ValidationError("field modulus must exceed 2");
  if (p >= (1ull << 32))
    throw ValidationError("field modulus must be below 2^32");
  if (!is_prime_u64(p))
    throw ValidationError("field modulus " + std::to_string(p) +
                          " is not prime");
}

Elem FieldContext::inv(Elem a) const {
  if (a == 0) throw ZeroInverseError();
  // Extended Euclid on (a, p); p prime guarantees gcd 1.
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = static_cast<std::int64_t>(p_),
               new_r = static_cast<std::int64_t>(a);
  while (new_r != 0) {
    std::int64_t q = r / new_r;
    t -= q * new_t;
    std::swap(t, new_t);
    r -= q * new_r;
    std::swap(r, new_r);
  }
  if (t < 0) t += static_cast<std::int64_t>(p_);
  return static_cast<Elem>(t);
}

Elem FieldContext::pow(Elem a, std::uint64_t e) const {
  Elem acc = 1;
  a %= p_;
  while (e > 0) {
    if (e & 1) acc = mul(acc, a);
    a = mul(a, a);
    e >>= 1;
  }
  return acc;
}

}  // namespace nca::gf
