#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace yl {

using Z = mpz_class;
using Q = mpq_class;

// Rationals serialize as "num/den" (or "num" when den = 1).
std::string to_string(const Q& q);
Q parse_rational(const std::string& s);

std::int64_t gcd64(std::int64_t a, std::int64_t b);
std::int64_t lcm64(std::int64_t a, std::int64_t b);
std::int64_t mod64(std::int64_t a, std::int64_t m);
std::int64_t powmod64(std::int64_t b, std::int64_t e, std::int64_t m);
bool is_prime64(std::int64_t n);
std::vector<std::int64_t> primes_up_to(std::int64_t n);
std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n);
std::int64_t euler_phi(std::int64_t n);
Q qpow(const Q& base, long e);
// a/b in lowest terms.
inline Q frac(long a, long b) {
    Q q(a, b);
    q.canonicalize();
    return q;
}

// Dense polynomials over Q, ascending coefficients, no trailing zeros.
using QPoly = std::vector<Q>;

void trim(QPoly& p);
int degree(const QPoly& p);
QPoly poly_add(const QPoly& a, const QPoly& b);
QPoly poly_sub(const QPoly& a, const QPoly& b);
QPoly poly_mul(const QPoly& a, const QPoly& b);
QPoly poly_scale(const QPoly& a, const Q& c);
// Division with remainder; b must be nonzero.
void poly_divmod(const QPoly& a, const QPoly& b, QPoly& quot, QPoly& rem);
QPoly poly_mod(const QPoly& a, const QPoly& b);
QPoly poly_gcd(const QPoly& a, const QPoly& b);
// Returns s with s*a = 1 mod m; a must be coprime to m.
QPoly poly_inverse_mod(const QPoly& a, const QPoly& m);
Q poly_eval(const QPoly& p, const Q& x);
QPoly poly_from_ints(const std::vector<long>& c);
QPoly cyclotomic_polynomial(long n);

}  // namespace yl

namespace yl {

// Simplest rational (least denominator, then least |numerator|) in [lo, hi].
Q simplest_between(const Q& lo, const Q& hi);

}  // namespace yl
