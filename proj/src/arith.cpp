#include "yl/arith.hpp"

#include <stdexcept>

#include "yl/errors.hpp"

namespace yl {

std::string to_string(const Q& q) {
    Q c = q;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Q parse_rational(const std::string& s) {
    auto valid_int = [](const std::string& t) {
        if (t.empty()) return false;
        size_t i = (t[0] == '-' || t[0] == '+') ? 1 : 0;
        if (i == t.size()) return false;
        for (; i < t.size(); ++i)
            if (t[i] < '0' || t[i] > '9') return false;
        return true;
    };
    auto strip_plus = [](std::string t) { return (!t.empty() && t[0] == '+') ? t.substr(1) : t; };
    auto slash = s.find('/');
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid_int(num) || !valid_int(den)) throw SchemaError("malformed rational '" + s + "'");
    Z n(strip_plus(num)), d(strip_plus(den));
    if (d == 0) throw SchemaError("zero denominator in '" + s + "'");
    Q q(n, d);
    q.canonicalize();
    return q;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b) {
        auto t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
    if (a == 0 || b == 0) return 0;
    return a / gcd64(a, b) * b;
}

std::int64_t mod64(std::int64_t a, std::int64_t m) {
    auto r = a % m;
    return r < 0 ? r + m : r;
}

std::int64_t powmod64(std::int64_t b, std::int64_t e, std::int64_t m) {
    __int128 r = 1 % m, x = mod64(b, m);
    while (e > 0) {
        if (e & 1) r = r * x % m;
        x = x * x % m;
        e >>= 1;
    }
    return static_cast<std::int64_t>(r);
}

bool is_prime64(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % p == 0) return n == p;
    }
    std::int64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::int64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        __int128 x = powmod64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = x * x % n;
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp) return false;
    }
    return true;
}

std::vector<std::int64_t> primes_up_to(std::int64_t n) {
    std::vector<std::int64_t> out;
    if (n < 2) return out;
    std::vector<bool> sieve(static_cast<size_t>(n) + 1, true);
    for (std::int64_t i = 2; i <= n; ++i) {
        if (!sieve[i]) continue;
        out.push_back(i);
        for (std::int64_t j = i * i; j <= n; j += i) sieve[j] = false;
    }
    return out;
}

std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
    if (n <= 0) throw std::invalid_argument("factorize: nonpositive input");
    std::vector<std::pair<std::int64_t, int>> out;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

std::int64_t euler_phi(std::int64_t n) {
    std::int64_t r = n;
    for (auto [p, e] : factorize(n)) r = r / p * (p - 1);
    return r;
}

Q qpow(const Q& base, long e) {
    if (e < 0) {
        if (base == 0) throw std::domain_error("qpow: zero to negative power");
        return qpow(Q(1) / base, -e);
    }
    Q r = 1, b = base;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

void trim(QPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

int degree(const QPoly& p) { return static_cast<int>(p.size()) - 1; }

QPoly poly_add(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    trim(r);
    return r;
}

QPoly poly_sub(const QPoly& a, const QPoly& b) {
    QPoly r(std::max(a.size(), b.size()));
    for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

QPoly poly_mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    trim(r);
    return r;
}

QPoly poly_scale(const QPoly& a, const Q& c) {
    QPoly r(a);
    for (auto& x : r) x *= c;
    trim(r);
    return r;
}

void poly_divmod(const QPoly& a, const QPoly& b, QPoly& quot, QPoly& rem) {
    if (b.empty()) throw std::domain_error("poly_divmod: division by zero polynomial");
    rem = a;
    trim(rem);
    int db = degree(b);
    if (degree(rem) < db) {
        quot.clear();
        return;
    }
    quot.assign(rem.size() - b.size() + 1, Q(0));
    Q lead_inv = Q(1) / b.back();
    for (int i = degree(rem); i >= db; --i) {
        if (rem[i] == 0) continue;
        Q c = rem[i] * lead_inv;
        quot[i - db] = c;
        for (int j = 0; j <= db; ++j) rem[i - db + j] -= c * b[j];
    }
    trim(quot);
    trim(rem);
}

QPoly poly_mod(const QPoly& a, const QPoly& b) {
    QPoly q, r;
    poly_divmod(a, b, q, r);
    return r;
}

QPoly poly_gcd(const QPoly& a, const QPoly& b) {
    QPoly x = a, y = b;
    trim(x);
    trim(y);
    while (!y.empty()) {
        QPoly r = poly_mod(x, y);
        x = std::move(y);
        y = std::move(r);
    }
    if (!x.empty()) x = poly_scale(x, Q(1) / x.back());
    return x;
}

QPoly poly_inverse_mod(const QPoly& a, const QPoly& m) {
    QPoly r0 = m, r1 = poly_mod(a, m);
    QPoly s0, s1 = {Q(1)};
    while (!r1.empty() && degree(r1) > 0) {
        QPoly q, r;
        poly_divmod(r0, r1, q, r);
        QPoly s = poly_sub(s0, poly_mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    if (r1.empty()) throw std::domain_error("poly_inverse_mod: not invertible");
    return poly_mod(poly_scale(s1, Q(1) / r1[0]), m);
}

Q poly_eval(const QPoly& p, const Q& x) {
    Q r = 0;
    for (size_t i = p.size(); i-- > 0;) r = r * x + p[i];
    return r;
}

QPoly poly_from_ints(const std::vector<long>& c) {
    QPoly p;
    for (long v : c) p.emplace_back(v);
    trim(p);
    return p;
}

QPoly cyclotomic_polynomial(long n) {
    // x^n - 1 divided by Phi_d for all proper divisors d.
    QPoly num(n + 1, Q(0));
    num[0] = -1;
    num[n] = 1;
    for (long d = 1; d < n; ++d) {
        if (n % d) continue;
        QPoly q, r;
        poly_divmod(num, cyclotomic_polynomial(d), q, r);
        num = q;
    }
    return num;
}

}  // namespace yl

namespace yl {

Q simplest_between(const Q& lo_in, const Q& hi_in) {
    Q lo = lo_in, hi = hi_in;
    if (lo > hi) std::swap(lo, hi);
    if (lo <= 0 && hi >= 0) return Q(0);
    if (hi < 0) return -simplest_between(-hi, -lo);
    // 0 < lo <= hi
    Z c;
    mpz_cdiv_q(c.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    if (Q(c) <= hi) return Q(c);
    Z f;
    mpz_fdiv_q(f.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    Q inner = simplest_between(Q(1) / (hi - Q(f)), Q(1) / (lo - Q(f)));
    Q r = Q(f) + Q(1) / inner;
    r.canonicalize();
    return r;
}

}  // namespace yl
