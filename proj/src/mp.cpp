#include "yl/mp.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace yl {

namespace {
R rmax(const R& a, const R& b) { return a < b ? b : a; }
}  // namespace

PrecisionScope::PrecisionScope(unsigned digits) : saved_(R::default_precision()) {
    R::default_precision(digits);
}

PrecisionScope::~PrecisionScope() { R::default_precision(saved_); }

unsigned working_digits() { return R::default_precision(); }

R at_working(const R& x) {
    R r;
    mpfr_set(r.backend().data(), x.backend().data(), MPFR_RNDN);
    return r;
}

R to_real(const Q& q) {
    R x;
    mpfr_set_q(x.backend().data(), q.get_mpq_t(), MPFR_RNDN);
    return x;
}

R to_real(const Z& z) {
    R x;
    mpfr_set_z(x.backend().data(), z.get_mpz_t(), MPFR_RNDN);
    return x;
}

R real_pi() {
    R x;
    mpfr_const_pi(x.backend().data(), MPFR_RNDN);
    return x;
}

Q to_rational(const R& x) {
    Q q;
    mpfr_get_q(q.get_mpq_t(), x.backend().data());
    q.canonicalize();
    return q;
}

std::string format_real(const R& x, int digits) {
    return x.str(digits, std::ios_base::scientific);
}

Cx& Cx::operator/=(const Cx& o) {
    R d = o.re * o.re + o.im * o.im;
    R r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = r;
    return *this;
}

R abs(const Cx& a) { return boost::multiprecision::hypot(a.re, a.im); }
R norm2(const Cx& a) { return a.re * a.re + a.im * a.im; }
R arg(const Cx& a) { return boost::multiprecision::atan2(a.im, a.re); }

Cx exp(const Cx& z) {
    R m = boost::multiprecision::exp(z.re);
    return Cx(m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im));
}

Cx log(const Cx& z) { return Cx(boost::multiprecision::log(abs(z)), arg(z)); }

Cx sqrt(const Cx& z) {
    R r = abs(z);
    if (r == 0) return Cx();
    R a = boost::multiprecision::sqrt((r + boost::multiprecision::abs(z.re)) / 2);
    if (z.re >= 0) return Cx(a, z.im / (2 * a));
    R b = z.im < 0 ? R(-a) : a;
    return Cx(boost::multiprecision::abs(z.im) / (2 * a), b);
}

Cx pow(const R& a, const Cx& z) {
    R la = boost::multiprecision::log(a);
    return exp(Cx(z.re * la, z.im * la));
}

Cx expi(const R& t) { return Cx(boost::multiprecision::cos(t), boost::multiprecision::sin(t)); }

Cx root_of_unity(long num, long den) {
    R t = 2 * real_pi() * R(num) / R(den);
    return expi(t);
}

namespace {

// B_{2k} for k = 0..count-1, exact.
const std::vector<Q>& even_bernoulli(size_t count) {
    static std::mutex mu;
    static std::vector<Q> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (cache.size() >= count) return cache;
    size_t n = 2 * count + 1;
    std::vector<Q> b(n + 1);
    b[0] = 1;
    for (size_t m = 1; m <= n; ++m) {
        Q s = 0;
        Z binom = 1;  // C(m+1, j)
        for (size_t j = 0; j < m; ++j) {
            s += Q(binom) * b[j];
            binom = binom * Z(static_cast<unsigned long>(m + 1 - j)) / Z(static_cast<unsigned long>(j + 1));
        }
        b[m] = -s / Q(static_cast<unsigned long>(m + 1));
    }
    cache.clear();
    for (size_t k = 0; k < count; ++k) cache.push_back(b[2 * k]);
    return cache;
}

}  // namespace

Cx lgamma(const Cx& z) {
    unsigned digits = working_digits();
    double n0 = 0.7 * digits + 8;
    Cx w = z;
    Cx shift_log;
    while (w.re < n0) {
        if (w.re <= 0 && boost::multiprecision::abs(w.im) < R(1e-30) &&
            boost::multiprecision::abs(w.re - boost::multiprecision::round(w.re)) < R(1e-30))
            throw std::domain_error("lgamma: pole");
        shift_log += log(w);
        w += Cx(1);
    }
    const size_t kmax = static_cast<size_t>(digits) + 20;
    const auto& bern = even_bernoulli(kmax + 1);
    R half_log_2pi = boost::multiprecision::log(2 * real_pi()) / 2;
    Cx lw = log(w);
    Cx res = (w - Cx(R(1) / 2)) * lw - w + Cx(half_log_2pi);
    Cx winv = Cx(1) / w;
    Cx winv2 = winv * winv;
    Cx pw = winv;
    R eps = boost::multiprecision::pow(R(10), -static_cast<int>(digits) - 5);
    for (size_t k = 1; k <= kmax; ++k) {
        R c = to_real(bern[k] / Q(static_cast<long>((2 * k) * (2 * k - 1))));
        Cx term = pw * c;
        res += term;
        if (abs(term) < eps) break;
        pw *= winv2;
    }
    return res - shift_log;
}

Cx gamma(const Cx& z) { return exp(lgamma(z)); }

Cx poly_eval(const std::vector<Cx>& coeffs, const Cx& x) {
    Cx r;
    for (size_t i = coeffs.size(); i-- > 0;) r = r * x + coeffs[i];
    return r;
}

Cx poly_eval(const QPoly& p, const Cx& x) {
    Cx r;
    for (size_t i = p.size(); i-- > 0;) r = r * x + Cx(to_real(p[i]));
    return r;
}

std::vector<Cx> poly_roots(const QPoly& p_in, unsigned digits) {
    int n = degree(p_in);
    if (n < 1) throw std::invalid_argument("poly_roots: degree < 1");
    PrecisionScope scope(digits + 20);
    std::vector<Cx> c;
    for (const auto& q : p_in) c.emplace_back(to_real(q / p_in.back()));
    std::vector<Cx> dc;
    for (int i = 1; i <= n; ++i) dc.push_back(c[i] * R(i));
    if (n == 1) return {-c[0]};
    R bound = 0;
    for (int i = 0; i < n; ++i) bound = rmax(bound, abs(c[i]));
    bound += 1;
    std::vector<Cx> z(n);
    for (int k = 0; k < n; ++k) {
        R t = 2 * real_pi() * (R(k) + R(0.4)) / R(n);
        z[k] = expi(t) * (bound * R(0.7));
    }
    R tol = boost::multiprecision::pow(R(10), -static_cast<int>(digits) - 12);
    for (int iter = 0; iter < 2000; ++iter) {
        R worst = 0;
        for (int k = 0; k < n; ++k) {
            Cx pv = poly_eval(c, z[k]);
            Cx dv = poly_eval(dc, z[k]);
            if (norm2(pv) == 0) continue;
            Cx ratio = pv / dv;
            Cx s;
            for (int j = 0; j < n; ++j)
                if (j != k) s += Cx(1) / (z[k] - z[j]);
            Cx corr = ratio / (Cx(1) - ratio * s);
            z[k] -= corr;
            R scale = rmax(R(1), abs(z[k]));
            worst = rmax(worst, abs(corr) / scale);
        }
        if (worst < tol) break;
    }
    for (auto& r : z) {
        for (int it = 0; it < 3; ++it) {
            Cx dv = poly_eval(dc, r);
            if (norm2(dv) == 0) break;
            r -= poly_eval(c, r) / dv;
        }
    }
    return z;
}

}  // namespace yl
