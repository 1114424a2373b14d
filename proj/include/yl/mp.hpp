#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <string>
#include <vector>

#include "yl/arith.hpp"

namespace yl {

using R = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                        boost::multiprecision::et_off>;

// Sets the default working precision (decimal digits) for newly created reals
// and restores the previous value on destruction.
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned digits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_;
};

unsigned working_digits();

// Copies carry the source precision; these re-round to the current working precision.
R at_working(const R& x);

R to_real(const Q& q);
R to_real(const Z& z);
R real_pi();
// Exact rational value of a finite real.
Q to_rational(const R& x);
std::string format_real(const R& x, int digits);

struct Cx {
    R re, im;
    Cx() : re(0), im(0) {}
    Cx(const R& r) : re(r), im(0) {}
    Cx(const R& r, const R& i) : re(r), im(i) {}
    Cx(long r) : re(r), im(0) {}

    Cx& operator+=(const Cx& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Cx& operator-=(const Cx& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Cx& operator*=(const Cx& o) {
        R r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    Cx& operator/=(const Cx& o);
};

inline Cx operator+(Cx a, const Cx& b) { return a += b; }
inline Cx operator-(Cx a, const Cx& b) { return a -= b; }
inline Cx operator*(Cx a, const Cx& b) { return a *= b; }
inline Cx operator/(Cx a, const Cx& b) { return a /= b; }
inline Cx operator-(const Cx& a) { return Cx(-a.re, -a.im); }
inline Cx operator*(const Cx& a, const R& s) { return Cx(a.re * s, a.im * s); }
inline Cx operator*(const R& s, const Cx& a) { return Cx(a.re * s, a.im * s); }

inline Cx at_working(const Cx& z) { return Cx(at_working(z.re), at_working(z.im)); }
inline Cx conj(const Cx& a) { return Cx(a.re, -a.im); }
R abs(const Cx& a);
R norm2(const Cx& a);
R arg(const Cx& a);
Cx exp(const Cx& z);
Cx log(const Cx& z);
Cx sqrt(const Cx& z);
// Principal branch a^z = exp(z log a) for real a > 0.
Cx pow(const R& a, const Cx& z);
Cx expi(const R& t);
// e^{2 pi i num/den}
Cx root_of_unity(long num, long den);
// log Gamma(z) on the principal sheet away from the poles (Stirling with shift).
Cx lgamma(const Cx& z);
Cx gamma(const Cx& z);

// Polynomial roots (Aberth iteration) for an integer/rational polynomial of degree >= 1.
std::vector<Cx> poly_roots(const QPoly& p, unsigned digits);
Cx poly_eval(const std::vector<Cx>& coeffs, const Cx& x);
Cx poly_eval(const QPoly& p, const Cx& x);

}  // namespace yl
