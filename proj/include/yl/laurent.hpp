#pragma once

#include <map>
#include <string>
#include <vector>

#include "yl/arith.hpp"

namespace yl {

// Multivariate Laurent polynomial over Q. Monomials are exponent vectors with
// trailing zeros stripped, so variables are identified by index.
class LaurentPoly {
public:
    using Mono = std::vector<int>;

    LaurentPoly() = default;
    LaurentPoly(const Q& c);
    LaurentPoly(long c) : LaurentPoly(Q(c)) {}
    static LaurentPoly var(int index, int power = 1);
    static LaurentPoly monomial(const Mono& m, const Q& c);

    const std::map<Mono, Q>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_monomial() const { return t_.size() == 1; }
    // Coefficient of a monomial (zero when absent).
    Q coeff(const Mono& m) const;
    LaurentPoly inverse() const;  // monomials only
    LaurentPoly pow(long e) const;
    // Substitutes a rational value for one variable.
    LaurentPoly substitute(int index, const Q& value) const;
    std::string to_string(const std::vector<std::string>& names = {}) const;

    LaurentPoly& operator+=(const LaurentPoly& o);
    LaurentPoly& operator-=(const LaurentPoly& o);
    LaurentPoly& operator*=(const LaurentPoly& o);
    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
    friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
    friend LaurentPoly operator*(LaurentPoly a, const LaurentPoly& b) { return a *= b; }
    LaurentPoly operator-() const;
    bool operator==(const LaurentPoly& o) const { return t_ == o.t_; }
    bool operator!=(const LaurentPoly& o) const { return !(*this == o); }

private:
    static Mono normalize(Mono m);
    void add_term(const Mono& m, const Q& c);
    std::map<Mono, Q> t_;
};

}  // namespace yl
