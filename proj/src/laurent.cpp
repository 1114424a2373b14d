#include "yl/laurent.hpp"

#include <sstream>

#include "yl/errors.hpp"

namespace yl {

LaurentPoly::Mono LaurentPoly::normalize(Mono m) {
    while (!m.empty() && m.back() == 0) m.pop_back();
    return m;
}

void LaurentPoly::add_term(const Mono& m, const Q& c) {
    if (c == 0) return;
    auto [it, inserted] = t_.emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) t_.erase(it);
    }
}

LaurentPoly::LaurentPoly(const Q& c) {
    Q q = c;
    q.canonicalize();
    add_term({}, q);
}

LaurentPoly LaurentPoly::var(int index, int power) {
    Mono m(index + 1, 0);
    m[index] = power;
    return monomial(m, 1);
}

LaurentPoly LaurentPoly::monomial(const Mono& m, const Q& c) {
    LaurentPoly r;
    r.add_term(normalize(m), c);
    return r;
}

Q LaurentPoly::coeff(const Mono& m) const {
    auto it = t_.find(normalize(m));
    return it == t_.end() ? Q(0) : it->second;
}

LaurentPoly LaurentPoly::inverse() const {
    if (!is_monomial()) throw UnsupportedOperation("only monomials are invertible in the Laurent ring: " + to_string());
    const auto& [m, c] = *t_.begin();
    Mono inv(m.size());
    for (size_t i = 0; i < m.size(); ++i) inv[i] = -m[i];
    return monomial(inv, Q(1) / c);
}

LaurentPoly LaurentPoly::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    LaurentPoly r(1), b = *this;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

LaurentPoly LaurentPoly::substitute(int index, const Q& value) const {
    LaurentPoly r;
    for (const auto& [m, c] : t_) {
        Mono m2 = m;
        int e = 0;
        if (static_cast<int>(m2.size()) > index) {
            e = m2[index];
            m2[index] = 0;
        }
        r.add_term(normalize(m2), c * qpow(value, e));
    }
    return r;
}

std::string LaurentPoly::to_string(const std::vector<std::string>& names) const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : t_) {
        if (!first) os << " + ";
        first = false;
        os << yl::to_string(c);
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            os << "*" << (i < names.size() ? names[i] : "x" + std::to_string(i));
            if (m[i] != 1) os << "^" << m[i];
        }
    }
    return os.str();
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o) {
    for (const auto& [m, c] : o.t_) add_term(m, c);
    return *this;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& o) {
    for (const auto& [m, c] : o.t_) add_term(m, -c);
    return *this;
}

LaurentPoly& LaurentPoly::operator*=(const LaurentPoly& o) {
    LaurentPoly r;
    for (const auto& [m1, c1] : t_)
        for (const auto& [m2, c2] : o.t_) {
            Mono m(std::max(m1.size(), m2.size()), 0);
            for (size_t i = 0; i < m1.size(); ++i) m[i] += m1[i];
            for (size_t i = 0; i < m2.size(); ++i) m[i] += m2[i];
            r.add_term(normalize(m), c1 * c2);
        }
    *this = std::move(r);
    return *this;
}

LaurentPoly LaurentPoly::operator-() const {
    LaurentPoly r;
    for (const auto& [m, c] : t_) r.t_.emplace(m, -c);
    return r;
}

}  // namespace yl
