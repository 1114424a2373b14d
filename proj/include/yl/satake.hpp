#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "yl/errors.hpp"
#include "yl/laurent.hpp"
#include "yl/nfield.hpp"

namespace yl {

template <class B>
struct BaseOps;

template <>
struct BaseOps<AlgebraicNumber> {
    static AlgebraicNumber from_q(const AlgebraicNumber& proto, const Q& q) { return AlgebraicNumber::rational(proto.field(), q); }
    static bool is_zero(const AlgebraicNumber& x) { return x.is_zero(); }
    static AlgebraicNumber inverse(const AlgebraicNumber& x) { return x.inverse(); }
    static std::string key(const AlgebraicNumber& x) {
        std::string s;
        for (const auto& c : x.coord_strings()) s += c + ",";
        return s;
    }
};

template <>
struct BaseOps<LaurentPoly> {
    static LaurentPoly from_q(const LaurentPoly&, const Q& q) { return LaurentPoly(q); }
    static bool is_zero(const LaurentPoly& x) { return x.is_zero(); }
    static LaurentPoly inverse(const LaurentPoly& x) { return x.inverse(); }
    static std::string key(const LaurentPoly& x) { return x.to_string(); }
};

// Quadratic tower B[y_0..y_{r-1}] with y_i^2 = D_i, D_i in the ring generated by y_0..y_{i-1}.
template <class B>
struct TowerSpec {
    B proto;
    std::vector<std::vector<B>> rad;  // rad[i] has 2^i coefficients
    std::vector<std::string> names;
    size_t levels() const { return rad.size(); }
};

template <class B>
class TowerElt {
public:
    using Ops = BaseOps<B>;
    using Spec = TowerSpec<B>;
    using SpecPtr = std::shared_ptr<const Spec>;

    TowerElt() = default;
    TowerElt(SpecPtr t, std::vector<B> c) : t_(std::move(t)), c_(std::move(c)) {
        if (c_.size() != (size_t{1} << t_->levels())) throw InvariantError("tower element has the wrong number of coefficients");
    }
    static SpecPtr base_tower(const B& proto) {
        auto s = std::make_shared<Spec>();
        s->proto = proto;
        return s;
    }
    static TowerElt base(SpecPtr t, const B& b) {
        std::vector<B> c(size_t{1} << t->levels(), Ops::from_q(t->proto, 0));
        c[0] = b;
        return TowerElt(std::move(t), std::move(c));
    }
    static TowerElt rational(SpecPtr t, const Q& q) { return base(t, Ops::from_q(t->proto, q)); }
    static TowerElt radical(SpecPtr t, size_t i) {
        TowerElt r = rational(t, 0);
        r.c_[size_t{1} << i] = Ops::from_q(t->proto, 1);
        return r;
    }

    const SpecPtr& tower() const { return t_; }
    const std::vector<B>& coeffs() const { return c_; }
    bool is_zero() const {
        return std::all_of(c_.begin(), c_.end(), [](const B& b) { return Ops::is_zero(b); });
    }
    std::optional<B> in_base() const {
        for (size_t i = 1; i < c_.size(); ++i)
            if (!Ops::is_zero(c_[i])) return std::nullopt;
        return c_[0];
    }
    std::vector<std::string> key() const {
        std::vector<std::string> k;
        for (const auto& b : c_) k.push_back(Ops::key(b));
        return k;
    }

    TowerElt& operator+=(const TowerElt& o) {
        same(o);
        for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    TowerElt& operator-=(const TowerElt& o) {
        same(o);
        for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        return *this;
    }
    TowerElt& operator*=(const TowerElt& o) {
        same(o);
        c_ = mul(*t_, c_, o.c_);
        return *this;
    }
    friend TowerElt operator+(TowerElt a, const TowerElt& b) { return a += b; }
    friend TowerElt operator-(TowerElt a, const TowerElt& b) { return a -= b; }
    friend TowerElt operator*(TowerElt a, const TowerElt& b) { return a *= b; }
    TowerElt operator-() const {
        TowerElt r = *this;
        for (auto& b : r.c_) b = -b;
        return r;
    }
    TowerElt scale(const B& s) const {
        TowerElt r = *this;
        for (auto& b : r.c_) b = b * s;
        return r;
    }
    TowerElt scale(const Q& q) const { return scale(Ops::from_q(t_->proto, q)); }
    TowerElt inverse() const { return TowerElt(t_, inv(*t_, c_)); }
    TowerElt pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        TowerElt r = rational(t_, 1), b = *this;
        while (e > 0) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }
    bool operator==(const TowerElt& o) const {
        same(o);
        return c_ == o.c_;
    }
    bool operator!=(const TowerElt& o) const { return !(*this == o); }

    // Re-expresses the element in a larger tower; bitmap[i] is the index of y_i there.
    TowerElt lift(SpecPtr target, const std::vector<int>& bitmap) const {
        std::vector<B> c(size_t{1} << target->levels(), Ops::from_q(target->proto, 0));
        for (size_t m = 0; m < c_.size(); ++m) {
            size_t mm = 0;
            for (size_t i = 0; i < t_->levels(); ++i)
                if (m >> i & 1) mm |= size_t{1} << bitmap[i];
            c[mm] = c_[m];
        }
        return TowerElt(std::move(target), std::move(c));
    }
    // Lifts into an extension whose first levels coincide with this tower.
    TowerElt extend(SpecPtr target) const {
        std::vector<int> id(t_->levels());
        for (size_t i = 0; i < id.size(); ++i) id[i] = static_cast<int>(i);
        return lift(std::move(target), id);
    }

    static std::vector<B> mul(const Spec& t, const std::vector<B>& a, const std::vector<B>& b) {
        return mul_rec(t, a, b, t.levels());
    }

private:
    void same(const TowerElt& o) const {
        if (t_ != o.t_ && !(t_->rad == o.t_->rad)) throw FieldError("tower mismatch: unify towers before combining");
    }
    static std::vector<B> slice(const std::vector<B>& v, size_t from, size_t n) {
        return std::vector<B>(v.begin() + from, v.begin() + from + n);
    }
    static std::vector<B> mul_rec(const Spec& t, const std::vector<B>& a, const std::vector<B>& b, size_t level) {
        if (level == 0) return {a[0] * b[0]};
        size_t half = size_t{1} << (level - 1);
        auto a0 = slice(a, 0, half), a1 = slice(a, half, half);
        auto b0 = slice(b, 0, half), b1 = slice(b, half, half);
        auto lo = mul_rec(t, a0, b0, level - 1);
        auto hh = mul_rec(t, mul_rec(t, a1, b1, level - 1), t.rad[level - 1], level - 1);
        auto x1 = mul_rec(t, a0, b1, level - 1);
        auto x2 = mul_rec(t, a1, b0, level - 1);
        std::vector<B> out;
        out.reserve(2 * half);
        for (size_t i = 0; i < half; ++i) out.push_back(lo[i] + hh[i]);
        for (size_t i = 0; i < half; ++i) out.push_back(x1[i] + x2[i]);
        return out;
    }
    static std::vector<B> inv_rec(const Spec& t, const std::vector<B>& x, size_t level) {
        if (level == 0) {
            if (Ops::is_zero(x[0])) throw UnsupportedOperation("division by zero in quadratic tower");
            return {Ops::inverse(x[0])};
        }
        size_t half = size_t{1} << (level - 1);
        auto a = slice(x, 0, half), b = slice(x, half, half);
        auto norm = mul_rec(t, a, a, level - 1);
        auto bbd = mul_rec(t, mul_rec(t, b, b, level - 1), t.rad[level - 1], level - 1);
        for (size_t i = 0; i < half; ++i) norm[i] -= bbd[i];
        if (std::all_of(norm.begin(), norm.end(), [](const B& v) { return Ops::is_zero(v); }))
            throw UnsupportedOperation("zero divisor in quadratic tower (radicand is a square)");
        auto ninv = inv_rec(t, norm, level - 1);
        auto r0 = mul_rec(t, a, ninv, level - 1);
        auto r1 = mul_rec(t, b, ninv, level - 1);
        std::vector<B> out = r0;
        for (auto& v : r1) out.push_back(-v);
        return out;
    }
    static std::vector<B> inv(const Spec& t, const std::vector<B>& x) { return inv_rec(t, x, t.levels()); }

    SpecPtr t_;
    std::vector<B> c_;
};

// Adjoins sqrt(D) unless D already is a radicand; returns the tower and the radicand index.
template <class B>
std::pair<typename TowerElt<B>::SpecPtr, int> adjoin_sqrt(const TowerElt<B>& d, const std::string& name) {
    const auto& t = d.tower();
    for (size_t i = 0; i < t->levels(); ++i) {
        std::vector<B> padded(size_t{1} << t->levels(), BaseOps<B>::from_q(t->proto, 0));
        for (size_t j = 0; j < t->rad[i].size(); ++j) padded[j] = t->rad[i][j];
        if (padded == d.coeffs()) return {t, static_cast<int>(i)};
    }
    auto s = std::make_shared<TowerSpec<B>>(*t);
    s->rad.push_back(d.coeffs());
    s->names.push_back(name);
    return {s, static_cast<int>(t->levels())};
}

// Tower containing both; elements of a extend, elements of b lift through the returned bitmap.
template <class B>
std::pair<typename TowerElt<B>::SpecPtr, std::vector<int>> merge_towers(const typename TowerElt<B>::SpecPtr& a,
                                                                        const typename TowerElt<B>::SpecPtr& b) {
    using E = TowerElt<B>;
    typename E::SpecPtr m = a;
    std::vector<int> bmap;
    for (size_t j = 0; j < b->levels(); ++j) {
        auto sub = std::make_shared<TowerSpec<B>>();
        sub->proto = b->proto;
        sub->rad.assign(b->rad.begin(), b->rad.begin() + j);
        sub->names.assign(b->names.begin(), b->names.begin() + j);
        E d(sub, b->rad[j]);
        auto [m2, idx] = adjoin_sqrt(d.lift(m, bmap), b->names[j]);
        m = m2;
        bmap.push_back(idx);
    }
    return {m, bmap};
}

template <class B>
struct SatakeParams {
    int n = 1;
    long p = 0;
    std::vector<TowerElt<B>> b;
    bool tempered = false;
    bool embedded = false;  // produced by embed_pair
};

template <class B>
struct SatakeEigen {
    TowerElt<B> lambda;          // lambda^{(n)}(p)
    TowerElt<B> lambda_top_p2;   // lambda_n^{(n)}(p^2)
    std::optional<TowerElt<B>> lambda1_p2;  // n = 2, embedded parameters only
};

template <class B>
struct EulerFactor {
    long p = 0;
    int degree = 0;
    std::vector<TowerElt<B>> coeffs;  // coeffs[0] = 1
};

bool unit_modulus_everywhere(const std::vector<TowerElt<AlgebraicNumber>>& xs);

template <class B>
bool numeric_tempered(const std::vector<TowerElt<B>>& xs) {
    if constexpr (std::is_same_v<B, AlgebraicNumber>) return unit_modulus_everywhere(xs);
    else return false;
}

template <class B>
std::vector<TowerElt<B>> unify(std::vector<TowerElt<B>> xs) {
    if (xs.empty()) return xs;
    auto t = xs[0].tower();
    for (const auto& x : xs) {
        if (x.tower() == t || x.tower()->rad == t->rad) continue;
        t = merge_towers<B>(t, x.tower()).first;
    }
    for (auto& x : xs) {
        if (x.tower() == t) continue;
        auto [m, bmap] = merge_towers<B>(t, x.tower());
        x = x.lift(m, bmap);
    }
    return xs;
}

template <class B>
SatakeParams<B> lift_params(const SatakeParams<B>& s, const typename TowerElt<B>::SpecPtr& t) {
    SatakeParams<B> r = s;
    for (auto& v : r.b) {
        auto [m, bmap] = merge_towers<B>(t, v.tower());
        if (m->levels() != t->levels()) throw FieldError("lift_params: target tower does not contain the parameters");
        v = v.lift(t, bmap);
    }
    return r;
}

// sqrt(p) in (an extension of) the tower of x.
template <class B>
std::pair<TowerElt<B>, TowerElt<B>> with_sqrt_p(const TowerElt<B>& x, long p) {
    auto [t, i] = adjoin_sqrt(TowerElt<B>::rational(x.tower(), Q(p)), "sqrt(" + std::to_string(p) + ")");
    return {x.extend(t), TowerElt<B>::radical(t, i)};
}

template <class B>
SatakeParams<B> gl2_satake_from_eigen(const TowerElt<B>& lambda, const TowerElt<B>& omega, long p) {
    if (omega.is_zero()) throw PreconditionError("central character value must be nonzero");
    auto xs = unify(std::vector<TowerElt<B>>{lambda, omega});
    auto [lam, y] = with_sqrt_p(xs[0], p);
    auto om = xs[1].extend(lam.tower());
    TowerElt<B> s = (lam * y).scale(Q(1, p));
    TowerElt<B> d = s * s - om.scale(Q(4));
    SatakeParams<B> out;
    out.n = 1;
    out.p = p;
    TowerElt<B> alpha, beta;
    if (d.is_zero()) {
        alpha = beta = s.scale(Q(1, 2));
    } else {
        auto [t, i] = adjoin_sqrt(d, "sqrt(disc" + std::to_string(s.tower()->levels()) + ")");
        auto se = s.extend(t);
        auto yd = TowerElt<B>::radical(t, i);
        alpha = (se + yd).scale(Q(1, 2));
        beta = (se - yd).scale(Q(1, 2));
    }
    out.b = {alpha, beta * alpha.inverse()};
    out.tempered = numeric_tempered(std::vector<TowerElt<B>>{alpha, beta});
    return out;
}

template <class B>
std::vector<TowerElt<B>> spin_characters(const SatakeParams<B>& s) {
    if (s.n == 1) return {s.b[0], s.b[0] * s.b[1]};
    if (s.n == 2) return {s.b[0], s.b[0] * s.b[1], s.b[0] * s.b[2], s.b[0] * s.b[1] * s.b[2]};
    throw UnsupportedDegree("Satake degree " + std::to_string(s.n) + " is out of scope");
}

template <class B>
SatakeEigen<B> eigen_from_satake(const SatakeParams<B>& s) {
    if (s.n < 1 || s.n > 2) throw UnsupportedDegree("Satake degree " + std::to_string(s.n) + " is out of scope (n <= 2)");
    auto [b0, y] = with_sqrt_p(s.b[0], s.p);
    std::vector<TowerElt<B>> b{b0};
    for (int i = 1; i <= s.n; ++i) b.push_back(s.b[i].extend(b0.tower()));
    TowerElt<B> sum = TowerElt<B>::rational(b0.tower(), 0);
    for (unsigned mask = 0; mask < (1u << s.n); ++mask) {
        TowerElt<B> term = TowerElt<B>::rational(b0.tower(), 1);
        for (int i = 0; i < s.n; ++i)
            if (mask >> i & 1) term *= b[i + 1];
        sum += term;
    }
    // p^{n(n+1)/4}: n = 1 -> sqrt(p), n = 2 -> p sqrt(p)
    TowerElt<B> pp = s.n == 1 ? y : y.scale(Q(s.p));
    SatakeEigen<B> out;
    out.lambda = pp * b[0] * sum;
    TowerElt<B> top = b[0] * b[0];
    for (int i = 1; i <= s.n; ++i) top *= b[i];
    out.lambda_top_p2 = top;
    if (s.n == 2 && s.embedded) {
        auto c = spin_characters(SatakeParams<B>{2, s.p, b, s.tempered, true});
        Q p2 = Q(s.p) * Q(s.p);
        out.lambda1_p2 = top.scale(p2 - 1) + ((c[0] + c[3]) * (c[1] + c[2])).scale(p2);
    }
    return out;
}

template <class B>
std::vector<SatakeParams<B>> weyl_orbit(const SatakeParams<B>& s) {
    using E = TowerElt<B>;
    std::vector<SatakeParams<B>> orbit{s};
    std::set<std::vector<std::string>> seen;
    auto key = [](const SatakeParams<B>& x) {
        std::vector<std::string> k;
        for (const auto& v : x.b)
            for (auto& c : v.key()) k.push_back(c);
        return k;
    };
    seen.insert(key(s));
    for (size_t i = 0; i < orbit.size(); ++i) {
        std::vector<SatakeParams<B>> next;
        const auto& cur = orbit[i];
        for (int j = 1; j <= cur.n; ++j) {
            SatakeParams<B> w = cur;
            w.b[0] = cur.b[0] * cur.b[j];
            w.b[j] = cur.b[j].inverse();
            next.push_back(w);
        }
        if (cur.n == 2) {
            SatakeParams<B> w = cur;
            std::swap(w.b[1], w.b[2]);
            next.push_back(w);
        }
        for (auto& w : next)
            if (seen.insert(key(w)).second) orbit.push_back(w);
        (void)sizeof(E);
    }
    return orbit;
}

template <class B>
std::vector<std::string> canonical_key(const SatakeParams<B>& s) {
    std::vector<std::string> best;
    bool first = true;
    for (const auto& w : weyl_orbit(s)) {
        std::vector<std::string> k{std::to_string(w.n)};
        for (const auto& v : w.b)
            for (auto& c : v.key()) k.push_back(c);
        if (first || k < best) best = k;
        first = false;
    }
    return best;
}

template <class B>
SatakeParams<B> canonical(const SatakeParams<B>& s) {
    auto orbit = weyl_orbit(s);
    auto target = canonical_key(s);
    for (const auto& w : orbit) {
        std::vector<std::string> k{std::to_string(w.n)};
        for (const auto& v : w.b)
            for (auto& c : v.key()) k.push_back(c);
        if (k == target) return w;
    }
    return s;
}

template <class B>
bool weyl_equal(const SatakeParams<B>& a, const SatakeParams<B>& b) {
    if (a.n != b.n || a.p != b.p) return false;
    std::vector<TowerElt<B>> all = a.b;
    all.insert(all.end(), b.b.begin(), b.b.end());
    all = unify(all);
    SatakeParams<B> ua = a, ub = b;
    for (int i = 0; i <= a.n; ++i) {
        ua.b[i] = all[i];
        ub.b[i] = all[a.n + 1 + i];
    }
    return canonical_key(ua) == canonical_key(ub);
}

template <class B>
SatakeParams<B> embed_pair(const SatakeParams<B>& f, const SatakeParams<B>& g) {
    if (f.n != 1 || g.n != 1) throw UnsupportedDegree("embed_pair takes two degree-1 parameter sets");
    if (f.p != g.p) throw PreconditionError("embed_pair: parameters at different primes");
    auto xs = unify(std::vector<TowerElt<B>>{f.b[0], f.b[1], g.b[0], g.b[1]});
    TowerElt<B> af = xs[0], bf = xs[0] * xs[1], ag = xs[2], bg = xs[2] * xs[3];
    if (af * bf != ag * bg) throw SimilitudeMismatch("alpha_f beta_f != alpha_g beta_g");
    if (f.tempered != g.tempered) throw PreconditionError("embed_pair: one input tempered and the other not");
    TowerElt<B> inv = af.inverse();
    SatakeParams<B> out;
    out.n = 2;
    out.p = f.p;
    out.b = {af, ag * inv, bg * inv};
    out.tempered = f.tempered && numeric_tempered(std::vector<TowerElt<B>>{af, bf, ag, bg});
    out.embedded = true;
    return out;
}

template <class B>
EulerFactor<B> factor_from_roots(long p, const std::vector<TowerElt<B>>& roots) {
    auto rs = unify(roots);
    auto t = rs[0].tower();
    std::vector<TowerElt<B>> c{TowerElt<B>::rational(t, 1)};
    for (const auto& r : rs) {
        std::vector<TowerElt<B>> n(c.size() + 1, TowerElt<B>::rational(t, 0));
        for (size_t i = 0; i < c.size(); ++i) {
            n[i] += c[i];
            n[i + 1] -= c[i] * r;
        }
        c = std::move(n);
    }
    return {p, static_cast<int>(rs.size()), c};
}

template <class B>
EulerFactor<B> gl2_euler_factor(const SatakeParams<B>& s) {
    if (s.n != 1) throw UnsupportedDegree("gl2_euler_factor takes degree-1 parameters");
    return factor_from_roots(s.p, spin_characters(s));
}

template <class B>
EulerFactor<B> gsp4_spin_factor(const SatakeParams<B>& s) {
    if (s.n != 2) throw UnsupportedDegree("gsp4_spin_factor takes degree-2 parameters");
    return factor_from_roots(s.p, spin_characters(s));
}

template <class B>
EulerFactor<B> gsp4xgl2_factor(const SatakeParams<B>& s, const SatakeParams<B>& h) {
    if (s.n != 2 || h.n != 1) throw UnsupportedDegree("gsp4xgl2_factor takes degree-2 and degree-1 parameters");
    std::vector<TowerElt<B>> all = spin_characters(s);
    auto hc = spin_characters(h);
    all.insert(all.end(), hc.begin(), hc.end());
    all = unify(all);
    std::vector<TowerElt<B>> roots;
    for (size_t i = 0; i < 4; ++i)
        for (size_t j = 4; j < 6; ++j) roots.push_back(all[i] * all[j]);
    return factor_from_roots(s.p, roots);
}

// Degree-4 Rankin-Selberg factor prod (1 - a_i b_j X) of two degree-1 parameter sets.
template <class B>
EulerFactor<B> gl2xgl2_factor(const SatakeParams<B>& f, const SatakeParams<B>& h) {
    std::vector<TowerElt<B>> all = spin_characters(f);
    auto hc = spin_characters(h);
    all.insert(all.end(), hc.begin(), hc.end());
    all = unify(all);
    return factor_from_roots(f.p, std::vector<TowerElt<B>>{all[0] * all[2], all[0] * all[3], all[1] * all[2], all[1] * all[3]});
}

template <class B>
EulerFactor<B> multiply(const EulerFactor<B>& a, const EulerFactor<B>& b) {
    std::vector<TowerElt<B>> all = a.coeffs;
    all.insert(all.end(), b.coeffs.begin(), b.coeffs.end());
    all = unify(all);
    auto t = all[0].tower();
    size_t na = a.coeffs.size(), nb = b.coeffs.size();
    std::vector<TowerElt<B>> c(na + nb - 1, TowerElt<B>::rational(t, 0));
    for (size_t i = 0; i < na; ++i)
        for (size_t j = 0; j < nb; ++j) c[i + j] += all[i] * all[na + j];
    return {a.p, a.degree + b.degree, c};
}

template <class B>
bool factors_equal(const EulerFactor<B>& a, const EulerFactor<B>& b) {
    if (a.p != b.p || a.degree != b.degree || a.coeffs.size() != b.coeffs.size()) return false;
    std::vector<TowerElt<B>> all = a.coeffs;
    all.insert(all.end(), b.coeffs.begin(), b.coeffs.end());
    all = unify(all);
    size_t n = a.coeffs.size();
    for (size_t i = 0; i < n; ++i)
        if (all[i] != all[n + i]) return false;
    return true;
}

using NumTower = TowerElt<AlgebraicNumber>;
using NumSatake = SatakeParams<AlgebraicNumber>;

NumTower base_element(const AlgebraicNumber& x);
nlohmann::json tower_to_json(const NumTower& x);
std::string tower_to_string(const NumTower& x);
nlohmann::json satake_to_json(const NumSatake& s);
nlohmann::json euler_to_json(const EulerFactor<AlgebraicNumber>& e);
// Numeric value with every radicand replaced by its principal square root.
Cx tower_numeric(const NumTower& x, int embedding);

}  // namespace yl
