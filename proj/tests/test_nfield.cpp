#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "yl/errors.hpp"
#include "yl/nfield.hpp"

using namespace yl;

namespace {

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(uint64_t seed) : rng(seed) {}
    long range(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }
    Q rational() {
        Q q(range(-5, 5), range(1, 3));
        q.canonicalize();
        return q;
    }
    AlgebraicNumber element(const NumberField& k) {
        std::vector<Q> c;
        for (int i = 0; i < k.degree(); ++i) c.push_back(range(0, 3) == 0 ? Q(0) : rational());
        return AlgebraicNumber(k, c);
    }
    ExactMatrix matrix(const NumberField& k, size_t r, size_t c) {
        ExactMatrix m(k, r, c);
        long mode = range(0, 2);
        for (auto& e : m.a) e = (mode == 0 && range(0, 1)) ? AlgebraicNumber::rational(k, 0) : element(k);
        if (mode == 1 && r > 1) {
            for (size_t j = 0; j < c; ++j) m.at(r - 1, j) = m.at(0, j) * Q(range(-2, 2)) + m.at(r - 2, j);
        }
        return m;
    }
};

Q det(std::vector<std::vector<Q>> a) {
    size_t n = a.size();
    if (n == 0) return 1;
    if (n == 1) return a[0][0];
    Q s = 0;
    for (size_t j = 0; j < n; ++j) {
        std::vector<std::vector<Q>> minor;
        for (size_t i = 1; i < n; ++i) {
            std::vector<Q> row;
            for (size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(a[i][k]);
            minor.push_back(row);
        }
        Q term = a[0][j] * det(minor);
        s += (j % 2 ? -term : term);
    }
    return s;
}

size_t minor_rank(const std::vector<std::vector<Q>>& m) {
    size_t r = m.size(), c = m[0].size();
    size_t best = 0;
    for (size_t k = 1; k <= std::min(r, c); ++k) {
        bool found = false;
        for (unsigned rs = 0; rs < (1u << r) && !found; ++rs) {
            if (static_cast<size_t>(__builtin_popcount(rs)) != k) continue;
            for (unsigned cs = 0; cs < (1u << c) && !found; ++cs) {
                if (static_cast<size_t>(__builtin_popcount(cs)) != k) continue;
                std::vector<std::vector<Q>> sub;
                for (size_t i = 0; i < r; ++i) {
                    if (!(rs >> i & 1)) continue;
                    std::vector<Q> row;
                    for (size_t j = 0; j < c; ++j)
                        if (cs >> j & 1) row.push_back(m[i][j]);
                    sub.push_back(row);
                }
                if (det(sub) != 0) found = true;
            }
        }
        if (found) best = k;
    }
    return best;
}

bool is_rref(const RrefResult& rr) {
    const auto& r = rr.r;
    for (size_t i = 0; i < rr.pivots.size(); ++i) {
        if (i > 0 && rr.pivots[i] <= rr.pivots[i - 1]) return false;
        for (size_t j = 0; j < rr.pivots[i]; ++j)
            if (!r.at(i, j).is_zero()) return false;
        for (size_t t = 0; t < r.rows; ++t) {
            const auto& e = r.at(t, rr.pivots[i]);
            if (t == i ? e != AlgebraicNumber::rational(r.field, 1) : !e.is_zero()) return false;
        }
    }
    for (size_t i = rr.pivots.size(); i < r.rows; ++i)
        for (size_t j = 0; j < r.cols; ++j)
            if (!r.at(i, j).is_zero()) return false;
    return true;
}

AlgebraicNumber sqrt_elt(const NumberField& k) { return AlgebraicNumber::generator(k); }

}  // namespace

TEST_CASE("field construction") {
    auto k = NumberField::quadratic(5);
    CHECK(k.degree() == 2);
    CHECK(k.totally_real());
    CHECK(k.cm_flag());
    CHECK(k.is_normal());
    PrecisionScope ps(40);
    CHECK(boost::multiprecision::abs(sqrt_elt(k).numeric().re - boost::multiprecision::sqrt(R(5))) < R(1e-35));
    CHECK_THROWS_AS(NumberField::from_poly(std::vector<long>{-1, 0, 1}, 0), FieldError);
    CHECK_THROWS_AS(NumberField::from_poly(std::vector<long>{4, 0, 5, 0, 1}, 0), FieldError);
    CHECK_THROWS_AS(NumberField::from_poly(std::vector<long>{1, 2}, 0), FieldError);
    auto cubic = NumberField::from_poly(std::vector<long>{-2, 0, 0, 1}, 0);
    CHECK_FALSE(cubic.is_normal());
    CHECK_FALSE(cubic.cm_flag());
    auto z7 = NumberField::cyclotomic(7);
    CHECK(z7.degree() == 6);
    CHECK(z7.cm_flag());
    CHECK(z7.automorphisms().size() == 6);
    CHECK(z7.cyclotomic_order() == 7);
    auto sextic = NumberField::from_poly(std::vector<long>{1, -1, 1, -1, 1, -1, 1}, 2);
    CHECK(sextic.automorphisms().size() == 6);
    CHECK(sextic.cm_flag());
    auto qi = NumberField::quadratic(-1);
    CHECK(qi.cyclotomic_order() == 4);
    auto x = sqrt_elt(qi);
    CHECK(x * x == AlgebraicNumber::rational(qi, -1));
    CHECK(boost::multiprecision::abs(x.numeric().im - 1) < R(1e-35));
    CHECK_THROWS_AS(NumberField::from_poly(std::vector<long>{-1, 0, 0, 0, 1}, 0), FieldError);
    CHECK(NumberField::from_poly(std::vector<long>{1, 0, 0, 0, 1}, 0).automorphisms().size() == 4);
}

TEST_CASE("reducible quartic with quadratic factors is rejected") {
    CHECK_THROWS_AS(NumberField::from_poly(std::vector<long>{4, 0, 0, 0, 1}, 0), FieldError);
}

TEST_CASE("refined roots") {
    auto k = NumberField::quadratic(2);
    PrecisionScope ps(300);
    Cx r = k.root(1, 300);
    R err = boost::multiprecision::abs(r.re - boost::multiprecision::sqrt(R(2)));
    CHECK(err < R("1e-290"));
}

TEST_CASE("rref examples") {
    NumberField q;
    auto id = ExactMatrix::identity(q, 3);
    auto r = rref(id);
    CHECK(r.r == id);
    CHECK(r.pivots == std::vector<size_t>{0, 1, 2});
    ExactMatrix z(q, 2, 3);
    auto rz = rref(z);
    CHECK(rz.r == z);
    CHECK(rz.pivots.empty());
}

TEST_CASE("rank agrees with the minor-rank oracle") {
    Gen g(11);
    NumberField q;
    for (int trial = 0; trial < 60; ++trial) {
        auto m = g.matrix(q, 3, 5);
        std::vector<std::vector<Q>> qm(3, std::vector<Q>(5));
        for (size_t i = 0; i < 3; ++i)
            for (size_t j = 0; j < 5; ++j) qm[i][j] = m.at(i, j).coords()[0];
        CHECK(rank(m) == minor_rank(qm));
    }
}

TEST_CASE("rref is idempotent and well-formed") {
    Gen g(12);
    std::vector<NumberField> fields{NumberField(), NumberField::quadratic(-1), NumberField::quadratic(5)};
    for (int trial = 0; trial < 500; ++trial) {
        const auto& k = fields[trial % 3];
        auto m = g.matrix(k, g.range(1, 6), g.range(1, 6));
        auto r1 = rref(m);
        auto r2 = rref(r1.r);
        CHECK(r1.r == r2.r);
        CHECK(r1.pivots == r2.pivots);
        CHECK(is_rref(r1));
    }
}

TEST_CASE("apply_galois examples") {
    auto k = NumberField::quadratic(5);
    GaloisContext ctx({k});
    CHECK(ctx.size() == 2);
    auto s5 = sqrt_elt(k);
    CHECK(apply_galois(s5, ctx.identity()) == s5);
    GaloisElement other;
    for (auto s : ctx.elements())
        if (!s.is_identity()) other = s;
    CHECK(apply_galois(s5, other) == -s5);
    auto qi = NumberField::quadratic(-1);
    CHECK_THROWS_AS(apply_galois(sqrt_elt(qi), other), UndefinedAction);
    CHECK(apply_galois(AlgebraicNumber::rational(qi, 3), other) == AlgebraicNumber::rational(qi, 3));
}

TEST_CASE("complex conjugation on Q(i) commutes with multiplication") {
    auto qi = NumberField::quadratic(-1);
    GaloisContext ctx({qi});
    auto c = ctx.complex_conjugation();
    CHECK_FALSE(c.is_identity());
    Gen g(13);
    auto i = sqrt_elt(qi);
    for (int t = 0; t < 100; ++t) {
        Q a = g.rational(), b = g.rational();
        auto x = AlgebraicNumber::rational(qi, a) + i * b;
        CHECK(apply_galois(x, c) == AlgebraicNumber::rational(qi, a) - i * b);
        auto y = g.element(qi);
        CHECK(apply_galois(x * y, c) == apply_galois(x, c) * apply_galois(y, c));
        CHECK(apply_galois(x, c) == x.conj());
    }
}

TEST_CASE("compositum of Q(sqrt2) and Q(i)") {
    auto a = NumberField::quadratic(2);
    auto b = NumberField::quadratic(-1);
    GaloisContext ctx({a, b});
    CHECK(ctx.compositum().degree() == 4);
    CHECK(ctx.size() == 4);
    auto ea = ctx.embed(sqrt_elt(a));
    auto eb = ctx.embed(sqrt_elt(b));
    CHECK(ea * ea == AlgebraicNumber::rational(ctx.compositum(), 2));
    CHECK(eb * eb == AlgebraicNumber::rational(ctx.compositum(), -1));
    PrecisionScope ps(40);
    CHECK(abs(ea.numeric() - a.root(1, 40)) < R(1e-30));
    CHECK(abs(eb.numeric() - b.root(1, 40)) < R(1e-30));
    std::set<std::vector<int>> seen;
    for (auto s : ctx.elements()) {
        seen.insert(ctx.assignment(s.index()));
        CHECK(ctx.compose(s, ctx.inverse(s)).is_identity());
        CHECK(apply_galois(ea * eb, s) == apply_galois(ea, s) * apply_galois(eb, s));
        CHECK(ctx.embed(apply_galois(sqrt_elt(a), s)) == apply_galois(ea, s));
        CHECK(ctx.embed(apply_galois(sqrt_elt(b), s)) == apply_galois(eb, s));
        for (auto t : ctx.elements()) {
            auto st = ctx.compose(s, t);
            CHECK(apply_galois(ea + eb * ea, st) == apply_galois(apply_galois(ea + eb * ea, t), s));
        }
    }
    CHECK(seen.size() == 4);
    auto d = ctx.descend(ea * Q(3), a);
    REQUIRE(d);
    CHECK(*d == sqrt_elt(a) * Q(3));
    CHECK_FALSE(ctx.descend(ea + eb, a));
    CHECK(ctx.complex_conjugation().cyclotomic_exponent(4) == 3);
    CHECK(ctx.identity().cyclotomic_exponent(4) == 1);
    CHECK_THROWS_AS(ctx.identity().cyclotomic_exponent(3), UndefinedAction);
}

TEST_CASE("cyclotomic exponents and containment") {
    auto k = NumberField::quadratic(5);
    auto z5 = NumberField::cyclotomic(5);
    GaloisContext ctx({k, z5});
    CHECK(ctx.compositum().degree() == 4);
    std::set<long> exps;
    for (auto s : ctx.elements()) {
        long a = s.cyclotomic_exponent(5);
        exps.insert(a);
        CHECK(s.cyclotomic_exponent(10) % 5 == a);
        CHECK(s.cyclotomic_exponent(10) % 2 == 1);
        long legendre = (a == 1 || a == 4) ? 1 : -1;
        CHECK(apply_galois(sqrt_elt(k), s) == sqrt_elt(k) * Q(legendre));
    }
    CHECK(exps == std::set<long>{1, 2, 3, 4});
}

TEST_CASE("non-normal constituents are rejected") {
    auto cubic = NumberField::from_poly(std::vector<long>{-2, 0, 0, 1}, 0);
    CHECK_THROWS_AS(GaloisContext({cubic}), FieldError);
}

TEST_CASE("subfield_basis examples") {
    auto s2 = NumberField::quadratic(2);
    auto qi = NumberField::quadratic(-1);
    NumberField q;
    GaloisContext ctx({s2, qi});
    auto one_i = AlgebraicNumber::rational(qi, 1);
    auto r1 = subfield_basis({{one_i, sqrt_elt(qi)}}, qi, ctx);
    REQUIRE(r1.ok());
    REQUIRE(r1.basis.size() == 1);
    CHECK(r1.basis[0] == Vec{one_i, sqrt_elt(qi)});

    auto one2 = AlgebraicNumber::rational(s2, 1);
    auto r2 = subfield_basis({{one2, sqrt_elt(s2)}}, q, ctx);
    REQUIRE_FALSE(r2.ok());
    CHECK(apply_galois(sqrt_elt(s2), r2.failure->witness) == -sqrt_elt(s2));
    CHECK(r2.failure->vector_index == 0);

    auto r3 = subfield_basis({{one2, sqrt_elt(s2)}, {one2, -sqrt_elt(s2)}}, q, ctx);
    REQUIRE(r3.ok());
    REQUIRE(r3.basis.size() == 2);
    CHECK(r3.basis[0] == Vec{AlgebraicNumber::rational(q, 1), AlgebraicNumber::rational(q, 0)});
    CHECK(r3.basis[1] == Vec{AlgebraicNumber::rational(q, 0), AlgebraicNumber::rational(q, 1)});
}

TEST_CASE("subfield_basis agrees with conjugated-rref oracle") {
    auto s2 = NumberField::quadratic(2);
    auto qi = NumberField::quadratic(-1);
    NumberField q;
    GaloisContext ctx({s2, qi});
    const auto& c = ctx.compositum();
    std::vector<NumberField> targets{q, s2, qi};
    Gen g(14);
    int stable_count = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto& l = targets[trial % 3];
        size_t len = g.range(2, 3);
        std::vector<Vec> gens;
        long mode = g.range(0, 2);
        size_t nv = g.range(1, 2);
        for (size_t v = 0; v < nv; ++v) {
            Vec x;
            for (size_t j = 0; j < len; ++j) x.push_back(mode == 0 ? ctx.embed(g.element(l)) : g.element(c));
            gens.push_back(x);
            if (mode == 1) {
                for (auto s : ctx.elements()) {
                    bool fix = l.degree() == 1 || apply_galois(AlgebraicNumber::generator(l), s) == AlgebraicNumber::generator(l);
                    if (fix && !s.is_identity()) gens.push_back(apply_galois(x, s));
                }
            }
        }
        auto base = rref(ExactMatrix::from_rows(c, gens)).r;
        bool stable = true;
        for (auto s : ctx.elements()) {
            bool fix = l.degree() == 1 || apply_galois(AlgebraicNumber::generator(l), s) == AlgebraicNumber::generator(l);
            if (!fix) continue;
            if (rref(apply_galois(ExactMatrix::from_rows(c, gens), s)).r != base) stable = false;
        }
        auto res = subfield_basis(gens, l, ctx);
        CHECK(res.ok() == stable);
        if (res.ok()) {
            ++stable_count;
            for (const auto& v : res.basis)
                for (const auto& e : v) CHECK(e.field() == l);
            for (size_t i = 0; i < res.basis.size(); ++i)
                for (size_t j = 0; j < base.cols; ++j) CHECK(ctx.embed(res.basis[i][j]) == base.at(i, j));
        } else {
            const auto& f = *res.failure;
            CHECK(apply_galois(ExactMatrix::from_rows(c, {gens[f.vector_index]}), f.witness).row(0) == f.image);
        }
    }
    CHECK(stable_count > 40);
    CHECK(stable_count < 190);
}

TEST_CASE("gram_schmidt examples") {
    NumberField q;
    auto r = [&](long n, long d = 1) { return AlgebraicNumber::rational(q, Q(n, d)); };
    auto h = ExactMatrix::identity(q, 2);
    auto out = gram_schmidt({{r(1), r(1)}, {r(1), r(0)}}, h);
    CHECK(out[0] == Vec{r(1), r(1)});
    CHECK(out[1] == Vec{r(1, 2), r(-1, 2)});
    auto std_basis = gram_schmidt({{r(1), r(0)}, {r(0), r(1)}}, h);
    CHECK(std_basis[0] == Vec{r(1), r(0)});
    CHECK(std_basis[1] == Vec{r(0), r(1)});
    CHECK_THROWS_AS(gram_schmidt({{r(1), r(2)}, {r(2), r(4)}}, h), DependentInput);
}

TEST_CASE("gram_schmidt orthogonality and conjugation equivariance") {
    auto qi = NumberField::quadratic(-1);
    GaloisContext ctx({qi});
    auto c = ctx.complex_conjugation();
    Gen g(15);
    for (int trial = 0; trial < 40; ++trial) {
        size_t n = g.range(2, 4);
        ExactMatrix m(qi, n, n);
        for (auto& e : m.a) e = g.element(qi);
        ExactMatrix h(qi, n, n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                auto s = AlgebraicNumber::rational(qi, i == j ? 1 : 0);
                for (size_t k = 0; k < n; ++k) s += m.at(i, k) * m.at(j, k).conj();
                h.at(i, j) = s;
            }
        CHECK(positive_definite_everywhere(h));
        std::vector<Vec> vs;
        for (size_t i = 0; i < n; ++i) {
            Vec v;
            for (size_t j = 0; j < n; ++j) v.push_back(g.element(qi));
            vs.push_back(v);
        }
        if (rank(ExactMatrix::from_rows(qi, vs)) < n) continue;
        auto out = gram_schmidt(vs, h);
        CHECK(out[0] == vs[0]);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                if (i != j) CHECK(hermitian_pair(out[i], out[j], h).is_zero());
        std::vector<Vec> cvs;
        for (const auto& v : vs) cvs.push_back(apply_galois(v, c));
        auto cout_ = gram_schmidt(cvs, apply_galois(h, c));
        for (size_t i = 0; i < n; ++i) {
            CHECK(cout_[i] == apply_galois(out[i], c));
            auto ratio = hermitian_pair(out[i], out[i], h) / hermitian_pair(out[0], out[0], h);
            auto cratio = hermitian_pair(cout_[i], cout_[i], apply_galois(h, c)) /
                          hermitian_pair(cout_[0], cout_[0], apply_galois(h, c));
            CHECK(cratio == apply_galois(ratio, c));
        }
    }
    NumberField q;
    ExactMatrix indef = ExactMatrix::identity(q, 2);
    indef.at(1, 1) = AlgebraicNumber::rational(q, -1);
    CHECK_FALSE(positive_definite_everywhere(indef));
}

TEST_CASE("CM fields: Galois action commutes with complex conjugation") {
    auto z5 = NumberField::cyclotomic(5);
    auto s2 = NumberField::quadratic(2);
    auto z3 = NumberField::cyclotomic(3);
    GaloisContext ctx({z5, s2, z3});
    CHECK(ctx.compositum().degree() == 16);
    CHECK(ctx.compositum().cm_flag());
    auto c = ctx.complex_conjugation();
    Gen g(16);
    auto elts = ctx.elements();
    for (int t = 0; t < 100; ++t) {
        auto x = g.element(ctx.compositum());
        auto s = elts[g.range(0, static_cast<long>(elts.size()) - 1)];
        CHECK(apply_galois(apply_galois(x, s), c) == apply_galois(apply_galois(x, c), s));
        CHECK(apply_galois(x, c) == x.conj());
    }
}
