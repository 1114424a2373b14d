#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "yl/satake.hpp"

using namespace yl;

namespace {

struct Gen {
    std::mt19937_64 rng;
    explicit Gen(uint64_t s) : rng(s) {}
    long range(long lo, long hi) { return lo + static_cast<long>(rng() % static_cast<uint64_t>(hi - lo + 1)); }
    Q rational(long num, long den) {
        Q q(range(-num, num), range(1, den));
        q.canonicalize();
        return q;
    }
};

const long kPrimes[] = {2, 3, 5, 7, 11, 13};

NumTower rat(const NumTower& like, const Q& q) { return NumTower::rational(like.tower(), q); }

// Random tempered (lambda, omega) over Q(i): omega = 1 with real lambda or omega = -1 with lambda in iQ.
std::pair<AlgebraicNumber, AlgebraicNumber> tempered_pair(Gen& g, const NumberField& qi, long p) {
    Q r;
    do {
        r = g.rational(40, 7);
    } while (r * r > 4 * p);
    if (g.range(0, 1)) return {AlgebraicNumber::rational(qi, r), AlgebraicNumber::rational(qi, 1)};
    return {AlgebraicNumber::generator(qi) * r, AlgebraicNumber::rational(qi, -1)};
}

NumSatake from_eigen(const AlgebraicNumber& lam, const AlgebraicNumber& om, long p) {
    return gl2_satake_from_eigen(base_element(lam), base_element(om), p);
}

bool same_multiset(std::vector<NumTower> a, std::vector<NumTower> b) {
    if (a.size() != b.size()) return false;
    std::vector<NumTower> all = a;
    all.insert(all.end(), b.begin(), b.end());
    all = unify(all);
    size_t n = a.size();
    std::vector<bool> used(n, false);
    for (size_t i = 0; i < n; ++i) {
        bool found = false;
        for (size_t j = 0; j < n && !found; ++j)
            if (!used[j] && all[i] == all[n + j]) used[j] = found = true;
        if (!found) return false;
    }
    return true;
}

NumSatake params(const std::vector<Q>& b, long p) {
    NumberField q;
    auto t = NumTower::base_tower(AlgebraicNumber::rational(q, 0));
    NumSatake s;
    s.n = static_cast<int>(b.size()) - 1;
    s.p = p;
    for (const auto& x : b) s.b.push_back(NumTower::rational(t, x));
    return s;
}

}  // namespace

TEST_CASE("gl2_satake_from_eigen examples") {
    NumberField q;
    auto s = from_eigen(AlgebraicNumber::rational(q, 0), AlgebraicNumber::rational(q, 1), 7);
    auto sc = spin_characters(s);
    auto a = sc[0], b = sc[1];
    CHECK(a * a == rat(a, -1));
    CHECK(a + b == rat(a, 0));
    CHECK(a * b == rat(a, 1));
    CHECK(s.tempered);

    // lambda = 2 sqrt(p), omega = 1 gives b_0 = b_1 = 1.
    auto base = base_element(AlgebraicNumber::rational(q, 0));
    auto [zero, y] = with_sqrt_p(base, 5);
    auto s2 = gl2_satake_from_eigen(y.scale(Q(2)), rat(y, 1), 5);
    CHECK(s2.b[0] == rat(s2.b[0], 1));
    CHECK(s2.b[1] == rat(s2.b[1], 1));
    auto e2 = eigen_from_satake(s2);
    CHECK(e2.lambda == y.scale(Q(2)).extend(e2.lambda.tower()));

    // level-11 form at p = 2: alpha + beta = -2/sqrt(2) = -sqrt(2), alpha beta = 1.
    auto s3 = from_eigen(AlgebraicNumber::rational(q, -2), AlgebraicNumber::rational(q, 1), 2);
    auto c3 = spin_characters(s3);
    auto [u, sq2] = with_sqrt_p(c3[0], 2);
    CHECK(c3[0].extend(u.tower()) + c3[1].extend(u.tower()) == -sq2);
    CHECK(c3[0] * c3[1] == rat(c3[0], 1));
    CHECK(s3.tempered);
    CHECK_THROWS_AS(from_eigen(AlgebraicNumber::rational(q, 1), AlgebraicNumber::rational(q, 0), 2), PreconditionError);
}

TEST_CASE("eigen_from_satake examples") {
    auto e1 = eigen_from_satake(params({1, 1}, 3));
    auto [z, y] = with_sqrt_p(e1.lambda, 3);
    CHECK(e1.lambda == y.scale(Q(2)));
    CHECK(e1.lambda_top_p2 == rat(e1.lambda, 1));
    auto e2 = eigen_from_satake(params({1, 1, 1}, 3));
    auto [z2, y2] = with_sqrt_p(e2.lambda, 3);
    CHECK(e2.lambda == y2.scale(Q(12)));
    CHECK(e2.lambda_top_p2 == rat(e2.lambda, 1));
    CHECK_FALSE(e2.lambda1_p2.has_value());
    CHECK_THROWS_AS(eigen_from_satake(params({1, 1, 1, 1}, 3)), UnsupportedDegree);
}

TEST_CASE("Weyl-equivalent inputs give identical outputs") {
    Gen g(21);
    for (int t = 0; t < 100; ++t) {
        long p = kPrimes[g.range(0, 5)];
        int n = 1 + static_cast<int>(g.range(0, 1));
        std::vector<Q> b;
        for (int i = 0; i <= n; ++i) {
            Q x;
            do x = g.rational(9, 5);
            while (x == 0);
            b.push_back(x);
        }
        auto s = params(b, p);
        auto orbit = weyl_orbit(s);
        auto ref = eigen_from_satake(s);
        for (const auto& w : orbit) {
            auto e = eigen_from_satake(w);
            CHECK(e.lambda == ref.lambda);
            CHECK(e.lambda_top_p2 == ref.lambda_top_p2);
            CHECK(weyl_equal(w, s));
            CHECK(canonical_key(w) == canonical_key(s));
            CHECK(same_multiset(spin_characters(w), spin_characters(s)));
        }
    }
}

TEST_CASE("Weyl orbits have sizes 2 and 8 for generic parameters") {
    auto o1 = weyl_orbit(params({Q(2), Q(3)}, 5));
    CHECK(o1.size() == 2);
    auto o2 = weyl_orbit(params({Q(2), Q(3), Q(7)}, 5));
    CHECK(o2.size() == 8);
    for (const auto& w : o2) {
        CHECK(factors_equal(gsp4_spin_factor(w), gsp4_spin_factor(o2[0])));
        CHECK(weyl_orbit(w).size() == 8);
    }
    CHECK_FALSE(weyl_equal(params({Q(2), Q(3)}, 5), params({Q(2), Q(5)}, 5)));
}

TEST_CASE("round trip on random tempered inputs") {
    auto qi = NumberField::quadratic(-1);
    Gen g(22);
    for (int t = 0; t < 1000; ++t) {
        long p = kPrimes[g.range(0, 5)];
        auto [lam, om] = tempered_pair(g, qi, p);
        auto s = from_eigen(lam, om, p);
        auto e = eigen_from_satake(s);
        auto l = e.lambda.in_base();
        auto w = e.lambda_top_p2.in_base();
        REQUIRE(l);
        REQUIRE(w);
        CHECK(*l == lam);
        CHECK(*w == om);
        if (t < 100) CHECK(s.tempered);
    }
}

TEST_CASE("embed_pair") {
    auto one = params({1, 1}, 3);
    auto e = embed_pair(one, one);
    for (const auto& b : e.b) CHECK(b == rat(b, 1));

    auto qi = NumberField::quadratic(-1);
    Gen g(23);
    for (int t = 0; t < 200; ++t) {
        long p = kPrimes[g.range(0, 5)];
        auto [lf, om] = tempered_pair(g, qi, p);
        AlgebraicNumber lg;
        while (true) {
            auto [l2, o2] = tempered_pair(g, qi, p);
            if (o2 == om) {
                lg = l2;
                break;
            }
        }
        auto sf = from_eigen(lf, om, p), sg = from_eigen(lg, om, p);
        auto ep = embed_pair(sf, sg);
        auto spin = spin_characters(ep);
        auto cf = spin_characters(sf), cg = spin_characters(sg);
        CHECK(same_multiset(spin, {cf[0], cf[1], cg[0], cg[1]}));
        auto all = unify(std::vector<NumTower>{spin[0], spin[3], spin[1], spin[2], cf[0], cf[1], cg[0], cg[1]});
        CHECK(all[0] * all[1] == all[4] * all[5]);
        CHECK(all[2] * all[3] == all[6] * all[7]);
        CHECK(factors_equal(gsp4_spin_factor(ep), multiply(gl2_euler_factor(sf), gl2_euler_factor(sg))));
        if (t < 60) CHECK(ep.tempered);
        auto ee = eigen_from_satake(ep);
        REQUIRE(ee.lambda1_p2);
        auto l1 = ee.lambda1_p2->in_base();
        REQUIRE(l1);
        Q p2 = Q(p) * Q(p);
        CHECK(*l1 == om * (p2 - 1) + lf * lg * Q(p));
        auto lam = ee.lambda.in_base();
        REQUIRE(lam);
        CHECK(*lam == (lf + lg) * Q(p));
    }
    auto s1 = from_eigen(AlgebraicNumber::rational(NumberField(), 1), AlgebraicNumber::rational(NumberField(), 1), 5);
    auto s2 = from_eigen(AlgebraicNumber::rational(NumberField(), 1), AlgebraicNumber::rational(NumberField(), -1), 5);
    CHECK_THROWS_AS(embed_pair(s1, s2), SimilitudeMismatch);
}

TEST_CASE("Euler factor examples") {
    auto one = params({1, 1}, 7);
    auto f2 = gl2_euler_factor(one);
    auto spin = gsp4_spin_factor(embed_pair(one, one));
    auto deg8 = gsp4xgl2_factor(embed_pair(one, one), one);
    auto binom = [&](int n) {
        std::vector<NumTower> c;
        Z b = 1;
        for (int k = 0; k <= n; ++k) {
            c.push_back(rat(f2.coeffs[0], Q(k % 2 ? -b : b)));
            b = b * (n - k) / (k + 1);
        }
        return EulerFactor<AlgebraicNumber>{7, n, c};
    };
    CHECK(factors_equal(f2, binom(2)));
    CHECK(factors_equal(spin, binom(4)));
    CHECK(factors_equal(deg8, binom(8)));

    NumberField q;
    auto sf = from_eigen(AlgebraicNumber::rational(q, 3), AlgebraicNumber::rational(q, 1), 7);
    auto sg = from_eigen(AlgebraicNumber::rational(q, -2), AlgebraicNumber::rational(q, 1), 7);
    auto ep = embed_pair(sf, sg);
    auto sq = multiply(gsp4_spin_factor(ep), gsp4_spin_factor(ep));
    CHECK(factors_equal(gsp4xgl2_factor(ep, one), sq));
    auto rs = gl2xgl2_factor(sf, sg);
    auto c1 = rs.coeffs[1].in_base();
    REQUIRE(c1);
    CHECK(*c1 == AlgebraicNumber::rational(q, Q(6, 7)));
    for (const auto& c : rs.coeffs) CHECK(c.in_base().has_value());
}

TEST_CASE("symbolic base ring") {
    using T = TowerElt<LaurentPoly>;
    auto t = T::base_tower(LaurentPoly());
    auto a = T::base(t, LaurentPoly::var(0));
    auto c = T::base(t, LaurentPoly::var(1));
    auto s = gl2_satake_from_eigen(a, c, 5);
    auto sc = spin_characters(s);
    CHECK(sc[0] * sc[1] == T::base(sc[0].tower(), LaurentPoly::var(1)));
    auto e = eigen_from_satake(s);
    REQUIRE(e.lambda.in_base());
    CHECK(*e.lambda.in_base() == LaurentPoly::var(0));
    CHECK_FALSE(s.tempered);
}
