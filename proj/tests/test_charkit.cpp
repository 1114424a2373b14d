#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "yl/charkit.hpp"
#include "yl/errors.hpp"

using namespace yl;

namespace {

DirichletCharacter odd_mod4() { return DirichletCharacter::from_generators(4, {{3, 1, 2}}); }
DirichletCharacter legendre5() { return DirichletCharacter::from_generators(5, {{2, 1, 2}}); }

// Smallest d | q such that chi is trivial on units congruent to 1 mod d.
long conductor_oracle(const DirichletCharacter& chi) {
    long q = chi.modulus();
    for (long d = 1; d <= q; ++d) {
        if (q % d) continue;
        bool ok = true;
        for (long a = 1; a < q && ok; ++a) {
            if (gcd64(a, q) != 1 || (a - 1) % d != 0) continue;
            if (chi.value_exponent(a).first != 0) ok = false;
        }
        if (ok) return d;
    }
    return q;
}

bool same_value(const DirichletCharacter& a, const DirichletCharacter& b, long n) {
    auto [ka, ma] = a.value_exponent(n);
    auto [kb, mb] = b.value_exponent(n);
    if (ma == 0 || mb == 0) return ma == mb;
    return ka * mb == kb * ma;
}

}  // namespace

TEST_CASE("cyclotomic arithmetic is canonical") {
    auto z = CyclotomicElement::zeta_power(4, 1);
    CHECK(z * z == CyclotomicElement::rational(4, -1));
    auto sum = CyclotomicElement::from_exponent_map(5, {{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}});
    CHECK(sum.is_zero());
    auto w = CyclotomicElement::zeta_power(12, 5) + CyclotomicElement::rational(12, Q(1, 3));
    CHECK(w.conj().conj() == w);
    CHECK(w.conj() == w.galois(-1));
    CHECK(CyclotomicElement::zeta_power(3, 1).promote(6) == CyclotomicElement::zeta_power(6, 2));
    CHECK_THROWS_AS(CyclotomicElement::zeta_power(3, 1) + CyclotomicElement::zeta_power(4, 1), FieldError);
}

TEST_CASE("conductor examples") {
    CHECK(conductor(DirichletCharacter::trivial(12)) == 1);
    CHECK(conductor(legendre5()) == 5);
    auto induced = odd_mod4().lift(8);
    CHECK(conductor(induced) == 4);
    CHECK(primitive_character(induced) == odd_mod4());
    CHECK(primitive_character(DirichletCharacter::trivial(12)) == DirichletCharacter::trivial(1));
    CHECK(primitive_character(legendre5()) == legendre5());
}

TEST_CASE("Legendre symbol values match Euler's criterion") {
    auto chi = legendre5();
    for (long a = 1; a < 5; ++a) {
        long e = powmod64(a, 2, 5);
        long expected_k = (e == 1) ? 0 : 1;
        CHECK(chi.value_exponent(a) == std::make_pair(expected_k, 2L));
    }
}

TEST_CASE("gauss sum examples") {
    CHECK(gauss_sum(DirichletCharacter::trivial(1)) == CyclotomicElement::rational(1, 1));
    auto g4 = gauss_sum(odd_mod4());
    CHECK(g4 == CyclotomicElement::zeta_power(4, 1) * CyclotomicElement::rational(4, 2));
    auto g5 = gauss_sum(legendre5());
    auto expected = CyclotomicElement::from_exponent_map(5, {{1, 1}, {2, -1}, {3, -1}, {4, 1}});
    CHECK(g5.order() == 10);
    CHECK(g5 == expected.promote(10));
    PrecisionScope ps(30);
    Cx v = g5.numeric();
    CHECK(boost::multiprecision::abs(v.re - boost::multiprecision::sqrt(R(5))) < R(1e-25));
    CHECK(boost::multiprecision::abs(v.im) < R(1e-25));
}

TEST_CASE("parity and conjugation") {
    CHECK(parity(legendre5()) == 1);
    CHECK(parity(odd_mod4()) == -1);
    for (long q : {7L, 15L, 16L, 24L}) {
        for (const auto& chi : DirichletCharacter::all(q)) {
            auto prod = chi * conjugate_character(chi, -1);
            CHECK(prod.is_trivial());
        }
    }
}

TEST_CASE("structural conductor equals the exhaustive induced-modulus oracle") {
    for (long q = 1; q <= 60; ++q)
        for (const auto& chi : DirichletCharacter::all(q)) {
            CHECK(chi.conductor() == conductor_oracle(chi));
            auto c0 = chi.primitive();
            CHECK(c0.modulus() == chi.conductor());
            CHECK(c0.primitive() == c0);
            for (long n = 1; n <= q; ++n)
                if (gcd64(n, q) == 1) CHECK(same_value(chi, c0, n));
        }
}

TEST_CASE("multiplicativity on all unit pairs, moduli up to 60") {
    for (long q = 1; q <= 60; ++q) {
        long lambda = 1;
        for (auto [g, ord] : unit_generators(q)) lambda = lcm64(lambda, ord);
        for (const auto& chi : DirichletCharacter::all(q)) {
            CHECK(lambda % chi.order() == 0);
            long m = chi.order();
            for (long a = 1; a <= q; ++a) {
                auto va = chi.value_exponent(a);
                CHECK((va.second == 0) == (gcd64(a, q) != 1));
                if (va.second == 0) continue;
                for (long b = 1; b <= q; ++b) {
                    auto vb = chi.value_exponent(b);
                    if (vb.second == 0) continue;
                    auto vab = chi.value_exponent(a * b % q);
                    CHECK(vab.first == (va.first + vb.first) % m);
                }
            }
            int par = chi.parity();
            CHECK(chi.value_exponent(q - 1 == 0 ? 0 : q - 1).first == (q <= 2 || par == 1 ? 0 : m / 2));
        }
    }
}

TEST_CASE("Gauss sum law for primitive characters of modulus at most 60") {
    for (long q = 1; q <= 60; ++q)
        for (const auto& chi : DirichletCharacter::all(q)) {
            if (!chi.is_primitive()) continue;
            auto g = gauss_sum(chi);
            CHECK(g * g.conj() == CyclotomicElement::rational(g.order(), q));
            auto gbar = gauss_sum(chi.conj());
            auto rhs = g.conj() * CyclotomicElement::rational(g.order(), chi.parity());
            CHECK(gbar == rhs);
        }
}

TEST_CASE("gauss sum matches direct numeric summation") {
    PrecisionScope ps(40);
    for (long q : {3L, 8L, 13L, 21L, 40L}) {
        for (const auto& chi : DirichletCharacter::all(q)) {
            if (!chi.is_primitive()) continue;
            Cx direct;
            for (long n = 1; n <= q; ++n) direct += chi.numeric_value(n) * root_of_unity(n, q);
            CHECK(abs(direct - gauss_sum(chi).numeric()) < R(1e-30));
        }
    }
}

TEST_CASE("generator serialization round trip and schema errors") {
    for (const auto& chi : DirichletCharacter::all(48)) {
        auto back = DirichletCharacter::from_generators(48, chi.generators());
        CHECK(back == chi);
    }
    CHECK_THROWS_AS(DirichletCharacter::from_generators(5, {{3, 1, 2}}), SchemaError);
    CHECK_THROWS_AS(DirichletCharacter::from_generators(5, {{2, 1, 3}}), SchemaError);
}
