#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "yl/errors.hpp"
#include "yl/lnumeric.hpp"
#include "yl/satake.hpp"

using namespace yl;
namespace bmp = boost::multiprecision;

namespace {

const long kLen = 2000;

const QExpansion& delta_q() {
    static QExpansion q = eta_oracle({{1, 24}}, kLen);
    return q;
}

const QExpansion& e11_q() {
    static QExpansion q = eta_oracle({{1, 2}, {11, 2}}, kLen);
    return q;
}

const NewformRecord& delta() {
    static NewformRecord r =
        record_from_expansion("delta", 12, 1, DirichletCharacter::trivial(1), delta_q(), kLen, Provenance::EtaOracle);
    return r;
}

const NewformRecord& e11() {
    static NewformRecord r =
        record_from_expansion("11a", 2, 11, DirichletCharacter::trivial(11), e11_q(), kLen, Provenance::EtaOracle);
    return r;
}

PrecisionContext ctx30() {
    PrecisionContext c;
    c.digits = 30;
    return c;
}

LEvaluator& rs_eval() {
    static LEvaluator ev(rankin_selberg_spec(delta(), e11()), ctx30());
    return ev;
}

// Rankin-Selberg oracle in the region of absolute convergence:
// zeta^{(11)}(2s) sum_n lambda_delta(n) lambda_11a(n) n^{-s}, lambda(n) = a(n) / n^{(k-1)/2}.
R rs_direct(long s, long terms) {
    PrecisionScope ps(45);
    R sum = 0;
    for (long n = 1; n <= terms; ++n) {
        R ln = to_real(Q(delta_q().a[n])) * to_real(Q(e11_q().a[n]));
        sum += ln / bmp::pow(R(n), R(11) / 2 + R(1) / 2) / bmp::pow(R(n), s);
    }
    R zeta = 0;
    for (long n = 1; n <= 4000; ++n) zeta += bmp::pow(R(n), -2 * s);
    return sum * zeta * (1 - bmp::pow(R(11), -2 * s));
}

long divisors4(long n) {
    long r = 1;
    for (auto [p, e] : factorize(n)) r *= (e + 1) * (e + 2) * (e + 3) / 6;
    return r;
}

}  // namespace

TEST_CASE("Rankin-Selberg spec shape") {
    auto s = rankin_selberg_spec(delta(), e11());
    CHECK(s.degree == 4);
    CHECK(s.conductor == 121);
    CHECK(s.gamma == std::vector<GammaShift>{{false, Q(6)}, {false, Q(5)}});
    CHECK(s.self_dual);
    CHECK(s.euler_factors.at(11)[3].is_zero());
    // a_11(11a) = 1: the local factor is 1 - (lambda_delta(11) / 11) X + X^2 / 11.
    auto lam = unitary_eigenvalue(delta(), 11);
    CHECK(s.euler_factors.at(11)[1] == -(lam * Q(1, 11)));
    CHECK(s.euler_factors.at(11)[2] == AlgebraicNumber::rational(s.field, Q(1, 11)));
    CHECK_THROWS_AS(rankin_selberg_spec(e11(), e11()), UnsupportedRamification);
    CHECK_THROWS_AS(symmetric_square_spec(e11()), UnsupportedRamification);
}

TEST_CASE("unramified factor equals the satake product") {
    auto s = rankin_selberg_spec(delta(), e11());
    auto one = base_element(AlgebraicNumber::rational(s.field, 1));
    for (long p : primes_up_to(100)) {
        if (p == 11) continue;
        auto sf = gl2_satake_from_eigen(base_element(unitary_eigenvalue(delta(), p)), one, p);
        auto sh = gl2_satake_from_eigen(base_element(unitary_eigenvalue(e11(), p)), one, p);
        auto rs = gl2xgl2_factor(sf, sh);
        REQUIRE(rs.coeffs.size() == 5);
        for (size_t i = 0; i < 5; ++i) {
            auto c = rs.coeffs[i].in_base();
            REQUIRE(c);
            CHECK(*c == s.euler_factors.at(p)[i]);
        }
    }
}

TEST_CASE("Dirichlet coefficients: multiplicativity and tempered bound") {
    auto s = rankin_selberg_spec(delta(), e11());
    auto a = dirichlet_coefficients(s, 600);
    CHECK(a[1] == AlgebraicNumber::rational(s.field, 1));
    std::mt19937_64 rng(41);
    for (int t = 0; t < 300; ++t) {
        long m = 1 + static_cast<long>(rng() % 24), n = 1 + static_cast<long>(rng() % 24);
        if (gcd64(m, n) != 1) continue;
        CHECK(a[m * n] == a[m] * a[n]);
    }
    PrecisionScope ps(30);
    for (long n = 1; n <= 600; ++n) CHECK(abs(a[n].numeric()) <= R(divisors4(n)) * (1 + R(1e-20)));
    // Prime coefficients: lambda_delta(p) lambda_11a(p) / p.
    for (long p : {2L, 3L, 5L, 7L, 13L}) CHECK(a[p] == unitary_eigenvalue(delta(), p) * unitary_eigenvalue(e11(), p) * Q(1, p));
    CHECK_THROWS_AS(dirichlet_coefficients(s, 5000), InsufficientData);
}

TEST_CASE("spec JSON round trip") {
    auto s = rankin_selberg_spec(delta(), e11());
    s.euler_factors.erase(s.euler_factors.upper_bound(60), s.euler_factors.end());
    auto t = LSeriesSpec::from_json(s.to_json());
    CHECK(t.to_json() == s.to_json());
    CHECK(t.gamma == s.gamma);
    CHECK(t.euler_factors == s.euler_factors);
    auto j = s.to_json();
    j["gamma"][0]["type"] = "X";
    CHECK_THROWS_AS(LSeriesSpec::from_json(j), SchemaError);
}

TEST_CASE("approximate functional equation against direct summation") {
    auto& ev = rs_eval();
    for (long s : {4L, 5L}) {
        auto v = ev.evaluate(Cx(s));
        R direct = rs_direct(s, kLen);
        R tail = bmp::pow(R(kLen), R(1 - s)) * 200;
        CHECK(bmp::abs(v.value.re - direct) < tail);
        CHECK(bmp::abs(v.value.im) < R(1e-28));
        CHECK(v.value_error < R(1e-25));
    }
}

TEST_CASE("root number and functional equation residual") {
    auto& ev = rs_eval();
    auto fit = ev.fit_root_number();
    CHECK(fit.snapped);
    CHECK(fit.w.re == 1);
    CHECK(fit.w.im == 0);
    CHECK(fit.margin < R(1e-20));
    for (const auto& s : residual_sample_points()) CHECK(ev.residual(s) < R(1e-20));
}

TEST_CASE("Rankin-Selberg L-values at the critical points") {
    // Frozen from an independent mpmath evaluation of the same approximate functional equation.
    auto& ev = rs_eval();
    auto v = ev.evaluate(Cx(1));
    PrecisionScope ps(45);
    CHECK(bmp::abs(v.value.re - R("1.8980738949834462930680251807332545")) < R(1e-27));
}

TEST_CASE("wrong conductor is ill-conditioned") {
    auto s = rankin_selberg_spec(delta(), e11());
    s.conductor = 100;
    PrecisionContext c;
    c.digits = 20;
    CHECK_THROWS_AS(fit_root_number(s, c), IllConditioned);
}

TEST_CASE("truncated sums raise PrecisionLoss under a tolerance") {
    auto s = rankin_selberg_spec(delta(), e11());
    PrecisionContext c;
    c.digits = 20;
    c.n_max = 5;
    c.tolerance = 1e-10;
    s.root_number = Cx(1);
    CHECK_THROWS_AS(evaluate(s, Cx(2), c), PrecisionLoss);
}

TEST_CASE("precision monotonicity and determinism") {
    auto s = rankin_selberg_spec(delta(), e11());
    s.root_number = Cx(1);
    PrecisionContext lo, hi;
    lo.digits = 15;
    hi.digits = 30;
    auto a = evaluate(s, Cx(2), lo);
    auto b = evaluate(s, Cx(2), hi);
    CHECK(b.value_error <= a.value_error);
    CHECK(b.terms >= a.terms);
    CHECK(bmp::abs(a.value.re - b.value.re) < R(1e-13));
    auto c = evaluate(s, Cx(2), hi);
    CHECK(c.to_json(40) == b.to_json(40));
}

TEST_CASE("symmetric square against direct summation") {
    static QExpansion big = eta_oracle({{1, 24}}, 6400);
    PrecisionContext c;
    c.digits = 25;
    LEvaluator ev(symmetric_square_spec(delta()), c);
    CHECK(ev.fit_root_number().w.re == 1);
    // L(s, sym^2) = zeta(2s) sum lambda(n^2) n^{-s} at level 1.
    PrecisionScope ps(40);
    const long s = 10;
    R sum = 0;
    for (long n = 1; n <= 80; ++n)
        sum += to_real(Q(big.a[n * n])) / bmp::pow(R(n), R(11)) / bmp::pow(R(n), s);
    R zeta = 0;
    for (long n = 1; n <= 400; ++n) zeta += bmp::pow(R(n), -2 * s);
    auto v = ev.evaluate(Cx(s));
    CHECK(bmp::abs(v.value.re - sum * zeta) < R(1e-15));
    for (const auto& z : residual_sample_points()) CHECK(ev.residual(z) < R(1e-15));
}

TEST_CASE("Petersson norm: quadrature, symmetric square route, scaling") {
    // Volume-normalized <delta, delta>: 1.0353620568043209223e-6 * 3 / pi, from an independent mpmath
    // double integral over the fundamental domain.
    PrecisionContext c;
    c.digits = 25;
    PrecisionScope ps(40);
    R oracle = R("1.03536205680432092233786081256e-6") * 3 / real_pi();
    auto [q, qerr] = petersson_quadrature(delta_q(), 12, c);
    CHECK(bmp::abs(q - oracle) / oracle < R(1e-20));
    CHECK(qerr < R(1e-22));
    R via = petersson_norm(delta(), c);
    CHECK(bmp::abs(via - oracle) / oracle < R(1e-3));
    CHECK(bmp::abs(via - oracle) / oracle < R(1e-18));
    R twice = petersson_norm(delta(), c, Q(2));
    CHECK(bmp::abs(twice - 4 * via) / via < R(1e-25));
    R k = petersson_calibration(12, 1, c);
    CHECK(k > 0);
    CHECK_THROWS_AS(petersson_norm(e11(), c), CalibrationMissing);
    CHECK_THROWS_AS(petersson_calibration(16, 1, c), CalibrationMissing);
}

TEST_CASE("detect_algebraic examples") {
    PrecisionScope ps(40);
    NumberField q;
    auto third = detect_algebraic(Cx(R("0.333333333333")), R(1e-12), q, Z(100), R(1e-6));
    CHECK(third == AlgebraicNumber::rational(q, Q(1, 3)));
    auto k5 = NumberField::quadratic(5);
    auto phi = detect_algebraic(Cx(R("1.6180339887")), R(1e-9), k5, Z(10), R(1e-5));
    CHECK(phi == AlgebraicNumber(k5, {Q(1, 2), Q(1, 2)}));
    CHECK_THROWS_AS(detect_algebraic(Cx(real_pi()), R(1e-30), q, Z(1000000), R(1e-9)), NotFound);
    CHECK_THROWS_AS(detect_algebraic(Cx(R(0.5)), R(0.01), q, Z(10), R(20)), AmbiguousMatch);
    CHECK_THROWS_AS(detect_algebraic(Cx(R(0.5)), R(1e-7), q, Z(10), R(1e-6)), PreconditionError);
    auto qi = NumberField::cyclotomic(4);
    R im = to_real(Q(16777216, 79720245));
    auto z = detect_algebraic(Cx(R(0), -im), R(1e-30), qi, Z(100000000), R(1e-6));
    CHECK(z == AlgebraicNumber(qi, {Q(0), -Q(16777216, 79720245)}));
}

TEST_CASE("detect_algebraic round trip on random rationals") {
    std::mt19937_64 rng(7);
    PrecisionScope ps(40);
    NumberField q;
    for (int t = 0; t < 200; ++t) {
        long den = 1 + static_cast<long>(rng() % 100000);
        long num = static_cast<long>(rng() % 2000000) - 1000000;
        Q x = frac(num, den);
        auto got = detect_algebraic(Cx(to_real(x)), R(1e-30), q, Z(100000), R(1e-6));
        CHECK(got.rational_value() == x);
    }
}

TEST_CASE("Shimura constant for delta x 11a at m = 1") {
    auto v = shimura_constant_eval(Q(1), delta(), e11(), rs_eval());
    PrecisionScope ps(45);
    R expected = to_real(Q(16777216, 79720245));
    CHECK(bmp::abs(v.value.re) < R(1e-25));
    CHECK(bmp::abs(bmp::abs(v.value.im) - expected) < R(1e-20));
    CHECK(v.error < R(1e-18));
}
