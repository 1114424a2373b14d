#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "yl/bundled.hpp"
#include "yl/errors.hpp"
#include "yl/newforms.hpp"

using namespace yl;
using nlohmann::json;

namespace {

const std::array<long, 5> kCurve11{0, -1, 1, -10, -20};

// Naive product of (1 - q^{dn})^{e} by repeated dense multiplication.
std::vector<Z> naive_eta(const std::vector<std::pair<long, long>>& spec, long M) {
    long shift = 0;
    for (auto [d, e] : spec) shift += d * e;
    shift /= 24;
    std::vector<Z> f(M + 1, Z(0));
    f[0] = 1;
    for (auto [d, e] : spec)
        for (long n = 1; d * n <= M; ++n)
            for (long t = 0; t < e; ++t) {
                std::vector<Z> g = f;
                for (long i = d * n; i <= M; ++i) g[i] -= f[i - d * n];
                f = g;
            }
    std::vector<Z> out(M + 1, Z(0));
    for (long n = 0; n + shift <= M; ++n) out[n + shift] = f[n];
    return out;
}

long naive_point_count(const std::array<long, 5>& c, long p) {
    long count = 1;
    for (long x = 0; x < p; ++x)
        for (long y = 0; y < p; ++y) {
            long lhs = y * y + c[0] * x * y + c[2] * y;
            long rhs = x * x * x + c[1] * x * x + c[3] * x + c[4];
            if (mod64(lhs - rhs, p) == 0) ++count;
        }
    return count;
}

json rational_record_json() {
    return json::parse(R"({
      "label": "11.2.a.a", "weight": 2, "level": 11,
      "character": {"modulus": 11, "generators": [{"g": 2, "exp": 0, "order": 1}]},
      "field_poly": [0, 1], "embedding": 0,
      "ap": [{"p": 2, "coeffs": ["-2"]}, {"p": 3, "coeffs": ["-1"]}, {"p": 5, "coeffs": ["1"]}, {"p": 11, "coeffs": ["1"]}],
      "local_types": [{"p": 11, "type": "steinberg"}]
    })");
}

std::vector<NewformRecord> load(const json& j) {
    std::istringstream in(j.dump());
    return load_records(in);
}

}  // namespace

TEST_CASE("load_records examples") {
    auto recs = load(rational_record_json());
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].a(2) == AlgebraicNumber::rational(NumberField(), -2));
    CHECK(recs[0].local_types.at(11) == LocalType::Steinberg);
    CHECK(record_from_json(record_to_json(recs[0])) == recs[0]);

    json odd = rational_record_json();
    odd["character"] = {{"modulus", 4}, {"generators", {{{"g", 3}, {"exp", 1}, {"order", 2}}}}};
    odd["level"] = 44;
    odd["local_types"] = json::array();
    try {
        load(odd);
        FAIL("expected InvariantError");
    } catch (const InvariantError& e) {
        CHECK(std::string(e.what()).find("parity") != std::string::npos);
    }

    json wild = rational_record_json();
    wild["ap"][0]["coeffs"] = {"-3"};
    wild["ap"][1]["coeffs"] = {"4"};  // 2*sqrt(3) = 3.46...
    CHECK_THROWS_AS(load(wild), InvariantError);

    json bad = rational_record_json();
    bad.erase("weight");
    CHECK_THROWS_AS(load(bad), SchemaError);
    std::istringstream garbage("{not json");
    CHECK_THROWS_AS(load_records(garbage), SchemaError);
    json cond = rational_record_json();
    cond["character"] = {{"modulus", 5}, {"generators", {{{"g", 2}, {"exp", 1}, {"order", 2}}}}};
    CHECK_THROWS_AS(load(cond), InvariantError);
}

TEST_CASE("perturbed record violates the temperedness bound") {
    auto q = eta_oracle({{1, 24}}, 50);
    auto rec = record_from_expansion("delta", 12, 1, DirichletCharacter::trivial(1), q, 50, Provenance::EtaOracle);
    validate_record(rec);
    // 2 * 2^{11/2} = 90.5...
    rec.ap[2] = AlgebraicNumber::rational(NumberField(), 91);
    CHECK_THROWS_AS(validate_record(rec), InvariantError);
}

TEST_CASE("eta_oracle examples") {
    auto d = eta_oracle({{1, 24}}, 10);
    CHECK(d.a[0] == 0);
    CHECK(d.a[1] == 1);
    CHECK(d.a[2] == -24);
    CHECK(d.a[3] == 252);
    auto f = eta_oracle({{1, 2}, {11, 2}}, 10);
    CHECK(f.a[0] == 0);
    CHECK(f.a[2] == -2);
    CHECK(f.a[3] == -1);
    CHECK_THROWS_AS(eta_oracle({{1, 1}}, 10), SchemaError);
}

TEST_CASE("eta_oracle agrees with naive dense products") {
    for (const auto& spec : std::vector<std::vector<std::pair<long, long>>>{
             {{1, 24}}, {{1, 2}, {11, 2}}, {{2, 4}, {4, 4}}, {{1, 4}, {5, 4}}, {{1, 1}, {23, 1}}, {{1, 8}, {2, 8}}})
        CHECK(eta_oracle(spec, 150).a == naive_eta(spec, 150));
    // eta(2z)^16 / eta(z)^8 = q prod(1-q^{2n})^16 / prod(1-q^n)^8
    const long M = 120;
    auto f = eta_oracle({{2, 16}, {1, -8}}, M + 1);
    auto den = naive_eta({{1, 8}, {1, 16}}, M + 1);  // q * prod(1-q^n)^24 ... shifted by one
    auto num = naive_eta({{2, 16}, {1, 16}}, M + 2);  // q^2 prod(1-q^{2n})^16 prod(1-q^n)^16
    // f * q prod(1-q^n)^{24} = q^2 prod(1-q^{2n})^16 prod(1-q^n)^16
    std::vector<Z> prod(M + 1, Z(0));
    for (long i = 0; i <= M; ++i)
        for (long j = 0; i + j <= M; ++j) prod[i + j] += f.a[i] * den[j];
    for (long n = 0; n <= M; ++n) CHECK(prod[n] == num[n]);
}

TEST_CASE("elliptic_oracle examples") {
    CHECK(elliptic_oracle(kCurve11, 2) == -2);
    CHECK(elliptic_oracle(kCurve11, 3) == -1);
    CHECK(elliptic_discriminant(kCurve11) == -161051);
    CHECK_THROWS_AS(elliptic_oracle(kCurve11, 11), BadReduction);
    for (long p : primes_up_to(60)) {
        if (p == 11) continue;
        CHECK(elliptic_oracle(kCurve11, p) == p + 1 - naive_point_count(kCurve11, p));
        std::array<long, 5> other{1, 0, 1, -1, 0};
        if (elliptic_discriminant(other) % p != 0)
            CHECK(elliptic_oracle(other, p) == p + 1 - naive_point_count(other, p));
    }
}

TEST_CASE("oracle concordance for the level-11 form") {
    auto q = eta_oracle({{1, 2}, {11, 2}}, 200);
    for (long p : primes_up_to(200)) {
        if (p == 11) continue;
        CHECK(q.a[p] == elliptic_oracle(kCurve11, p));
    }
}

TEST_CASE("Hecke recursion") {
    auto d = eta_oracle({{1, 24}}, 10000);
    CHECK(hecke_recursion_check(d, 12, DirichletCharacter::trivial(1), 10000));
    auto f = eta_oracle({{1, 2}, {11, 2}}, 10000);
    CHECK(hecke_recursion_check(f, 2, DirichletCharacter::trivial(11), 10000));
    auto bad = d;
    bad.a[60] += 1;
    CHECK_FALSE(hecke_recursion_check(bad, 12, DirichletCharacter::trivial(1), 100));
    auto bad2 = d;
    bad2.a[8] += 1;
    CHECK_FALSE(hecke_recursion_check(bad2, 12, DirichletCharacter::trivial(1), 100));
    CHECK_FALSE(hecke_recursion_check(d, 10, DirichletCharacter::trivial(1), 100));
}

TEST_CASE("oracle-generated records are tempered") {
    auto d = eta_oracle({{1, 24}}, 3000);
    validate_record(record_from_expansion("delta", 12, 1, DirichletCharacter::trivial(1), d, 3000, Provenance::EtaOracle));
    auto f = eta_oracle({{1, 2}, {11, 2}}, 3000);
    auto rec = record_from_expansion("11a", 2, 11, DirichletCharacter::trivial(11), f, 3000, Provenance::EtaOracle);
    validate_record(rec);
    CHECK(rec.local_types.at(11) == LocalType::Steinberg);
    auto [sf, sg] = synthetic_sqrt5_pair();
    validate_record(sf);
    validate_record(sg);
}

TEST_CASE("unitary_eigenvalue") {
    auto d = eta_oracle({{1, 24}}, 10);
    auto rec = record_from_expansion("delta", 12, 1, DirichletCharacter::trivial(1), d, 10, Provenance::EtaOracle);
    CHECK(unitary_eigenvalue(rec, 2) == AlgebraicNumber::rational(NumberField(), Q(-3, 4)));
    auto f = load(rational_record_json())[0];
    CHECK(unitary_eigenvalue(f, 2) == f.a(2));
    CHECK_THROWS_AS(unitary_eigenvalue(f, 11), RamifiedPrime);
    auto odd = f;
    odd.weight = 3;
    CHECK_THROWS_AS(unitary_eigenvalue(odd, 2), OddWeight);
}

TEST_CASE("conjugate_newform") {
    auto [sf, sg] = synthetic_sqrt5_pair(100);
    GaloisContext ctx({sf.coeff_field, NumberField::quadratic(-1)});
    auto rat = load(rational_record_json())[0];
    for (auto s : ctx.elements()) CHECK(conjugate_newform(rat, s) == rat);
    GaloisElement swap;
    for (auto s : ctx.elements())
        if (s.image_root(0) != sf.coeff_field.embedding() && s.image_root(1) == 1) swap = s;
    REQUIRE(swap.valid());
    auto c = conjugate_newform(sf, swap);
    validate_record(c);
    CHECK(c.label != sf.label);
    for (const auto& [p, a] : sf.ap) {
        std::vector<Q> co = a.coords();
        co[1] = -co[1];
        CHECK(c.a(p) == AlgebraicNumber(sf.coeff_field, co));
    }
    CHECK(conjugate_newform(c, swap) == sf);
    for (auto s : ctx.elements())
        for (auto t : ctx.elements())
            CHECK(conjugate_newform(conjugate_newform(sf, t), s) == conjugate_newform(sf, ctx.compose(s, t)));
}

TEST_CASE("conjugate_newform acts on characters") {
    auto chi = DirichletCharacter::from_generators(5, {{2, 1, 4}});
    NewformRecord r;
    r.label = "toy";
    r.weight = 3;
    r.level = 5;
    r.character = chi;
    GaloisContext ctx({NumberField::cyclotomic(4)});
    auto c = ctx.complex_conjugation();
    auto rc = conjugate_newform(r, c);
    CHECK(rc.character == chi.conj());
    CHECK(conjugate_newform(rc, c) == r);
}

TEST_CASE("level-23 pair from eta times theta series") {
    const long M = 200;
    auto [f, fs] = level23_pair(M);
    validate_record(f);
    validate_record(fs);
    const NumberField& k = f.coeff_field;
    CHECK(f.local_types.at(23) == LocalType::Steinberg);
    // Independent expansion: naive eta product times theta series by enumeration of a fixed box.
    std::vector<Z> e = naive_eta({{1, 1}, {23, 1}}, M);
    auto theta = [&](long a, long b, long c) {
        std::vector<Z> t(M + 1, Z(0));
        for (long x = -30; x <= 30; ++x)
            for (long y = -30; y <= 30; ++y)
                if (long v = a * x * x + b * x * y + c * y * y; v <= M) t[v] += 1;
        return t;
    };
    auto mul = [&](const std::vector<Z>& u, const std::vector<Z>& v) {
        std::vector<Z> w(M + 1, Z(0));
        for (long i = 0; i <= M; ++i)
            for (long j = 0; i + j <= M; ++j) w[i + j] += u[i] * v[j];
        return w;
    };
    std::vector<Z> g1 = mul(e, theta(1, 1, 6)), g2 = mul(e, theta(2, 1, 3));
    for (const auto* rec : {&f, &fs}) {
        AlgebraicNumber a2 = rec->a(2);
        CHECK(a2 * a2 + a2 == AlgebraicNumber::rational(k, Q(1)));
        AlgebraicNumber y = (a2 - AlgebraicNumber::rational(k, Q(g1[2]))) * (Q(1) / Q(g2[2] - g1[2]));
        std::vector<AlgebraicNumber> F(M + 1);
        for (long n = 1; n <= M; ++n) F[n] = AlgebraicNumber::rational(k, Q(g1[n])) + y * Q(g2[n] - g1[n]);
        for (const auto& [p, a] : rec->ap) CHECK(F[p] == a);
        for (long m = 2; m <= M; ++m)
            for (long n = 2; m * n <= M; ++n)
                if (std::gcd(m, n) == 1) CHECK(F[m * n] == F[m] * F[n]);
        for (long p : primes_up_to(M))
            for (long q = p; q * p <= M; q *= p) {
                AlgebraicNumber expect = F[p] * F[q];
                if (p != 23) expect -= F[q / p] * Q(p);
                CHECK(F[q * p] == expect);
            }
    }
    // Values of the newform with a_2 = (-1 + sqrt 5)/2, from an independent sympy computation.
    const NewformRecord& plus = f.a(2).coords()[1] > 0 ? f : fs;
    CHECK(plus.a(3) == AlgebraicNumber(k, {Q(0), Q(-1)}));
    CHECK(plus.a(5) == AlgebraicNumber(k, {Q(-1), Q(1)}));
    CHECK(plus.a(7) == AlgebraicNumber(k, {Q(1), Q(1)}));
    CHECK(plus.a(23) == AlgebraicNumber::rational(k, Q(1)));
    GaloisContext ctx({k});
    for (auto s : ctx.elements())
        if (!s.is_identity()) CHECK(conjugate_newform(f, s) == fs);
    CHECK(f.label != fs.label);
}

TEST_CASE("bundled data matches its generators") {
    CHECK(check_bundled_data(data_dir()).empty());
    CHECK(load_level23_pair() == level23_pair(kLevel23Pmax));
    CHECK(load_synthetic_pair() == synthetic_sqrt5_pair(kSyntheticPmax));
    auto spec = load_oracle_spec("11a");
    REQUIRE(spec.curve.has_value());
    auto rec = oracle_record(spec, 200);
    for (const auto& [p, a] : rec.ap)
        if (p != 11) CHECK(a.rational_value() == Q(elliptic_oracle(*spec.curve, p)));
    CHECK_THROWS_AS(load_oracle_spec("nope"), SchemaError);

    auto dir = std::filesystem::temp_directory_path() / "yl_bundled_check";
    std::filesystem::create_directories(dir);
    for (const auto& [name, j] : bundled_files()) std::ofstream(dir / name) << j.dump();
    CHECK(check_bundled_data(dir.string()).empty());
    auto j = bundled_files().at("level23.json");
    j["records"][0]["ap"][3]["coeffs"][0] = "7";
    std::ofstream(dir / "level23.json") << j.dump();
    std::filesystem::remove(dir / "oracles.json");
    CHECK(check_bundled_data(dir.string()) == std::vector<std::string>{"level23.json", "oracles.json"});
    std::filesystem::remove_all(dir);
}
