#include "yl/newforms.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "yl/errors.hpp"

namespace yl {

using nlohmann::json;

std::string to_string(LocalType t) {
    switch (t) {
        case LocalType::Steinberg:
            return "steinberg";
        case LocalType::RamifiedPrincipal:
            return "ramified_principal";
        case LocalType::Supercuspidal:
            return "supercuspidal";
    }
    return "?";
}

LocalType parse_local_type(const std::string& s) {
    if (s == "steinberg") return LocalType::Steinberg;
    if (s == "ramified_principal") return LocalType::RamifiedPrincipal;
    if (s == "supercuspidal") return LocalType::Supercuspidal;
    throw SchemaError("unknown local type '" + s + "'");
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Ingested:
            return "ingested";
        case Provenance::EtaOracle:
            return "eta_oracle";
        case Provenance::EllipticOracle:
            return "elliptic_oracle";
    }
    return "?";
}

namespace {

Provenance parse_provenance(const std::string& s) {
    if (s == "ingested") return Provenance::Ingested;
    if (s == "eta_oracle") return Provenance::EtaOracle;
    if (s == "elliptic_oracle") return Provenance::EllipticOracle;
    throw SchemaError("unknown provenance '" + s + "'");
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing key '") + key + "'");
    return j.at(key);
}

long int_field(const json& j, const char* key) {
    const json& v = field(j, key);
    if (!v.is_number_integer()) throw SchemaError(std::string("key '") + key + "' must be an integer");
    return v.get<long>();
}

Q parse_coord(const json& v) {
    if (v.is_number_integer()) return Q(v.get<long>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
    throw SchemaError("field coordinates must be rational strings");
}

}  // namespace

bool is_discrete_series(LocalType t) { return t == LocalType::Steinberg || t == LocalType::Supercuspidal; }

const AlgebraicNumber& NewformRecord::a(long p) const {
    auto it = ap.find(p);
    if (it == ap.end()) throw InsufficientData("record " + label + " has no a_" + std::to_string(p));
    return it->second;
}

bool NewformRecord::operator==(const NewformRecord& o) const {
    return label == o.label && weight == o.weight && level == o.level && character == o.character &&
           coeff_field == o.coeff_field && ap == o.ap && local_types == o.local_types;
}

AlgebraicNumber cyclotomic_to_field(const CyclotomicElement& z) {
    if (z.order() <= 2) return AlgebraicNumber::rational(NumberField(), z.rational_value());
    return AlgebraicNumber(NumberField::cyclotomic(z.order()), z.coeffs());
}

AlgebraicNumber character_value(const DirichletCharacter& chi, long a) {
    long m = chi.order();
    CyclotomicElement v = chi.value(a);
    if (m <= 2) return AlgebraicNumber::rational(NumberField(), v.promote(2).rational_value());
    return cyclotomic_to_field(v.promote(m));
}

void validate_record(const NewformRecord& rec) {
    const std::string who = "record '" + rec.label + "': ";
    if (rec.weight < 1) throw InvariantError(who + "weight must be positive");
    if (rec.level < 1) throw InvariantError(who + "level must be positive");
    if (rec.character.parity() != (rec.weight % 2 == 0 ? 1 : -1))
        throw InvariantError(who + "parity rule chi(-1) = (-1)^k violated (chi(-1) = " +
                             std::to_string(rec.character.parity()) + ", k = " + std::to_string(rec.weight) + ")");
    if (rec.level % rec.character.conductor() != 0)
        throw InvariantError(who + "conductor " + std::to_string(rec.character.conductor()) + " does not divide level " +
                             std::to_string(rec.level));
    for (const auto& [p, t] : rec.local_types)
        if (rec.level % p != 0) throw InvariantError(who + "local type given at unramified prime " + std::to_string(p));
    PrecisionScope ps(30);
    for (const auto& [p, a] : rec.ap) {
        if (!is_prime64(p)) throw InvariantError(who + "a_p key " + std::to_string(p) + " is not prime");
        if (a.field() != rec.coeff_field) throw InvariantError(who + "a_" + std::to_string(p) + " outside coefficient field");
        if (rec.level % p == 0) continue;
        R bound = 2 * boost::multiprecision::pow(R(p), R(rec.weight - 1) / 2);
        for (int e = 0; e < rec.coeff_field.degree(); ++e) {
            Cx v = a.eval(e);
            if (abs(v) > bound * (1 + R(1e-25)))
                throw InvariantError(who + "temperedness bound |a_p| <= 2 p^((k-1)/2) violated at p = " + std::to_string(p) +
                                     " in embedding " + std::to_string(e));
        }
    }
}

json field_to_json(const NumberField& k) { return {{"poly", k.int_coeffs()}, {"embedding", k.embedding()}}; }

NumberField field_from_json(const json& j) {
    if (!j.is_object() || !j.contains("poly") || !j.contains("embedding")) throw SchemaError("field needs 'poly' and 'embedding'");
    auto poly = j.at("poly").get<std::vector<long>>();
    if (poly.size() <= 2) return NumberField();
    try {
        return NumberField::from_poly(poly, j.at("embedding").get<int>());
    } catch (const FieldError& e) {
        throw SchemaError(std::string("field: ") + e.what());
    }
}

json character_to_json(const DirichletCharacter& chi) {
    json gens = json::array();
    for (const auto& g : chi.generators()) gens.push_back({{"g", g.g}, {"exp", g.exp}, {"order", g.order}});
    return {{"modulus", chi.modulus()}, {"generators", gens}};
}

DirichletCharacter character_from_json(const json& j) {
    long q = int_field(j, "modulus");
    const json& gens = field(j, "generators");
    if (!gens.is_array()) throw SchemaError("character generators must be an array");
    std::vector<CharGenerator> out;
    for (const auto& g : gens) out.push_back({int_field(g, "g"), int_field(g, "exp"), int_field(g, "order")});
    return DirichletCharacter::from_generators(q, out);
}

json element_to_json(const AlgebraicNumber& x) {
    json c = json::array();
    for (const auto& s : x.coord_strings()) c.push_back(s);
    return c;
}

AlgebraicNumber element_from_json(const NumberField& k, const json& j) {
    if (!j.is_array()) throw SchemaError("field element must be an array of coordinates");
    if (static_cast<int>(j.size()) > k.degree())
        throw SchemaError("field element has " + std::to_string(j.size()) + " coordinates for degree " + std::to_string(k.degree()));
    std::vector<Q> c;
    for (const auto& v : j) c.push_back(parse_coord(v));
    return AlgebraicNumber(k, c);
}

std::map<long, LocalType> default_local_types(long level, const DirichletCharacter& chi) {
    std::map<long, LocalType> out;
    auto f = factorize(level);
    bool squarefree = std::all_of(f.begin(), f.end(), [](const auto& pe) { return pe.second == 1; });
    if (squarefree && chi.is_trivial())
        for (auto [p, e] : f) out[p] = LocalType::Steinberg;
    return out;
}

NewformRecord record_from_json(const json& j) {
    NewformRecord r;
    const json& lab = field(j, "label");
    if (!lab.is_string()) throw SchemaError("label must be a string");
    r.label = lab.get<std::string>();
    r.weight = static_cast<int>(int_field(j, "weight"));
    r.level = int_field(j, "level");
    if (r.level < 1) throw SchemaError("level must be positive");
    r.character = character_from_json(field(j, "character"));
    const json& poly = field(j, "field_poly");
    if (!poly.is_array()) throw SchemaError("field_poly must be an integer array");
    std::vector<long> coeffs;
    for (const auto& c : poly) {
        if (!c.is_number_integer()) throw SchemaError("field_poly entries must be integers");
        coeffs.push_back(c.get<long>());
    }
    long emb = int_field(j, "embedding");
    try {
        r.coeff_field = (coeffs.size() == 2 && coeffs[1] == 1 && coeffs[0] == 0) || coeffs.size() <= 1
                            ? NumberField()
                            : NumberField::from_poly(coeffs, static_cast<int>(emb));
    } catch (const FieldError& e) {
        throw SchemaError(std::string("field_poly: ") + e.what());
    }
    const json& ap = field(j, "ap");
    if (!ap.is_array()) throw SchemaError("ap must be an array");
    for (const auto& e : ap) {
        long p = int_field(e, "p");
        if (r.ap.count(p)) throw SchemaError("duplicate a_p entry for p = " + std::to_string(p));
        r.ap.emplace(p, element_from_json(r.coeff_field, field(e, "coeffs")));
    }
    if (j.contains("local_types")) {
        for (const auto& e : j.at("local_types")) {
            const json& t = field(e, "type");
            if (!t.is_string()) throw SchemaError("local type must be a string");
            r.local_types[int_field(e, "p")] = parse_local_type(t.get<std::string>());
        }
    } else {
        r.local_types = default_local_types(r.level, r.character);
    }
    if (j.contains("provenance")) r.provenance = parse_provenance(j.at("provenance").get<std::string>());
    return r;
}

json record_to_json(const NewformRecord& r) {
    json ap = json::array();
    for (const auto& [p, a] : r.ap) ap.push_back({{"p", p}, {"coeffs", element_to_json(a)}});
    json lt = json::array();
    for (const auto& [p, t] : r.local_types) lt.push_back({{"p", p}, {"type", to_string(t)}});
    std::vector<long> poly = r.coeff_field.degree() == 1 ? std::vector<long>{0, 1} : r.coeff_field.int_coeffs();
    return {{"label", r.label},
            {"weight", r.weight},
            {"level", r.level},
            {"character", character_to_json(r.character)},
            {"field_poly", poly},
            {"embedding", r.coeff_field.embedding()},
            {"ap", ap},
            {"local_types", lt},
            {"provenance", to_string(r.provenance)}};
}

std::vector<NewformRecord> load_records(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed JSON: ") + e.what());
    }
    json list;
    if (j.is_array()) list = j;
    else if (j.is_object() && j.contains("records")) list = j.at("records");
    else list = json::array({j});
    std::vector<NewformRecord> out;
    for (size_t i = 0; i < list.size(); ++i) {
        std::string where = "record " + std::to_string(i);
        try {
            out.push_back(record_from_json(list[i]));
            validate_record(out.back());
        } catch (const SchemaError& e) {
            throw SchemaError(where + ": " + e.what());
        } catch (const json::exception& e) {
            throw SchemaError(where + ": " + e.what());
        } catch (const InvariantError& e) {
            throw InvariantError(where + ": " + e.what());
        }
    }
    return out;
}

std::vector<NewformRecord> load_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open " + path);
    return load_records(in);
}

QExpansion eta_oracle(const std::vector<std::pair<long, long>>& spec, long M) {
    if (M < 1 || M > 100000) throw RangeError("eta_oracle: M must lie in [1, 100000]");
    long shift24 = 0;
    for (auto [d, e] : spec) {
        if (d < 1) throw SchemaError("eta_oracle: d must be positive");
        shift24 += d * e;
    }
    if (shift24 % 24 != 0) throw SchemaError("eta_oracle: q-exponent sum d*e/24 is not integral");
    long shift = shift24 / 24;
    QExpansion out;
    out.a.assign(M + 1, Z(0));
    if (shift > M) return out;
    long L = M - shift;
    // F = prod_m (1 - q^m)^{c_m}; q F'/F = sum_n b_n q^n with b_n = -sum_{m | n} m c_m,
    // so n F_n = sum_{j=1..n} b_j F_{n-j}.
    std::vector<long> c(L + 1, 0), b(L + 1, 0);
    for (auto [d, e] : spec)
        for (long m = d; m <= L; m += d) c[m] += e;
    for (long m = 1; m <= L; ++m)
        for (long n = m; n <= L; n += m) b[n] -= m * c[m];
    std::vector<Z> f(L + 1, Z(0));
    f[0] = 1;
    bool overflow = false;
    {
        using i128 = __int128;
        std::vector<i128> g(L + 1, 0);
        g[0] = 1;
        for (long n = 1; n <= L && !overflow; ++n) {
            i128 s = 0;
            for (long j = 1; j <= n; ++j) {
                i128 t;
                if (__builtin_mul_overflow(static_cast<i128>(b[j]), g[n - j], &t) || __builtin_add_overflow(s, t, &s)) {
                    overflow = true;
                    break;
                }
            }
            g[n] = s / n;
        }
        if (!overflow) {
            for (long n = 0; n <= L; ++n) {
                i128 v = g[n];
                bool neg = v < 0;
                unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
                Z z = Z(static_cast<unsigned long>(u >> 64));
                z <<= 64;
                z += Z(static_cast<unsigned long>(u & ~0UL));
                f[n] = neg ? Z(-z) : z;
            }
        }
    }
    if (overflow) {
        for (long n = 1; n <= L; ++n) {
            Z s = 0;
            for (long j = 1; j <= n; ++j)
                if (b[j]) s += Z(b[j]) * f[n - j];
            f[n] = s / n;
        }
    }
    for (long n = 0; n <= L; ++n) out.a[n + shift] = f[n];
    return out;
}

Z elliptic_discriminant(const std::array<long, 5>& c) {
    Z a1 = c[0], a2 = c[1], a3 = c[2], a4 = c[3], a6 = c[4];
    Z b2 = a1 * a1 + 4 * a2;
    Z b4 = 2 * a4 + a1 * a3;
    Z b6 = a3 * a3 + 4 * a6;
    Z b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    return -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
}

long elliptic_oracle(const std::array<long, 5>& c, long p) {
    if (!is_prime64(p)) throw RangeError("elliptic_oracle: p must be prime");
    if (p > 10000) throw RangeError("elliptic_oracle: p must be at most 10^4");
    Z disc = elliptic_discriminant(c);
    if (disc % p == 0) throw BadReduction("prime " + std::to_string(p) + " divides the discriminant " + disc.get_str());
    long a1 = mod64(c[0], p), a2 = mod64(c[1], p), a3 = mod64(c[2], p), a4 = mod64(c[3], p), a6 = mod64(c[4], p);
    // For each x, count y by tabulating the left-hand side over all y.
    std::vector<long> count(p, 0);
    long points = 1;
    for (long x = 0; x < p; ++x) {
        std::fill(count.begin(), count.end(), 0);
        long lin = (a1 * x + a3) % p;
        for (long y = 0; y < p; ++y) ++count[(y * y + lin * y) % p];
        long rhs = (((x * x % p) * x) % p + a2 * (x * x % p) + a4 * x + a6) % p;
        points += count[rhs];
    }
    return p + 1 - points;
}

bool hecke_recursion_check(const QExpansion& q, int k, const DirichletCharacter& chi, long P) {
    const auto& a = q.a;
    if (P > q.length()) P = q.length();
    if (P < 1 || a[1] != 1) return false;
    auto chi_p = [&](long p) -> Z {
        auto [e, m] = chi.value_exponent(p);
        if (m == 0) return 0;
        if (2 * e == m) return -1;
        if (e == 0) return 1;
        throw InvariantError("hecke_recursion_check: rational expansion with non-real character value");
    };
    for (long p : primes_up_to(P)) {
        Z pk = Z(1);
        for (int i = 0; i < k - 1; ++i) pk *= p;
        Z c = chi_p(p) * pk;
        long prev = 1, cur = p;
        while (cur <= P / p) {
            long next = cur * p;
            if (a[next] != a[p] * a[cur] - c * a[prev]) return false;
            prev = cur;
            cur = next;
        }
    }
    for (long n = 2; n <= P; ++n) {
        auto f = factorize(n);
        if (f.size() < 2) continue;
        Z prod = 1;
        for (auto [p, e] : f) {
            long pe = 1;
            for (int i = 0; i < e; ++i) pe *= p;
            prod *= a[pe];
        }
        if (a[n] != prod) return false;
    }
    return true;
}

NewformRecord record_from_expansion(const std::string& label, int k, long level, const DirichletCharacter& chi,
                                    const QExpansion& q, long pmax, Provenance prov) {
    NewformRecord r;
    r.label = label;
    r.weight = k;
    r.level = level;
    r.character = chi;
    r.provenance = prov;
    for (long p : primes_up_to(std::min(pmax, q.length()))) r.ap.emplace(p, AlgebraicNumber::rational(NumberField(), Q(q.a[p])));
    r.local_types = default_local_types(level, chi);
    return r;
}

namespace {

// Conjugate labels: base#j[cE] where j is the root the generator is sent to and E the
// exponent applied to the character values.
struct ConjLabel {
    std::string base;
    int root = -1;
    long exp = 1;
};

ConjLabel parse_label(const std::string& s) {
    ConjLabel l;
    auto pos = s.find('#');
    if (pos == std::string::npos) {
        l.base = s;
        return l;
    }
    l.base = s.substr(0, pos);
    std::string rest = s.substr(pos + 1);
    auto c = rest.find('c');
    l.root = std::stoi(rest.substr(0, c));
    if (c != std::string::npos) l.exp = std::stol(rest.substr(c + 1));
    return l;
}

}  // namespace

NewformRecord conjugate_newform(const NewformRecord& rec, const GaloisElement& s) {
    NewformRecord out = rec;
    const auto& ctx = s.context();
    ConjLabel lab = parse_label(rec.label);
    const NumberField& K = rec.coeff_field;
    int root = lab.root < 0 ? K.embedding() : lab.root;
    if (!rec.is_rational()) {
        int k = ctx.constituent_index(K);
        if (k < 0) throw UndefinedAction("coefficient field " + K.to_string() + " of " + rec.label + " is not in the Galois context");
        for (auto& [p, a] : out.ap) a = apply_galois(a, s);
        root = K.automorphisms()[K.automorphism_to(root)].perm[s.image_root(k)];
    }
    long m = rec.character.order();
    long e = 1;
    if (m > 2) {
        e = s.cyclotomic_exponent(m);
        out.character = rec.character.conjugate(e);
    }
    long total = m > 2 ? mod64(lab.exp * e, m) : 1;
    out.label = lab.base;
    if (root != K.embedding() || total != 1) {
        out.label += "#" + std::to_string(root);
        if (total != 1) out.label += "c" + std::to_string(total);
    }
    return out;
}

AlgebraicNumber unitary_eigenvalue(const NewformRecord& rec, long p) {
    if (rec.weight % 2 != 0) throw OddWeight("unitary normalization requires even weight (" + rec.label + ")");
    if (rec.level % p == 0) throw RamifiedPrime("p = " + std::to_string(p) + " divides the level of " + rec.label);
    return rec.a(p) * (Q(1) / qpow(Q(p), (rec.weight - 2) / 2));
}

std::pair<NewformRecord, NewformRecord> synthetic_sqrt5_pair(long pmax) {
    NumberField k = NumberField::quadratic(5);
    std::mt19937_64 rng(0x5eed5);
    PrecisionScope ps(30);
    R s5 = boost::multiprecision::sqrt(R(5));
    auto make = [&](const std::string& label, int weight, long a_ramified) {
        NewformRecord r;
        r.label = label;
        r.weight = weight;
        r.level = 23;
        r.character = DirichletCharacter::trivial(23);
        r.coeff_field = k;
        r.local_types[23] = LocalType::Steinberg;
        for (long p : primes_up_to(pmax)) {
            if (p == 23) {
                r.ap.emplace(p, AlgebraicNumber::rational(k, a_ramified));
                continue;
            }
            R bound = 2 * boost::multiprecision::pow(R(p), R(weight - 1) / 2);
            long span = static_cast<long>(bound.convert_to<double>());
            while (true) {
                long u = static_cast<long>(rng() % static_cast<uint64_t>(2 * span + 1)) - span;
                long v = static_cast<long>(rng() % static_cast<uint64_t>(span / 2 + 1)) - span / 4;
                if ((u - v) % 2 != 0) continue;
                R x1 = boost::multiprecision::abs(R(u) + v * s5) / 2, x2 = boost::multiprecision::abs(R(u) - v * s5) / 2;
                if (x1 > bound || x2 > bound) continue;
                r.ap.emplace(p, AlgebraicNumber(k, {frac(u, 2), frac(v, 2)}));
                break;
            }
        }
        for (auto& [p, a] : r.ap) {
            std::vector<Q> c = a.coords();
            for (auto& q : c) q.canonicalize();
            a = AlgebraicNumber(k, c);
        }
        return r;
    };
    return {make("synth23-w4-sqrt5", 4, -23), make("synth23-w2-sqrt5", 2, 1)};
}

QExpansion binary_theta_series(long a, long b, long c, long M) {
    long disc = 4 * a * c - b * b;
    if (a <= 0 || disc <= 0) throw std::invalid_argument("binary_theta_series: form is not positive definite");
    QExpansion t;
    t.a.assign(M + 1, Z(0));
    long ymax = static_cast<long>(std::sqrt(4.0 * a * M / disc)) + 1;
    long xmax = static_cast<long>(std::sqrt(4.0 * c * M / disc)) + 1;
    for (long y = -ymax; y <= ymax; ++y)
        for (long x = -xmax; x <= xmax; ++x) {
            long v = a * x * x + b * x * y + c * y * y;
            if (v <= M) t.a[v] += 1;
        }
    return t;
}

std::pair<NewformRecord, NewformRecord> level23_pair(long pmax) {
    if (pmax < 4) throw std::invalid_argument("level23_pair: pmax < 4");
    QExpansion e = eta_oracle({{1, 1}, {23, 1}}, pmax);
    auto times_theta = [&](long a, long b, long c) {
        QExpansion t = binary_theta_series(a, b, c, pmax);
        std::vector<Z> g(pmax + 1, Z(0));
        for (long i = 1; i <= pmax; ++i)
            if (e.a[i] != 0)
                for (long j = 0; i + j <= pmax; ++j)
                    if (t.a[j] != 0) g[i + j] += e.a[i] * t.a[j];
        return g;
    };
    std::vector<Z> g1 = times_theta(1, 1, 6), g2 = times_theta(2, 1, 3);
    // F = g1 + y (g2 - g1) has a_1 = 1; the T_2 eigen-condition at q^2 gives a_4 + 2 = a_2^2.
    std::vector<Z> d(pmax + 1);
    for (long n = 0; n <= pmax; ++n) d[n] = g2[n] - g1[n];
    Q A = Q(d[2] * d[2]), B = Q(2 * g1[2] * d[2] - d[4]), C = Q(g1[2] * g1[2] - g1[4] - 2);
    Q r2 = (B * B - 4 * A * C) / 5;
    if (A == 0 || r2 <= 0 || !mpz_perfect_square_p(r2.get_num_mpz_t()) || !mpz_perfect_square_p(r2.get_den_mpz_t()))
        throw InvariantError("level23_pair: T_2 eigenvalues do not lie in Q(sqrt 5)");
    Z rn, rd;
    mpz_sqrt(rn.get_mpz_t(), r2.get_num_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), r2.get_den_mpz_t());
    NumberField k = NumberField::quadratic(5);
    Q root(rn, rd);
    root.canonicalize();
    AlgebraicNumber y(k, {-B / (2 * A), root / (2 * A)});
    NewformRecord rec;
    rec.label = "23a";
    rec.weight = 2;
    rec.level = 23;
    rec.character = DirichletCharacter::trivial(23);
    rec.coeff_field = k;
    rec.provenance = Provenance::EtaOracle;
    for (long p : primes_up_to(pmax)) {
        std::vector<Q> c = (y * Q(d[p]) + AlgebraicNumber::rational(k, Q(g1[p]))).coords();
        for (auto& q : c) q.canonicalize();
        rec.ap.emplace(p, AlgebraicNumber(k, c));
    }
    rec.local_types = default_local_types(23, rec.character);
    GaloisContext ctx({k});
    GaloisElement sigma = ctx.elements()[0].is_identity() ? ctx.elements()[1] : ctx.elements()[0];
    return {rec, conjugate_newform(rec, sigma)};
}

std::string data_dir() {
    if (const char* env = std::getenv("YOSHIDALAB_DATA")) return env;
    return YL_DEFAULT_DATA_DIR;
}

}  // namespace yl
