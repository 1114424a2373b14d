#include "yl/yoshida.hpp"

#include <algorithm>
#include <sstream>

#include "yl/errors.hpp"

namespace yl {

using nlohmann::json;

namespace {

bool good_prime(const NewformRecord& f, const NewformRecord& g, long p) {
    return f.level % p != 0 && g.level % p != 0 && f.ap.count(p) && g.ap.count(p);
}

bool numeric_equal(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    PrecisionScope ps(40);
    return abs(a.numeric() - b.numeric()) < R("1e-30");
}

bool equal_across(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    if (a.field() == b.field()) return a == b;
    if (a.is_rational() && b.is_rational()) return a.coords()[0] == b.coords()[0];
    return numeric_equal(a, b);
}

// a_f(p) p^{-k_f/2} versus a_g(p) p^{-k_g/2}; squares are compared when the weights differ in parity.
bool same_normalized(const AlgebraicNumber& af, int kf, const AlgebraicNumber& ag, int kg, long p) {
    if ((kf - kg) % 2 == 0) return equal_across(af * qpow(Q(p), (kg - kf) / 2), ag);
    return equal_across(af * af * qpow(Q(p), kg), ag * ag * qpow(Q(p), kf));
}

std::string laurent_tower_string(const TowerElt<LaurentPoly>& x, const std::vector<std::string>& vars) {
    const auto& t = *x.tower();
    std::ostringstream os;
    bool first = true;
    for (size_t m = 0; m < x.coeffs().size(); ++m) {
        if (x.coeffs()[m].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << "(" << x.coeffs()[m].to_string(vars) << ")";
        for (size_t i = 0; i < t.levels(); ++i)
            if (m >> i & 1) os << "*" << t.names[i];
    }
    return first ? "0" : os.str();
}

}  // namespace

json ConditionReport::to_json() const {
    return {{"i_not_multiples", not_multiples},
            {"ii_same_character", same_character},
            {"iii_weights", weights_ok},
            {"iv_common_discrete_series", common_discrete},
            {"checked_up_to", checked_up_to},
            {"discrete_primes", discrete_primes},
            {"notes", notes},
            {"pass", pass()}};
}

bool YoshidaLiftData::operator==(const YoshidaLiftData& o) const {
    return f == o.f && g == o.g && siegel_weight == o.siegel_weight && character == o.character && field == o.field &&
           T == o.T && eigen == o.eigen && lift_count == o.lift_count;
}

std::vector<NumberField> lift_constituents(const NewformRecord& f, const NewformRecord& g) {
    std::vector<NumberField> out;
    auto add = [&](const NumberField& k) {
        if (k.degree() > 1 && std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    };
    add(f.coeff_field);
    add(g.coeff_field);
    long m = f.character.primitive().order();
    if (m > 2) add(character_value(f.character.primitive(), 1).field());
    return out;
}

CommonField::CommonField(const std::vector<NumberField>& constituents) {
    std::vector<NumberField> nontrivial;
    for (const auto& k : constituents)
        if (k.degree() > 1 && std::find(nontrivial.begin(), nontrivial.end(), k) == nontrivial.end()) nontrivial.push_back(k);
    if (nontrivial.size() == 1) field_ = nontrivial[0];
    if (nontrivial.size() > 1) {
        ctx_ = std::make_shared<GaloisContext>(nontrivial);
        field_ = ctx_->compositum();
    }
}

AlgebraicNumber CommonField::embed(const AlgebraicNumber& x) const {
    if (x.field() == field_) return x;
    if (x.is_rational()) return AlgebraicNumber::rational(field_, x.coords()[0]);
    if (!ctx_) throw FieldError("element of " + x.field().to_string() + " is not in " + field_.to_string());
    return ctx_->embed(x);
}

bool parity_check(int /*weight*/, const DirichletCharacter& chi) { return chi.parity() == 1; }

long lift_count(size_t t_size) {
    if (t_size == 0) throw PreconditionError("T is empty");
    if (t_size > 62) throw RangeError("#T too large for a machine-integer lift count");
    return 1L << (t_size - 1);
}

ConditionReport check_conditions(const NewformRecord& f, const NewformRecord& g) {
    ConditionReport r;
    if (f == g) {
        r.notes.push_back("(i) identical records");
    } else {
        bool differ = false;
        for (const auto& [p, af] : f.ap) {
            if (!good_prime(f, g, p)) continue;
            r.checked_up_to = p;
            if (!same_normalized(af, f.weight, g.a(p), g.weight, p)) {
                differ = true;
                r.notes.push_back("(i) eigenvalues differ at p = " + std::to_string(p));
                break;
            }
        }
        if (differ) {
            r.not_multiples = true;
        } else if (f.label != g.label) {
            r.not_multiples = true;
            r.notes.push_back("(i) eigenvalues agree through " + std::to_string(r.checked_up_to) + "; labels differ");
        } else {
            throw InsufficientData("(i) undecidable: eigenvalues agree through p = " + std::to_string(r.checked_up_to) +
                                   " and both records are labelled " + f.label);
        }
    }
    r.same_character = f.character.primitive() == g.character.primitive();
    if (!r.same_character) r.notes.push_back("(ii) primitive characters differ");
    bool f2 = f.weight == 2, g2 = g.weight == 2;
    r.weights_ok = (f2 && g.weight >= 2 && g.weight % 2 == 0) || (g2 && f.weight >= 2 && f.weight % 2 == 0);
    if (!r.weights_ok)
        r.notes.push_back("(iii) weights (" + std::to_string(f.weight) + ", " + std::to_string(g.weight) + ")");
    for (const auto& [p, t] : f.local_types) {
        auto it = g.local_types.find(p);
        if (it != g.local_types.end() && is_discrete_series(t) && is_discrete_series(it->second)) r.discrete_primes.push_back(p);
    }
    r.common_discrete = !r.discrete_primes.empty();
    if (!r.common_discrete) r.notes.push_back("(iv) no prime where both are discrete series");
    return r;
}

YoshidaLiftData build_lift(const NewformRecord& f_in, const NewformRecord& g_in) {
    ConditionReport rep = check_conditions(f_in, g_in);
    if (!rep.pass()) {
        std::string msg = "Yoshida conditions fail:";
        for (const auto& n : rep.notes)
            if (n.rfind("(i) eigenvalues", 0) != 0) msg += " " + n + ";";
        throw ConditionFailure(msg);
    }
    bool swap = f_in.weight == 2 && g_in.weight != 2;
    const NewformRecord& f = swap ? g_in : f_in;
    const NewformRecord& g = swap ? f_in : g_in;
    YoshidaLiftData d;
    d.f = f;
    d.g = g;
    d.siegel_weight = f.weight / 2 + 1;
    d.character = f.character.primitive();
    if (!parity_check(d.siegel_weight, d.character)) throw ConditionFailure("character is odd");
    CommonField cf(lift_constituents(f, g));
    d.field = cf.field();
    d.T = std::set<long>(rep.discrete_primes.begin(), rep.discrete_primes.end());
    d.lift_count = lift_count(d.T.size());
    for (const auto& [p, a] : f.ap) {
        if (!good_prime(f, g, p)) continue;
        AlgebraicNumber lf = cf.embed(unitary_eigenvalue(f, p));
        AlgebraicNumber lg = cf.embed(unitary_eigenvalue(g, p));
        AlgebraicNumber c = cf.embed(character_value(d.character, p));
        Q pq(p);
        d.eigen.emplace(p, LiftEigen{(lf + lg) * pq, c * (pq * pq - 1) + lf * lg * pq, c});
    }
    return d;
}

bool spin_factorization_check(const YoshidaLiftData& d, long p) {
    if (!good_prime(d.f, d.g, p)) throw PreconditionError("p = " + std::to_string(p) + " is not a good prime with data");
    auto it = d.eigen.find(p);
    if (it == d.eigen.end()) return false;
    CommonField cf(lift_constituents(d.f, d.g));
    if (cf.field() != d.field) return false;
    auto c = base_element(cf.embed(character_value(d.character, p)));
    auto sf = gl2_satake_from_eigen(base_element(cf.embed(unitary_eigenvalue(d.f, p))), c, p);
    auto sg = gl2_satake_from_eigen(base_element(cf.embed(unitary_eigenvalue(d.g, p))), c, p);
    auto ep = embed_pair(sf, sg);
    if (!factors_equal(gsp4_spin_factor(ep), multiply(gl2_euler_factor(sf), gl2_euler_factor(sg)))) return false;
    auto e = eigen_from_satake(ep);
    auto lam = e.lambda.in_base();
    auto top = e.lambda_top_p2.in_base();
    auto l1 = e.lambda1_p2 ? e.lambda1_p2->in_base() : std::nullopt;
    return lam && top && l1 && *lam == it->second.lambda && *top == it->second.lambda2_p2 && *l1 == it->second.lambda1_p2;
}

bool spin_factorization_check(const NewformRecord& f, const NewformRecord& g, long p) {
    return spin_factorization_check(build_lift(f, g), p);
}

SymbolicReport symbolic_identity_check(long p) {
    using T = TowerElt<LaurentPoly>;
    const std::vector<std::string> vars = {"a_f", "a_g", "c"};
    auto af = LaurentPoly::var(0), ag = LaurentPoly::var(1), c = LaurentPoly::var(2);
    auto sf = gl2_satake_from_eigen(T::base(T::base_tower(LaurentPoly()), af), T::base(T::base_tower(LaurentPoly()), c), p);
    auto sg = gl2_satake_from_eigen(T::base(T::base_tower(LaurentPoly()), ag), T::base(T::base_tower(LaurentPoly()), c), p);
    auto ep = embed_pair(sf, sg);
    auto spin = gsp4_spin_factor(ep);
    auto prod = multiply(gl2_euler_factor(sf), gl2_euler_factor(sg));
    SymbolicReport r;
    r.p = p;
    r.factorization = factors_equal(spin, prod);
    auto e = eigen_from_satake(ep);
    Q pq(p);
    auto lam = e.lambda.in_base();
    r.lambda = lam && *lam == (af + ag) * LaurentPoly(pq);
    auto top = e.lambda_top_p2.in_base();
    r.lambda2 = top && *top == c;
    auto l1 = e.lambda1_p2 ? e.lambda1_p2->in_base() : std::nullopt;
    r.lambda1 = l1 && *l1 == c * LaurentPoly(pq * pq - 1) + af * ag * LaurentPoly(pq);
    std::ostringstream os;
    for (size_t i = 0; i < prod.coeffs.size(); ++i) {
        if (i) os << " + ";
        os << "[" << laurent_tower_string(prod.coeffs[i], vars) << "]";
        if (i) os << "*X^" << i;
    }
    r.spin_poly = os.str();
    return r;
}

CandidateEigen candidate_from_lift(const YoshidaLiftData& d) {
    CandidateEigen c;
    for (const auto& [p, e] : d.eigen) c.emplace(p, std::make_pair(e.lambda, e.lambda1_p2));
    return c;
}

bool weak_membership(const CandidateEigen& candidate, const NewformRecord& f, const NewformRecord& g,
                     const std::vector<long>& primes) {
    YoshidaLiftData d = build_lift(f, g);
    for (long p : primes) {
        auto it = d.eigen.find(p);
        if (it == d.eigen.end()) throw PreconditionError("p = " + std::to_string(p) + " is not a good prime with data");
        auto c = candidate.find(p);
        if (c == candidate.end()) return false;
        if (!equal_across(c->second.first, it->second.lambda) || !equal_across(c->second.second, it->second.lambda1_p2))
            return false;
    }
    return true;
}

YoshidaLiftData conjugate_lift(const YoshidaLiftData& d, const GaloisElement& s) {
    if (!s.valid()) throw UndefinedAction("invalid Galois element");
    const auto& ctx = s.context();
    if (d.field.degree() > 1 && d.field != ctx.compositum() && ctx.constituent_index(d.field) < 0)
        throw UndefinedAction("Galois element is not defined on " + d.field.to_string());
    YoshidaLiftData out = d;
    out.f = conjugate_newform(d.f, s);
    out.g = conjugate_newform(d.g, s);
    long m = d.character.order();
    if (m > 2) out.character = d.character.conjugate(s.cyclotomic_exponent(m));
    for (auto& [p, e] : out.eigen) {
        e.lambda = apply_galois(e.lambda, s);
        e.lambda1_p2 = apply_galois(e.lambda1_p2, s);
        e.lambda2_p2 = apply_galois(e.lambda2_p2, s);
    }
    return out;
}

json lift_to_json(const YoshidaLiftData& d) {
    json eig = json::object();
    for (const auto& [p, e] : d.eigen)
        eig[std::to_string(p)] = {{"lambda", element_to_json(e.lambda)},
                                  {"lambda1_p2", element_to_json(e.lambda1_p2)},
                                  {"lambda2_p2", element_to_json(e.lambda2_p2)}};
    return {{"f", record_to_json(d.f)},
            {"g", record_to_json(d.g)},
            {"siegel_weight", d.siegel_weight},
            {"character", character_to_json(d.character)},
            {"field", field_to_json(d.field)},
            {"T", std::vector<long>(d.T.begin(), d.T.end())},
            {"lift_count", d.lift_count},
            {"eigen", eig}};
}

YoshidaLiftData lift_from_json(const json& j) {
    try {
        YoshidaLiftData d;
        d.f = record_from_json(j.at("f"));
        d.g = record_from_json(j.at("g"));
        d.siegel_weight = j.at("siegel_weight").get<int>();
        d.character = character_from_json(j.at("character"));
        d.field = field_from_json(j.at("field"));
        for (long p : j.at("T").get<std::vector<long>>()) d.T.insert(p);
        d.lift_count = j.at("lift_count").get<long>();
        for (const auto& [ps, e] : j.at("eigen").items()) {
            long p = std::stol(ps);
            d.eigen.emplace(p, LiftEigen{element_from_json(d.field, e.at("lambda")), element_from_json(d.field, e.at("lambda1_p2")),
                                         element_from_json(d.field, e.at("lambda2_p2"))});
        }
        if (d.T.empty() || d.lift_count != lift_count(d.T.size())) throw InvariantError("lift_count must be 2^{#T-1} with T nonempty");
        if (d.siegel_weight != d.f.weight / 2 + 1) throw InvariantError("siegel_weight must be weight(f)/2 + 1");
        return d;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("lift json: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw SchemaError("lift json: eigen keys must be primes");
    }
}

}  // namespace yl
