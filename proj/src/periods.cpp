#include "yl/periods.hpp"

#include <algorithm>
#include <sstream>

#include "yl/errors.hpp"

namespace yl {

using nlohmann::json;

namespace {

AlgebraicNumber mul_across(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    if (a.field() == b.field()) return a * b;
    if (a.is_rational()) return AlgebraicNumber::rational(b.field(), a.coords()[0]) * b;
    if (b.is_rational()) return a * AlgebraicNumber::rational(a.field(), b.coords()[0]);
    throw FieldError("period constant scalars live in different fields: " + a.field().to_string() + " vs " +
                     b.field().to_string());
}

template <class K>
void bump(std::map<K, long>& m, const K& k, long e) {
    if (e == 0) return;
    long v = (m[k] += e);
    if (v == 0) m.erase(k);
}

bool in_set(const Q& m, const Q& lo, const Q& hi, const Q& offset) {
    if (m < lo || m > hi) return false;
    Q d = m - offset;
    return d.get_den() == 1;
}

std::string relabel_one(const std::string& s, const std::map<std::string, std::string>& map) {
    auto it = map.find(s);
    if (it != map.end()) return it->second;
    // Lift labels F[f,g].
    if (s.size() > 3 && s.rfind("F[", 0) == 0 && s.back() == ']') {
        std::string inner = s.substr(2, s.size() - 3);
        auto comma = inner.find(',');
        if (comma != std::string::npos)
            return "F[" + relabel_one(inner.substr(0, comma), map) + "," + relabel_one(inner.substr(comma + 1), map) + "]";
    }
    return s;
}

LToken make_ltoken(std::vector<std::string> forms, const Q& m) {
    std::sort(forms.begin(), forms.end());
    return LToken{std::move(forms), m};
}

}  // namespace

std::string LToken::to_string() const {
    std::string s = "L(" + yl::to_string(m) + ", ";
    for (size_t i = 0; i < forms.size(); ++i) s += (i ? " x " : "") + forms[i];
    return s + ")";
}

PeriodConstant::PeriodConstant() : scalar_(AlgebraicNumber::rational(NumberField(), 1)) {}
PeriodConstant::PeriodConstant(const AlgebraicNumber& scalar) : scalar_(scalar) {}

PeriodConstant& PeriodConstant::mul_pi(long e) {
    pi_exp_ += e;
    return *this;
}

PeriodConstant& PeriodConstant::mul_i(long e) {
    i_exp_ = static_cast<int>(mod64(i_exp_ + e, 4));
    return *this;
}

PeriodConstant& PeriodConstant::mul_gauss(const DirichletCharacter& chi, long e) {
    DirichletCharacter c = chi.primitive();
    if (c.is_trivial()) return *this;  // G(trivial) = 1
    bump(gauss_, c, e);
    return *this;
}

PeriodConstant& PeriodConstant::mul_petersson(const std::string& label, long e) {
    bump(pet_, label, e);
    return *this;
}

PeriodConstant& PeriodConstant::mul_lvalue(const LToken& t, long e) {
    bump(lval_, make_ltoken(t.forms, t.m), e);
    return *this;
}

PeriodConstant& PeriodConstant::scale(const AlgebraicNumber& s) {
    scalar_ = mul_across(scalar_, s);
    return *this;
}

PeriodConstant PeriodConstant::inverse() const {
    PeriodConstant r(scalar_.inverse());
    r.pi_exp_ = -pi_exp_;
    r.i_exp_ = static_cast<int>(mod64(-i_exp_, 4));
    for (const auto& [k, e] : gauss_) r.gauss_[k] = -e;
    for (const auto& [k, e] : pet_) r.pet_[k] = -e;
    for (const auto& [k, e] : lval_) r.lval_[k] = -e;
    return r;
}

PeriodConstant& PeriodConstant::operator*=(const PeriodConstant& o) {
    scalar_ = mul_across(scalar_, o.scalar_);
    pi_exp_ += o.pi_exp_;
    mul_i(o.i_exp_);
    for (const auto& [k, e] : o.gauss_) bump(gauss_, k, e);
    for (const auto& [k, e] : o.pet_) bump(pet_, k, e);
    for (const auto& [k, e] : o.lval_) bump(lval_, k, e);
    return *this;
}

bool PeriodConstant::operator==(const PeriodConstant& o) const {
    bool same_scalar = scalar_.field() == o.scalar_.field()
                           ? scalar_ == o.scalar_
                           : scalar_.is_rational() && o.scalar_.is_rational() && scalar_.coords()[0] == o.scalar_.coords()[0];
    return same_scalar && pi_exp_ == o.pi_exp_ && i_exp_ == o.i_exp_ && gauss_ == o.gauss_ && pet_ == o.pet_ &&
           lval_ == o.lval_;
}

std::string PeriodConstant::to_string() const {
    std::ostringstream os;
    os << "(" << scalar_.to_string() << ")";
    if (pi_exp_) os << " * pi^" << pi_exp_;
    if (i_exp_) os << " * i^" << i_exp_;
    for (const auto& [c, e] : gauss_) os << " * G(" << c.key() << ")^" << e;
    for (const auto& [l, e] : pet_) os << " * <" << l << "," << l << ">^" << e;
    for (const auto& [t, e] : lval_) os << " * " << t.to_string() << "^" << e;
    return os.str();
}

json PeriodConstant::to_json() const {
    json g = json::array(), p = json::array(), l = json::array();
    for (const auto& [c, e] : gauss_) g.push_back({{"character", character_to_json(c)}, {"exp", e}});
    for (const auto& [s, e] : pet_) p.push_back({{"form", s}, {"exp", e}});
    for (const auto& [t, e] : lval_) l.push_back({{"forms", t.forms}, {"m", yl::to_string(t.m)}, {"exp", e}});
    return {{"scalar", {{"field", field_to_json(scalar_.field())}, {"coords", element_to_json(scalar_)}}},
            {"pi_exp", pi_exp_},
            {"i_exp", i_exp_},
            {"gauss", g},
            {"petersson", p},
            {"lvalues", l},
            {"text", to_string()}};
}

PeriodConstant PeriodConstant::from_json(const json& j) {
    try {
        const json& s = j.at("scalar");
        NumberField k = field_from_json(s.at("field"));
        PeriodConstant c(element_from_json(k, s.at("coords")));
        c.mul_pi(j.at("pi_exp").get<long>());
        c.mul_i(j.at("i_exp").get<long>());
        for (const auto& g : j.at("gauss")) c.mul_gauss(character_from_json(g.at("character")), g.at("exp").get<long>());
        for (const auto& p : j.at("petersson")) c.mul_petersson(p.at("form").get<std::string>(), p.at("exp").get<long>());
        for (const auto& l : j.at("lvalues"))
            c.mul_lvalue(LToken{l.at("forms").get<std::vector<std::string>>(), parse_rational(l.at("m").get<std::string>())},
                         l.at("exp").get<long>());
        return c;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("period constant json: ") + e.what());
    }
}

DirichletCharacter character_product(const DirichletCharacter& a, const DirichletCharacter& b) { return (a * b).primitive(); }

std::string lift_label(const YoshidaLiftData& d) { return "F[" + d.f.label + "," + d.g.label + "]"; }

std::vector<Q> shimura_critical_points(int k, int l) {
    std::vector<Q> out;
    Q hi = frac(k - l, 2), off = frac(k + l, 2);
    for (Q m(1, 2); m <= hi; m += Q(1, 2))
        if (in_set(m, Q(1, 2), hi, off)) out.push_back(m);
    return out;
}

std::vector<Q> morimoto_critical_points(int k) {
    std::vector<Q> out;
    Q hi = frac(k, 2) - 1, off = frac(k, 2);
    for (Q m(3); m <= hi; m += Q(1, 2))
        if (in_set(m, Q(3), hi, off)) out.push_back(m);
    return out;
}

PeriodConstant shimura_constant(const Q& m, int k, int l, const std::string& g, const std::string& h,
                                const DirichletCharacter& chi_psi) {
    if (k <= l) throw PreconditionError("shimura_constant needs weight(g) > weight(h)");
    if (!in_set(m, Q(1, 2), frac(k - l, 2), frac(k + l, 2)))
        throw RangeError("m = " + to_string(m) + " is outside [1/2, " + to_string(frac(k - l, 2)) + "] cap (Z + " +
                         to_string(frac(k + l, 2)) + ")");
    Q pe = 2 * m + k;
    PeriodConstant c;
    c.mul_lvalue(make_ltoken({g, h}, m), 1);
    c.mul_pi(-pe.get_num().get_si());
    c.mul_i(-(1 - k));
    c.mul_gauss(chi_psi, -1);
    c.mul_petersson(g, -1);
    return c;
}

PeriodConstant shimura_constant(const Q& m, const NewformRecord& g, const NewformRecord& h) {
    return shimura_constant(m, g.weight, h.weight, g.label, h.label, character_product(g.character, h.character));
}

PeriodConstant morimoto_constant(const Q& m, int k, const std::string& f, const std::string& g,
                                 const DirichletCharacter& chi_psi) {
    if (k <= 6) throw RangeError("Siegel weight " + std::to_string(k) + " <= 6 has no admissible m");
    if (!in_set(m, Q(3), frac(k, 2) - 1, frac(k, 2)))
        throw RangeError("m = " + to_string(m) + " is outside [3, " + to_string(frac(k, 2) - 1) + "] cap (Z + " +
                         to_string(frac(k, 2)) + ")");
    Q pe = 4 * m + 3 * k - 1;
    PeriodConstant c;
    c.mul_lvalue(make_ltoken({f, g}, m), 1);
    c.mul_pi(-pe.get_num().get_si());
    c.mul_i(-k);
    c.mul_gauss(chi_psi, -2);
    c.mul_petersson(f, -1);
    c.mul_petersson(g, -1);
    return c;
}

PeriodConstant morimoto_constant(const Q& m, const YoshidaLiftData& f, const NewformRecord& g) {
    if (g.weight != f.siegel_weight)
        throw PreconditionError("morimoto_constant needs weight(g) = Siegel weight " + std::to_string(f.siegel_weight));
    return morimoto_constant(m, f.siegel_weight, lift_label(f), g.label, character_product(g.character, f.character));
}

PeriodConstant apply_factorization(const PeriodConstant& c, const std::string& lift, const std::string& f,
                                   const std::string& g) {
    PeriodConstant out(c.scalar());
    out.mul_pi(c.pi_exp()).mul_i(c.i_exp());
    for (const auto& [ch, e] : c.gauss_tokens()) out.mul_gauss(ch, e);
    for (const auto& [l, e] : c.petersson_tokens()) out.mul_petersson(l, e);
    for (const auto& [t, e] : c.lvalue_tokens()) {
        auto it = std::find(t.forms.begin(), t.forms.end(), lift);
        if (it == t.forms.end() || t.forms.size() != 2) {
            out.mul_lvalue(t, e);
            continue;
        }
        const std::string& other = t.forms[it == t.forms.begin() ? 1 : 0];
        out.mul_lvalue(make_ltoken({f, other}, t.m), e);
        out.mul_lvalue(make_ltoken({g, other}, t.m), e);
    }
    return out;
}

json RatioReport::to_json() const {
    return {{"k", k},
            {"parity", odd ? "odd" : "even"},
            {"sign", sign},
            {"pi_exponent", pi_exponent},
            {"residual_tokens", residual_tokens},
            {"ratio", ratio.to_json()},
            {"template_sign", template_sign},
            {"template_pi_exponent", template_pi_exponent},
            {"trace", trace},
            {"ok", ok()}};
}

namespace {

// sign and pi exponent of c = s pi^e i^{2j} <F,F>/<f,f>; residual tokens listed.
void read_off(const PeriodConstant& c, int& sign, long& pi_exp, std::vector<std::string>* residual) {
    pi_exp = c.pi_exp();
    sign = 0;
    if (c.scalar().is_rational()) {
        Q s = c.scalar().coords()[0];
        if (s == 1) sign = 1;
        if (s == -1) sign = -1;
    }
    if (c.i_exp() % 2 != 0) sign = 0;
    if (c.i_exp() == 2) sign = -sign;
    if (!residual) return;
    if (sign == 0) residual->push_back("scalar (" + c.scalar().to_string() + ") * i^" + std::to_string(c.i_exp()) + " is not +-1");
    for (const auto& [t, e] : c.lvalue_tokens()) residual->push_back(t.to_string() + "^" + std::to_string(e));
    for (const auto& [ch, e] : c.gauss_tokens()) residual->push_back("G(" + ch.key() + ")^" + std::to_string(e));
    for (const auto& [l, e] : c.petersson_tokens()) {
        if ((l == "F" && e == 1) || (l == "f" && e == -1)) continue;
        residual->push_back("<" + l + "," + l + ">^" + std::to_string(e));
    }
    if (!c.petersson_tokens().count("F") || !c.petersson_tokens().count("f"))
        residual->push_back("missing <F,F>/<f,f>");
}

}  // namespace

RatioReport ratio_identity_check(int k, bool odd) {
    if (k < 6) throw PreconditionError("ratio_identity_check needs k >= 6");
    if ((k % 2 != 0) != odd) throw PreconditionError("parity case does not match k = " + std::to_string(k));
    RatioReport r;
    r.k = k;
    r.odd = odd;
    Q m = frac(k - 1, 2);
    // eps: an odd quadratic character, here the one of conductor 4.
    DirichletCharacter eps = DirichletCharacter::from_generators(4, {{3, 1, 2}});
    PeriodConstant cfh, cf, chg;
    cfh.mul_lvalue(make_ltoken({"F", "h"}, m), 1).mul_pi(-(5L * k - 3)).mul_petersson("F", -1).mul_petersson("h", -1);
    cf.mul_lvalue(make_ltoken({"f", "h"}, m), 1).mul_pi(-(3L * k - 1)).mul_i(-1).mul_petersson("f", -1);
    chg.mul_lvalue(make_ltoken({"h", "g"}, m), 1).mul_pi(-2L * k).mul_petersson("h", -1);
    if (odd) {
        chg.mul_i(-1);
    } else {
        cfh.mul_i(-1).mul_gauss(eps, -2);
        cf.mul_gauss(eps, -1);
        chg.mul_gauss(eps, -1);
    }
    r.trace.push_back("C(F,h) = " + cfh.to_string());
    r.trace.push_back("C(f,h) = " + cf.to_string());
    r.trace.push_back("C(h,g) = " + chg.to_string());
    PeriodConstant raw = cf * chg / cfh;
    r.trace.push_back("C(f,h) C(h,g) / C(F,h) = " + raw.to_string());
    r.ratio = apply_factorization(raw, "F", "f", "g");
    r.trace.push_back("after L(F x h) = L(f x h) L(g x h): " + r.ratio.to_string());
    read_off(r.ratio, r.sign, r.pi_exponent, &r.residual_tokens);
    r.trace.push_back("sign " + std::to_string(r.sign) + ", pi exponent " + std::to_string(r.pi_exponent));

    // General constants: F of Siegel weight k+1, f of weight 2k, h of weight k+1, g of weight 2.
    if (k >= 7) {
        DirichletCharacter triv = DirichletCharacter::trivial(1);
        PeriodConstant t_fh = morimoto_constant(m, k + 1, "F", "h", triv);
        PeriodConstant t_f = shimura_constant(m, 2 * k, k + 1, "f", "h", triv);
        PeriodConstant t_hg = shimura_constant(m, k + 1, 2, "h", "g", triv);
        PeriodConstant t = apply_factorization(t_f * t_hg / t_fh, "F", "f", "g");
        read_off(t, r.template_sign, r.template_pi_exponent, nullptr);
        r.trace.push_back("from the general constants: " + t.to_string());
    }
    if (!r.residual_tokens.empty()) {
        std::string msg = "uncancelled tokens:";
        for (const auto& s : r.residual_tokens) msg += " " + s;
        throw ResidualTokens(msg);
    }
    return r;
}

PeriodConstant conjugate_constant(const PeriodConstant& c, const GaloisElement& s, const std::vector<NewformRecord>& records) {
    if (!s.valid()) throw UndefinedAction("invalid Galois element");
    std::map<std::string, std::string> relabel;
    for (const auto& r : records) relabel[r.label] = conjugate_newform(r, s).label;
    AlgebraicNumber scalar = apply_galois(c.scalar(), s);
    if (c.i_exp() % 2 != 0) {
        long e4 = s.cyclotomic_exponent(4);
        if (mod64(e4, 4) == 3) scalar = mul_across(scalar, AlgebraicNumber::rational(NumberField(), -1));
    }
    PeriodConstant out(scalar);
    out.mul_pi(c.pi_exp()).mul_i(c.i_exp());
    for (const auto& [ch, e] : c.gauss_tokens()) {
        long m = ch.order();
        out.mul_gauss(m > 2 ? ch.conjugate(s.cyclotomic_exponent(m)) : ch, e);
    }
    for (const auto& [l, e] : c.petersson_tokens()) out.mul_petersson(relabel_one(l, relabel), e);
    for (const auto& [t, e] : c.lvalue_tokens()) {
        std::vector<std::string> forms;
        for (const auto& f : t.forms) forms.push_back(relabel_one(f, relabel));
        out.mul_lvalue(LToken{forms, t.m}, e);
    }
    return out;
}

}  // namespace yl
