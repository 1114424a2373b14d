#include "yl/satake.hpp"

#include <sstream>

#include "yl/newforms.hpp"

namespace yl {

namespace {

Cx eval_coeffs(const std::vector<AlgebraicNumber>& c, const std::vector<Cx>& y, int embedding) {
    Cx s;
    for (size_t m = 0; m < c.size(); ++m) {
        if (c[m].is_zero()) continue;
        Cx term = c[m].eval(embedding);
        for (size_t i = 0; i < y.size(); ++i)
            if (m >> i & 1) term *= y[i];
        s += term;
    }
    return s;
}

std::vector<Cx> radicand_values(const TowerSpec<AlgebraicNumber>& t, int embedding, unsigned signs) {
    std::vector<Cx> y;
    for (size_t i = 0; i < t.levels(); ++i) {
        Cx d = eval_coeffs(t.rad[i], y, embedding);
        Cx r = sqrt(d);
        if (signs >> i & 1) r = -r;
        y.push_back(r);
    }
    return y;
}

}  // namespace

bool unit_modulus_everywhere(const std::vector<NumTower>& xs0) {
    if (xs0.empty()) return true;
    auto xs = unify(xs0);
    const auto& t = *xs[0].tower();
    PrecisionScope ps(40);
    R tol("1e-25");
    int deg = t.proto.field().degree();
    for (int e = 0; e < deg; ++e)
        for (unsigned signs = 0; signs < (1u << t.levels()); ++signs) {
            auto y = radicand_values(t, e, signs);
            for (const auto& x : xs) {
                R m = abs(eval_coeffs(x.coeffs(), y, e));
                if (boost::multiprecision::abs(m - 1) > tol) return false;
            }
        }
    return true;
}

Cx tower_numeric(const NumTower& x, int embedding) {
    auto y = radicand_values(*x.tower(), embedding, 0);
    return eval_coeffs(x.coeffs(), y, embedding);
}

NumTower base_element(const AlgebraicNumber& x) { return NumTower::base(NumTower::base_tower(x), x); }

std::string tower_to_string(const NumTower& x) {
    const auto& t = *x.tower();
    std::ostringstream os;
    bool any = false;
    for (size_t m = 0; m < x.coeffs().size(); ++m) {
        if (x.coeffs()[m].is_zero()) continue;
        if (any) os << " + ";
        any = true;
        os << "(" << x.coeffs()[m].to_string() << ")";
        for (size_t i = 0; i < t.levels(); ++i)
            if (m >> i & 1) os << "*" << t.names[i];
    }
    if (!any) os << "0";
    return os.str();
}

nlohmann::json tower_to_json(const NumTower& x) {
    const auto& t = *x.tower();
    nlohmann::json rad = nlohmann::json::array();
    for (size_t i = 0; i < t.levels(); ++i) {
        nlohmann::json c = nlohmann::json::array();
        for (const auto& b : t.rad[i]) c.push_back(element_to_json(b));
        rad.push_back({{"name", t.names[i]}, {"square", c}});
    }
    nlohmann::json terms = nlohmann::json::array();
    for (size_t m = 0; m < x.coeffs().size(); ++m) {
        if (x.coeffs()[m].is_zero()) continue;
        std::vector<std::string> mono;
        for (size_t i = 0; i < t.levels(); ++i)
            if (m >> i & 1) mono.push_back(t.names[i]);
        terms.push_back({{"radicals", mono}, {"coeffs", element_to_json(x.coeffs()[m])}});
    }
    return {{"radicands", rad}, {"terms", terms}, {"text", tower_to_string(x)}};
}

nlohmann::json satake_to_json(const NumSatake& s) {
    nlohmann::json b = nlohmann::json::array();
    for (const auto& v : s.b) b.push_back(tower_to_json(v));
    nlohmann::json spin = nlohmann::json::array();
    for (const auto& v : spin_characters(s)) spin.push_back(tower_to_string(v));
    return {{"n", s.n}, {"p", s.p}, {"b", b}, {"spin_characters", spin}, {"tempered", s.tempered}, {"embedded", s.embedded}};
}

nlohmann::json euler_to_json(const EulerFactor<AlgebraicNumber>& e) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& v : e.coeffs) {
        auto b = v.in_base();
        if (b) c.push_back(element_to_json(*b));
        else c.push_back(tower_to_json(v));
    }
    return {{"p", e.p}, {"degree", e.degree}, {"coeffs", c}};
}

}  // namespace yl
