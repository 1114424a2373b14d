#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "yl/newforms.hpp"
#include "yl/yoshida.hpp"

namespace yl {

// L-value token: the L-function of the product of the listed forms (sorted) at the point m.
struct LToken {
    std::vector<std::string> forms;
    Q m;
    bool operator<(const LToken& o) const { return forms != o.forms ? forms < o.forms : m < o.m; }
    bool operator==(const LToken& o) const { return forms == o.forms && m == o.m; }
    std::string to_string() const;
};

// scalar * pi^pi_exp * i^i_exp * prod G(chi)^e * prod <g,g>^e * prod L^e.
class PeriodConstant {
public:
    PeriodConstant();
    explicit PeriodConstant(const AlgebraicNumber& scalar);

    const AlgebraicNumber& scalar() const { return scalar_; }
    long pi_exp() const { return pi_exp_; }
    int i_exp() const { return i_exp_; }
    const std::map<DirichletCharacter, long>& gauss_tokens() const { return gauss_; }
    const std::map<std::string, long>& petersson_tokens() const { return pet_; }
    const std::map<LToken, long>& lvalue_tokens() const { return lval_; }
    bool is_scalar() const { return pi_exp_ == 0 && i_exp_ == 0 && gauss_.empty() && pet_.empty() && lval_.empty(); }

    PeriodConstant& mul_pi(long e);
    PeriodConstant& mul_i(long e);
    PeriodConstant& mul_gauss(const DirichletCharacter& chi, long e);
    PeriodConstant& mul_petersson(const std::string& label, long e);
    PeriodConstant& mul_lvalue(const LToken& t, long e);
    PeriodConstant& scale(const AlgebraicNumber& s);

    PeriodConstant inverse() const;
    PeriodConstant& operator*=(const PeriodConstant& o);
    friend PeriodConstant operator*(PeriodConstant a, const PeriodConstant& b) { return a *= b; }
    friend PeriodConstant operator/(PeriodConstant a, const PeriodConstant& b) { return a *= b.inverse(); }
    bool operator==(const PeriodConstant& o) const;
    bool operator!=(const PeriodConstant& o) const { return !(*this == o); }

    std::string to_string() const;
    nlohmann::json to_json() const;
    static PeriodConstant from_json(const nlohmann::json& j);

private:
    AlgebraicNumber scalar_;
    long pi_exp_ = 0;
    int i_exp_ = 0;
    std::map<DirichletCharacter, long> gauss_;
    std::map<std::string, long> pet_;
    std::map<LToken, long> lval_;
};

// Primitive character attached to chi * psi.
DirichletCharacter character_product(const DirichletCharacter& a, const DirichletCharacter& b);
std::string lift_label(const YoshidaLiftData& d);

// Constant for L(m, g x h) with weight(g) = k > weight(h) = l.
PeriodConstant shimura_constant(const Q& m, const NewformRecord& g, const NewformRecord& h);
PeriodConstant shimura_constant(const Q& m, int k, int l, const std::string& g, const std::string& h,
                                const DirichletCharacter& chi_psi);
// Constant for L(m, F x g) with Siegel weight k = weight(g).
PeriodConstant morimoto_constant(const Q& m, const YoshidaLiftData& f, const NewformRecord& g);
PeriodConstant morimoto_constant(const Q& m, int k, const std::string& f, const std::string& g,
                                 const DirichletCharacter& chi_psi);
std::vector<Q> shimura_critical_points(int k, int l);
std::vector<Q> morimoto_critical_points(int k);

// Token substitution L(F x h) -> L(f x h) L(g x h).
PeriodConstant apply_factorization(const PeriodConstant& c, const std::string& lift, const std::string& f,
                                   const std::string& g);

struct RatioReport {
    int k = 0;
    bool odd = true;
    int sign = 0;
    long pi_exponent = 0;
    std::vector<std::string> residual_tokens;
    PeriodConstant ratio;
    // Same ratio assembled from the general Shimura and Morimoto constants.
    int template_sign = 0;
    long template_pi_exponent = 0;
    std::vector<std::string> trace;
    bool ok() const { return sign == -1 && (pi_exponent == 2 || pi_exponent == -2) && residual_tokens.empty(); }
    nlohmann::json to_json() const;
};

RatioReport ratio_identity_check(int k, bool odd);

// Labels of the given records are replaced by their conjugates under s.
PeriodConstant conjugate_constant(const PeriodConstant& c, const GaloisElement& s,
                                  const std::vector<NewformRecord>& records = {});

}  // namespace yl
