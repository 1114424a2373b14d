#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "yl/newforms.hpp"
#include "yl/satake.hpp"

namespace yl {

struct ConditionReport {
    bool not_multiples = false;      // (i)
    bool same_character = false;     // (ii)
    bool weights_ok = false;         // (iii)
    bool common_discrete = false;    // (iv)
    long checked_up_to = 0;          // largest prime compared for (i)
    std::vector<long> discrete_primes;
    std::vector<std::string> notes;
    bool pass() const { return not_multiples && same_character && weights_ok && common_discrete; }
    nlohmann::json to_json() const;
};

struct LiftEigen {
    AlgebraicNumber lambda;      // lambda^{(2)}(p)
    AlgebraicNumber lambda1_p2;  // lambda_1^{(2)}(p^2)
    AlgebraicNumber lambda2_p2;  // lambda_2^{(2)}(p^2)
    bool operator==(const LiftEigen& o) const {
        return lambda == o.lambda && lambda1_p2 == o.lambda1_p2 && lambda2_p2 == o.lambda2_p2;
    }
};

struct YoshidaLiftData {
    NewformRecord f;  // weight 2k
    NewformRecord g;  // weight 2
    int siegel_weight = 0;
    DirichletCharacter character;  // primitive
    NumberField field;             // holds every eigenvalue
    std::set<long> T;
    std::map<long, LiftEigen> eigen;
    long lift_count = 0;

    bool operator==(const YoshidaLiftData& o) const;
    bool operator!=(const YoshidaLiftData& o) const { return !(*this == o); }
};

// Normal fields whose compositum holds the eigenvalues of a lift of (f, g).
std::vector<NumberField> lift_constituents(const NewformRecord& f, const NewformRecord& g);

// Embeds elements of the lift constituents into one field.
class CommonField {
public:
    explicit CommonField(const std::vector<NumberField>& constituents);
    const NumberField& field() const { return field_; }
    AlgebraicNumber embed(const AlgebraicNumber& x) const;

private:
    NumberField field_;
    std::shared_ptr<GaloisContext> ctx_;
};

ConditionReport check_conditions(const NewformRecord& f, const NewformRecord& g);
YoshidaLiftData build_lift(const NewformRecord& f, const NewformRecord& g);
// 2^{#T - 1}.
long lift_count(size_t t_size);
bool parity_check(int weight, const DirichletCharacter& chi);

// Spin factor of the embedded pair against the GL(2) factors, and the eigenvalues stored in d.
bool spin_factorization_check(const YoshidaLiftData& d, long p);
bool spin_factorization_check(const NewformRecord& f, const NewformRecord& g, long p);

struct SymbolicReport {
    long p = 0;
    bool factorization = false;
    bool lambda = false;
    bool lambda1 = false;
    bool lambda2 = false;
    std::string spin_poly;
    bool ok() const { return factorization && lambda && lambda1 && lambda2; }
};

// Identity over Q(a_f, a_g, c) at a fixed prime p: a_f, a_g are the GL(2) eigenvalues
// lambda^{(1)}(p) and c = chi(p).
SymbolicReport symbolic_identity_check(long p);

using CandidateEigen = std::map<long, std::pair<AlgebraicNumber, AlgebraicNumber>>;
bool weak_membership(const CandidateEigen& candidate, const NewformRecord& f, const NewformRecord& g,
                     const std::vector<long>& primes);
CandidateEigen candidate_from_lift(const YoshidaLiftData& d);

YoshidaLiftData conjugate_lift(const YoshidaLiftData& d, const GaloisElement& s);

nlohmann::json lift_to_json(const YoshidaLiftData& d);
YoshidaLiftData lift_from_json(const nlohmann::json& j);

}  // namespace yl
