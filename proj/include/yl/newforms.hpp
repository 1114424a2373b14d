#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "yl/charkit.hpp"
#include "yl/nfield.hpp"

namespace yl {

enum class LocalType { Steinberg, RamifiedPrincipal, Supercuspidal };
enum class Provenance { Ingested, EtaOracle, EllipticOracle };

std::string to_string(LocalType t);
LocalType parse_local_type(const std::string& s);
std::string to_string(Provenance p);
bool is_discrete_series(LocalType t);

struct NewformRecord {
    std::string label;
    int weight = 2;
    long level = 1;
    DirichletCharacter character;
    NumberField coeff_field;
    std::map<long, AlgebraicNumber> ap;
    std::map<long, LocalType> local_types;
    Provenance provenance = Provenance::Ingested;

    long max_prime() const { return ap.empty() ? 0 : ap.rbegin()->first; }
    const AlgebraicNumber& a(long p) const;
    bool is_rational() const { return coeff_field.degree() == 1; }
    bool operator==(const NewformRecord& o) const;
    bool operator!=(const NewformRecord& o) const { return !(*this == o); }
};

// Exact rational q-expansion, a[n] for n = 0..M.
struct QExpansion {
    std::vector<Z> a;
    long length() const { return static_cast<long>(a.size()) - 1; }
};

// Throws InvariantError naming the violated rule.
void validate_record(const NewformRecord& rec);

NewformRecord record_from_json(const nlohmann::json& j);
nlohmann::json record_to_json(const NewformRecord& rec);
// Accepts a single record, an array of records, or {"records": [...]}.
std::vector<NewformRecord> load_records(std::istream& in);
std::vector<NewformRecord> load_records_file(const std::string& path);

// {"poly": integer coefficients, "embedding": root index}; a degree-1 poly is Q.
nlohmann::json field_to_json(const NumberField& k);
NumberField field_from_json(const nlohmann::json& j);
nlohmann::json character_to_json(const DirichletCharacter& chi);
DirichletCharacter character_from_json(const nlohmann::json& j);
nlohmann::json element_to_json(const AlgebraicNumber& x);
AlgebraicNumber element_from_json(const NumberField& k, const nlohmann::json& j);

// prod_d eta(d z)^{e_d} through q^M.
QExpansion eta_oracle(const std::vector<std::pair<long, long>>& spec, long M);
// a_p = p + 1 - #E(F_p) for y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6.
long elliptic_oracle(const std::array<long, 5>& curve, long p);
Z elliptic_discriminant(const std::array<long, 5>& curve);
bool hecke_recursion_check(const QExpansion& q, int k, const DirichletCharacter& chi, long P);

// Record with a_p for primes p <= pmax read from a rational expansion; squarefree levels
// with trivial character get steinberg local types.
NewformRecord record_from_expansion(const std::string& label, int k, long level, const DirichletCharacter& chi,
                                    const QExpansion& q, long pmax, Provenance prov);
std::map<long, LocalType> default_local_types(long level, const DirichletCharacter& chi);

// Character value chi(a) in Q(zeta_order) (Q when order <= 2).
AlgebraicNumber character_value(const DirichletCharacter& chi, long a);
AlgebraicNumber cyclotomic_to_field(const CyclotomicElement& z);

NewformRecord conjugate_newform(const NewformRecord& rec, const GaloisElement& s);
// lambda^(1)(p) = a_p p^{(2-k)/2}.
AlgebraicNumber unitary_eigenvalue(const NewformRecord& rec, long p);

// Deterministic synthetic records over Q(sqrt 5): weight 4 and weight 2, level 23, steinberg at 23.
std::pair<NewformRecord, NewformRecord> synthetic_sqrt5_pair(long pmax = 500);

// Sum of q^{a x^2 + b x y + c y^2} over (x, y) in Z^2 through q^M (positive definite form).
QExpansion binary_theta_series(long a, long b, long c, long M);
// The two Galois-conjugate newforms of weight 2 and level 23 over Q(sqrt 5), as eigen-combinations of
// eta(z) eta(23 z) times the theta series of x^2 + xy + 6y^2 and 2x^2 + xy + 3y^2.
std::pair<NewformRecord, NewformRecord> level23_pair(long pmax);

std::string data_dir();

}  // namespace yl
