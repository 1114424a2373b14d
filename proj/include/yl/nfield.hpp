#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "yl/arith.hpp"
#include "yl/mp.hpp"

namespace yl {

struct FieldData;

struct FieldAutomorphism {
    QPoly image;            // theta -> image(theta)
    std::vector<int> perm;  // image(r_m) = r_{perm[m]}
};

// Q(theta) for a monic irreducible integer polynomial, together with a chosen
// complex embedding (index into the canonically ordered roots).
class NumberField {
public:
    NumberField();  // the rationals
    static NumberField rationals() { return NumberField(); }
    static NumberField from_poly(const std::vector<long>& coeffs, int embedding);
    static NumberField from_poly(const QPoly& poly, int embedding);
    // Q(zeta_n) embedded with zeta_n = e^{2 pi i / n}.
    static NumberField cyclotomic(long n);
    // Q(sqrt(d)) for squarefree d != 1, embedded with the principal square root.
    static NumberField quadratic(long d);

    int degree() const;
    const QPoly& poly() const;
    std::vector<long> int_coeffs() const;
    int embedding() const { return emb_; }
    NumberField with_embedding(int j) const;
    // Roots in canonical order (real part, then imaginary part), at >= digits precision.
    const std::vector<Cx>& roots() const;
    Cx root(int j, unsigned digits) const;
    bool is_rational_field() const { return degree() == 1; }
    bool totally_real() const;
    bool is_normal() const;
    // Totally real, or totally imaginary with complex conjugation central in Aut(K).
    bool cm_flag() const;
    // Automorphisms (only for normal fields), index 0 is the identity.
    const std::vector<FieldAutomorphism>& automorphisms() const;
    // Index into automorphisms() of the one sending the chosen root to root j.
    int automorphism_to(int j) const;
    // Root index of the complex conjugate of root j.
    int conjugate_root(int j) const;
    long cyclotomic_order() const;  // n if this is Q(zeta_n) at zeta_n = e^{2 pi i/n}, else 0

    bool operator==(const NumberField& o) const;
    bool operator!=(const NumberField& o) const { return !(*this == o); }
    std::string to_string() const;
    const FieldData* data() const { return d_.get(); }

private:
    friend struct FieldAccess;
    std::shared_ptr<const FieldData> d_;
    int emb_ = 0;
};

class AlgebraicNumber {
public:
    AlgebraicNumber() : c_{Q(0)} {}
    AlgebraicNumber(const NumberField& k, std::vector<Q> coords);
    static AlgebraicNumber rational(const NumberField& k, const Q& q);
    static AlgebraicNumber generator(const NumberField& k);
    static AlgebraicNumber from_poly(const NumberField& k, const QPoly& p);

    const NumberField& field() const { return k_; }
    const std::vector<Q>& coords() const { return c_; }
    QPoly as_poly() const;

    bool is_zero() const;
    bool is_rational() const;
    Q rational_value() const;
    AlgebraicNumber inverse() const;
    AlgebraicNumber pow(long e) const;
    // Value under embedding j of the parent field (default: its chosen embedding).
    Cx eval(int j) const;
    Cx numeric() const { return eval(k_.embedding()); }
    // Complex conjugate (requires a totally real or normal parent).
    AlgebraicNumber conj() const;
    std::vector<std::string> coord_strings() const;
    std::string to_string() const;

    AlgebraicNumber& operator+=(const AlgebraicNumber& o);
    AlgebraicNumber& operator-=(const AlgebraicNumber& o);
    AlgebraicNumber& operator*=(const AlgebraicNumber& o);
    AlgebraicNumber& operator/=(const AlgebraicNumber& o) { return *this *= o.inverse(); }
    friend AlgebraicNumber operator+(AlgebraicNumber a, const AlgebraicNumber& b) { return a += b; }
    friend AlgebraicNumber operator-(AlgebraicNumber a, const AlgebraicNumber& b) { return a -= b; }
    friend AlgebraicNumber operator*(AlgebraicNumber a, const AlgebraicNumber& b) { return a *= b; }
    friend AlgebraicNumber operator/(AlgebraicNumber a, const AlgebraicNumber& b) { return a /= b; }
    AlgebraicNumber operator-() const;
    AlgebraicNumber operator*(const Q& s) const;
    bool operator==(const AlgebraicNumber& o) const;
    bool operator!=(const AlgebraicNumber& o) const { return !(*this == o); }

    // Applies a polynomial substitution theta -> h(theta) inside the parent.
    AlgebraicNumber substitute(const QPoly& h) const;

private:
    void require_same(const AlgebraicNumber& o) const;
    NumberField k_;
    std::vector<Q> c_;
};

using Vec = std::vector<AlgebraicNumber>;

struct ExactMatrix {
    NumberField field;
    size_t rows = 0, cols = 0;
    std::vector<AlgebraicNumber> a;  // row-major

    ExactMatrix() = default;
    ExactMatrix(const NumberField& k, size_t r, size_t c);
    static ExactMatrix from_rows(const NumberField& k, const std::vector<Vec>& rows);
    static ExactMatrix identity(const NumberField& k, size_t n);
    AlgebraicNumber& at(size_t i, size_t j) { return a[i * cols + j]; }
    const AlgebraicNumber& at(size_t i, size_t j) const { return a[i * cols + j]; }
    Vec row(size_t i) const;
    bool operator==(const ExactMatrix& o) const;
};

struct RrefResult {
    ExactMatrix r;
    std::vector<size_t> pivots;
};

RrefResult rref(const ExactMatrix& m);
size_t rank(const ExactMatrix& m);

class GaloisContext;

// Automorphism of the compositum of a GaloisContext.
class GaloisElement {
public:
    GaloisElement() = default;
    size_t index() const { return idx_; }
    const GaloisContext& context() const { return *ctx_; }
    bool valid() const { return ctx_ != nullptr; }
    bool is_identity() const;
    // Root index that constituent k's generator is sent to.
    int image_root(size_t k) const;
    // sigma(zeta_n) = zeta_n^a; throws UndefinedAction when zeta_n is not in the context.
    long cyclotomic_exponent(long n) const;
    std::string describe() const;
    bool operator==(const GaloisElement& o) const { return ctx_ == o.ctx_ && idx_ == o.idx_; }
    bool operator!=(const GaloisElement& o) const { return !(*this == o); }

private:
    friend class GaloisContext;
    GaloisElement(const GaloisContext* c, size_t i) : ctx_(c), idx_(i) {}
    const GaloisContext* ctx_ = nullptr;
    size_t idx_ = 0;
};

// Finite model of Aut(C) restricted to the compositum of the given normal fields.
class GaloisContext {
public:
    explicit GaloisContext(std::vector<NumberField> constituents);
    GaloisContext(const GaloisContext&) = delete;
    GaloisContext& operator=(const GaloisContext&) = delete;

    const NumberField& compositum() const { return comp_; }
    const std::vector<NumberField>& constituents() const { return cons_; }
    // Position of a constituent equal to k, or -1.
    int constituent_index(const NumberField& k) const;
    AlgebraicNumber embed(const AlgebraicNumber& x) const;
    // Expresses an element of the compositum lying in constituent k (or Q when k is rational).
    std::optional<AlgebraicNumber> descend(const AlgebraicNumber& x, const NumberField& k) const;

    size_t size() const { return auts_.size(); }
    GaloisElement element(size_t i) const { return GaloisElement(this, i); }
    std::vector<GaloisElement> elements() const;
    GaloisElement identity() const;
    GaloisElement complex_conjugation() const;
    GaloisElement compose(const GaloisElement& a, const GaloisElement& b) const;  // a after b
    GaloisElement inverse(const GaloisElement& a) const;
    // Element fixing every constituent except k, where the generator goes to root j.
    std::optional<GaloisElement> find(const std::vector<int>& image_roots) const;
    bool fixes(const GaloisElement& s, const NumberField& l) const;

    const QPoly& image_of_generator(size_t i) const { return auts_[i].image; }
    const std::vector<int>& assignment(size_t i) const { return assign_[i]; }

private:
    std::vector<NumberField> cons_;
    NumberField comp_;
    std::vector<QPoly> embeds_;  // theta_k = embeds_[k](gamma)
    std::vector<FieldAutomorphism> auts_;
    std::vector<std::vector<int>> assign_;
};

AlgebraicNumber apply_galois(const AlgebraicNumber& x, const GaloisElement& s);
ExactMatrix apply_galois(const ExactMatrix& m, const GaloisElement& s);
Vec apply_galois(const Vec& v, const GaloisElement& s);

struct StabilityFailure {
    GaloisElement witness;
    size_t vector_index = 0;
    Vec image;
};

struct SubfieldBasisResult {
    std::vector<Vec> basis;  // entries in L, when stable
    std::optional<StabilityFailure> failure;
    bool ok() const { return !failure.has_value(); }
};

// generators: vectors with entries in the context compositum or its constituents.
SubfieldBasisResult subfield_basis(const std::vector<Vec>& generators, const NumberField& l, const GaloisContext& ctx);

// Hermitian pairing <u, v> = sum u_i H_ij conj(v_j).
AlgebraicNumber hermitian_pair(const Vec& u, const Vec& v, const ExactMatrix& h);
std::vector<Vec> gram_schmidt(const std::vector<Vec>& vectors, const ExactMatrix& pairing);
// Positive-definiteness of a hermitian matrix under every embedding, at the given digits.
bool positive_definite_everywhere(const ExactMatrix& h, unsigned digits = 50);

// Field helper: simplest rational within tol of x (continued fractions).
Q rationalize(const R& x, const R& tol);

}  // namespace yl
