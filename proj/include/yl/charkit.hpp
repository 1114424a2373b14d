#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "yl/arith.hpp"
#include "yl/mp.hpp"

namespace yl {

// Element of Q(zeta_n) stored in the power basis 1, zeta, ..., zeta^{phi(n)-1}
// after reduction modulo the n-th cyclotomic polynomial.
class CyclotomicElement {
public:
    CyclotomicElement();
    static CyclotomicElement rational(long n, const Q& q);
    static CyclotomicElement zeta_power(long n, long e);
    static CyclotomicElement from_exponent_map(long n, const std::map<long, Q>& terms);

    long order() const { return n_; }
    const std::vector<Q>& coeffs() const { return c_; }
    // Nonzero canonical coefficients keyed by exponent.
    std::map<long, Q> exponent_map() const;

    CyclotomicElement promote(long m) const;
    CyclotomicElement conj() const;
    // zeta -> zeta^a, gcd(a, n) = 1.
    CyclotomicElement galois(long a) const;
    bool is_zero() const;
    bool is_rational() const;
    Q rational_value() const;
    Cx numeric() const;
    std::string to_string() const;

    CyclotomicElement& operator+=(const CyclotomicElement& o);
    CyclotomicElement& operator-=(const CyclotomicElement& o);
    CyclotomicElement& operator*=(const CyclotomicElement& o);
    friend CyclotomicElement operator+(CyclotomicElement a, const CyclotomicElement& b) { return a += b; }
    friend CyclotomicElement operator-(CyclotomicElement a, const CyclotomicElement& b) { return a -= b; }
    friend CyclotomicElement operator*(CyclotomicElement a, const CyclotomicElement& b) { return a *= b; }
    CyclotomicElement operator-() const;
    bool operator==(const CyclotomicElement& o) const { return n_ == o.n_ && c_ == o.c_; }
    bool operator!=(const CyclotomicElement& o) const { return !(*this == o); }

private:
    CyclotomicElement(long n, std::vector<Q> c) : n_(n), c_(std::move(c)) {}
    void require_same(const CyclotomicElement& o) const;
    static std::vector<Q> reduce(long n, std::vector<Q> cyclic);

    long n_;
    std::vector<Q> c_;
};

// Phi_n with integer coefficients, ascending.
const std::vector<long>& cyclotomic_int(long n);

struct CharGenerator {
    long g;
    long exp;
    long order;
};

// Dirichlet character stored on the canonical unit-group generators of each
// prime-power factor of the modulus: a primitive root mod p^e for odd p (the
// least one that is primitive mod p^2), and -1, 5 for 2^e.
class DirichletCharacter {
public:
    struct Component {
        long p;
        int e;
        // odd p: one exponent mod phi(p^e); p = 2: exponents for -1 (mod 2) and 5 (mod 2^{e-2}).
        std::vector<long> a;
    };

    DirichletCharacter();
    static DirichletCharacter trivial(long q);
    static DirichletCharacter from_generators(long q, const std::vector<CharGenerator>& gens);
    // All characters mod q, in a deterministic order.
    static std::vector<DirichletCharacter> all(long q);

    long modulus() const { return q_; }
    const std::vector<Component>& components() const { return comps_; }
    std::vector<CharGenerator> generators() const;

    // chi(a) = e^{2 pi i k / m} as (k, m) with m = order(); nullopt-like (-1, 0) when gcd(a, q) > 1.
    std::pair<long, long> value_exponent(long a) const;
    bool is_unit(long a) const { return gcd64(a, q_) == 1; }
    CyclotomicElement value(long a) const;
    Cx numeric_value(long a) const;
    long order() const;
    int parity() const;
    bool is_trivial() const;
    bool is_primitive() const { return conductor() == q_; }
    long conductor() const;
    DirichletCharacter primitive() const;
    DirichletCharacter lift(long q2) const;
    // Applies zeta -> zeta^a to every value.
    DirichletCharacter conjugate(long a) const;
    DirichletCharacter conj() const { return conjugate(-1); }
    DirichletCharacter operator*(const DirichletCharacter& o) const;
    bool operator==(const DirichletCharacter& o) const;
    bool operator!=(const DirichletCharacter& o) const { return !(*this == o); }
    bool operator<(const DirichletCharacter& o) const;
    std::string key() const;

private:
    long q_;
    std::vector<Component> comps_;
};

// Canonical generator residues for the modulus, paired with their multiplicative orders.
std::vector<std::pair<long, long>> unit_generators(long q);

long conductor(const DirichletCharacter& chi);
DirichletCharacter primitive_character(const DirichletCharacter& chi);
CyclotomicElement gauss_sum(const DirichletCharacter& chi);
int parity(const DirichletCharacter& chi);
DirichletCharacter conjugate_character(const DirichletCharacter& chi, long a);

}  // namespace yl
