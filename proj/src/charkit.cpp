#include "yl/charkit.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>

#include "yl/errors.hpp"

namespace yl {

namespace {

std::mutex g_cyclo_mu;
std::map<long, std::vector<long>> g_cyclo_cache;

std::vector<long> cyclotomic_compute(long n) {
    std::vector<long> num(n + 1, 0);
    num[0] = -1;
    num[n] = 1;
    for (long d = 1; d < n; ++d) {
        if (n % d) continue;
        const auto& den = cyclotomic_int(d);
        // Exact division by a monic integer polynomial.
        long dn = static_cast<long>(num.size()) - 1, dd = static_cast<long>(den.size()) - 1;
        std::vector<long> quot(dn - dd + 1, 0);
        for (long i = dn; i >= dd; --i) {
            long c = num[i];
            quot[i - dd] = c;
            if (c == 0) continue;
            for (long j = 0; j <= dd; ++j) num[i - dd + j] -= c * den[j];
        }
        num = std::move(quot);
    }
    return num;
}

using i128 = __int128;

bool fits(const Z& z) { return mpz_sizeinbase(z.get_mpz_t(), 2) < 62; }

// Reduces integer coefficients (length n, representing an element mod x^n - 1) modulo Phi_n.
template <class Int>
bool reduce_int(long n, std::vector<Int>& v, const std::vector<long>& phi_poly) {
    long dphi = static_cast<long>(phi_poly.size()) - 1;
    for (long i = n - 1; i >= dphi; --i) {
        Int c = v[i];
        if (c == 0) continue;
        v[i] = 0;
        for (long j = 0; j < dphi; ++j) {
            long pj = phi_poly[j];
            if (pj == 0) continue;
            if constexpr (std::is_same_v<Int, i128>) {
                i128 prod;
                if (__builtin_mul_overflow(c, static_cast<i128>(pj), &prod)) return false;
                if (__builtin_sub_overflow(v[i - dphi + j], prod, &v[i - dphi + j])) return false;
            } else {
                v[i - dphi + j] -= c * pj;
            }
        }
    }
    v.resize(dphi);
    return true;
}

Z to_z(i128 x) {
    bool neg = x < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(x) : static_cast<unsigned __int128>(x);
    Z r = 0;
    Z hi = static_cast<unsigned long>(u >> 64);
    Z lo = static_cast<unsigned long>(u & 0xffffffffffffffffULL);
    r = (hi << 64) + lo;
    return neg ? Z(-r) : r;
}

std::vector<Q> reduce_general(long n, const std::vector<Q>& cyclic) {
    const auto& phi_poly = cyclotomic_int(n);
    Z den = 1;
    for (const auto& q : cyclic)
        if (q != 0) den = lcm(den, Z(q.get_den()));
    std::vector<Z> num(n);
    bool small = true;
    for (long i = 0; i < n; ++i) {
        Q t = cyclic[i] * den;
        num[i] = t.get_num();
        if (!fits(num[i])) small = false;
    }
    std::vector<Q> out;
    if (small) {
        std::vector<i128> v(n);
        for (long i = 0; i < n; ++i) v[i] = num[i].get_si();
        if (reduce_int(n, v, phi_poly)) {
            for (auto x : v) out.emplace_back(to_z(x), den);
            for (auto& q : out) q.canonicalize();
            return out;
        }
    }
    reduce_int(n, num, phi_poly);
    for (auto& x : num) out.emplace_back(x, den);
    for (auto& q : out) q.canonicalize();
    return out;
}

}  // namespace

const std::vector<long>& cyclotomic_int(long n) {
    {
        std::lock_guard<std::mutex> lock(g_cyclo_mu);
        auto it = g_cyclo_cache.find(n);
        if (it != g_cyclo_cache.end()) return it->second;
    }
    auto poly = cyclotomic_compute(n);
    std::lock_guard<std::mutex> lock(g_cyclo_mu);
    return g_cyclo_cache.emplace(n, std::move(poly)).first->second;
}

CyclotomicElement::CyclotomicElement() : n_(1), c_{Q(0)} {}

std::vector<Q> CyclotomicElement::reduce(long n, std::vector<Q> cyclic) {
    return reduce_general(n, cyclic);
}

CyclotomicElement CyclotomicElement::rational(long n, const Q& q) {
    std::vector<Q> c(euler_phi(n), Q(0));
    c[0] = q;
    return CyclotomicElement(n, std::move(c));
}

CyclotomicElement CyclotomicElement::zeta_power(long n, long e) {
    return from_exponent_map(n, {{mod64(e, n), Q(1)}});
}

CyclotomicElement CyclotomicElement::from_exponent_map(long n, const std::map<long, Q>& terms) {
    if (n < 1) throw std::invalid_argument("cyclotomic order must be positive");
    std::vector<Q> cyc(n, Q(0));
    for (const auto& [e, c] : terms) cyc[mod64(e, n)] += c;
    return CyclotomicElement(n, reduce(n, std::move(cyc)));
}

std::map<long, Q> CyclotomicElement::exponent_map() const {
    std::map<long, Q> m;
    for (size_t i = 0; i < c_.size(); ++i)
        if (c_[i] != 0) m[static_cast<long>(i)] = c_[i];
    return m;
}

CyclotomicElement CyclotomicElement::promote(long m) const {
    if (m % n_) throw FieldError("promote: target order " + std::to_string(m) + " is not a multiple of " + std::to_string(n_));
    std::map<long, Q> terms;
    long step = m / n_;
    for (size_t i = 0; i < c_.size(); ++i)
        if (c_[i] != 0) terms[static_cast<long>(i) * step] += c_[i];
    return from_exponent_map(m, terms);
}

CyclotomicElement CyclotomicElement::conj() const { return galois(-1); }

CyclotomicElement CyclotomicElement::galois(long a) const {
    if (gcd64(a, n_) != 1) throw UndefinedAction("galois: exponent not coprime to the order");
    std::map<long, Q> terms;
    for (size_t i = 0; i < c_.size(); ++i)
        if (c_[i] != 0) terms[mod64(a * static_cast<long>(i), n_)] += c_[i];
    return from_exponent_map(n_, terms);
}

bool CyclotomicElement::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Q& q) { return q == 0; });
}

bool CyclotomicElement::is_rational() const {
    return std::all_of(c_.begin() + 1, c_.end(), [](const Q& q) { return q == 0; });
}

Q CyclotomicElement::rational_value() const {
    if (!is_rational()) throw FieldError("cyclotomic element is not rational");
    return c_[0];
}

Cx CyclotomicElement::numeric() const {
    Cx r;
    for (size_t i = 0; i < c_.size(); ++i)
        if (c_[i] != 0) r += root_of_unity(static_cast<long>(i), n_) * to_real(c_[i]);
    return r;
}

std::string CyclotomicElement::to_string() const {
    std::ostringstream os;
    os << "Q(zeta_" << n_ << "):";
    bool any = false;
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        os << (any ? " + " : " ") << yl::to_string(c_[i]);
        if (i > 0) os << "*z^" << i;
        any = true;
    }
    if (!any) os << " 0";
    return os.str();
}

void CyclotomicElement::require_same(const CyclotomicElement& o) const {
    if (n_ != o.n_)
        throw FieldError("cyclotomic orders differ (" + std::to_string(n_) + " vs " + std::to_string(o.n_) +
                         "); promote explicitly");
}

CyclotomicElement& CyclotomicElement::operator+=(const CyclotomicElement& o) {
    require_same(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

CyclotomicElement& CyclotomicElement::operator-=(const CyclotomicElement& o) {
    require_same(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

CyclotomicElement CyclotomicElement::operator-() const {
    CyclotomicElement r = *this;
    for (auto& q : r.c_) q = -q;
    return r;
}

CyclotomicElement& CyclotomicElement::operator*=(const CyclotomicElement& o) {
    require_same(o);
    long n = n_;
    Z da = 1, db = 1;
    for (const auto& q : c_) da = lcm(da, Z(q.get_den()));
    for (const auto& q : o.c_) db = lcm(db, Z(q.get_den()));
    std::vector<Z> a, b;
    bool small = true;
    for (const auto& q : c_) {
        a.push_back(Q(q * da).get_num());
        small = small && fits(a.back());
    }
    for (const auto& q : o.c_) {
        b.push_back(Q(q * db).get_num());
        small = small && fits(b.back());
    }
    std::vector<Q> cyc(n, Q(0));
    bool done = false;
    if (small) {
        std::vector<i128> acc(n, 0);
        bool ok = true;
        for (size_t i = 0; i < a.size() && ok; ++i) {
            if (a[i] == 0) continue;
            i128 ai = a[i].get_si();
            for (size_t j = 0; j < b.size(); ++j) {
                if (b[j] == 0) continue;
                i128 prod;
                long k = static_cast<long>((i + j) % n);
                if (__builtin_mul_overflow(ai, static_cast<i128>(b[j].get_si()), &prod) ||
                    __builtin_add_overflow(acc[k], prod, &acc[k])) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) {
            const auto& phi_poly = cyclotomic_int(n);
            if (reduce_int(n, acc, phi_poly)) {
                Z den = da * db;
                c_.clear();
                for (auto x : acc) {
                    c_.emplace_back(to_z(x), den);
                    c_.back().canonicalize();
                }
                done = true;
            }
        }
    }
    if (!done) {
        for (size_t i = 0; i < c_.size(); ++i) {
            if (c_[i] == 0) continue;
            for (size_t j = 0; j < o.c_.size(); ++j) cyc[(i + j) % n] += c_[i] * o.c_[j];
        }
        c_ = reduce(n, std::move(cyc));
    }
    return *this;
}

namespace {

long primitive_root_lifting(long p) {
    for (long g = 2; g < p; ++g) {
        bool prim = true;
        for (auto [r, e] : factorize(p - 1)) {
            if (powmod64(g, (p - 1) / r, p) == 1) {
                prim = false;
                break;
            }
        }
        if (!prim) continue;
        if (powmod64(g, p - 1, p * p) != 1) return g;
    }
    return 1;  // p = 2 never reaches here; p = 3 yields 2
}

long ipow(long b, int e) {
    long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

struct LogTable {
    long modulus;
    long gen;
    std::vector<long> log;  // log[x] for units x, -1 otherwise
};

std::mutex g_log_mu;
std::map<std::pair<long, int>, std::shared_ptr<const LogTable>> g_log_cache;

std::shared_ptr<const LogTable> log_table(long p, int e) {
    std::lock_guard<std::mutex> lock(g_log_mu);
    auto key = std::make_pair(p, e);
    auto it = g_log_cache.find(key);
    if (it != g_log_cache.end()) return it->second;
    auto t = std::make_shared<LogTable>();
    long pe = ipow(p, e);
    t->modulus = pe;
    t->log.assign(pe, -1);
    long g = (p == 2) ? 5 : primitive_root_lifting(p) % pe;
    t->gen = g;
    long x = 1 % pe;
    long ord = (p == 2) ? (e >= 3 ? pe / 4 : 1) : pe / p * (p - 1);
    for (long k = 0; k < ord; ++k) {
        t->log[x] = k;
        x = static_cast<long>(static_cast<i128>(x) * g % pe);
    }
    g_log_cache.emplace(key, t);
    return t;
}

// (generator residue mod p^e, order) for each generator of the component.
std::vector<std::pair<long, long>> component_generators(long p, int e) {
    long pe = ipow(p, e);
    if (p == 2) {
        if (e <= 1) return {};
        if (e == 2) return {{pe - 1, 2}};
        return {{pe - 1, 2}, {5, pe / 4}};
    }
    return {{primitive_root_lifting(p) % pe, pe / p * (p - 1)}};
}

// Discrete logs of a unit residue with respect to the component generators.
std::vector<long> component_logs(long p, int e, long x) {
    long pe = ipow(p, e);
    x = mod64(x, pe);
    if (p == 2) {
        if (e <= 1) return {};
        long s = (x % 4 == 1) ? 0 : 1;
        if (e == 2) return {s};
        long y = s ? pe - x : x;
        return {s, log_table(2, e)->log[y]};
    }
    return {log_table(p, e)->log[x]};
}

long crt_lift(long residue, long pe, long q) {
    long rest = q / pe;
    // x = residue mod pe, x = 1 mod rest.
    for (long x = residue; x < q; x += pe)
        if (x % rest == 1 % rest) return x;
    return residue;
}

}  // namespace

std::vector<std::pair<long, long>> unit_generators(long q) {
    std::vector<std::pair<long, long>> out;
    if (q <= 0) throw std::invalid_argument("modulus must be positive");
    if (q == 1) return out;
    for (auto [p, e] : factorize(q)) {
        long pe = ipow(p, e);
        for (auto [g, ord] : component_generators(p, e)) out.emplace_back(crt_lift(g, pe, q), ord);
    }
    return out;
}

DirichletCharacter::DirichletCharacter() : q_(1) {}

DirichletCharacter DirichletCharacter::trivial(long q) {
    if (q <= 0) throw SchemaError("character modulus must be positive");
    DirichletCharacter c;
    c.q_ = q;
    if (q == 1) return c;
    for (auto [p, e] : factorize(q)) {
        Component comp{p, e, {}};
        comp.a.assign(component_generators(p, e).size(), 0);
        c.comps_.push_back(comp);
    }
    return c;
}

DirichletCharacter DirichletCharacter::from_generators(long q, const std::vector<CharGenerator>& gens) {
    DirichletCharacter c = trivial(q);
    std::vector<bool> used(gens.size(), false);
    for (auto& comp : c.comps_) {
        long pe = ipow(comp.p, comp.e);
        auto cg = component_generators(comp.p, comp.e);
        for (size_t j = 0; j < cg.size(); ++j) {
            long g = crt_lift(cg[j].first, pe, q);
            long ord = cg[j].second;
            bool found = false;
            for (size_t k = 0; k < gens.size(); ++k) {
                if (used[k] || mod64(gens[k].g, q) != g) continue;
                if (gens[k].order <= 0) throw SchemaError("generator order must be positive");
                // chi(g) = e^{2 pi i exp/order}; must have order dividing ord.
                i128 num = static_cast<i128>(gens[k].exp) * ord;
                if (num % gens[k].order != 0)
                    throw SchemaError("generator " + std::to_string(g) + " image order does not divide " +
                                      std::to_string(ord));
                comp.a[j] = mod64(static_cast<long>(num / gens[k].order), ord);
                used[k] = true;
                found = true;
                break;
            }
            if (!found) throw SchemaError("missing image for unit generator " + std::to_string(g) + " mod " + std::to_string(q));
        }
    }
    for (size_t k = 0; k < gens.size(); ++k) {
        if (used[k]) continue;
        throw SchemaError("unexpected generator " + std::to_string(gens[k].g) + " mod " + std::to_string(q));
    }
    return c;
}

std::vector<DirichletCharacter> DirichletCharacter::all(long q) {
    std::vector<DirichletCharacter> out{trivial(q)};
    for (size_t ci = 0; ci < out.front().comps_.size(); ++ci) {
        auto& base = out.front().comps_[ci];
        auto cg = component_generators(base.p, base.e);
        for (size_t j = 0; j < cg.size(); ++j) {
            std::vector<DirichletCharacter> next;
            for (const auto& chi : out) {
                for (long a = 0; a < cg[j].second; ++a) {
                    DirichletCharacter c = chi;
                    c.comps_[ci].a[j] = a;
                    next.push_back(c);
                }
            }
            out = std::move(next);
        }
    }
    return out;
}

std::vector<CharGenerator> DirichletCharacter::generators() const {
    std::vector<CharGenerator> out;
    for (const auto& comp : comps_) {
        long pe = ipow(comp.p, comp.e);
        auto cg = component_generators(comp.p, comp.e);
        for (size_t j = 0; j < cg.size(); ++j)
            out.push_back({crt_lift(cg[j].first, pe, q_), comp.a[j], cg[j].second});
    }
    return out;
}

long DirichletCharacter::order() const {
    long o = 1;
    for (const auto& comp : comps_) {
        auto cg = component_generators(comp.p, comp.e);
        for (size_t j = 0; j < cg.size(); ++j) o = lcm64(o, cg[j].second / gcd64(comp.a[j], cg[j].second));
    }
    return o;
}

std::pair<long, long> DirichletCharacter::value_exponent(long a) const {
    if (gcd64(a, q_) != 1) return {-1, 0};
    long m = order();
    // Sum of a_j * log_j / ord_j, as a fraction with denominator m.
    i128 total = 0;
    for (const auto& comp : comps_) {
        auto cg = component_generators(comp.p, comp.e);
        auto logs = component_logs(comp.p, comp.e, a);
        for (size_t j = 0; j < cg.size(); ++j) {
            long ord = cg[j].second;
            long num = static_cast<long>(static_cast<i128>(comp.a[j]) * logs[j] % ord);
            // num/ord has order dividing m, so num * m / ord is integral.
            total += static_cast<i128>(num) * m / ord;
        }
    }
    return {static_cast<long>(total % m), m};
}

CyclotomicElement DirichletCharacter::value(long a) const {
    auto [k, m] = value_exponent(a);
    if (m == 0) return CyclotomicElement::rational(order(), Q(0));
    return CyclotomicElement::zeta_power(m, k);
}

Cx DirichletCharacter::numeric_value(long a) const {
    auto [k, m] = value_exponent(a);
    if (m == 0) return Cx();
    return root_of_unity(k, m);
}

int DirichletCharacter::parity() const {
    long s = 0;
    for (const auto& comp : comps_)
        if (!comp.a.empty()) s += comp.a[0];
    return (s % 2 == 0) ? 1 : -1;
}

bool DirichletCharacter::is_trivial() const {
    for (const auto& comp : comps_)
        for (long a : comp.a)
            if (a != 0) return false;
    return true;
}

long DirichletCharacter::conductor() const {
    long f = 1;
    for (const auto& comp : comps_) {
        if (comp.p == 2) {
            if (comp.e <= 1) continue;
            long a_minus = comp.a[0];
            if (comp.e == 2) {
                if (a_minus) f *= 4;
                continue;
            }
            long ord5 = ipow(2, comp.e - 2);
            long t = ord5 / gcd64(comp.a[1], ord5);
            int s = 0;
            while ((1L << s) < t) ++s;
            if (s == 0) {
                if (a_minus) f *= 4;
            } else {
                f *= ipow(2, s + 2);
            }
            continue;
        }
        long ord = ipow(comp.p, comp.e - 1) * (comp.p - 1);
        long o = ord / gcd64(comp.a[0], ord);
        if (o == 1) continue;
        int c = 1;
        while ((ipow(comp.p, c - 1) * (comp.p - 1)) % o != 0) ++c;
        f *= ipow(comp.p, c);
    }
    return f;
}

DirichletCharacter DirichletCharacter::primitive() const {
    long f = conductor();
    DirichletCharacter out = trivial(f);
    for (auto& oc : out.comps_) {
        const Component* src = nullptr;
        for (const auto& comp : comps_)
            if (comp.p == oc.p) src = &comp;
        if (oc.p == 2) {
            if (oc.e >= 2) oc.a[0] = src->a[0];
            if (oc.e >= 3) oc.a[1] = src->a[1] / ipow(2, src->e - oc.e);
            continue;
        }
        long ord_src = ipow(src->p, src->e - 1) * (src->p - 1);
        long ord_dst = ipow(oc.p, oc.e - 1) * (oc.p - 1);
        oc.a[0] = src->a[0] / (ord_src / ord_dst);
    }
    return out;
}

DirichletCharacter DirichletCharacter::lift(long q2) const {
    if (q2 % q_) throw FieldError("lift: " + std::to_string(q2) + " is not a multiple of " + std::to_string(q_));
    DirichletCharacter out = trivial(q2);
    for (auto& oc : out.comps_) {
        const Component* src = nullptr;
        for (const auto& comp : comps_)
            if (comp.p == oc.p) src = &comp;
        if (!src) continue;
        if (oc.p == 2) {
            if (src->e >= 2) oc.a[0] = src->a[0];
            if (src->e >= 3) oc.a[1] = src->a[1] * ipow(2, oc.e - src->e);
            continue;
        }
        oc.a[0] = src->a[0] * ipow(oc.p, oc.e - src->e);
    }
    return out;
}

DirichletCharacter DirichletCharacter::conjugate(long a) const {
    DirichletCharacter out = *this;
    for (auto& comp : out.comps_) {
        auto cg = component_generators(comp.p, comp.e);
        for (size_t j = 0; j < cg.size(); ++j)
            comp.a[j] = mod64(static_cast<long>(static_cast<i128>(comp.a[j]) * a % cg[j].second), cg[j].second);
    }
    return out;
}

DirichletCharacter DirichletCharacter::operator*(const DirichletCharacter& o) const {
    long q = lcm64(q_, o.q_);
    DirichletCharacter a = lift(q), b = o.lift(q);
    for (size_t i = 0; i < a.comps_.size(); ++i) {
        auto cg = component_generators(a.comps_[i].p, a.comps_[i].e);
        for (size_t j = 0; j < cg.size(); ++j)
            a.comps_[i].a[j] = (a.comps_[i].a[j] + b.comps_[i].a[j]) % cg[j].second;
    }
    return a;
}

bool DirichletCharacter::operator==(const DirichletCharacter& o) const {
    if (q_ != o.q_ || comps_.size() != o.comps_.size()) return false;
    for (size_t i = 0; i < comps_.size(); ++i)
        if (comps_[i].a != o.comps_[i].a) return false;
    return true;
}

bool DirichletCharacter::operator<(const DirichletCharacter& o) const { return key() < o.key(); }

std::string DirichletCharacter::key() const {
    std::ostringstream os;
    os << "chi" << q_ << "[";
    bool first = true;
    for (const auto& g : generators()) {
        os << (first ? "" : ",") << g.g << ":" << g.exp << "/" << g.order;
        first = false;
    }
    os << "]";
    return os.str();
}

long conductor(const DirichletCharacter& chi) { return chi.conductor(); }

DirichletCharacter primitive_character(const DirichletCharacter& chi) { return chi.primitive(); }

CyclotomicElement gauss_sum(const DirichletCharacter& chi) {
    DirichletCharacter c0 = chi.primitive();
    long f = c0.modulus();
    long m = c0.order();
    long L = lcm64(f, m);
    std::map<long, Q> terms;
    for (long n = 1; n <= f; ++n) {
        auto [k, mm] = c0.value_exponent(n);
        if (mm == 0) continue;
        long e = mod64(n * (L / f) + k * (L / mm), L);
        terms[e] += 1;
    }
    return CyclotomicElement::from_exponent_map(L, terms);
}

int parity(const DirichletCharacter& chi) { return chi.parity(); }

DirichletCharacter conjugate_character(const DirichletCharacter& chi, long a) {
    if (gcd64(a, chi.order()) != 1) throw UndefinedAction("conjugate_character: exponent not coprime to character order");
    return chi.conjugate(a);
}

}  // namespace yl
