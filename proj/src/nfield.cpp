#include "yl/nfield.hpp"

#include <algorithm>
#include <complex>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "yl/charkit.hpp"
#include "yl/errors.hpp"

namespace yl {

namespace {

constexpr unsigned kRootDigits = 110;

using CD = std::complex<double>;

CD to_cd(const Cx& z) { return CD(z.re.convert_to<double>(), z.im.convert_to<double>()); }

R tol_digits(int d) { return boost::multiprecision::pow(R(10), -d); }

}  // namespace

struct FieldData {
    QPoly poly;
    int deg = 1;
    std::vector<Cx> roots;
    bool totally_real = true;
    std::vector<int> conj_root;
    long cyc_order_for_root1 = 0;  // helper: cyclotomic order n with poly = Phi_n (0 if none)

    mutable std::mutex mu;
    mutable std::map<unsigned, std::vector<Cx>> refined;
    mutable bool aut_done = false;
    mutable bool normal = false;
    mutable std::vector<FieldAutomorphism> auts;
};

namespace {

std::mutex g_reg_mu;
std::map<std::vector<std::string>, std::shared_ptr<FieldData>> g_registry;

std::vector<std::string> poly_key(const QPoly& p) {
    std::vector<std::string> k;
    for (const auto& c : p) k.push_back(to_string(c));
    return k;
}

bool root_less(const Cx& a, const Cx& b) {
    R tol = tol_digits(40);
    R dr = a.re - b.re;
    if (boost::multiprecision::abs(dr) > tol) return dr < 0;
    return a.im < b.im;
}

int match_root(const std::vector<Cx>& roots, const Cx& z) {
    int best = 0;
    R bd = abs(roots[0] - z);
    for (size_t i = 1; i < roots.size(); ++i) {
        R d = abs(roots[i] - z);
        if (d < bd) {
            bd = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

std::vector<Cx> product_poly(const std::vector<Cx>& vals) {
    std::vector<Cx> p{Cx(1)};
    for (const auto& v : vals) {
        std::vector<Cx> q(p.size() + 1);
        for (size_t i = 0; i < p.size(); ++i) {
            q[i + 1] += p[i];
            q[i] -= p[i] * v;
        }
        p = std::move(q);
    }
    return p;
}

std::vector<CD> product_poly_d(const std::vector<CD>& vals) {
    std::vector<CD> p{1.0};
    for (const auto& v : vals) {
        std::vector<CD> q(p.size() + 1, 0.0);
        for (size_t i = 0; i < p.size(); ++i) {
            q[i + 1] += p[i];
            q[i] -= p[i] * v;
        }
        p = std::move(q);
    }
    return p;
}

bool near_integer_d(const std::vector<CD>& p) {
    for (const auto& c : p) {
        double scale = std::max(1.0, std::abs(c));
        if (std::abs(c.imag()) > 1e-6 * scale) return false;
        if (std::abs(c.real() - std::round(c.real())) > 1e-6 * scale) return false;
    }
    return true;
}

// Integer polynomial from numerically integral coefficients, or nullopt.
std::optional<QPoly> round_integer_poly(const std::vector<Cx>& p) {
    QPoly out;
    R tol = tol_digits(static_cast<int>(kRootDigits) - 30);
    for (const auto& c : p) {
        R r = boost::multiprecision::round(c.re);
        R scale = boost::multiprecision::abs(c.re) + 1;
        if (boost::multiprecision::abs(c.re - r) > tol * scale || boost::multiprecision::abs(c.im) > tol * scale)
            return std::nullopt;
        out.emplace_back(to_rational(r));
    }
    trim(out);
    return out;
}

void for_each_subset(int n, int k, const std::function<bool(const std::vector<int>&)>& fn) {
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    if (k > n) return;
    while (true) {
        if (fn(idx)) return;
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

// Finds a proper monic integer factor of the polynomial with the given roots.
std::optional<QPoly> find_proper_factor(const std::vector<Cx>& roots) {
    int d = static_cast<int>(roots.size());
    std::vector<CD> rd;
    for (const auto& r : roots) rd.push_back(to_cd(r));
    std::optional<QPoly> found;
    for (int k = 1; k <= d / 2 && !found; ++k) {
        for_each_subset(d, k, [&](const std::vector<int>& s) {
            std::vector<CD> v;
            for (int i : s) v.push_back(rd[i]);
            if (!near_integer_d(product_poly_d(v))) return false;
            std::vector<Cx> vh;
            for (int i : s) vh.push_back(roots[i]);
            auto p = round_integer_poly(product_poly(vh));
            if (p) found = p;
            return found.has_value();
        });
    }
    return found;
}

std::vector<Cx> sorted_roots(const QPoly& poly) {
    auto r = poly_roots(poly, kRootDigits);
    R snap = tol_digits(static_cast<int>(kRootDigits) - 20);
    for (auto& z : r)
        if (boost::multiprecision::abs(z.im) < snap) z.im = 0;
    std::sort(r.begin(), r.end(), root_less);
    return r;
}

long detect_cyclotomic(const QPoly& poly) {
    int d = degree(poly);
    for (long n = 1; n <= 2L * d * d + 2; ++n) {
        if (euler_phi(n) != d) continue;
        const auto& phi = cyclotomic_int(n);
        QPoly p;
        for (long c : phi) p.emplace_back(c);
        if (p == poly) return n;
    }
    return 0;
}

std::shared_ptr<FieldData> make_field_data(const QPoly& poly, bool check_irreducible) {
    {
        std::lock_guard<std::mutex> lock(g_reg_mu);
        auto it = g_registry.find(poly_key(poly));
        if (it != g_registry.end()) return it->second;
    }
    auto fd = std::make_shared<FieldData>();
    fd->poly = poly;
    fd->deg = degree(poly);
    {
        PrecisionScope ps(kRootDigits);
        if (fd->deg == 1) {
            fd->roots = {Cx(to_real(-poly[0]))};
        } else {
            fd->roots = sorted_roots(poly);
        }
        if (check_irreducible && fd->deg > 1) {
            auto f = find_proper_factor(fd->roots);
            if (f) {
                std::ostringstream os;
                os << "defining polynomial is reducible; factor coefficients:";
                for (const auto& c : *f) os << " " << to_string(c);
                throw FieldError(os.str());
            }
        }
        fd->totally_real = std::all_of(fd->roots.begin(), fd->roots.end(), [](const Cx& z) { return z.im == 0; });
        for (const auto& r : fd->roots) fd->conj_root.push_back(match_root(fd->roots, conj(r)));
    }
    fd->cyc_order_for_root1 = detect_cyclotomic(poly);
    std::lock_guard<std::mutex> lock(g_reg_mu);
    auto [it, inserted] = g_registry.emplace(poly_key(poly), fd);
    return it->second;
}

QPoly validate_poly(const QPoly& p, int max_degree) {
    QPoly q = p;
    trim(q);
    if (q.size() < 2) throw FieldError("defining polynomial must have degree >= 1");
    if (q.back() != 1) throw FieldError("defining polynomial must be monic");
    for (const auto& c : q)
        if (c.get_den() != 1) throw FieldError("defining polynomial must have integer coefficients");
    if (degree(q) > max_degree) throw FieldError("field degree " + std::to_string(degree(q)) + " exceeds " + std::to_string(max_degree));
    return q;
}

// Complex linear solve (Gaussian elimination with partial pivoting).
std::vector<Cx> solve_complex(std::vector<std::vector<Cx>> a, std::vector<Cx> b) {
    size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        R best = abs(a[col][col]);
        for (size_t r = col + 1; r < n; ++r) {
            R v = abs(a[r][col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (size_t r = col + 1; r < n; ++r) {
            Cx f = a[r][col] / a[col][col];
            if (norm2(f) == 0) continue;
            for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<Cx> x(n);
    for (size_t i = n; i-- > 0;) {
        Cx s = b[i];
        for (size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

std::vector<std::vector<Cx>> vandermonde(const std::vector<Cx>& pts) {
    size_t n = pts.size();
    std::vector<std::vector<Cx>> v(n, std::vector<Cx>(n));
    for (size_t i = 0; i < n; ++i) {
        Cx p(1);
        for (size_t j = 0; j < n; ++j) {
            v[i][j] = p;
            p *= pts[i];
        }
    }
    return v;
}

// Rational polynomial h of degree < n with h(pts_i) = vals_i, or nullopt if not rational.
std::optional<QPoly> interpolate_rational(const std::vector<Cx>& pts, const std::vector<Cx>& vals) {
    auto c = solve_complex(vandermonde(pts), vals);
    R tol = tol_digits(static_cast<int>(kRootDigits) - 40);
    QPoly out;
    for (const auto& z : c) {
        R scale = abs(z) + 1;
        if (boost::multiprecision::abs(z.im) > tol * scale) return std::nullopt;
        out.push_back(rationalize(z.re, tol * scale));
    }
    trim(out);
    return out;
}

QPoly compose_mod(const QPoly& p, const QPoly& h, const QPoly& m) {
    QPoly r;
    for (size_t i = p.size(); i-- > 0;) {
        r = poly_mod(poly_mul(r, h), m);
        r = poly_add(r, QPoly{p[i]});
    }
    return r;
}

bool is_root_mod(const QPoly& f, const QPoly& h, const QPoly& m) { return compose_mod(f, h, m).empty(); }

void compute_automorphisms(const FieldData& fd) {
    int d = fd.deg;
    fd.auts.clear();
    QPoly id = (d == 1) ? QPoly{} : QPoly{Q(0), Q(1)};
    if (d == 1) id = {fd.roots[0].re == 0 ? Q(0) : to_rational(fd.roots[0].re)};
    std::vector<int> idperm(d);
    std::iota(idperm.begin(), idperm.end(), 0);
    fd.auts.push_back({id, idperm});
    if (d == 1) {
        fd.normal = true;
        return;
    }
    PrecisionScope ps(kRootDigits);
    auto perm_of = [&](const QPoly& h) {
        std::vector<int> perm(d);
        for (int m = 0; m < d; ++m) perm[m] = match_root(fd.roots, poly_eval(h, fd.roots[m]));
        return perm;
    };
    std::vector<QPoly> found(d);
    std::vector<bool> have(d, false);
    have[0] = true;
    found[0] = id;
    if (fd.cyc_order_for_root1) {
        long n = fd.cyc_order_for_root1;
        for (long a = 2; a < n; ++a) {
            if (gcd64(a, n) != 1) continue;
            QPoly xa(a + 1, Q(0));
            xa[a] = 1;
            QPoly h = poly_mod(xa, fd.poly);
            int j = match_root(fd.roots, poly_eval(h, fd.roots[0]));
            found[j] = h;
            have[j] = true;
        }
    } else if (d == 2) {
        QPoly h{-fd.poly[1], Q(-1)};
        trim(h);
        found[1] = h;
        have[1] = true;
    } else if (d <= 8) {
        std::vector<CD> rd;
        for (const auto& r : fd.roots) rd.push_back(to_cd(r));
        // Double-precision inverse Vandermonde for filtering candidate permutations.
        std::vector<std::vector<CD>> vinv(d, std::vector<CD>(d));
        {
            std::vector<std::vector<CD>> a(d, std::vector<CD>(2 * d, 0.0));
            for (int i = 0; i < d; ++i) {
                CD p = 1.0;
                for (int j = 0; j < d; ++j) {
                    a[i][j] = p;
                    p *= rd[i];
                }
                a[i][d + i] = 1.0;
            }
            for (int c = 0; c < d; ++c) {
                int piv = c;
                for (int r = c + 1; r < d; ++r)
                    if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
                std::swap(a[c], a[piv]);
                CD inv = 1.0 / a[c][c];
                for (auto& x : a[c]) x *= inv;
                for (int r = 0; r < d; ++r) {
                    if (r == c) continue;
                    CD f = a[r][c];
                    for (int k = 0; k < 2 * d; ++k) a[r][k] -= f * a[c][k];
                }
            }
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) vinv[i][j] = a[i][d + j];
        }
        for (int target = 1; target < d; ++target) {
            std::vector<int> rest;
            for (int m = 0; m < d; ++m)
                if (m != target) rest.push_back(m);
            std::sort(rest.begin(), rest.end());
            do {
                std::vector<int> perm(d);
                perm[0] = target;
                for (int m = 1; m < d; ++m) perm[m] = rest[m - 1];
                bool real = true;
                for (int i = 0; i < d && real; ++i) {
                    CD s = 0.0;
                    for (int m = 0; m < d; ++m) s += vinv[i][m] * rd[perm[m]];
                    if (std::abs(s.imag()) > 1e-6 * (1 + std::abs(s))) real = false;
                }
                if (!real) continue;
                std::vector<Cx> vals;
                for (int m = 0; m < d; ++m) vals.push_back(fd.roots[perm[m]]);
                auto h = interpolate_rational(fd.roots, vals);
                if (h && is_root_mod(fd.poly, *h, fd.poly)) {
                    found[target] = *h;
                    have[target] = true;
                    break;
                }
            } while (std::next_permutation(rest.begin(), rest.end()));
        }
    }
    fd.normal = std::all_of(have.begin(), have.end(), [](bool b) { return b; });
    if (!fd.normal) return;
    fd.auts.clear();
    fd.auts.push_back({id, idperm});
    for (int j = 1; j < d; ++j) fd.auts.push_back({found[j], perm_of(found[j])});
}

const FieldData& ensure_auts(const FieldData& fd) {
    std::lock_guard<std::mutex> lock(fd.mu);
    if (!fd.aut_done) {
        compute_automorphisms(fd);
        fd.aut_done = true;
    }
    return fd;
}

void inject_automorphisms(const FieldData& fd, std::vector<FieldAutomorphism> auts) {
    std::lock_guard<std::mutex> lock(fd.mu);
    if (fd.aut_done && fd.normal) return;
    fd.auts = std::move(auts);
    fd.normal = true;
    fd.aut_done = true;
}

std::shared_ptr<const FieldData> rational_data() {
    static std::shared_ptr<const FieldData> d = make_field_data(QPoly{Q(0), Q(1)}, false);
    return d;
}

}  // namespace

Q rationalize(const R& x, const R& tol) {
    Q c = to_rational(x);
    Q t = to_rational(tol);
    return simplest_between(c - t, c + t);
}

// ---------------------------------------------------------------- NumberField

NumberField::NumberField() : d_(rational_data()), emb_(0) {}

NumberField NumberField::from_poly(const std::vector<long>& coeffs, int embedding) {
    QPoly p;
    for (long c : coeffs) p.emplace_back(c);
    return from_poly(p, embedding);
}

NumberField NumberField::from_poly(const QPoly& poly, int embedding) {
    QPoly p = validate_poly(poly, 8);
    NumberField k;
    k.d_ = make_field_data(p, true);
    if (embedding < 0 || embedding >= k.degree())
        throw FieldError("embedding index " + std::to_string(embedding) + " out of range for degree " + std::to_string(k.degree()));
    k.emb_ = embedding;
    return k;
}

NumberField NumberField::cyclotomic(long n) {
    if (n <= 2) return NumberField();
    QPoly p;
    for (long c : cyclotomic_int(n)) p.emplace_back(c);
    NumberField k;
    k.d_ = make_field_data(p, false);
    PrecisionScope ps(kRootDigits);
    k.emb_ = match_root(k.d_->roots, root_of_unity(1, n));
    return k;
}

NumberField NumberField::quadratic(long d) {
    for (auto [p, e] : factorize(d < 0 ? -d : d))
        if (e > 1) throw FieldError("quadratic: radicand must be squarefree");
    if (d == 1 || d == 0) throw FieldError("quadratic: radicand must not be 0 or 1");
    NumberField k = from_poly(std::vector<long>{-d, 0, 1}, 1);
    return k;
}

int NumberField::degree() const { return d_->deg; }
const QPoly& NumberField::poly() const { return d_->poly; }

std::vector<long> NumberField::int_coeffs() const {
    std::vector<long> out;
    for (const auto& c : d_->poly) out.push_back(c.get_num().get_si());
    return out;
}

NumberField NumberField::with_embedding(int j) const {
    if (j < 0 || j >= degree()) throw FieldError("embedding index out of range");
    NumberField k = *this;
    k.emb_ = j;
    return k;
}

const std::vector<Cx>& NumberField::roots() const { return d_->roots; }

Cx NumberField::root(int j, unsigned digits) const {
    if (digits + 10 <= kRootDigits) return d_->roots[j];
    unsigned bucket = ((digits + 10 + 63) / 64) * 64;
    std::lock_guard<std::mutex> lock(d_->mu);
    auto it = d_->refined.find(bucket);
    if (it == d_->refined.end()) {
        PrecisionScope ps(bucket + 10);
        std::vector<Cx> rr;
        QPoly dp;
        for (size_t i = 1; i < d_->poly.size(); ++i) dp.push_back(d_->poly[i] * Q(static_cast<long>(i)));
        for (const auto& r0 : d_->roots) {
            Cx r(R(r0.re), R(r0.im));
            r.re.precision(bucket + 10);
            r.im.precision(bucket + 10);
            for (int iter = 0; iter < 12; ++iter) {
                Cx dv = dp.empty() ? Cx(1) : yl::poly_eval(dp, r);
                r -= yl::poly_eval(d_->poly, r) / dv;
            }
            if (r0.im == 0) r.im = 0;
            rr.push_back(r);
        }
        it = d_->refined.emplace(bucket, std::move(rr)).first;
    }
    return it->second[j];
}

bool NumberField::totally_real() const { return d_->totally_real; }

bool NumberField::is_normal() const { return ensure_auts(*d_).normal; }

const std::vector<FieldAutomorphism>& NumberField::automorphisms() const {
    const auto& fd = ensure_auts(*d_);
    if (!fd.normal) throw UndefinedAction("field " + to_string() + " is not normal");
    return fd.auts;
}

int NumberField::automorphism_to(int j) const {
    const auto& auts = automorphisms();
    for (size_t i = 0; i < auts.size(); ++i)
        if (auts[i].perm[emb_] == j) return static_cast<int>(i);
    throw UndefinedAction("no automorphism reaches root " + std::to_string(j));
}

int NumberField::conjugate_root(int j) const { return d_->conj_root[j]; }

bool NumberField::cm_flag() const {
    if (totally_real()) return true;
    for (const auto& r : d_->roots)
        if (r.im == 0) return false;
    if (!is_normal()) return false;
    const auto& auts = automorphisms();
    int c = automorphism_to(conjugate_root(emb_));
    for (size_t i = 0; i < auts.size(); ++i) {
        // c o a and a o c agree on the chosen root.
        int ac = auts[i].perm[auts[c].perm[emb_]];
        int ca = auts[c].perm[auts[i].perm[emb_]];
        if (ac != ca) return false;
    }
    return true;
}

long NumberField::cyclotomic_order() const {
    if (degree() == 1) return 1;
    long n = d_->cyc_order_for_root1;
    if (!n) return 0;
    PrecisionScope ps(kRootDigits);
    return match_root(d_->roots, root_of_unity(1, n)) == emb_ ? n : 0;
}

bool NumberField::operator==(const NumberField& o) const { return d_ == o.d_ && emb_ == o.emb_; }

std::string NumberField::to_string() const {
    if (degree() == 1) return "Q";
    std::ostringstream os;
    os << "Q[x]/(";
    bool first = true;
    for (size_t i = d_->poly.size(); i-- > 0;) {
        if (d_->poly[i] == 0) continue;
        if (!first) os << (d_->poly[i] > 0 ? " + " : " - ");
        else if (d_->poly[i] < 0) os << "-";
        Q a = abs(d_->poly[i]);
        if (a != 1 || i == 0) os << yl::to_string(a);
        if (i > 0) os << "x" << (i > 1 ? "^" + std::to_string(i) : "");
        first = false;
    }
    os << ")@" << emb_;
    return os.str();
}

// ----------------------------------------------------------- AlgebraicNumber

AlgebraicNumber::AlgebraicNumber(const NumberField& k, std::vector<Q> coords) : k_(k), c_(std::move(coords)) {
    if (static_cast<int>(c_.size()) > k_.degree()) {
        QPoly p(c_.begin(), c_.end());
        p = poly_mod(p, k_.poly());
        c_.assign(p.begin(), p.end());
    }
    c_.resize(k_.degree(), Q(0));
    for (auto& q : c_) q.canonicalize();
}

AlgebraicNumber AlgebraicNumber::rational(const NumberField& k, const Q& q) {
    std::vector<Q> c(k.degree(), Q(0));
    c[0] = q;
    return AlgebraicNumber(k, c);
}

AlgebraicNumber AlgebraicNumber::generator(const NumberField& k) {
    if (k.degree() == 1) return rational(k, to_rational(k.roots()[0].re));
    return from_poly(k, QPoly{Q(0), Q(1)});
}

AlgebraicNumber AlgebraicNumber::from_poly(const NumberField& k, const QPoly& p) {
    QPoly r = poly_mod(p, k.poly());
    return AlgebraicNumber(k, std::vector<Q>(r.begin(), r.end()));
}

QPoly AlgebraicNumber::as_poly() const {
    QPoly p(c_.begin(), c_.end());
    trim(p);
    return p;
}

bool AlgebraicNumber::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Q& q) { return q == 0; });
}

bool AlgebraicNumber::is_rational() const {
    return std::all_of(c_.begin() + 1, c_.end(), [](const Q& q) { return q == 0; });
}

Q AlgebraicNumber::rational_value() const {
    if (!is_rational()) throw FieldError("element is not rational");
    return c_[0];
}

AlgebraicNumber AlgebraicNumber::inverse() const {
    if (is_zero()) throw std::domain_error("division by zero in number field");
    if (is_rational()) return rational(k_, Q(1) / c_[0]);
    return from_poly(k_, poly_inverse_mod(as_poly(), k_.poly()));
}

AlgebraicNumber AlgebraicNumber::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    AlgebraicNumber r = rational(k_, 1), b = *this;
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

Cx AlgebraicNumber::eval(int j) const {
    if (k_.degree() == 1) return Cx(to_real(c_[0]));
    Cx x = k_.root(j, working_digits());
    Cx r;
    for (size_t i = c_.size(); i-- > 0;) r = r * x + Cx(to_real(c_[i]));
    return r;
}

AlgebraicNumber AlgebraicNumber::conj() const {
    if (k_.totally_real() || is_rational()) return *this;
    int cj = k_.conjugate_root(k_.embedding());
    if (!k_.is_normal()) throw UndefinedAction("complex conjugation undefined on non-normal field " + k_.to_string());
    const auto& aut = k_.automorphisms()[k_.automorphism_to(cj)];
    return substitute(aut.image);
}

std::vector<std::string> AlgebraicNumber::coord_strings() const {
    std::vector<std::string> out;
    for (const auto& q : c_) out.push_back(yl::to_string(q));
    return out;
}

std::string AlgebraicNumber::to_string() const {
    std::ostringstream os;
    bool any = false;
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        if (any) os << " + ";
        os << yl::to_string(c_[i]);
        if (i == 1) os << "*a";
        if (i > 1) os << "*a^" << i;
        any = true;
    }
    if (!any) os << "0";
    return os.str();
}

void AlgebraicNumber::require_same(const AlgebraicNumber& o) const {
    if (k_ != o.k_) throw FieldError("field mismatch: " + k_.to_string() + " vs " + o.k_.to_string() + " (promote explicitly)");
}

AlgebraicNumber& AlgebraicNumber::operator+=(const AlgebraicNumber& o) {
    require_same(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

AlgebraicNumber& AlgebraicNumber::operator-=(const AlgebraicNumber& o) {
    require_same(o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

AlgebraicNumber& AlgebraicNumber::operator*=(const AlgebraicNumber& o) {
    require_same(o);
    if (o.is_rational()) {
        for (auto& q : c_) q *= o.c_[0];
        return *this;
    }
    if (is_rational()) {
        Q s = c_[0];
        c_ = o.c_;
        for (auto& q : c_) q *= s;
        return *this;
    }
    QPoly r = poly_mod(poly_mul(as_poly(), o.as_poly()), k_.poly());
    c_.assign(r.begin(), r.end());
    c_.resize(k_.degree(), Q(0));
    return *this;
}

AlgebraicNumber AlgebraicNumber::operator-() const {
    AlgebraicNumber r = *this;
    for (auto& q : r.c_) q = -q;
    return r;
}

AlgebraicNumber AlgebraicNumber::operator*(const Q& s) const {
    AlgebraicNumber r = *this;
    for (auto& q : r.c_) q *= s;
    return r;
}

bool AlgebraicNumber::operator==(const AlgebraicNumber& o) const { return k_ == o.k_ && c_ == o.c_; }

AlgebraicNumber AlgebraicNumber::substitute(const QPoly& h) const {
    if (k_.degree() == 1) return *this;
    return from_poly(k_, compose_mod(as_poly(), h, k_.poly()));
}

// --------------------------------------------------------------- ExactMatrix

ExactMatrix::ExactMatrix(const NumberField& k, size_t r, size_t c)
    : field(k), rows(r), cols(c), a(r * c, AlgebraicNumber::rational(k, 0)) {}

ExactMatrix ExactMatrix::from_rows(const NumberField& k, const std::vector<Vec>& rs) {
    ExactMatrix m(k, rs.size(), rs.empty() ? 0 : rs[0].size());
    for (size_t i = 0; i < rs.size(); ++i) {
        if (rs[i].size() != m.cols) throw std::invalid_argument("ragged matrix rows");
        for (size_t j = 0; j < m.cols; ++j) {
            if (rs[i][j].field() != k) throw FieldError("matrix entry outside the ambient field");
            m.at(i, j) = rs[i][j];
        }
    }
    return m;
}

ExactMatrix ExactMatrix::identity(const NumberField& k, size_t n) {
    ExactMatrix m(k, n, n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = AlgebraicNumber::rational(k, 1);
    return m;
}

Vec ExactMatrix::row(size_t i) const { return Vec(a.begin() + i * cols, a.begin() + (i + 1) * cols); }

bool ExactMatrix::operator==(const ExactMatrix& o) const {
    return field == o.field && rows == o.rows && cols == o.cols && a == o.a;
}

RrefResult rref(const ExactMatrix& m) {
    ExactMatrix r = m;
    std::vector<size_t> pivots;
    size_t prow = 0;
    for (size_t col = 0; col < r.cols && prow < r.rows; ++col) {
        size_t piv = r.rows;
        for (size_t i = prow; i < r.rows; ++i)
            if (!r.at(i, col).is_zero()) {
                piv = i;
                break;
            }
        if (piv == r.rows) continue;
        for (size_t j = 0; j < r.cols; ++j) std::swap(r.at(prow, j), r.at(piv, j));
        AlgebraicNumber inv = r.at(prow, col).inverse();
        for (size_t j = col; j < r.cols; ++j) r.at(prow, j) *= inv;
        for (size_t i = 0; i < r.rows; ++i) {
            if (i == prow || r.at(i, col).is_zero()) continue;
            AlgebraicNumber f = r.at(i, col);
            for (size_t j = col; j < r.cols; ++j) r.at(i, j) -= f * r.at(prow, j);
        }
        pivots.push_back(col);
        ++prow;
    }
    return {r, pivots};
}

size_t rank(const ExactMatrix& m) { return rref(m).pivots.size(); }

// ------------------------------------------------------------- GaloisContext

struct FieldAccess {
    static NumberField make(std::shared_ptr<const FieldData> d, int emb) {
        NumberField k;
        k.d_ = std::move(d);
        k.emb_ = emb;
        return k;
    }
};

namespace {

struct JoinResult {
    NumberField field;
    QPoly h1, h2;  // old generator and new constituent generator as polynomials in the new one
    Q c;
};

constexpr int kMaxCompositum = 32;

JoinResult join_fields(const NumberField& a, const NumberField& b) {
    PrecisionScope ps(kRootDigits);
    int d1 = a.degree(), d2 = b.degree();
    int e1 = a.embedding(), e2 = b.embedding();
    const auto& s = a.roots();
    const auto& t = b.roots();
    if (d1 * d2 > kMaxCompositum * 8) throw FieldError("compositum too large for the finite Galois model");
    for (long ci : {1L, -1L, 2L, -2L, 3L, -3L, 5L, -5L, 7L, -7L}) {
        Q c(ci);
        R cr = to_real(c);
        std::vector<Cx> vals;
        std::vector<std::pair<int, int>> prov;
        for (int i = 0; i < d1; ++i)
            for (int j = 0; j < d2; ++j) {
                vals.push_back(s[i] + t[j] * cr);
                prov.emplace_back(i, j);
            }
        bool distinct = true;
        for (size_t i = 0; i < vals.size() && distinct; ++i)
            for (size_t j = i + 1; j < vals.size(); ++j)
                if (abs(vals[i] - vals[j]) < R(1e-20)) {
                    distinct = false;
                    break;
                }
        if (!distinct) continue;
        int n = static_cast<int>(vals.size());
        int target = e1 * d2 + e2;
        std::vector<int> others;
        for (int i = 0; i < n; ++i)
            if (i != target) others.push_back(i);
        std::vector<CD> vd;
        for (const auto& v : vals) vd.push_back(to_cd(v));
        int step = std::lcm(d1, d2);
        std::optional<QPoly> g;
        std::vector<int> chosen;
        for (int size = step; size <= n && !g; size += step) {
            if (n % size) continue;
            if (size > kMaxCompositum) throw FieldError("compositum degree exceeds " + std::to_string(kMaxCompositum));
            for_each_subset(n - 1, size - 1, [&](const std::vector<int>& sub) {
                std::vector<CD> v{vd[target]};
                for (int i : sub) v.push_back(vd[others[i]]);
                if (!near_integer_d(product_poly_d(v))) return false;
                std::vector<Cx> vh{vals[target]};
                for (int i : sub) vh.push_back(vals[others[i]]);
                auto p = round_integer_poly(product_poly(vh));
                if (!p) return false;
                g = p;
                chosen = {target};
                for (int i : sub) chosen.push_back(others[i]);
                return true;
            });
        }
        if (!g) throw FieldError("compositum minimal polynomial not found");
        auto fd = make_field_data(*g, false);
        int emb = match_root(fd->roots, vals[target]);
        std::vector<Cx> y1, y2;
        for (const auto& rho : fd->roots) {
            int idx = chosen[0];
            R best = abs(vals[idx] - rho);
            for (int k : chosen) {
                R dd = abs(vals[k] - rho);
                if (dd < best) {
                    best = dd;
                    idx = k;
                }
            }
            y1.push_back(s[prov[idx].first]);
            y2.push_back(t[prov[idx].second]);
        }
        auto h1 = interpolate_rational(fd->roots, y1);
        auto h2 = interpolate_rational(fd->roots, y2);
        if (!h1 || !h2) throw FieldError("compositum embedding interpolation failed");
        if (!is_root_mod(a.poly(), *h1, *g) || !is_root_mod(b.poly(), *h2, *g))
            throw FieldError("compositum embedding verification failed");
        QPoly lin = poly_sub(poly_add(*h1, poly_scale(*h2, c)), QPoly{Q(0), Q(1)});
        trim(lin);
        if (!lin.empty()) throw FieldError("compositum primitive element verification failed");
        return {FieldAccess::make(fd, emb), *h1, *h2, c};
    }
    throw FieldError("no separating multiplier for compositum");
}

std::vector<int> perm_of(const QPoly& h, const std::vector<Cx>& roots) {
    std::vector<int> perm(roots.size());
    for (size_t m = 0; m < roots.size(); ++m) perm[m] = match_root(roots, poly_eval(h, roots[m]));
    return perm;
}

// Automorphisms of k indexed by the root its generator is sent to.
std::vector<FieldAutomorphism> by_target(const NumberField& k) {
    std::vector<FieldAutomorphism> out(k.degree());
    if (k.degree() == 1) {
        out[0] = {QPoly{Q(0), Q(1)}, {0}};
        return out;
    }
    for (const auto& a : k.automorphisms()) out[a.perm[k.embedding()]] = a;
    return out;
}

}  // namespace

GaloisContext::GaloisContext(std::vector<NumberField> constituents) {
    for (const auto& k : constituents) {
        if (std::find(cons_.begin(), cons_.end(), k) != cons_.end()) continue;
        if (k.degree() > 1 && !k.is_normal()) throw FieldError("Galois context constituent " + k.to_string() + " is not normal");
        cons_.push_back(k);
    }
    embeds_.assign(cons_.size(), QPoly{});
    std::vector<FieldAutomorphism> cur;  // automorphisms of comp_ indexed by target root
    bool started = false;
    for (size_t k = 0; k < cons_.size(); ++k) {
        const auto& K = cons_[k];
        if (K.degree() == 1) continue;
        if (!started) {
            comp_ = K;
            embeds_[k] = QPoly{Q(0), Q(1)};
            cur = by_target(K);
            started = true;
            continue;
        }
        JoinResult jr = join_fields(comp_, K);
        const QPoly& g = jr.field.poly();
        for (size_t j = 0; j < k; ++j)
            if (!embeds_[j].empty()) embeds_[j] = compose_mod(embeds_[j], jr.h1, g);
        embeds_[k] = jr.h2;
        auto kauts = by_target(K);
        std::vector<FieldAutomorphism> next(jr.field.degree());
        {
            PrecisionScope ps(kRootDigits);
            const auto& roots = jr.field.roots();
            for (size_t m = 0; m < roots.size(); ++m) {
                int r_old = match_root(comp_.roots(), poly_eval(jr.h1, roots[m]));
                int r_new = match_root(K.roots(), poly_eval(jr.h2, roots[m]));
                QPoly img = poly_add(compose_mod(cur[r_old].image, jr.h1, g),
                                     poly_scale(compose_mod(kauts[r_new].image, jr.h2, g), jr.c));
                img = poly_mod(img, g);
                if (!is_root_mod(g, img, g)) throw FieldError("compositum automorphism verification failed");
                int target = match_root(roots, poly_eval(img, roots[jr.field.embedding()]));
                if (target != static_cast<int>(m)) throw FieldError("compositum automorphism root mismatch");
                next[m] = {img, perm_of(img, roots)};
            }
        }
        comp_ = jr.field;
        cur = std::move(next);
        std::vector<FieldAutomorphism> reg;
        reg.push_back(cur[comp_.embedding()]);
        for (size_t m = 0; m < cur.size(); ++m)
            if (static_cast<int>(m) != comp_.embedding()) reg.push_back(cur[m]);
        // Injected automorphisms keep the identity first, like computed ones.
        if (reg[0].perm[comp_.embedding()] == comp_.embedding()) inject_automorphisms(*comp_.data(), reg);
    }
    if (!started) cur = by_target(comp_);
    auts_ = cur;
    PrecisionScope ps(kRootDigits);
    const auto& roots = comp_.roots();
    assign_.assign(auts_.size(), std::vector<int>(cons_.size(), 0));
    for (size_t m = 0; m < auts_.size(); ++m)
        for (size_t k = 0; k < cons_.size(); ++k) {
            if (cons_[k].degree() == 1) continue;
            assign_[m][k] = match_root(cons_[k].roots(), poly_eval(embeds_[k], roots[m]));
        }
}

int GaloisContext::constituent_index(const NumberField& k) const {
    for (size_t i = 0; i < cons_.size(); ++i)
        if (cons_[i] == k) return static_cast<int>(i);
    return -1;
}

AlgebraicNumber GaloisContext::embed(const AlgebraicNumber& x) const {
    if (x.field() == comp_) return x;
    if (x.is_rational()) return AlgebraicNumber::rational(comp_, x.coords()[0]);
    int k = constituent_index(x.field());
    if (k < 0) throw FieldError("element of " + x.field().to_string() + " is not in the Galois context");
    return AlgebraicNumber::from_poly(comp_, compose_mod(x.as_poly(), embeds_[k], comp_.poly()));
}

std::optional<AlgebraicNumber> GaloisContext::descend(const AlgebraicNumber& x, const NumberField& k) const {
    AlgebraicNumber y = embed(x);
    if (k.degree() == 1) {
        if (!y.is_rational()) return std::nullopt;
        return AlgebraicNumber::rational(k, y.coords()[0]);
    }
    if (k == comp_) return y;
    int ki = constituent_index(k);
    if (ki < 0) throw FieldError("descend target " + k.to_string() + " is not a constituent");
    int d = k.degree(), n = comp_.degree();
    NumberField qf;
    ExactMatrix m(qf, n, d + 1);
    AlgebraicNumber p = AlgebraicNumber::rational(comp_, 1);
    AlgebraicNumber th = AlgebraicNumber::from_poly(comp_, embeds_[ki]);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < n; ++i) m.at(i, j) = AlgebraicNumber::rational(qf, p.coords()[i]);
        p *= th;
    }
    for (int i = 0; i < n; ++i) m.at(i, d) = AlgebraicNumber::rational(qf, y.coords()[i]);
    auto rr = rref(m);
    if (!rr.pivots.empty() && rr.pivots.back() == static_cast<size_t>(d)) return std::nullopt;
    std::vector<Q> c(d, Q(0));
    for (size_t r = 0; r < rr.pivots.size(); ++r) c[rr.pivots[r]] = rr.r.at(r, d).coords()[0];
    return AlgebraicNumber(k, c);
}

std::vector<GaloisElement> GaloisContext::elements() const {
    std::vector<GaloisElement> out;
    for (size_t i = 0; i < auts_.size(); ++i) out.push_back(element(i));
    return out;
}

GaloisElement GaloisContext::identity() const { return element(comp_.embedding()); }

GaloisElement GaloisContext::complex_conjugation() const {
    return element(comp_.conjugate_root(comp_.embedding()));
}

GaloisElement GaloisContext::compose(const GaloisElement& a, const GaloisElement& b) const {
    if (comp_.degree() == 1) return identity();
    PrecisionScope ps(kRootDigits);
    const auto& roots = comp_.roots();
    return element(match_root(roots, poly_eval(auts_[b.index()].image, roots[a.index()])));
}

GaloisElement GaloisContext::inverse(const GaloisElement& a) const {
    for (size_t i = 0; i < auts_.size(); ++i)
        if (compose(a, element(i)) == identity()) return element(i);
    throw InvariantError("Galois element without inverse");
}

std::optional<GaloisElement> GaloisContext::find(const std::vector<int>& image_roots) const {
    for (size_t m = 0; m < auts_.size(); ++m) {
        bool ok = true;
        for (size_t k = 0; k < cons_.size() && k < image_roots.size() && ok; ++k)
            if (image_roots[k] >= 0 && assign_[m][k] != image_roots[k]) ok = false;
        if (ok) return element(m);
    }
    return std::nullopt;
}

bool GaloisContext::fixes(const GaloisElement& s, const NumberField& l) const {
    if (l.degree() == 1) return true;
    if (l.data() == comp_.data()) return s == identity();
    for (size_t k = 0; k < cons_.size(); ++k)
        if (cons_[k].data() == l.data()) return assign_[s.index()][k] == cons_[k].embedding();
    throw UndefinedAction("field " + l.to_string() + " is not a constituent of the Galois context");
}

bool GaloisElement::is_identity() const { return *this == ctx_->identity(); }

int GaloisElement::image_root(size_t k) const { return ctx_->assignment(idx_)[k]; }

long GaloisElement::cyclotomic_exponent(long n) const {
    if (n <= 2) return 1;
    const auto& cons = ctx_->constituents();
    PrecisionScope ps(kRootDigits);
    for (size_t k = 0; k < cons.size(); ++k) {
        long N = cons[k].cyclotomic_order();
        if (N == 0) continue;
        bool direct = N % n == 0;
        bool doubled = N % 2 == 1 && (2 * N) % n == 0;
        if (!direct && !doubled) continue;
        const Cx& img = cons[k].roots()[image_root(k)];
        long a = 0;
        for (long t = 1; t < N; ++t)
            if (gcd64(t, N) == 1 && abs(root_of_unity(t, N) - img) < R(1e-30)) {
                a = t;
                break;
            }
        if (a == 0) throw InvariantError("cyclotomic image not found");
        if (direct) return mod64(a, n);
        long b = (a % 2 == 1) ? a : a + N;
        return mod64(b, n);
    }
    throw UndefinedAction("zeta_" + std::to_string(n) + " is not in the Galois context");
}

std::string GaloisElement::describe() const {
    std::ostringstream os;
    os << "sigma[";
    const auto& a = ctx_->assignment(idx_);
    for (size_t k = 0; k < a.size(); ++k) os << (k ? "," : "") << a[k];
    os << "]";
    return os.str();
}

AlgebraicNumber apply_galois(const AlgebraicNumber& x, const GaloisElement& s) {
    if (x.field().degree() == 1 || x.is_rational()) return x;
    const auto& ctx = s.context();
    if (x.field() == ctx.compositum()) return x.substitute(ctx.image_of_generator(s.index()));
    int k = ctx.constituent_index(x.field());
    if (k < 0) throw UndefinedAction("Galois element undefined on " + x.field().to_string());
    const auto& K = ctx.constituents()[k];
    const auto& aut = K.automorphisms()[K.automorphism_to(s.image_root(k))];
    return x.substitute(aut.image);
}

ExactMatrix apply_galois(const ExactMatrix& m, const GaloisElement& s) {
    ExactMatrix r = m;
    for (auto& e : r.a) e = apply_galois(e, s);
    return r;
}

Vec apply_galois(const Vec& v, const GaloisElement& s) {
    Vec r;
    for (const auto& e : v) r.push_back(apply_galois(e, s));
    return r;
}

SubfieldBasisResult subfield_basis(const std::vector<Vec>& generators, const NumberField& l, const GaloisContext& ctx) {
    SubfieldBasisResult out;
    if (generators.empty()) return out;
    const NumberField& c = ctx.compositum();
    std::vector<Vec> emb;
    for (const auto& v : generators) {
        Vec e;
        for (const auto& x : v) e.push_back(ctx.embed(x));
        emb.push_back(e);
    }
    auto rr = rref(ExactMatrix::from_rows(c, emb));
    size_t r = rr.pivots.size();
    auto in_span = [&](const Vec& v) {
        Vec w = v;
        for (size_t i = 0; i < r; ++i) {
            AlgebraicNumber f = w[rr.pivots[i]];
            if (f.is_zero()) continue;
            for (size_t j = 0; j < w.size(); ++j) w[j] -= f * rr.r.at(i, j);
        }
        return std::all_of(w.begin(), w.end(), [](const AlgebraicNumber& a) { return a.is_zero(); });
    };
    for (const auto& s : ctx.elements()) {
        if (s.is_identity() || !ctx.fixes(s, l)) continue;
        for (size_t i = 0; i < emb.size(); ++i) {
            Vec img = apply_galois(emb[i], s);
            if (!in_span(img)) {
                out.failure = StabilityFailure{s, i, img};
                return out;
            }
        }
    }
    for (size_t i = 0; i < r; ++i) {
        Vec v;
        for (size_t j = 0; j < rr.r.cols; ++j) {
            auto d = ctx.descend(rr.r.at(i, j), l);
            if (!d) throw InvariantError("stable subspace basis entry does not descend to " + l.to_string());
            v.push_back(*d);
        }
        out.basis.push_back(v);
    }
    return out;
}

AlgebraicNumber hermitian_pair(const Vec& u, const Vec& v, const ExactMatrix& h) {
    if (u.size() != h.rows || v.size() != h.cols) throw std::invalid_argument("hermitian_pair: dimension mismatch");
    AlgebraicNumber s = AlgebraicNumber::rational(h.field, 0);
    for (size_t j = 0; j < h.cols; ++j) {
        AlgebraicNumber col = AlgebraicNumber::rational(h.field, 0);
        for (size_t i = 0; i < h.rows; ++i)
            if (!u[i].is_zero() && !h.at(i, j).is_zero()) col += u[i] * h.at(i, j);
        if (!col.is_zero()) s += col * v[j].conj();
    }
    return s;
}

std::vector<Vec> gram_schmidt(const std::vector<Vec>& vectors, const ExactMatrix& pairing) {
    std::vector<Vec> out;
    std::vector<AlgebraicNumber> norms;
    for (size_t i = 0; i < vectors.size(); ++i) {
        Vec w = vectors[i];
        for (size_t j = 0; j < out.size(); ++j) {
            AlgebraicNumber f = hermitian_pair(vectors[i], out[j], pairing) / norms[j];
            if (f.is_zero()) continue;
            for (size_t t = 0; t < w.size(); ++t) w[t] -= f * out[j][t];
        }
        if (std::all_of(w.begin(), w.end(), [](const AlgebraicNumber& a) { return a.is_zero(); }))
            throw DependentInput("vector " + std::to_string(i) + " lies in the span of the preceding vectors");
        AlgebraicNumber nn = hermitian_pair(w, w, pairing);
        if (nn.is_zero()) throw PreconditionError("isotropic vector " + std::to_string(i) + " for the pairing");
        out.push_back(w);
        norms.push_back(nn);
    }
    return out;
}

bool positive_definite_everywhere(const ExactMatrix& h, unsigned digits) {
    if (h.rows != h.cols) return false;
    PrecisionScope ps(digits);
    size_t n = h.rows;
    R tol = tol_digits(static_cast<int>(digits) - 10);
    for (int e = 0; e < h.field.degree(); ++e) {
        std::vector<std::vector<Cx>> m(n, std::vector<Cx>(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) m[i][j] = h.at(i, j).eval(e);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                if (abs(m[i][j] - conj(m[j][i])) > tol * (1 + abs(m[i][j]))) return false;
        for (size_t k = 0; k < n; ++k) {
            R d = m[k][k].re;
            if (d <= tol) return false;
            R sd = boost::multiprecision::sqrt(d);
            for (size_t i = k; i < n; ++i) m[i][k] = m[i][k] * (R(1) / sd);
            for (size_t j = k + 1; j < n; ++j)
                for (size_t i = j; i < n; ++i) m[i][j] -= m[i][k] * conj(m[j][k]);
        }
    }
    return true;
}

}  // namespace yl
