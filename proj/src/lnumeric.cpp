#include "yl/lnumeric.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "yl/errors.hpp"
#include "yl/yoshida.hpp"

namespace yl {

namespace bmp = boost::multiprecision;

namespace {

R rmax(const R& a, const R& b) { return a < b ? b : a; }
R rmin(const R& a, const R& b) { return a < b ? a : b; }
R pow10(long e) { return bmp::pow(R(10), static_cast<int>(e)); }

std::string real_str(const R& x, int digits) { return format_real(x, digits); }

nlohmann::json cx_json(const Cx& z, int digits) { return {real_str(z.re, digits), real_str(z.im, digits)}; }

Cx cx_from_json(const nlohmann::json& j) { return Cx(R(j.at(0).get<std::string>()), R(j.at(1).get<std::string>())); }

// log of prod Gamma_C / Gamma_R at w.
Cx log_gamma_factor(const std::vector<GammaShift>& g, const Cx& w) {
    R pi = real_pi();
    R log2pi = bmp::log(2 * pi), logpi = bmp::log(pi), log2 = bmp::log(R(2));
    Cx r;
    for (const auto& sh : g) {
        Cx x = w + Cx(to_real(sh.mu));
        if (sh.real)
            r += Cx(-logpi / 2) * x + lgamma(x * R(R(1) / 2));
        else
            r += Cx(log2) - Cx(log2pi) * x + lgamma(x);
    }
    return r;
}

// Rightmost pole (in Re w) of the gamma factor at s + w.
R rightmost_pole(const std::vector<GammaShift>& g, const Cx& s) {
    R best = -1e9;
    for (const auto& sh : g) best = rmax(best, -s.re - to_real(sh.mu));
    return best;
}

std::vector<long> smallest_prime_factor(long n) {
    std::vector<long> spf(n + 1, 0);
    for (long i = 2; i <= n; ++i)
        if (spf[i] == 0)
            for (long j = i; j <= n; j += i)
                if (spf[j] == 0) spf[j] = i;
    return spf;
}

// Sum_k G_k w^k by Horner with preallocated MPFR temporaries.
class Horner {
public:
    explicit Horner(mpfr_prec_t prec) {
        mpfr_inits2(prec, ar_, ai_, tr_, ti_, wr_, wi_, static_cast<mpfr_ptr>(nullptr));
    }
    ~Horner() { mpfr_clears(ar_, ai_, tr_, ti_, wr_, wi_, static_cast<mpfr_ptr>(nullptr)); }
    Horner(const Horner&) = delete;
    Horner& operator=(const Horner&) = delete;

    Cx run(const std::vector<Cx>& g, const Cx& w) {
        mpfr_set(wr_, w.re.backend().data(), MPFR_RNDN);
        mpfr_set(wi_, w.im.backend().data(), MPFR_RNDN);
        mpfr_set_ui(ar_, 0, MPFR_RNDN);
        mpfr_set_ui(ai_, 0, MPFR_RNDN);
        for (size_t k = g.size(); k-- > 0;) {
            mpfr_fmms(tr_, ar_, wr_, ai_, wi_, MPFR_RNDN);
            mpfr_fmma(ti_, ar_, wi_, ai_, wr_, MPFR_RNDN);
            mpfr_add(ar_, tr_, g[k].re.backend().data(), MPFR_RNDN);
            mpfr_add(ai_, ti_, g[k].im.backend().data(), MPFR_RNDN);
        }
        Cx r;
        mpfr_set(r.re.backend().data(), ar_, MPFR_RNDN);
        mpfr_set(r.im.backend().data(), ai_, MPFR_RNDN);
        return r;
    }

private:
    mpfr_t ar_, ai_, tr_, ti_, wr_, wi_;
};

// Nodes z_k = c + i(-T + k h) of the Mellin-Barnes integral
// (1/2 pi i) int gamma(s+z) Q^{(s+z)/2} t^z n^{-s-z} dz / z.
struct Nodes {
    Cx s;
    R c, h, T, logt;
    std::vector<Cx> g;
    R gsum;  // (h / 2 pi) sum |G_k|
    R edge;  // |G| at the truncation points
    R disc;  // e^{-2 pi d / h}
    R res0;  // |gamma(s) Q^{s/2}|, residue at z = 0
};

Cx node_value(const LSeriesSpec& spec, const R& logq, const Cx& s, const Cx& z, const R& logt) {
    Cx w = s + z;
    Cx e = log_gamma_factor(spec.gamma, w) + w * (logq / 2) + z * logt;
    return exp(e) / z;
}

}  // namespace

nlohmann::json PrecisionContext::to_json() const {
    return {{"digits", digits}, {"guard", guard},         {"n_max", n_max},         {"contour", contour},
            {"tolerance", tolerance}, {"split", split}, {"quad_nodes", quad_nodes}};
}

nlohmann::json LSeriesSpec::to_json() const {
    nlohmann::json ef = nlohmann::json::object();
    for (const auto& [p, cs] : euler_factors) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : cs) arr.push_back(element_to_json(c));
        ef[std::to_string(p)] = arr;
    }
    nlohmann::json gam = nlohmann::json::array();
    for (const auto& g : gamma) gam.push_back({{"type", g.real ? "R" : "C"}, {"mu", yl::to_string(g.mu)}});
    nlohmann::json j = {{"label", label},        {"degree", degree}, {"conductor", conductor},
                        {"field", field_to_json(field)}, {"euler_factors", ef}, {"gamma", gam},
                        {"self_dual", self_dual}};
    j["root_number"] = root_number ? cx_json(*root_number, 40) : nlohmann::json("fit");
    return j;
}

LSeriesSpec LSeriesSpec::from_json(const nlohmann::json& j) {
    try {
        LSeriesSpec s;
        s.label = j.at("label").get<std::string>();
        s.degree = j.at("degree").get<int>();
        s.conductor = j.at("conductor").get<long>();
        s.field = field_from_json(j.at("field"));
        for (const auto& [key, arr] : j.at("euler_factors").items()) {
            std::vector<AlgebraicNumber> cs;
            for (const auto& c : arr) cs.push_back(element_from_json(s.field, c));
            if (static_cast<int>(cs.size()) != s.degree + 1) throw SchemaError("euler factor at " + key + " has wrong length");
            s.euler_factors[std::stol(key)] = std::move(cs);
        }
        for (const auto& g : j.at("gamma")) {
            std::string t = g.at("type").get<std::string>();
            if (t != "R" && t != "C") throw SchemaError("gamma type must be R or C");
            s.gamma.push_back({t == "R", parse_rational(g.at("mu").get<std::string>())});
        }
        s.self_dual = j.at("self_dual").get<bool>();
        const auto& w = j.at("root_number");
        if (!w.is_string()) s.root_number = cx_from_json(w);
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("L-series spec: ") + e.what());
    }
}

std::vector<AlgebraicNumber> dirichlet_coefficients(const LSeriesSpec& spec, long n) {
    if (n < 1) throw PreconditionError("need N >= 1");
    auto primes = primes_up_to(n);
    if (!primes.empty() && primes.back() > spec.max_prime())
        throw InsufficientData("Euler factors known for p <= " + std::to_string(spec.max_prime()) + ", need " +
                               std::to_string(primes.back()));
    auto zero = AlgebraicNumber::rational(spec.field, 0);
    std::vector<AlgebraicNumber> a(n + 1, zero);
    a[1] = AlgebraicNumber::rational(spec.field, 1);
    auto spf = smallest_prime_factor(n);
    std::map<long, std::vector<AlgebraicNumber>> local;
    for (long p : primes) {
        const auto& c = spec.euler_factors.at(p);
        std::vector<AlgebraicNumber> b{a[1]};
        for (long q = p; q <= n; q *= p) {
            size_t j = b.size();
            AlgebraicNumber v = zero;
            for (size_t i = 1; i < c.size() && i <= j; ++i) v -= c[i] * b[j - i];
            b.push_back(v);
            if (q > n / p) break;
        }
        local[p] = std::move(b);
    }
    for (long m = 2; m <= n; ++m) {
        long p = spf[m], r = m;
        int e = 0;
        while (r % p == 0) {
            r /= p;
            ++e;
        }
        a[m] = a[r] * local[p][e];
    }
    return a;
}

std::vector<AlgebraicNumber> rankin_selberg_local(const AlgebraicNumber& lf, const AlgebraicNumber& wf,
                                                  const AlgebraicNumber& lh, const AlgebraicNumber& wh, long p) {
    Q inv_p = Q(1) / Q(p);
    AlgebraicNumber sfsh = lf * lh * inv_p;
    AlgebraicNumber sf2 = lf * lf * inv_p, sh2 = lh * lh * inv_p;
    AlgebraicNumber one = AlgebraicNumber::rational(lf.field(), 1);
    return {one, -sfsh, wh * sf2 + wf * sh2 - wf * wh * Q(2), -(wf * wh * sfsh), wf * wf * wh * wh};
}

namespace {

std::vector<NumberField> spec_constituents(const NewformRecord& f, const NewformRecord& h) {
    std::vector<NumberField> out{f.coeff_field, h.coeff_field};
    for (const auto* r : {&f, &h}) {
        auto chi = r->character.primitive();
        if (chi.order() > 2) out.push_back(character_value(chi, 1).field());
    }
    return out;
}

bool real_character(const DirichletCharacter& chi) { return chi.order() <= 2; }

void require_squarefree(const NewformRecord& r) {
    for (auto [p, e] : factorize(r.level))
        if (e > 1) throw UnsupportedRamification(r.label + ": level not squarefree at p = " + std::to_string(p));
}

// Steinberg at p: a_p^2 = p^{k-2} and trivial character at p.
void require_steinberg(const NewformRecord& r, long p) {
    auto it = r.local_types.find(p);
    if (it == r.local_types.end() || it->second != LocalType::Steinberg)
        throw UnsupportedRamification(r.label + ": local type at p = " + std::to_string(p) + " is not steinberg");
    if (r.character.primitive().conductor() % p == 0)
        throw UnsupportedRamification(r.label + ": character ramified at p = " + std::to_string(p));
}

}  // namespace

LSeriesSpec rankin_selberg_spec(const NewformRecord& f, const NewformRecord& h) {
    if (f.weight % 2 || h.weight % 2) throw OddWeight("Rankin-Selberg spec needs even weights");
    require_squarefree(f);
    require_squarefree(h);
    if (gcd64(f.level, h.level) != 1) {
        long p = factorize(gcd64(f.level, h.level)).front().first;
        throw UnsupportedRamification("both forms ramified at p = " + std::to_string(p));
    }
    CommonField cf(spec_constituents(f, h));
    LSeriesSpec s;
    s.label = f.label + "x" + h.label;
    s.degree = 4;
    s.conductor = f.level * f.level * h.level * h.level;
    s.field = cf.field();
    int k = std::max(f.weight, h.weight), l = std::min(f.weight, h.weight);
    s.gamma = {{false, Q((k + l) / 2 - 1)}, {false, Q((k - l) / 2)}};
    s.self_dual = (s.field.degree() == 1 || s.field.totally_real()) && real_character(f.character) &&
                  real_character(h.character);
    long pmax = std::min(f.max_prime(), h.max_prime());
    auto zero = AlgebraicNumber::rational(s.field, 0);
    for (long p : primes_up_to(pmax)) {
        bool rf = f.level % p == 0, rh = h.level % p == 0;
        if (!rf && !rh) {
            s.euler_factors[p] =
                rankin_selberg_local(cf.embed(unitary_eigenvalue(f, p)), cf.embed(character_value(f.character, p)),
                                     cf.embed(unitary_eigenvalue(h, p)), cf.embed(character_value(h.character, p)), p);
            continue;
        }
        const NewformRecord& ram = rf ? f : h;
        const NewformRecord& unr = rf ? h : f;
        require_steinberg(ram, p);
        // (1 - alpha u X)(1 - beta u X), u = a_p(ram) p^{(2 - w)/2} / sqrt p.
        AlgebraicNumber ap = cf.embed(ram.a(p)) * (Q(1) / qpow(Q(p), (ram.weight - 2) / 2));
        AlgebraicNumber lam = cf.embed(unitary_eigenvalue(unr, p));
        AlgebraicNumber om = cf.embed(character_value(unr.character, p));
        Q inv_p = Q(1) / Q(p);
        s.euler_factors[p] = {AlgebraicNumber::rational(s.field, 1), -(ap * lam * inv_p), ap * ap * om * inv_p, zero,
                              zero};
    }
    return s;
}

LSeriesSpec symmetric_square_spec(const NewformRecord& f) {
    if (f.weight % 2) throw OddWeight("symmetric square spec needs even weight");
    if (f.level != 1) throw UnsupportedRamification(f.label + ": symmetric square supported at level 1 only");
    CommonField cf(spec_constituents(f, f));
    LSeriesSpec s;
    s.label = "sym2(" + f.label + ")";
    s.degree = 3;
    s.conductor = 1;
    s.field = cf.field();
    s.gamma = {{true, Q(1)}, {false, Q(f.weight - 1)}};
    s.self_dual = (s.field.degree() == 1 || s.field.totally_real()) && real_character(f.character);
    for (long p : primes_up_to(f.max_prime())) {
        AlgebraicNumber lam = cf.embed(unitary_eigenvalue(f, p));
        AlgebraicNumber om = cf.embed(character_value(f.character, p));
        AlgebraicNumber s2 = lam * lam * (Q(1) / Q(p));
        s.euler_factors[p] = {AlgebraicNumber::rational(s.field, 1), -(s2 - om), om * s2 - om * om, -(om * om * om)};
    }
    return s;
}

nlohmann::json LValue::to_json(int digits) const {
    return {{"s", cx_json(s, digits)},
            {"Lambda", cx_json(lambda, digits)},
            {"L", cx_json(value, digits)},
            {"error", real_str(error, 3)},
            {"L_error", real_str(value_error, 3)},
            {"terms", terms}};
}

struct LEvaluator::Impl {
    unsigned work = 0;
    R logq;
    std::vector<Cx> a, abar;  // numeric coefficients, index 0 unused
    std::optional<RootNumberFit> fit;
    std::map<std::string, std::shared_ptr<Nodes>> nodes;
    std::map<std::string, long> lengths;
};

LEvaluator::LEvaluator(LSeriesSpec spec, PrecisionContext ctx)
    : spec_(std::move(spec)), ctx_(ctx), impl_(std::make_unique<Impl>()) {
    if (ctx_.digits < 5) throw PreconditionError("at least 5 digits required");
    if (ctx_.split <= 0 || ctx_.split == 1.0) throw PreconditionError("split parameter must be positive and != 1");
    if (spec_.gamma.empty()) throw PreconditionError("no gamma factors");
    impl_->work = ctx_.digits + ctx_.guard;
    PrecisionScope ps(impl_->work);
    impl_->logq = bmp::log(R(spec_.conductor));
}

LEvaluator::~LEvaluator() = default;

Cx LEvaluator::gamma_factor(const Cx& s) const {
    PrecisionScope ps(impl_->work);
    return exp(log_gamma_factor(spec_.gamma, s) + s * (impl_->logq / 2));
}

namespace {

struct SumResult {
    Cx value;
    R error;
    long terms = 0;
};

std::string node_key(const Cx& s, const R& logt) {
    return format_real(s.re, 40) + "," + format_real(s.im, 40) + "," + format_real(logt, 40);
}

}  // namespace

namespace {

std::shared_ptr<Nodes> build_nodes(const LSeriesSpec& spec, const PrecisionContext& ctx, const R& logq, const Cx& s,
                                   const R& logt, long extra) {
    auto nd = std::make_shared<Nodes>();
    nd->s = s;
    nd->logt = logt;
    const long dp = ctx.digits + 5 + extra;
    R pole = rightmost_pole(spec.gamma, s);
    // Keep Re(s + z) >= 2 so that n^{-s-z} decays along the contour.
    nd->c = rmax(rmax(R(ctx.contour), pole + R(1.5)), 2 - s.re);
    R dist = rmin(nd->c, nd->c - pole) * R(0.9);
    R pi = real_pi();
    nd->h = 2 * pi * dist / (R(dp) * bmp::log(R(10)));
    nd->disc = pow10(-dp);
    try {
        nd->res0 = abs(exp(log_gamma_factor(spec.gamma, s) + s * (logq / 2)));
    } catch (const std::domain_error&) {
        // s on a gamma pole makes z = 0 a double pole; use the magnitude a quarter step away.
        Cx s1 = s + Cx(R(1) / 4);
        nd->res0 = abs(exp(log_gamma_factor(spec.gamma, s1) + s1 * (logq / 2)));
    }
    // Truncation height: |G| below 10^{-dp} times the largest value seen.
    auto mag = [&](const R& t) { return abs(node_value(spec, logq, s, Cx(nd->c, t), logt)); };
    R gmax = mag(R(0));
    R step = 2;
    R tp = 0, tm = 0;
    for (int sign : {1, -1}) {
        R t = 0;
        while (true) {
            t += step;
            R m = mag(t * sign);
            gmax = rmax(gmax, m);
            if (m < gmax * nd->disc && t > 4) break;
            if (t > 2000) throw PrecisionLoss("Mellin-Barnes integrand does not decay");
        }
        (sign > 0 ? tp : tm) = t;
    }
    nd->T = rmax(tp, tm);
    long count = static_cast<long>(bmp::ceil(2 * nd->T / nd->h).convert_to<double>());
    nd->g.reserve(count + 1);
    nd->gsum = 0;
    for (long k = 0; k <= count; ++k) {
        R t = -nd->T + nd->h * R(k);
        nd->g.push_back(node_value(spec, logq, s, Cx(nd->c, t), logt));
        nd->gsum += abs(nd->g.back());
    }
    nd->gsum *= nd->h / (2 * pi);
    nd->edge = abs(nd->g.front()) + abs(nd->g.back());
    return nd;
}

// (h / 2 pi) n^{-s-c} sum_k G_k n^{-i t_k}
Cx kernel_value(const Nodes& nd, Horner& hn, long n) {
    R ln = bmp::log(R(n));
    Cx pre = exp(Cx(-(nd.s.re + nd.c) * ln, -nd.s.im * ln + nd.T * ln));
    Cx w = expi(-nd.h * ln);
    return pre * hn.run(nd.g, w) * (nd.h / (2 * real_pi()));
}

// S(s, t, c) = sum_n c_n (1/2 pi i) int gamma(s+z) Q^{(s+z)/2} t^z n^{-s-z} dz/z.
SumResult partial_sum(const LSeriesSpec& spec, const PrecisionContext& ctx, LEvaluator::Impl& im, const Cx& s,
                      const R& logt, bool dual) {
    std::string key = node_key(s, logt);
    Horner hn(static_cast<mpfr_prec_t>(std::ceil(im.work * 3.33)) + 16);
    const long dp = ctx.digits + 5;

    // Truncation point from the kernel decay.
    auto length = [&](const Nodes& nd) {
        R scale = abs(kernel_value(nd, hn, 1));
        auto small = [&](long n) {
            R kn = abs(kernel_value(nd, hn, n));
            // The trapezoid error near the pole at z = 0 behaves like res0 n^{-Re s} e^{-2 pi c / h};
            // below it the kernel is indistinguishable from zero.
            R noise = nd.disc * nd.res0 * bmp::exp(-s.re * bmp::log(R(n)));
            // Tail sum over m > n with room for divisor-type coefficient growth.
            return kn * R(n) * 100 < scale * pow10(-dp) || kn < 10 * noise;
        };
        long hi = 8;
        while (!(small(hi) && small(hi + hi / 4 + 1))) {
            hi *= 2;
            if (hi > (1L << 24)) throw PrecisionLoss("kernel decays too slowly for N <= 2^24");
        }
        long lo = hi / 2;
        while (hi - lo > std::max(1L, lo / 64)) {
            long mid = (lo + hi) / 2;
            if (small(mid) && small(mid + mid / 4 + 1))
                hi = mid;
            else
                lo = mid;
        }
        return hi;
    };

    auto it = im.nodes.find(key);
    if (it == im.nodes.end()) {
        auto nd = build_nodes(spec, ctx, im.logq, s, logt, 0);
        long n = ctx.n_max > 0 ? ctx.n_max : length(*nd);
        // The pole error adds up as sum_{n <= N} n^{-Re s}: refine the step to absorb it.
        double growth = 0;
        double sig = s.re.convert_to<double>();
        for (long m = 1; m <= n; ++m) growth += std::pow(static_cast<double>(m), -sig);
        long extra = static_cast<long>(std::ceil(std::log10(std::max(growth, 1.0)))) + 1;
        nd = build_nodes(spec, ctx, im.logq, s, logt, extra);
        if (ctx.n_max <= 0) n = length(*nd);
        it = im.nodes.emplace(key, nd).first;
        im.lengths[key] = n;
    }
    const Nodes& nd = *it->second;
    long n_max = im.lengths.at(key);

    if (static_cast<long>(im.a.size()) <= n_max) {
        auto exact = dirichlet_coefficients(spec, n_max);
        im.a.assign(n_max + 1, Cx());
        im.abar.assign(n_max + 1, Cx());
        for (long n = 1; n <= n_max; ++n) {
            if (exact[n].is_zero()) continue;
            im.a[n] = exact[n].numeric();
            im.abar[n] = conj(im.a[n]);
        }
    }
    const auto& coef = dual ? im.abar : im.a;

    SumResult r;
    R pi = real_pi();
    R abs_sum = 0, abs_pole = 0;
    Cx total;
    for (long n = 1; n <= n_max; ++n) {
        if (coef[n].re == 0 && coef[n].im == 0) continue;
        R ln = bmp::log(R(n));
        Cx pre = exp(Cx(-(s.re + nd.c) * ln, -s.im * ln + nd.T * ln));
        Cx w = expi(-nd.h * ln);
        total += coef[n] * pre * hn.run(nd.g, w);
        abs_sum += abs(coef[n]) * bmp::exp(-(s.re + nd.c) * ln);
        abs_pole += abs(coef[n]) * bmp::exp(-s.re * ln);
    }
    r.value = total * (nd.h / (2 * pi));
    r.terms = n_max;
    R tail = abs(kernel_value(nd, hn, n_max)) * R(n_max) * 100;
    R mass = nd.gsum * abs_sum;
    R edge = nd.edge * abs_sum / (2 * pi);
    R rounding = pow10(-static_cast<long>(im.work) + 3) * mass * bmp::sqrt(R(static_cast<long>(nd.g.size())));
    r.error = tail + nd.disc * (mass + nd.res0 * abs_pole) + edge + rounding;
    return r;
}

}  // namespace

LValue LEvaluator::evaluate(const Cx& s_in, double t) {
    if (t <= 0) throw PreconditionError("split parameter must be positive");
    Cx w = root_number();
    PrecisionScope ps(impl_->work);
    Cx s = at_working(s_in);
    R lt = bmp::log(R(t));
    auto a = partial_sum(spec_, ctx_, *impl_, s, lt, false);
    auto b = partial_sum(spec_, ctx_, *impl_, Cx(1) - s, -lt, true);
    LValue v;
    v.s = s;
    v.lambda = a.value + w * b.value;
    v.error = a.error + b.error;
    v.terms = std::max(a.terms, b.terms);
    Cx gf = gamma_factor(s);
    v.value = v.lambda / gf;
    v.value_error = v.error / abs(gf);
    if (ctx_.tolerance > 0 && v.value_error > R(ctx_.tolerance) * rmax(abs(v.value), R(1e-300)))
        throw PrecisionLoss("error estimate " + real_str(v.value_error, 3) + " exceeds tolerance at s = " +
                            real_str(s.re, 10) + " + " + real_str(s.im, 10) + "i");
    return v;
}

std::vector<Cx> residual_sample_points() {
    return {Cx(R(0.3), R(0.7)), Cx(R(0.65), R(1.3)), Cx(R(0.45), R(2.1)), Cx(R(0.8), R(0.25)), Cx(R(0.2), R(3.0))};
}

RootNumberFit LEvaluator::fit_root_number() {
    if (impl_->fit) return *impl_->fit;
    PrecisionScope ps(impl_->work);
    R l1 = 0, l2 = bmp::log(R(ctx_.split));
    std::vector<Cx> candidates = {Cx(R(0.6), R(0.4)), Cx(R(0.4), R(1.1)), Cx(R(0.55), R(2.0)), Cx(R(0.7), R(3.3))};
    R best_ratio = -1;
    RootNumberFit best;
    for (const auto& s0 : candidates) {
        auto a1 = partial_sum(spec_, ctx_, *impl_, s0, l1, false);
        auto a2 = partial_sum(spec_, ctx_, *impl_, s0, l2, false);
        auto b1 = partial_sum(spec_, ctx_, *impl_, Cx(1) - s0, -l1, true);
        auto b2 = partial_sum(spec_, ctx_, *impl_, Cx(1) - s0, -l2, true);
        Cx den = b1.value - b2.value;
        R scale = rmax(abs(a1.value), abs(b1.value));
        R ratio = abs(den) / rmax(scale, R(1e-300));
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best.w = (a2.value - a1.value) / den;
            best.s0 = s0;
        }
    }
    if (best_ratio < pow10(-static_cast<long>(ctx_.digits) / 3))
        throw IllConditioned("root-number fit: |denominator| / scale = " + real_str(best_ratio, 3) +
                             " at every candidate s0");
    best.margin = bmp::abs(abs(best.w) - 1);
    if (best.margin > R(1e-6))
        throw IllConditioned("fitted root number has |w| = " + real_str(abs(best.w), 12) + " at s0 = " +
                             real_str(best.s0.re, 4) + " + " + real_str(best.s0.im, 4) + "i");
    if (spec_.self_dual) {
        for (int e : {1, -1}) {
            if (abs(best.w - Cx(e)) < R(1e-6)) {
                best.w = Cx(e);
                best.snapped = true;
            }
        }
    }
    impl_->fit = best;
    return best;
}

Cx LEvaluator::root_number() {
    if (spec_.root_number) return *spec_.root_number;
    return fit_root_number().w;
}

R LEvaluator::residual(const Cx& s_in) {
    Cx w = root_number();
    PrecisionScope ps(impl_->work);
    Cx s = at_working(s_in);
    R lt = bmp::log(R(ctx_.split));
    auto a = partial_sum(spec_, ctx_, *impl_, s, lt, false);
    auto b = partial_sum(spec_, ctx_, *impl_, Cx(1) - s, -lt, true);
    auto c = partial_sum(spec_, ctx_, *impl_, Cx(1) - s, lt, true);
    auto d = partial_sum(spec_, ctx_, *impl_, s, -lt, false);
    Cx lam = a.value + w * b.value;
    // w * Lambda~(1 - s) with the dual root number 1 / w.
    Cx dual = w * c.value + d.value;
    return abs(lam - dual) / abs(lam);
}

LValue evaluate(const LSeriesSpec& spec, const Cx& s, const PrecisionContext& ctx) {
    LEvaluator ev(spec, ctx);
    return ev.evaluate(s);
}

RootNumberFit fit_root_number(const LSeriesSpec& spec, const PrecisionContext& ctx) {
    LEvaluator ev(spec, ctx);
    return ev.fit_root_number();
}

// ---------------------------------------------------------------------------
// Petersson norms

namespace {

struct GaussLegendre {
    std::vector<R> x, w;  // on [-1, 1]
};

GaussLegendre gauss_legendre(unsigned n) {
    GaussLegendre g;
    g.x.resize(n);
    g.w.resize(n);
    R pi = real_pi();
    R eps = pow10(-static_cast<long>(working_digits()) + 2);
    for (unsigned i = 0; i < (n + 1) / 2; ++i) {
        R z = bmp::cos(pi * (R(i) + R(0.75)) / (R(n) + R(0.5)));
        R dp;
        for (int it = 0; it < 100; ++it) {
            R p0 = 1, p1 = z;
            for (unsigned j = 2; j <= n; ++j) {
                R p2 = ((2 * R(j) - 1) * z * p1 - (R(j) - 1) * p0) / R(j);
                p0 = p1;
                p1 = p2;
            }
            dp = R(n) * (z * p1 - p0) / (z * z - 1);
            R dz = p1 / dp;
            z -= dz;
            if (bmp::abs(dz) < eps) break;
        }
        R p0 = 1, p1 = z;
        for (unsigned j = 2; j <= n; ++j) {
            R p2 = ((2 * R(j) - 1) * z * p1 - (R(j) - 1) * p0) / R(j);
            p0 = p1;
            p1 = p2;
        }
        dp = R(n) * (z * p1 - p0) / (z * z - 1);
        R wt = 2 / ((1 - z * z) * dp * dp);
        g.x[i] = -z;
        g.x[n - 1 - i] = z;
        g.w[i] = wt;
        g.w[n - 1 - i] = wt;
    }
    return g;
}

// (integral of |f|^2 y^{k-2}, volume) over the fundamental domain with nx and ny nodes per panel.
std::pair<R, R> domain_integrals(const QExpansion& f, int k, unsigned nx, unsigned ny, unsigned digits) {
    auto gx = gauss_legendre(nx), gy = gauss_legendre(ny);
    R pi = real_pi();
    R target = pow10(-static_cast<long>(digits) - 5);
    // Upper cutoff: e^{-4 pi Y} Y^{k-2} below target.
    R ymax = 2;
    while (bmp::exp(-4 * pi * ymax) * bmp::pow(ymax, k - 2) > target) ymax += 1;
    long terms = 1;
    R q0 = bmp::exp(-2 * pi * bmp::sqrt(R(3)) / 2);
    while (bmp::pow(q0, terms) > target * R(1e-10) && terms < f.length()) ++terms;
    if (terms >= f.length()) throw InsufficientData("q-expansion too short for the quadrature precision");
    std::vector<R> coef;
    for (long n = 0; n <= terms; ++n) coef.push_back(to_real(Q(f.a[n])));

    R integral = 0, volume = 0;
    for (unsigned i = 0; i < nx; ++i) {
        // x in [0, 1/2] (the integrand is even in x).
        R x = (gx.x[i] + 1) / 4, wx = gx.w[i] / 4;
        R y0 = bmp::sqrt(1 - x * x);
        // volume: int_0^{1/y0} du
        R vol_inner = 0;
        for (unsigned j = 0; j < ny; ++j) vol_inner += gy.w[j] / 2 / y0;
        volume += wx * vol_inner;
        std::vector<R> cuts{y0};
        for (R c = bmp::ceil(y0); c < ymax; c += 1)
            if (c > y0) cuts.push_back(c);
        cuts.push_back(ymax);
        Cx ex = expi(2 * pi * x);
        R inner = 0;
        for (size_t c = 0; c + 1 < cuts.size(); ++c) {
            R a = cuts[c], b = cuts[c + 1];
            for (unsigned j = 0; j < ny; ++j) {
                R y = (b - a) / 2 * gy.x[j] + (a + b) / 2;
                Cx q = ex * bmp::exp(-2 * pi * y);
                Cx v;
                for (long n = terms; n >= 1; --n) v = (v + Cx(coef[n])) * q;
                inner += gy.w[j] * (b - a) / 2 * norm2(v) * bmp::pow(y, k - 2);
            }
        }
        integral += wx * inner;
    }
    return {2 * integral, 2 * volume};
}

struct Calibration {
    unsigned digits = 0;
    R kappa;
    R error;
};

std::mutex& cal_mutex() {
    static std::mutex m;
    return m;
}

std::map<int, QExpansion>& cal_forms() {
    static std::map<int, QExpansion> m;
    return m;
}

std::map<std::pair<int, long>, Calibration>& cal_cache() {
    static std::map<std::pair<int, long>, Calibration> m;
    return m;
}

QExpansion calibration_form(int k) {
    std::lock_guard<std::mutex> lock(cal_mutex());
    auto& forms = cal_forms();
    if (!forms.count(12)) forms[12] = eta_oracle({{1, 24}}, 600);
    auto it = forms.find(k);
    if (it == forms.end()) throw CalibrationMissing("no calibration form for weight " + std::to_string(k) + " at level 1");
    return it->second;
}

Calibration calibrate(int k, long level, const PrecisionContext& ctx) {
    if (level != 1) throw CalibrationMissing("no calibration for level " + std::to_string(level));
    {
        std::lock_guard<std::mutex> lock(cal_mutex());
        auto it = cal_cache().find({k, level});
        if (it != cal_cache().end() && it->second.digits >= ctx.digits) return it->second;
    }
    QExpansion f = calibration_form(k);
    auto [norm, norm_err] = petersson_quadrature(f, k, ctx);
    long pmax = std::min<long>(f.length(), 600);
    auto rec = record_from_expansion("calibration", k, 1, DirichletCharacter::trivial(1), f, pmax, Provenance::EtaOracle);
    LEvaluator ev(symmetric_square_spec(rec), ctx);
    auto l1 = ev.evaluate(Cx(1));
    PrecisionScope ps(ctx.digits + ctx.guard);
    Calibration c;
    c.digits = ctx.digits;
    c.kappa = norm / l1.value.re;
    c.error = c.kappa * (norm_err / norm + l1.value_error / abs(l1.value));
    std::lock_guard<std::mutex> lock(cal_mutex());
    cal_cache()[{k, level}] = c;
    return c;
}

// L(1, sym^2 f), cached by record content and precision.
LValue sym2_at_one(const NewformRecord& rec, const PrecisionContext& ctx) {
    static std::mutex mu;
    static std::map<std::string, LValue> cache;
    std::string key = ctx.to_json().dump() + record_to_json(rec).dump();
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    LEvaluator ev(symmetric_square_spec(rec), ctx);
    LValue v = ev.evaluate(Cx(1));
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, v);
    return v;
}

std::pair<R, R> petersson_with_error(const NewformRecord& rec, const PrecisionContext& ctx, const Q& scale) {
    if (rec.level != 1) throw CalibrationMissing("no calibration for level " + std::to_string(rec.level));
    Calibration c = calibrate(rec.weight, rec.level, ctx);
    LValue l1 = sym2_at_one(rec, ctx);
    PrecisionScope ps(ctx.digits + ctx.guard);
    R s2 = to_real(scale * scale);
    R v = s2 * c.kappa * l1.value.re;
    R e = bmp::abs(v) * (c.error / c.kappa + l1.value_error / abs(l1.value));
    return {v, e};
}

}  // namespace

std::pair<R, R> petersson_quadrature(const QExpansion& f, int k, const PrecisionContext& ctx) {
    PrecisionScope ps(ctx.digits + ctx.guard);
    unsigned n = ctx.quad_nodes ? ctx.quad_nodes : ctx.digits + 10;
    auto [i1, v1] = domain_integrals(f, k, n, n, ctx.digits);
    auto [i2, v2] = domain_integrals(f, k, n + n / 2, n + n / 2, ctx.digits);
    R value = i2 / v2;
    R err = bmp::abs(value - i1 / v1) + value * pow10(-static_cast<long>(ctx.digits));
    return {value, err};
}

R petersson_calibration(int k, long level, const PrecisionContext& ctx) { return calibrate(k, level, ctx).kappa; }

void register_calibration_form(int k, const QExpansion& f) {
    std::lock_guard<std::mutex> lock(cal_mutex());
    cal_forms()[k] = f;
    cal_cache().erase({k, 1});
}

R petersson_norm(const NewformRecord& rec, const PrecisionContext& ctx, const Q& scale) {
    return petersson_with_error(rec, ctx, scale).first;
}

// ---------------------------------------------------------------------------
// Period constants

nlohmann::json ShimuraValue::to_json(int digits) const {
    return {{"constant", constant.to_json()},
            {"L", cx_json(lvalue, digits)},
            {"petersson", real_str(petersson, digits)},
            {"value", cx_json(value, digits)},
            {"error", real_str(error, 3)}};
}

ShimuraValue shimura_constant_eval(const Q& m, const NewformRecord& g, const NewformRecord& h, LEvaluator& ev) {
    ShimuraValue out;
    out.constant = shimura_constant(m, g, h);
    const auto& ctx = ev.context();
    auto [pet, pet_err] = petersson_with_error(g, ctx, Q(1));
    PrecisionScope ps(ctx.digits + ctx.guard);
    auto lv = ev.evaluate(Cx(to_real(m)));
    out.lvalue = lv.value;
    out.petersson = pet;
    const auto& c = out.constant;
    Cx v = c.scalar().numeric();
    R pi = real_pi();
    v = v * bmp::pow(pi, static_cast<int>(c.pi_exp()));
    static const Cx ipow[4] = {Cx(1), Cx(0, 1), Cx(-1), Cx(0, -1)};
    v = v * ipow[((c.i_exp() % 4) + 4) % 4];
    for (const auto& [chi, e] : c.gauss_tokens()) {
        Cx gs = gauss_sum(chi).numeric();
        for (long i = 0; i < std::labs(e); ++i) v = e > 0 ? v * gs : v / gs;
    }
    R rel = 0;
    for (const auto& [label, e] : c.petersson_tokens()) {
        if (label != g.label) throw PreconditionError("unexpected Petersson token " + label);
        for (long i = 0; i < std::labs(e); ++i) v = e > 0 ? v * pet : v / pet;
        rel += R(std::labs(e)) * pet_err / pet;
    }
    for (const auto& [tok, e] : c.lvalue_tokens()) {
        if (tok.m != m) throw PreconditionError("unexpected L-value token " + tok.to_string());
        for (long i = 0; i < std::labs(e); ++i) v = e > 0 ? v * lv.value : v / lv.value;
        rel += R(std::labs(e)) * lv.value_error / abs(lv.value);
    }
    out.value = v;
    out.error = abs(v) * rel;
    return out;
}

ShimuraValue shimura_constant_eval(const Q& m, const NewformRecord& g, const NewformRecord& h,
                                   const PrecisionContext& ctx) {
    LEvaluator ev(rankin_selberg_spec(g, h), ctx);
    return shimura_constant_eval(m, g, h, ev);
}

// ---------------------------------------------------------------------------
// Algebraic recognition

namespace {

Q floor_q(const Q& x) {
    Z f;
    mpz_fdiv_q(f.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Q(f);
}

// Rational of least denominator in [lo, hi] (lo <= hi); among those, nearest to x.
Q simplest_in(const Q& lo, const Q& hi, Q x) {
    if (x < lo) x = lo;
    if (x > hi) x = hi;
    Q fl = floor_q(lo);
    if (fl == lo || fl + 1 <= hi) {
        Q first = fl == lo ? fl : fl + 1;
        Q last = floor_q(hi);
        Q near = floor_q(x + Q(1, 2));
        if (near < first) near = first;
        if (near > last) near = last;
        return near;
    }
    // lo, hi in (fl, fl + 1): recurse on the reciprocals of the fractional parts.
    Q r = simplest_in(1 / (hi - fl), 1 / (lo - fl), 1 / (x - fl));
    return fl + 1 / r;
}

struct RationalMatch {
    Q value;
    bool ambiguous = false;
};

std::optional<RationalMatch> match_rational(const Q& x, const Q& band, const Z& height) {
    Q lo = x - band, hi = x + band;
    Q best = simplest_in(lo, hi, x);
    if (best.get_den() > height) return std::nullopt;
    RationalMatch m{best, false};
    // Any other rational of denominator <= H lies at least 1 / (q H) from best.
    Q gap = Q(1) / (Q(best.get_den()) * Q(height));
    if (best - gap >= lo && simplest_in(lo, best - gap, x).get_den() <= height) m.ambiguous = true;
    if (best + gap <= hi && simplest_in(best + gap, hi, x).get_den() <= height) m.ambiguous = true;
    return m;
}

}  // namespace

AlgebraicNumber detect_algebraic(const Cx& x, const R& eps, const NumberField& field, const Z& height_bound,
                                 const R& tol) {
    if (!(eps >= 0) || !(tol > 0)) throw PreconditionError("eps must be >= 0 and tol > 0");
    if (!(eps * 1000 < tol)) throw PreconditionError("eps must be below tol / 1000");
    if (height_bound < 1) throw PreconditionError("height bound must be >= 1");
    unsigned digits = std::max<unsigned>(working_digits(), 40);
    PrecisionScope ps(digits);
    R band_r = rmax(10 * eps, pow10(-static_cast<long>(digits) + 5));
    Q band = to_rational(band_r);
    int d = field.degree();
    auto found = [&](const AlgebraicNumber& a) {
        if (abs(a.numeric() - x) > tol) throw NotFound("closest candidate lies outside tol");
        return a;
    };
    if (d == 1) {
        if (bmp::abs(x.im) > band_r) throw NotFound("value has imaginary part " + real_str(x.im, 5));
        auto m = match_rational(to_rational(x.re), band, height_bound);
        if (!m) throw NotFound("no rational of height <= " + height_bound.get_str() + " within the uncertainty band");
        if (m->ambiguous) throw AmbiguousMatch("several rationals of bounded height within the uncertainty band");
        return found(AlgebraicNumber::rational(field, m->value));
    }
    if (d != 2) throw UnsupportedOperation("recognition implemented for Q and quadratic fields only");
    Cx th = field.root(field.embedding(), digits);
    if (bmp::abs(th.im) > R(0)) {
        // Imaginary quadratic: coordinates from real and imaginary parts.
        R b = x.im / th.im;
        R a = x.re - b * th.re;
        Q band_b = to_rational(band_r / bmp::abs(th.im));
        Q band_a = to_rational(band_r * (1 + bmp::abs(th.re / th.im)));
        auto mb = match_rational(to_rational(b), band_b, height_bound);
        auto ma = match_rational(to_rational(a), band_a, height_bound);
        if (!ma || !mb) throw NotFound("no element of height <= " + height_bound.get_str() + " within the uncertainty band");
        if (ma->ambiguous || mb->ambiguous) throw AmbiguousMatch("several elements of bounded height within the band");
        return found(AlgebraicNumber(field, {ma->value, mb->value}));
    }
    // Real quadratic: (a + b theta) / den with |a|, |b|, den <= H.
    if (bmp::abs(x.im) > band_r) throw NotFound("value has imaginary part " + real_str(x.im, 5));
    if (height_bound > 20000) throw PreconditionError("real quadratic search supports heights <= 20000");
    long H = height_bound.get_si();
    std::vector<std::tuple<long, long, long>> hits;
    for (long den = 1; den <= H; ++den) {
        for (long b = -H; b <= H; ++b) {
            R target = x.re * R(den) - R(b) * th.re;
            long a = bmp::round(target).convert_to<long>();
            if (std::labs(a) > H || gcd64(gcd64(std::labs(a), std::labs(b)), den) != 1) continue;
            if (bmp::abs((R(a) + R(b) * th.re) / R(den) - x.re) <= band_r) hits.emplace_back(a, b, den);
        }
    }
    if (hits.empty()) throw NotFound("no element of height <= " + height_bound.get_str() + " within the uncertainty band");
    if (hits.size() > 1) throw AmbiguousMatch(std::to_string(hits.size()) + " elements of bounded height within the band");
    auto [a, b, den] = hits.front();
    return found(AlgebraicNumber(field, {frac(a, den), frac(b, den)}));
}

}  // namespace yl
