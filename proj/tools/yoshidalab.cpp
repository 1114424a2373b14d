// yoshidalab command-line interface.
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "yl/acceptance.hpp"
#include "yl/bundled.hpp"
#include "yl/errors.hpp"
#include "yl/lnumeric.hpp"
#include "yl/periods.hpp"
#include "yl/satake.hpp"
#include "yl/yoshida.hpp"

using nlohmann::json;
using namespace yl;

namespace {

enum Exit { kOk = 0, kVerify = 1, kUsage = 2 };

struct RunConfig {
    std::string subcommand;
    std::vector<std::string> inputs;
    unsigned digits = 30;
    long pmin = 2;
    long pmax = 500;
    std::string format = "json";
    std::uint64_t seed = 20261016;

    json to_json() const {
        return {{"subcommand", subcommand}, {"inputs", inputs}, {"digits", digits},
                {"primes", {pmin, pmax}},   {"format", format}, {"seed", seed}};
    }
};

// Usage problems found after parsing (bad values, unreadable inputs).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void flatten(const json& j, const std::string& path, std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, path.empty() ? k : path + "." + k, out);
    } else if (j.is_array()) {
        for (size_t i = 0; i < j.size(); ++i) flatten(j[i], path + "." + std::to_string(i), out);
    } else {
        out.emplace_back(path, j.is_string() ? j.get<std::string>() : j.dump());
    }
}

void emit(const RunConfig& cfg, const json& result, bool ok) {
    json report = {{"config", cfg.to_json()}, {"ok", ok}, {"result", result}};
    if (cfg.format == "tsv") {
        std::vector<std::pair<std::string, std::string>> rows;
        flatten(report, "", rows);
        for (const auto& [k, v] : rows) std::cout << k << "\t" << v << "\n";
    } else {
        std::cout << report.dump(2) << "\n";
    }
}

NewformRecord record_arg(const std::string& arg, long pmax) {
    const std::string prefix = "bundled:";
    if (arg.rfind(prefix, 0) == 0) {
        std::string name = arg.substr(prefix.size());
        if (name == "23a" || name == "23a#0") {
            auto [f, fs] = load_level23_pair();
            return name == f.label ? f : fs;
        }
        if (name == "synth-f" || name == "synth-g") {
            auto [f, g] = load_synthetic_pair();
            return name == "synth-f" ? f : g;
        }
        return oracle_record(load_oracle_spec(name), pmax);
    }
    auto recs = load_records_file(arg);
    if (recs.empty()) throw SchemaError(arg + ": no records");
    return recs.front();
}

std::vector<NumberField> record_constituents(const std::vector<NewformRecord>& recs) {
    std::vector<NumberField> out;
    auto add = [&](const NumberField& k) {
        if (k.degree() == 1) return;
        for (const auto& o : out)
            if (o.poly() == k.poly()) return;
        out.push_back(k);
    };
    for (const auto& r : recs) {
        add(r.coeff_field);
        if (r.character.order() > 2) add(NumberField::cyclotomic(r.character.order()));
    }
    if (out.empty()) out.push_back(NumberField::quadratic(-1));
    return out;
}

// id | conj | index=N | roots=j0,j1,...
GaloisElement sigma_arg(const std::string& spec, const GaloisContext& ctx) {
    if (spec == "id") return ctx.identity();
    if (spec == "conj") return ctx.complex_conjugation();
    if (spec.rfind("index=", 0) == 0) {
        size_t i = std::stoul(spec.substr(6));
        if (i >= ctx.size()) throw UsageError("--sigma index out of range (context has " + std::to_string(ctx.size()) + " elements)");
        return ctx.element(i);
    }
    if (spec.rfind("roots=", 0) == 0) {
        std::vector<int> roots;
        std::stringstream ss(spec.substr(6));
        for (std::string t; std::getline(ss, t, ',');) roots.push_back(std::stoi(t));
        if (auto s = ctx.find(roots)) return *s;
        throw UsageError("--sigma " + spec + " is not an automorphism of the context");
    }
    throw UsageError("--sigma must be id, conj, index=N or roots=j0,j1,...");
}

std::vector<long> list_arg(const std::string& s) {
    std::vector<long> v;
    std::stringstream ss(s);
    for (std::string t; std::getline(ss, t, ',');) v.push_back(std::stol(t));
    return v;
}

NumberField field_arg(const std::string& poly) {
    if (poly.empty()) return NumberField();
    return NumberField::from_poly(list_arg(poly), 0);
}

AlgebraicNumber element_arg(const NumberField& k, const std::string& s) {
    json coords = json::array();
    std::stringstream ss(s);
    for (std::string t; std::getline(ss, t, ',');) coords.push_back(t);
    return element_from_json(k, coords);
}

Cx complex_arg(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos) return Cx(R(s));
    return Cx(R(s.substr(0, comma)), R(s.substr(comma + 1)));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Yoshida-lift computations: characters, Satake parameters, lifts, period constants, L-values"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    if (const char* env = std::getenv("YOSHIDALAB_DIGITS")) {
        try {
            cfg.digits = static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            std::cerr << "YOSHIDALAB_DIGITS is not a number\n";
            return kUsage;
        }
    }
    app.add_option("--digits", cfg.digits, "Working precision in significant digits (env YOSHIDALAB_DIGITS)");
    app.add_option("--pmin", cfg.pmin, "Smallest prime considered");
    app.add_option("--pmax", cfg.pmax, "Largest prime considered");
    app.add_option("--format", cfg.format, "Report format")->check(CLI::IsMember({"json", "tsv"}));
    app.add_option("--seed", cfg.seed, "Seed for randomized suites");

    std::function<std::pair<json, bool>()> action;
    auto bind = [&](CLI::App* sub, const std::string& name, std::function<std::pair<json, bool>()> f) {
        sub->callback([&cfg, &action, name, f] {
            cfg.subcommand = name;
            action = f;
        });
    };

    // newform
    auto* nf = app.add_subcommand("newform", "Newform records and oracles");
    nf->require_subcommand(1);
    std::string file, sigma = "conj";
    auto* nf_val = nf->add_subcommand("validate", "Load records and check their invariants");
    nf_val->add_option("file", file, "Record file")->required();
    bind(nf_val, "newform validate", [&] {
        cfg.inputs = {file};
        json out = json::array();
        try {
            auto recs = file.rfind("bundled:", 0) == 0 ? std::vector<NewformRecord>{record_arg(file, cfg.pmax)} : load_records_file(file);
            for (const auto& r : recs) {
                validate_record(r);
                out.push_back({{"label", r.label}, {"valid", true}, {"primes", r.ap.size()}});
            }
        } catch (const InvariantError& e) {
            return std::pair<json, bool>{{{"valid", false}, {"error", e.what()}}, false};
        }
        return std::pair<json, bool>{{{"records", out}}, true};
    });
    auto* nf_conj = nf->add_subcommand("conjugate", "Apply a Galois element to a record");
    nf_conj->add_option("file", file, "Record file")->required();
    nf_conj->add_option("--sigma", sigma, "id, conj, index=N or roots=j0,j1,...");
    bind(nf_conj, "newform conjugate", [&] {
        cfg.inputs = {file};
        auto rec = record_arg(file, cfg.pmax);
        GaloisContext ctx(record_constituents({rec}));
        auto s = sigma_arg(sigma, ctx);
        auto c = conjugate_newform(rec, s);
        validate_record(c);
        return std::pair<json, bool>{{{"sigma", s.describe()}, {"records", {record_to_json(c)}}}, true};
    });
    auto* nf_or = nf->add_subcommand("oracle", "Brute-force oracles");
    nf_or->require_subcommand(1);
    std::string eta_spec, name, curve = "0,-1,1,-10,-20";
    long M = 100, weight = 0, level = 0;
    auto* or_eta = nf_or->add_subcommand("eta", "Eta-product q-expansion");
    or_eta->add_option("--spec", eta_spec, "d:e pairs, e.g. 1:2,11:2");
    or_eta->add_option("--name", name, "Bundled oracle spec (delta, 11a)");
    or_eta->add_option("--M", M, "Number of coefficients")->check(CLI::Range(1L, 100000L));
    or_eta->add_option("--weight", weight, "Weight, to also emit a record");
    or_eta->add_option("--level", level, "Level, to also emit a record");
    bind(or_eta, "newform oracle eta", [&] {
        OracleSpec spec;
        if (!name.empty()) {
            spec = load_oracle_spec(name);
        } else {
            if (eta_spec.empty()) throw UsageError("--spec or --name is required");
            std::stringstream ss(eta_spec);
            for (std::string t; std::getline(ss, t, ',');) {
                auto c = t.find(':');
                if (c == std::string::npos) throw UsageError("--spec entries are d:e");
                spec.eta.emplace_back(std::stol(t.substr(0, c)), std::stol(t.substr(c + 1)));
            }
            spec.label = "eta[" + eta_spec + "]";
            spec.weight = static_cast<int>(weight);
            spec.level = level;
        }
        auto q = eta_oracle(spec.eta, M);
        json coeffs = json::array();
        for (long n = 1; n <= M; ++n) coeffs.push_back(q.a[n].get_str());
        json out = {{"spec", spec.to_json()}, {"M", M}, {"coefficients", coeffs}};
        if (spec.weight > 0 && spec.level > 0) {
            auto rec = record_from_expansion(spec.label, spec.weight, spec.level, DirichletCharacter::trivial(spec.level), q, M,
                                             Provenance::EtaOracle);
            bool hecke = hecke_recursion_check(q, spec.weight, rec.character, M);
            out["hecke_recursion"] = hecke;
            out["records"] = {record_to_json(rec)};
            return std::pair<json, bool>{out, hecke};
        }
        return std::pair<json, bool>{out, true};
    });
    long prime = 0;
    auto* or_ell = nf_or->add_subcommand("elliptic", "a_p by point counting");
    or_ell->add_option("--curve", curve, "a1,a2,a3,a4,a6");
    or_ell->add_option("--p", prime, "Single prime (default: every good prime in [pmin, pmax])");
    bind(or_ell, "newform oracle elliptic", [&] {
        auto c = list_arg(curve);
        if (c.size() != 5) throw UsageError("--curve needs five coefficients");
        std::array<long, 5> e{c[0], c[1], c[2], c[3], c[4]};
        json out = json::array();
        std::vector<long> ps = prime ? std::vector<long>{prime} : std::vector<long>{};
        if (!prime)
            for (long p : primes_up_to(cfg.pmax))
                if (p >= cfg.pmin) ps.push_back(p);
        for (long p : ps) {
            try {
                out.push_back({{"p", p}, {"a_p", elliptic_oracle(e, p)}});
            } catch (const BadReduction&) {
                if (prime) throw;
                out.push_back({{"p", p}, {"bad_reduction", true}});
            }
        }
        return std::pair<json, bool>{{{"curve", c}, {"values", out}}, true};
    });

    // satake
    auto* sk = app.add_subcommand("satake", "Satake parameters and Euler factors");
    sk->require_subcommand(1);
    std::string lambda_s, omega_s = "1", field_s, file2;
    auto* sk_fe = sk->add_subcommand("from-eigen", "GL(2) Satake parameters from (lambda, omega)");
    sk_fe->add_option("--lambda", lambda_s, "Unitary eigenvalue, coordinates in the field basis")->required();
    sk_fe->add_option("--omega", omega_s, "Central character value");
    sk_fe->add_option("--field", field_s, "Defining polynomial, ascending coefficients (default Q)");
    sk_fe->add_option("--p", prime, "Prime")->required();
    bind(sk_fe, "satake from-eigen", [&] {
        auto k = field_arg(field_s);
        auto s = gl2_satake_from_eigen(base_element(element_arg(k, lambda_s)), base_element(element_arg(k, omega_s)), prime);
        auto e = eigen_from_satake(s);
        return std::pair<json, bool>{{{"satake", satake_to_json(s)},
                                      {"round_trip", {{"lambda", tower_to_json(e.lambda)}, {"omega", tower_to_json(e.lambda_top_p2)}}}},
                                     true};
    });
    // Parameters of r over the common field of the records in play.
    auto gl2_params = [&](const NewformRecord& r, long p, const std::vector<NewformRecord>& all) {
        auto cons = record_constituents(all);
        if (std::all_of(all.begin(), all.end(), [](const NewformRecord& x) { return x.is_rational() && x.character.order() <= 2; }))
            cons.clear();
        CommonField cf(cons);
        return gl2_satake_from_eigen(base_element(cf.embed(unitary_eigenvalue(r, p))),
                                     base_element(cf.embed(character_value(r.character, p))), p);
    };
    auto* sk_emb = sk->add_subcommand("embed", "Embed a pair of GL(2) parameters into GSp(4)");
    sk_emb->add_option("f", file, "Record f")->required();
    sk_emb->add_option("g", file2, "Record g")->required();
    sk_emb->add_option("--p", prime, "Prime")->required();
    bind(sk_emb, "satake embed", [&] {
        cfg.inputs = {file, file2};
        auto f = record_arg(file, cfg.pmax), g = record_arg(file2, cfg.pmax);
        auto s = embed_pair(gl2_params(f, prime, {f, g}), gl2_params(g, prime, {f, g}));
        auto e = eigen_from_satake(s);
        json out = {{"satake", satake_to_json(s)}, {"spin_factor", euler_to_json(gsp4_spin_factor(s))},
                    {"lambda", tower_to_json(e.lambda)}, {"lambda2_p2", tower_to_json(e.lambda_top_p2)}};
        if (e.lambda1_p2) out["lambda1_p2"] = tower_to_json(*e.lambda1_p2);
        return std::pair<json, bool>{out, true};
    });
    auto* sk_eu = sk->add_subcommand("euler", "Local Euler factor of a record (or the spin factor of a pair)");
    sk_eu->add_option("f", file, "Record")->required();
    sk_eu->add_option("--with", file2, "Second record: spin factor of the embedded pair");
    sk_eu->add_option("--p", prime, "Prime")->required();
    bind(sk_eu, "satake euler", [&] {
        cfg.inputs = {file};
        auto f = record_arg(file, cfg.pmax);
        if (file2.empty()) return std::pair<json, bool>{{{"euler_factor", euler_to_json(gl2_euler_factor(gl2_params(f, prime, {f})))}}, true};
        cfg.inputs.push_back(file2);
        auto g = record_arg(file2, cfg.pmax);
        auto s = embed_pair(gl2_params(f, prime, {f, g}), gl2_params(g, prime, {f, g}));
        auto spin = gsp4_spin_factor(s);
        auto prod = multiply(gl2_euler_factor(gl2_params(f, prime, {f, g})), gl2_euler_factor(gl2_params(g, prime, {f, g})));
        bool ok = factors_equal(spin, prod);
        return std::pair<json, bool>{{{"spin_factor", euler_to_json(spin)}, {"factorizes", ok}}, ok};
    });

    // yoshida
    auto* yo = app.add_subcommand("yoshida", "Yoshida lifts");
    yo->require_subcommand(1);
    auto* yo_chk = yo->add_subcommand("check", "Lifting conditions for (f, g)");
    yo_chk->add_option("f", file, "Record f")->required();
    yo_chk->add_option("g", file2, "Record g")->required();
    bind(yo_chk, "yoshida check", [&] {
        cfg.inputs = {file, file2};
        auto r = check_conditions(record_arg(file, cfg.pmax), record_arg(file2, cfg.pmax));
        return std::pair<json, bool>{r.to_json(), r.pass()};
    });
    auto* yo_b = yo->add_subcommand("build", "Build the lift eigenvalue system");
    yo_b->add_option("f", file, "Record f")->required();
    yo_b->add_option("g", file2, "Record g")->required();
    bind(yo_b, "yoshida build", [&] {
        cfg.inputs = {file, file2};
        auto lift = build_lift(record_arg(file, cfg.pmax), record_arg(file2, cfg.pmax));
        return std::pair<json, bool>{lift_to_json(lift), true};
    });
    long sym_p = 0;
    auto* yo_v = yo->add_subcommand("verify-spin", "Spin factorization at every prime in range");
    yo_v->add_option("f", file, "Record f")->required();
    yo_v->add_option("g", file2, "Record g")->required();
    yo_v->add_option("--symbolic", sym_p, "Also run the symbolic identity at this prime");
    bind(yo_v, "yoshida verify-spin", [&] {
        cfg.inputs = {file, file2};
        auto lift = build_lift(record_arg(file, cfg.pmax), record_arg(file2, cfg.pmax));
        json per = json::array();
        bool ok = true;
        for (const auto& [p, e] : lift.eigen) {
            if (p < cfg.pmin || p > cfg.pmax) continue;
            bool good = spin_factorization_check(lift, p);
            ok = ok && good;
            per.push_back({{"p", p}, {"ok", good}});
        }
        json out = {{"primes", per}};
        if (sym_p) {
            auto r = symbolic_identity_check(sym_p);
            ok = ok && r.ok();
            out["symbolic"] = {{"p", sym_p}, {"ok", r.ok()}, {"spin_poly", r.spin_poly}};
        }
        return std::pair<json, bool>{out, ok};
    });
    auto* yo_c = yo->add_subcommand("conjugate", "Conjugate a lift and compare with the lift of the conjugates");
    yo_c->add_option("f", file, "Record f")->required();
    yo_c->add_option("g", file2, "Record g")->required();
    yo_c->add_option("--sigma", sigma, "id, conj, index=N or roots=j0,j1,...");
    bind(yo_c, "yoshida conjugate", [&] {
        cfg.inputs = {file, file2};
        auto f = record_arg(file, cfg.pmax), g = record_arg(file2, cfg.pmax);
        auto lift = build_lift(f, g);
        GaloisContext ctx(lift_constituents(f, g).empty() ? record_constituents({f, g}) : lift_constituents(f, g));
        auto s = sigma_arg(sigma, ctx);
        auto c = conjugate_lift(lift, s);
        bool square = c == build_lift(conjugate_newform(f, s), conjugate_newform(g, s));
        return std::pair<json, bool>{{{"sigma", s.describe()}, {"commutes", square}, {"lift", lift_to_json(c)}}, square};
    });

    // periods
    auto* pe = app.add_subcommand("periods", "Period constants");
    pe->require_subcommand(1);
    int k = 0;
    std::string parity;
    auto* pe_r = pe->add_subcommand("ratio-check", "Sign and pi exponent of the ratio identity");
    pe_r->add_option("--k", k, "Weight k")->required()->check(CLI::Range(7, 1000));
    pe_r->add_option("--parity", parity, "odd or even (default: parity of k)")->check(CLI::IsMember({"odd", "even"}));
    bind(pe_r, "periods ratio-check", [&] {
        bool odd = parity.empty() ? k % 2 == 1 : parity == "odd";
        if (odd != (k % 2 == 1)) throw UsageError("--parity does not match --k");
        auto r = ratio_identity_check(k, odd);
        return std::pair<json, bool>{r.to_json(), r.ok()};
    });

    // lvalue
    auto* lv = app.add_subcommand("lvalue", "Numeric L-values");
    lv->require_subcommand(1);
    std::string spec_file, f_arg, h_arg, s_arg = "1", m_arg;
    double contour = 2.0;
    long n_max = 0;
    auto spec_from_args = [&]() {
        if (!spec_file.empty()) {
            cfg.inputs = {spec_file};
            std::ifstream in(spec_file);
            if (!in) throw SchemaError("cannot open " + spec_file);
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception& e) {
                throw SchemaError(spec_file + ": " + e.what());
            }
            return LSeriesSpec::from_json(j);
        }
        if (f_arg.empty()) throw UsageError("--spec or --f is required");
        cfg.inputs = {f_arg};
        auto f = record_arg(f_arg, std::max<long>(cfg.pmax, 5000));
        if (h_arg.empty()) return symmetric_square_spec(f);
        cfg.inputs.push_back(h_arg);
        return rankin_selberg_spec(f, record_arg(h_arg, std::max<long>(cfg.pmax, 5000)));
    };
    auto pctx = [&] {
        PrecisionContext c;
        c.digits = cfg.digits;
        c.contour = contour;
        c.n_max = n_max;
        return c;
    };
    auto add_spec_opts = [&](CLI::App* a) {
        a->set_help_flag("--help", "Print this help message and exit");
        a->add_option("--spec", spec_file, "LSeriesSpec JSON file");
        a->add_option("--f", f_arg, "Record (alone: symmetric square; with --h: Rankin-Selberg)");
        a->add_option("--h", h_arg, "Second record for Rankin-Selberg");
        a->add_option("--contour", contour, "Real part of the Mellin-Barnes contour");
        a->add_option("--nmax", n_max, "Truncation length (0: automatic)");
    };
    auto* lv_spec = lv->add_subcommand("spec", "Emit the L-series spec");
    add_spec_opts(lv_spec);
    bind(lv_spec, "lvalue spec", [&] { return std::pair<json, bool>{spec_from_args().to_json(), true}; });
    auto* lv_e = lv->add_subcommand("eval", "Evaluate Lambda(s) and L(s)");
    add_spec_opts(lv_e);
    lv_e->add_option("--s", s_arg, "re[,im]");
    bind(lv_e, "lvalue eval", [&] {
        LEvaluator ev(spec_from_args(), pctx());
        auto fit = ev.fit_root_number();
        PrecisionScope ps(cfg.digits + 15);
        auto v = ev.evaluate(complex_arg(s_arg));
        json out = v.to_json(static_cast<int>(cfg.digits));
        out["root_number"] = {{"re", format_real(fit.w.re, 12)}, {"im", format_real(fit.w.im, 12)},
                              {"margin", format_real(fit.margin, 3)}, {"snapped", fit.snapped}};
        return std::pair<json, bool>{out, true};
    });
    auto* lv_r = lv->add_subcommand("residual", "Functional-equation residuals at the sample points");
    add_spec_opts(lv_r);
    bind(lv_r, "lvalue residual", [&] {
        LEvaluator ev(spec_from_args(), pctx());
        auto fit = ev.fit_root_number();
        json per = json::array();
        bool ok = true;
        for (const auto& s : residual_sample_points()) {
            R r = ev.residual(s);
            bool good = r < R(1e-8);
            ok = ok && good;
            per.push_back({{"s", {format_real(s.re, 4), format_real(s.im, 4)}}, {"residual", format_real(r, 3)}, {"ok", good}});
        }
        return std::pair<json, bool>{{{"root_number", format_real(fit.w.re, 12)}, {"residuals", per}}, ok};
    });
    auto* lv_s = lv->add_subcommand("shimura", "Numeric C(m, g, h)");
    lv_s->set_help_flag("--help", "Print this help message and exit");
    lv_s->add_option("--m", m_arg, "Critical point m")->required();
    lv_s->add_option("--g", f_arg, "Record g (larger weight)")->required();
    lv_s->add_option("--h", h_arg, "Record h")->required();
    bind(lv_s, "lvalue shimura", [&] {
        cfg.inputs = {f_arg, h_arg};
        auto g = record_arg(f_arg, std::max<long>(cfg.pmax, 5000)), h = record_arg(h_arg, std::max<long>(cfg.pmax, 5000));
        Q m(m_arg);
        m.canonicalize();
        auto v = shimura_constant_eval(m, g, h, pctx());
        return std::pair<json, bool>{v.to_json(static_cast<int>(cfg.digits)), true};
    });
    std::string x_arg, eps_arg = "1e-25", tol_arg = "1e-6", height_arg = "100000000";
    auto* lv_d = lv->add_subcommand("detect", "Recognize an element of a number field");
    lv_d->set_help_flag("--help", "Print this help message and exit");
    lv_d->add_option("--x", x_arg, "re[,im]")->required();
    lv_d->add_option("--eps", eps_arg, "Uncertainty of x");
    lv_d->add_option("--field", field_s, "Defining polynomial, ascending coefficients (default Q)");
    lv_d->add_option("--H", height_arg, "Height bound");
    lv_d->add_option("--tol", tol_arg, "Tolerance");
    bind(lv_d, "lvalue detect", [&] {
        PrecisionScope ps(std::max(cfg.digits, 40u));
        auto kf = field_arg(field_s);
        try {
            auto a = detect_algebraic(complex_arg(x_arg), R(eps_arg), kf, Z(height_arg), R(tol_arg));
            return std::pair<json, bool>{{{"found", true}, {"element", a.to_string()}, {"coords", element_to_json(a)}}, true};
        } catch (const NotFound& e) {
            return std::pair<json, bool>{{{"found", false}, {"error", e.kind()}, {"message", e.what()}}, false};
        } catch (const AmbiguousMatch& e) {
            return std::pair<json, bool>{{{"found", false}, {"error", e.kind()}, {"message", e.what()}}, false};
        }
    });

    // selftest
    std::string suite = "fast";
    auto* st = app.add_subcommand("selftest", "Property and acceptance suites");
    st->add_option("level", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
    bind(st, "selftest", [&] {
        cfg.inputs = {suite};
        AcceptanceOptions opt;
        opt.seed = cfg.seed;
        opt.digits = cfg.digits;
        json out = json::array();
        bool ok = true;
        auto t0 = std::chrono::steady_clock::now();
        auto bad = check_bundled_data(data_dir());
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back({{"id", "bundled-data"}, {"pass", bad.empty()}, {"seconds", secs}, {"detail", {{"mismatched", bad}}}});
        ok = bad.empty();
        for (const auto& id : suite == "full" ? criterion_ids() : exact_criterion_ids()) {
            auto r = run_criterion(id, opt);
            ok = ok && r.pass();
            std::cerr << id << (r.pass() ? " pass " : " FAIL ") << r.seconds << "s\n";
            out.push_back(r.to_json());
        }
        return std::pair<json, bool>{{{"level", suite}, {"checks", out}}, ok};
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }
    if (cfg.digits < 15) {
        std::cerr << "--digits must be at least 15\n";
        return kUsage;
    }
    if (cfg.pmin > cfg.pmax || cfg.pmax < 2) {
        std::cerr << "prime range [" << cfg.pmin << ", " << cfg.pmax << "] is empty\n";
        return kUsage;
    }
    try {
        auto [result, ok] = action();
        emit(cfg, result, ok);
        return ok ? kOk : kVerify;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const SchemaError& e) {
        std::cerr << "SchemaError: " << e.what() << "\n";
        return kUsage;
    } catch (const PreconditionError& e) {
        std::cerr << "PreconditionError: " << e.what() << "\n";
        return kUsage;
    } catch (const RangeError& e) {
        std::cerr << "RangeError: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << e.kind() << ": " << e.what() << "\n";
        emit(cfg, {{"error", e.kind()}, {"message", e.what()}}, false);
        return kVerify;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    }
}
