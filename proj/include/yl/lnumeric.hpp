#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "yl/mp.hpp"
#include "yl/newforms.hpp"
#include "yl/periods.hpp"

namespace yl {

struct PrecisionContext {
    unsigned digits = 30;    // target significant digits
    unsigned guard = 15;     // extra working digits
    long n_max = 0;          // 0: chosen from the kernel decay
    double contour = 2.0;    // Re z of the Mellin-Barnes contour
    double tolerance = 0;    // PrecisionLoss above this absolute error on Lambda (0: unchecked)
    double split = 1.2;      // split parameter t for residuals and root-number fits
    unsigned quad_nodes = 0; // Gauss-Legendre nodes per panel for the calibration oracle (0: auto)
    nlohmann::json to_json() const;
};

// Gamma_C(s + mu) = 2 (2 pi)^{-(s+mu)} Gamma(s + mu), or Gamma_R(s + mu) = pi^{-(s+mu)/2} Gamma((s+mu)/2).
struct GammaShift {
    bool real = false;
    Q mu;
    bool operator==(const GammaShift& o) const { return real == o.real && mu == o.mu; }
};

struct LSeriesSpec {
    std::string label;
    int degree = 1;
    long conductor = 1;
    NumberField field;
    // Local polynomial coefficients c_0 = 1, ..., c_d in the analytic normalization.
    std::map<long, std::vector<AlgebraicNumber>> euler_factors;
    std::vector<GammaShift> gamma;
    std::optional<Cx> root_number;  // nullopt: fit
    bool self_dual = false;

    long max_prime() const { return euler_factors.empty() ? 0 : euler_factors.rbegin()->first; }
    nlohmann::json to_json() const;
    static LSeriesSpec from_json(const nlohmann::json& j);
};

// Exact a_1..a_N (index 0 unused).
std::vector<AlgebraicNumber> dirichlet_coefficients(const LSeriesSpec& spec, long n);
// Unramified degree-4 factor prod (1 - a_i b_j X) from unitary eigenvalues lambda / sqrt(p) and central values.
std::vector<AlgebraicNumber> rankin_selberg_local(const AlgebraicNumber& lf, const AlgebraicNumber& wf,
                                                  const AlgebraicNumber& lh, const AlgebraicNumber& wh, long p);

LSeriesSpec rankin_selberg_spec(const NewformRecord& f, const NewformRecord& h);
LSeriesSpec symmetric_square_spec(const NewformRecord& f);

struct LValue {
    Cx s;
    Cx lambda;
    Cx value;  // Lambda / (gamma(s) Q^{s/2})
    R error;   // absolute, on lambda
    R value_error;
    long terms = 0;
    nlohmann::json to_json(int digits) const;
};

struct RootNumberFit {
    Cx w;
    R margin;  // | |w| - 1 |
    bool snapped = false;
    Cx s0;
};

class LEvaluator {
public:
    LEvaluator(LSeriesSpec spec, PrecisionContext ctx);
    ~LEvaluator();
    LEvaluator(const LEvaluator&) = delete;
    LEvaluator& operator=(const LEvaluator&) = delete;

    const LSeriesSpec& spec() const { return spec_; }
    const PrecisionContext& context() const { return ctx_; }
    // Uses LSeriesSpec::root_number when set, else a fitted one (fitting on first use).
    LValue evaluate(const Cx& s, double t = 1.0);
    RootNumberFit fit_root_number();
    Cx root_number();
    // |Lambda(s) - w Lambda~(1-s)| / |Lambda(s)| with split parameter t != 1.
    R residual(const Cx& s);
    Cx gamma_factor(const Cx& s) const;  // gamma(s) Q^{s/2}

    struct Impl;

private:
    LSeriesSpec spec_;
    PrecisionContext ctx_;
    std::unique_ptr<Impl> impl_;
};

LValue evaluate(const LSeriesSpec& spec, const Cx& s, const PrecisionContext& ctx);
RootNumberFit fit_root_number(const LSeriesSpec& spec, const PrecisionContext& ctx);
std::vector<Cx> residual_sample_points();

// Volume-normalized norm by numeric integration over the standard fundamental domain
// (level 1); returns the norm and an error estimate.
std::pair<R, R> petersson_quadrature(const QExpansion& f, int k, const PrecisionContext& ctx);
// kappa(k, 1) = <f, f> / L(1, sym^2 f), calibrated once per weight and cached.
R petersson_calibration(int k, long level, const PrecisionContext& ctx);
void register_calibration_form(int k, const QExpansion& f);
// <c f, c f> through the symmetric square route.
R petersson_norm(const NewformRecord& rec, const PrecisionContext& ctx, const Q& scale = 1);

struct ShimuraValue {
    PeriodConstant constant;
    Cx lvalue;
    R petersson;
    Cx value;
    R error;
    nlohmann::json to_json(int digits) const;
};

ShimuraValue shimura_constant_eval(const Q& m, const NewformRecord& g, const NewformRecord& h, const PrecisionContext& ctx);
// Same, reusing an evaluator built for rankin_selberg_spec(g, h).
ShimuraValue shimura_constant_eval(const Q& m, const NewformRecord& g, const NewformRecord& h, LEvaluator& ev);

// Simplest element of the field (Q or quadratic) within 10 eps of x.
AlgebraicNumber detect_algebraic(const Cx& x, const R& eps, const NumberField& field, const Z& height_bound, const R& tol);

}  // namespace yl
