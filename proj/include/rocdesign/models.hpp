#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "rocdesign/normal.hpp"
#include "rocdesign/paired_sample.hpp"
#include "rocdesign/rng.hpp"
#include "rocdesign/variance.hpp"

namespace rocdesign {

enum class ModelFamily { Binormal, Bilognormal, BiExponential };

inline const char* family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::Binormal: return "binormal";
        case ModelFamily::Bilognormal: return "bilognormal";
        case ModelFamily::BiExponential: return "biexponential";
    }
    return "?";
}

/// Generative model for paired marker values. Normal families have unit
/// variances, case means (mu1, mu2), control means 0, and correlation rho in
/// both arms; the exponential family is the Gumbel/FGM bivariate exponential
/// with survival H1 H2 [1 + 4 rho (1-H1)(1-H2)] and |rho| <= 0.25.
struct ModelSpec {
    ModelFamily family = ModelFamily::Binormal;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double case_rate1 = 1.0;
    double case_rate2 = 1.0;
    double control_rate1 = 1.0;
    double control_rate2 = 1.0;
    double rho = 0.0;

    static ModelSpec binormal(double mu1, double mu2, double rho) {
        ModelSpec s;
        s.family = ModelFamily::Binormal;
        s.mu1 = mu1;
        s.mu2 = mu2;
        s.rho = rho;
        s.validate();
        return s;
    }

    static ModelSpec bilognormal(double mu1, double mu2, double rho) {
        ModelSpec s = binormal(mu1, mu2, rho);
        s.family = ModelFamily::Bilognormal;
        return s;
    }

    static ModelSpec biexponential(double control_rate1, double control_rate2, double rho,
                                   double case_rate1 = 1.0, double case_rate2 = 1.0) {
        ModelSpec s;
        s.family = ModelFamily::BiExponential;
        s.control_rate1 = control_rate1;
        s.control_rate2 = control_rate2;
        s.case_rate1 = case_rate1;
        s.case_rate2 = case_rate2;
        s.rho = rho;
        s.validate();
        return s;
    }

    void validate() const {
        if (family == ModelFamily::BiExponential) {
            if (std::fabs(rho) > 0.25)
                throw std::invalid_argument("FGM exponential requires |rho| <= 0.25");
            if (!(case_rate1 > 0.0 && case_rate2 > 0.0 && control_rate1 > 0.0 &&
                  control_rate2 > 0.0))
                throw std::invalid_argument("exponential rates must be positive");
        } else {
            if (!(rho > -1.0 && rho < 1.0))
                throw std::invalid_argument("normal-family correlation must lie in (-1,1)");
        }
    }
};

/// Per-marker target summary values used for calibration: AUCs in (0,1) or
/// unnormalized partial areas in (0, u1-u0).
struct TargetSummary {
    WeightMeasure weight = WeightMeasure::full_auc();
    double value1 = 0.0;
    double value2 = 0.0;

    static TargetSummary auc(double a1, double a2) {
        TargetSummary t;
        t.weight = WeightMeasure::full_auc();
        t.value1 = a1;
        t.value2 = a2;
        t.validate();
        return t;
    }

    static TargetSummary pauc(double u0, double u1, double p1, double p2) {
        TargetSummary t;
        t.weight = WeightMeasure::partial(u0, u1);
        t.value1 = p1;
        t.value2 = p2;
        t.validate();
        return t;
    }

    void validate() const {
        const double hi =
            weight.kind() == WeightMeasure::Kind::FullAuc ? 1.0 : weight.u1() - weight.u0();
        if (!(value1 > 0.0 && value1 < hi && value2 > 0.0 && value2 < hi))
            throw std::invalid_argument("calibration infeasible: target outside attainable range");
    }
};

// ---------------------------------------------------------------------------
// Closed-form ROC quantities per family
// ---------------------------------------------------------------------------

namespace detail {

inline double quantile_ext(double u) {
    if (u <= 0.0) return -std::numeric_limits<double>::infinity();
    if (u >= 1.0) return std::numeric_limits<double>::infinity();
    return normal_quantile(u);
}

struct TheoreticalRoc {
    ModelSpec spec;

    bool normal_family() const { return spec.family != ModelFamily::BiExponential; }

    double mu(int marker) const { return marker == 1 ? spec.mu1 : spec.mu2; }

    // exponent of the exponential-family ROC R(u) = u^c
    double c(int marker) const {
        return marker == 1 ? spec.case_rate1 / spec.control_rate1
                           : spec.case_rate2 / spec.control_rate2;
    }

    double roc(int marker, double u) const {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return 1.0;
        if (normal_family()) return normal_cdf(mu(marker) + normal_quantile(u));
        return std::pow(u, c(marker));
    }

    double roc_derivative(int marker, double u) const {
        if (normal_family()) {
            const double z = normal_quantile(u);
            return std::exp(-0.5 * mu(marker) * mu(marker) - mu(marker) * z);
        }
        const double cc = c(marker);
        return cc * std::pow(u, cc - 1.0);
    }

    // joint case survival at the control quantiles, S_d(q1(s), q2(t))
    double joint_case_survival(double s, double t) const {
        if (s <= 0.0 || t <= 0.0) return 0.0;
        if (normal_family()) {
            if (s >= 1.0) return roc(2, t);
            if (t >= 1.0) return roc(1, s);
            return bivariate_normal_cdf(spec.mu1 + normal_quantile(s),
                                        spec.mu2 + normal_quantile(t), spec.rho);
        }
        const double s1 = roc(1, s);
        const double s2 = roc(2, t);
        return s1 * s2 * (1.0 + 4.0 * spec.rho * (1.0 - s1) * (1.0 - s2));
    }

    // joint control survival at the control quantiles, S_dbar(q1(s), q2(t))
    double joint_control_survival(double s, double t) const {
        if (s <= 0.0 || t <= 0.0) return 0.0;
        if (normal_family()) {
            if (s >= 1.0) return t;
            if (t >= 1.0) return s;
            return bivariate_normal_cdf(normal_quantile(s), normal_quantile(t), spec.rho);
        }
        return s * t * (1.0 + 4.0 * spec.rho * (1.0 - s) * (1.0 - t));
    }
};

template <class F>
double integrate_or_throw(const F& f, double a, double b, const char* what) {
    try {
        boost::math::quadrature::tanh_sinh<double> integrator(12);
        return integrator.integrate(f, a, b, 1e-9);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("integration failed (") + what + "): " + e.what());
    }
}

} // namespace detail

/// Normalized theoretical weighted AUC of one marker under the model.
inline double theoretical_wauc(const ModelSpec& spec, const WeightMeasure& weight, int marker) {
    spec.validate();
    require_marker(marker);
    detail::TheoreticalRoc roc{spec};
    if (weight.kind() == WeightMeasure::Kind::PointMass) return roc.roc(marker, weight.u0());
    const double u0 = weight.u0();
    const double u1 = weight.u1();
    if (roc.normal_family()) {
        // int_{u0}^{u1} Phi(mu + Phi^{-1}(u)) du = Phi2(z(u1), mu/sqrt2; -1/sqrt2)
        //                                        - Phi2(z(u0), mu/sqrt2; -1/sqrt2).
        static constexpr double inv_sqrt2 = 0.7071067811865475244;
        const double b = roc.mu(marker) * inv_sqrt2;
        const double hi = bivariate_normal_cdf(detail::quantile_ext(u1), b, -inv_sqrt2);
        const double lo = bivariate_normal_cdf(detail::quantile_ext(u0), b, -inv_sqrt2);
        return (hi - lo) / (u1 - u0);
    }
    const double c = roc.c(marker);
    return (std::pow(u1, 1.0 + c) - std::pow(u0, 1.0 + c)) / (1.0 + c) / (u1 - u0);
}

/// Unnormalized weighted area (the paper-style 0.30-over-(0,0.6) pAUC scale).
inline double theoretical_wauc_unnormalized(const ModelSpec& spec, const WeightMeasure& weight,
                                            int marker) {
    return theoretical_wauc(spec, weight, marker) * weight.width();
}

/// Normalized difference of theoretical weighted AUCs (marker 1 - marker 2).
inline double theoretical_delta(const ModelSpec& spec, const WeightMeasure& weight) {
    return theoretical_wauc(spec, weight, 1) - theoretical_wauc(spec, weight, 2);
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

inline double binormal_mean_for_auc(double auc) {
    if (!(auc > 0.0 && auc < 1.0))
        throw std::invalid_argument("calibration infeasible: AUC target outside (0,1)");
    static constexpr double sqrt2 = 1.4142135623730950488;
    return sqrt2 * normal_quantile(auc);
}

namespace detail {

template <class F>
double solve_monotone(const F& f, double lo, double hi, const char* what) {
    auto tol = [](double a, double b) { return std::fabs(b - a) < 1e-13; };
    std::uintmax_t iters = 200;
    try {
        auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
        return 0.5 * (r.first + r.second);
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("calibration infeasible: ") + what);
    }
}

} // namespace detail

/// Case mean hitting an unnormalized pAUC target over (u0,u1); tolerance
/// 1e-10 on the target value.
inline double binormal_mean_for_pauc(double target, double u0, double u1) {
    const auto w = WeightMeasure::partial(u0, u1);
    if (!(target > 0.0 && target < w.width()))
        throw std::invalid_argument("calibration infeasible: pAUC target outside (0, u1-u0)");
    auto f = [&](double mu) {
        return theoretical_wauc_unnormalized(ModelSpec::binormal(mu, 0.0, 0.0), w, 1) - target;
    };
    const double mu = detail::solve_monotone(f, -15.0, 15.0, "pAUC target unreachable");
    if (std::fabs(f(mu)) > 1e-10) throw std::runtime_error("calibration infeasible: no convergence");
    return mu;
}

/// (mu1, mu2) for a binormal model hitting the target summary values.
inline std::pair<double, double> calibrate_binormal(const TargetSummary& target) {
    target.validate();
    if (target.weight.kind() == WeightMeasure::Kind::FullAuc)
        return {binormal_mean_for_auc(target.value1), binormal_mean_for_auc(target.value2)};
    if (target.weight.kind() == WeightMeasure::Kind::Partial)
        return {binormal_mean_for_pauc(target.value1, target.weight.u0(), target.weight.u1()),
                binormal_mean_for_pauc(target.value2, target.weight.u0(), target.weight.u1())};
    throw std::invalid_argument("calibration targets must be AUC or pAUC values");
}

inline double biexponential_rate_for_auc(double auc, double case_rate = 1.0) {
    if (!(auc > 0.0 && auc < 1.0))
        throw std::invalid_argument("calibration infeasible: AUC target outside (0,1)");
    // P(X > Y) = beta / (case_rate + beta) for X ~ Exp(case_rate), Y ~ Exp(beta)
    return case_rate * auc / (1.0 - auc);
}

inline double biexponential_rate_for_pauc(double target, double u0, double u1,
                                          double case_rate = 1.0) {
    const auto w = WeightMeasure::partial(u0, u1);
    if (!(target > 0.0 && target < w.width()))
        throw std::invalid_argument("calibration infeasible: pAUC target outside (0, u1-u0)");
    // Unnormalized pAUC of R(u) = u^c is (u1^{1+c} - u0^{1+c})/(1+c), strictly
    // decreasing in c = case_rate / beta.
    auto area = [&](double c) {
        return (std::pow(u1, 1.0 + c) - std::pow(u0, 1.0 + c)) / (1.0 + c) - target;
    };
    const double c = detail::solve_monotone(area, 1e-12, 120.0, "pAUC target unreachable");
    if (std::fabs(area(c)) > 1e-10)
        throw std::runtime_error("calibration infeasible: no convergence");
    return case_rate / c;
}

/// (beta_12, beta_22) control rates with unit case rates.
inline std::pair<double, double> calibrate_biexponential(const TargetSummary& target) {
    target.validate();
    if (target.weight.kind() == WeightMeasure::Kind::FullAuc)
        return {biexponential_rate_for_auc(target.value1),
                biexponential_rate_for_auc(target.value2)};
    if (target.weight.kind() == WeightMeasure::Kind::Partial)
        return {biexponential_rate_for_pauc(target.value1, target.weight.u0(), target.weight.u1()),
                biexponential_rate_for_pauc(target.value2, target.weight.u0(), target.weight.u1())};
    throw std::invalid_argument("calibration targets must be AUC or pAUC values");
}

/// Model of the requested family calibrated to the target summary.
inline ModelSpec calibrated_model(ModelFamily family, const TargetSummary& target, double rho) {
    if (family == ModelFamily::BiExponential) {
        const auto rates = calibrate_biexponential(target);
        return ModelSpec::biexponential(rates.first, rates.second, rho);
    }
    const auto means = calibrate_binormal(target);
    return family == ModelFamily::Binormal
               ? ModelSpec::binormal(means.first, means.second, rho)
               : ModelSpec::bilognormal(means.first, means.second, rho);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace detail {

inline MarkerPair draw_normal_pair(RandomStream& rng, double mu1, double mu2, double rho) {
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    return {mu1 + z1, mu2 + rho * z1 + std::sqrt(1.0 - rho * rho) * z2};
}

/// FGM copula conditional draw: given u and a second uniform w, solve
/// dC/du = v [1 + theta (1-v)(1-2u)] = w for v, taking the root inside [0,1].
inline double fgm_conditional(double u, double w, double theta) {
    const double a = theta * (1.0 - 2.0 * u);
    if (std::fabs(a) < 1e-10) return w;
    const double b = 1.0 + a;
    double v = (b - std::sqrt(b * b - 4.0 * a * w)) / (2.0 * a);
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    return v;
}

inline MarkerPair draw_fgm_exponential_pair(RandomStream& rng, double rate1, double rate2,
                                            double rho) {
    const double u = rng.uniform();
    const double v = fgm_conditional(u, rng.uniform(), 4.0 * rho);
    return {-std::log1p(-u) / rate1, -std::log1p(-v) / rate2};
}

} // namespace detail

/// Draw m case pairs and n control pairs i.i.d. from the model.
inline PairedSample sample_model(const ModelSpec& spec, std::size_t m, std::size_t n,
                                 RandomStream& rng) {
    spec.validate();
    PairedSample s;
    s.cases.reserve(m);
    s.controls.reserve(n);
    switch (spec.family) {
        case ModelFamily::Binormal:
            for (std::size_t i = 0; i < m; ++i)
                s.cases.push_back(detail::draw_normal_pair(rng, spec.mu1, spec.mu2, spec.rho));
            for (std::size_t j = 0; j < n; ++j)
                s.controls.push_back(detail::draw_normal_pair(rng, 0.0, 0.0, spec.rho));
            break;
        case ModelFamily::Bilognormal:
            for (std::size_t i = 0; i < m; ++i) {
                auto p = detail::draw_normal_pair(rng, spec.mu1, spec.mu2, spec.rho);
                s.cases.push_back({std::exp(p.m1), std::exp(p.m2)});
            }
            for (std::size_t j = 0; j < n; ++j) {
                auto p = detail::draw_normal_pair(rng, 0.0, 0.0, spec.rho);
                s.controls.push_back({std::exp(p.m1), std::exp(p.m2)});
            }
            break;
        case ModelFamily::BiExponential:
            for (std::size_t i = 0; i < m; ++i)
                s.cases.push_back(detail::draw_fgm_exponential_pair(rng, spec.case_rate1,
                                                                    spec.case_rate2, spec.rho));
            for (std::size_t j = 0; j < n; ++j)
                s.controls.push_back(detail::draw_fgm_exponential_pair(
                    rng, spec.control_rate1, spec.control_rate2, spec.rho));
            break;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Theoretical variance components
// ---------------------------------------------------------------------------

/// Large-sample variance components of the weighted-AUC difference statistic
/// under the model, from the var(w_i)/var(v_j) integral expressions. All
/// quadratures are adaptive with absolute error far below 1e-8.
inline VarianceComponents theoretical_components(const ModelSpec& spec,
                                                 const WeightMeasure& weight) {
    spec.validate();
    detail::TheoreticalRoc roc{spec};
    VarianceComponents out;
    out.m = out.n = 0;

    if (weight.kind() == WeightMeasure::Kind::PointMass) {
        const double u0 = weight.u0();
        const double r1 = roc.roc(1, u0);
        const double r2 = roc.roc(2, u0);
        const double a = roc.joint_case_survival(u0, u0) - r1 * r2;
        const double rp1 = roc.roc_derivative(1, u0);
        const double rp2 = roc.roc_derivative(2, u0);
        const double b = rp1 * rp2 * (roc.joint_control_survival(u0, u0) - u0 * u0);
        out.vx = r1 * (1.0 - r1) + r2 * (1.0 - r2) - 2.0 * a;
        out.vy = (rp1 * rp1 + rp2 * rp2) * u0 * (1.0 - u0) - 2.0 * b;
        if (out.vx < 0.0 || out.vy < 0.0) {
            out.clamped = true;
            out.vx = std::max(out.vx, 0.0);
            out.vy = std::max(out.vy, 0.0);
        }
        return out;
    }

    const double u0 = weight.u0();
    const double u1 = weight.u1();
    const double width = u1 - u0;
    const double w2 = width * width;

    // Case side.
    double vx = 0.0;
    for (int l = 1; l <= 2; ++l) {
        const double mean =
            detail::integrate_or_throw([&](double s) { return roc.roc(l, s); }, u0, u1, "R mean");
        const double minterm = detail::integrate_or_throw(
            [&](double s) { return roc.roc(l, s) * (u1 - s); }, u0, u1, "R min term");
        vx += (2.0 * minterm - mean * mean) / w2;
    }
    const double cross_x = detail::integrate_or_throw(
        [&](double t) {
            return detail::integrate_or_throw(
                [&](double s) {
                    return roc.joint_case_survival(s, t) - roc.roc(1, s) * roc.roc(2, t);
                },
                u0, u1, "case cross inner");
        },
        u0, u1, "case cross outer");
    vx -= 2.0 * cross_x / w2;

    // Control side.
    double vy = 0.0;
    for (int l = 1; l <= 2; ++l) {
        const double mean_s = detail::integrate_or_throw(
            [&](double s) { return roc.roc_derivative(l, s) * s; }, u0, u1, "R' s mean");
        const double minterm = detail::integrate_or_throw(
            [&](double t) {
                const double inner = detail::integrate_or_throw(
                    [&](double s) { return roc.roc_derivative(l, s) * s; }, u0, t,
                    "R' min inner");
                return roc.roc_derivative(l, t) * inner;
            },
            u0, u1, "R' min outer");
        vy += (2.0 * minterm - mean_s * mean_s) / w2;
    }
    const double cross_y = detail::integrate_or_throw(
        [&](double t) {
            const double rpt = roc.roc_derivative(2, t);
            return rpt * detail::integrate_or_throw(
                             [&](double s) {
                                 return roc.roc_derivative(1, s) *
                                        (roc.joint_control_survival(s, t) - s * t);
                             },
                             u0, u1, "control cross inner");
        },
        u0, u1, "control cross outer");
    vy -= 2.0 * cross_y / w2;

    out.vx = vx;
    out.vy = vy;
    if (out.vx < 0.0 || out.vy < 0.0) {
        out.clamped = true;
        out.vx = std::max(out.vx, 0.0);
        out.vy = std::max(out.vy, 0.0);
    }
    return out;
}

/// One row of a correlation sweep: rho and the optimal ratio there.
struct SweepPoint {
    double rho = 0.0;
    double ratio = 0.0;
    double vx = 0.0;
    double vy = 0.0;
};

/// Optimal-ratio sweep over a correlation grid for the model family with the
/// other parameters held fixed.
inline std::vector<SweepPoint> ratio_sweep(const ModelSpec& prototype,
                                           const WeightMeasure& weight,
                                           const std::vector<double>& rhos) {
    std::vector<SweepPoint> out;
    out.reserve(rhos.size());
    for (double rho : rhos) {
        ModelSpec s = prototype;
        s.rho = rho;
        s.validate();
        const auto comp = theoretical_components(s, weight);
        SweepPoint p;
        p.rho = rho;
        p.vx = comp.vx;
        p.vy = comp.vy;
        if (!(comp.vy > 0.0)) throw std::runtime_error("control-side variance zero in sweep");
        p.ratio = std::sqrt(comp.vx / comp.vy);
        out.push_back(p);
    }
    return out;
}

} // namespace rocdesign
