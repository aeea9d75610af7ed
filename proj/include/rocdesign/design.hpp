#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>

#include "rocdesign/normal.hpp"
#include "rocdesign/roc.hpp"
#include "rocdesign/variance.hpp"

namespace rocdesign {

/// Design inputs: two-sided significance level, target power, alternative
/// difference on the statistic's scale, optional fixed total size and unit
/// costs.
struct DesignParams {
    double alpha = 0.05;
    double power = 0.80;
    double delta1 = 0.0;
    std::optional<std::size_t> total_n;
    std::optional<std::pair<double, double>> costs; // (case cost, control cost)
    bool one_sided = false;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("alpha must lie in (0,1)");
        if (!(power > 0.0 && power < 1.0))
            throw std::invalid_argument("power must lie in (0,1)");
        if (!(alpha + (1.0 - power) < 1.0))
            throw std::invalid_argument("alpha and power are inconsistent");
        if (total_n && *total_n < 4)
            throw std::invalid_argument("total sample size must be at least 4");
        if (costs && !(costs->first > 0.0 && costs->second > 0.0))
            throw std::invalid_argument("invalid cost: unit costs must be positive");
    }

    double z_alpha() const {
        return normal_quantile(one_sided ? 1.0 - alpha : 1.0 - alpha / 2.0);
    }
    double z_beta() const { return normal_quantile(power); }
};

/// Optimal case:control sampling ratio sqrt(vx/vy).
inline double optimal_ratio(const VarianceComponents& comp) {
    if (!(comp.vy > 0.0)) throw std::runtime_error("control-side variance zero");
    return std::sqrt(comp.vx / comp.vy);
}

/// Cost-weighted optimal ratio sqrt(c2 vx / (c1 vy)); reduces to
/// optimal_ratio when the unit costs agree.
inline double cost_optimal_ratio(const VarianceComponents& comp, double case_cost,
                                 double control_cost) {
    if (!(case_cost > 0.0 && control_cost > 0.0))
        throw std::invalid_argument("invalid cost: unit costs must be positive");
    if (!(comp.vy > 0.0)) throw std::runtime_error("control-side variance zero");
    return std::sqrt(control_cost * comp.vx / (case_cost * comp.vy));
}

/// Ratios are carried at the 0.01 precision at which a trial plan reports
/// them; recalculated allocations use this planning value.
inline double planning_ratio(double r) { return std::round(r * 100.0) / 100.0; }

struct RequiredSizes {
    std::size_t cases = 0;
    std::size_t controls = 0;
    std::size_t total = 0;
    double cases_raw = 0.0; // unrounded case count from the size formula
    double total_raw = 0.0;
};

/// Required sizes at ratio r: the case formula
/// m = (z_{a/2} + z_b)^2 (vx + r vy) / Delta1^2, the total it implies rounded
/// up, and the total split by the round-to-nearest case allocation.
inline RequiredSizes required_sizes(const VarianceComponents& comp, double r,
                                    const DesignParams& params) {
    params.validate();
    if (params.delta1 == 0.0) throw std::invalid_argument("no alternative specified");
    if (!(r > 0.0)) throw std::invalid_argument("ratio must be positive");
    const double z = params.z_alpha() + params.z_beta();
    RequiredSizes out;
    out.cases_raw = z * z * (comp.vx + r * comp.vy) / (params.delta1 * params.delta1);
    out.total_raw = out.cases_raw * (1.0 + r) / r;
    out.total = static_cast<std::size_t>(std::ceil(out.total_raw - 1e-9));
    out.cases = static_cast<std::size_t>(
        std::llround(static_cast<double>(out.total) * r / (1.0 + r)));
    out.controls = out.total - out.cases;
    return out;
}

/// Power of the two-sided level-alpha test at total size N and ratio r.
inline double power_at(const VarianceComponents& comp, double r, std::size_t total_n,
                       const DesignParams& params) {
    params.validate();
    if (total_n < 2) throw std::invalid_argument("total sample size must be at least 2");
    if (!(r > 0.0)) throw std::invalid_argument("ratio must be positive");
    const double scale = comp.vx + comp.vy * r;
    if (!(scale > 0.0)) throw std::runtime_error("variance zero");
    const double arg = std::fabs(params.delta1) *
                           std::sqrt(static_cast<double>(total_n) * r /
                                     ((1.0 + r) * scale)) -
                       params.z_alpha();
    return normal_cdf(arg);
}

// ---------------------------------------------------------------------------
// Two-stage adaptive procedure
// ---------------------------------------------------------------------------

/// Which statistic drives estimation and the final test.
struct EstimatorSpec {
    enum class Kind { DeLong, Delta };
    Kind kind = Kind::DeLong;
    WeightMeasure weight = WeightMeasure::full_auc();
    SmoothingSpec smoothing = {};

    static EstimatorSpec delong() { return {}; }
    static EstimatorSpec delta(const WeightMeasure& w, const SmoothingSpec& s = {}) {
        return {Kind::Delta, w, s};
    }

    double difference(const PairedSample& sample) const {
        return kind == Kind::DeLong ? delong_difference(sample)
                                    : delta_statistic(sample, weight);
    }

    VarianceComponents components(const PairedSample& sample) const {
        return kind == Kind::DeLong ? delong_components(sample)
                                    : delta_components(sample, weight, smoothing);
    }
};

enum class TrialPhase { Planned, Stage1Accruing, Recalculated, Complete };

inline const char* phase_name(TrialPhase p) {
    switch (p) {
        case TrialPhase::Planned: return "planned";
        case TrialPhase::Stage1Accruing: return "stage1-accruing";
        case TrialPhase::Recalculated: return "recalculated";
        case TrialPhase::Complete: return "complete";
    }
    return "?";
}

/// Progression of a two-stage trial: assumed components and initial plan,
/// stage-1 accruals, re-estimated components/ratio, second-stage targets.
struct TwoStageState {
    TrialPhase phase = TrialPhase::Planned;
    EstimatorSpec estimator;
    DesignParams params;
    std::size_t total_n = 0;

    double vx0 = 0.0, vy0 = 0.0, r0 = 0.0;
    std::size_t m0 = 0, n0 = 0;

    std::size_t m1 = 0, n1 = 0;
    double vx1 = 0.0, vy1 = 0.0, r1 = 0.0;
    std::size_t m2 = 0, n2 = 0;

    /// m1 + M2 + n1 + N2 = N once recalculated.
    bool conserves_total() const {
        return phase < TrialPhase::Recalculated || m1 + m2 + n1 + n2 == total_n;
    }
};

/// Second-stage recruitment targets (M2, N2): case target rounds to nearest,
/// controls take the remainder, negatives clamp to zero with the budget
/// reallocated to the other arm.
inline std::pair<std::size_t, std::size_t> second_stage_sizes(std::size_t total_n, double r,
                                                              std::size_t m1, std::size_t n1) {
    if (m1 + n1 > total_n) throw std::invalid_argument("stage one exceeds budget");
    if (!(r > 0.0)) throw std::invalid_argument("ratio must be positive");
    const double cases_target = static_cast<double>(total_n) * r / (1.0 + r);
    long long m2 = std::llround(cases_target) - static_cast<long long>(m1);
    long long n2 = static_cast<long long>(total_n) - std::llround(cases_target) -
                   static_cast<long long>(n1);
    const long long rest = static_cast<long long>(total_n - m1 - n1);
    if (m2 < 0) {
        m2 = 0;
        n2 = rest;
    } else if (n2 < 0) {
        n2 = 0;
        m2 = rest;
    }
    return {static_cast<std::size_t>(m2), static_cast<std::size_t>(n2)};
}

/// Step 1-2: initial optimal ratio from assumed model components, then the
/// size formula. With a fixed total the control arm takes the remainder;
/// otherwise the total comes from the size formula itself.
inline TwoStageState plan_initial(const VarianceComponents& assumed, const DesignParams& params,
                                  const EstimatorSpec& estimator = {}) {
    params.validate();
    TwoStageState st;
    st.phase = TrialPhase::Planned;
    st.estimator = estimator;
    st.params = params;
    st.vx0 = assumed.vx;
    st.vy0 = assumed.vy;
    st.r0 = planning_ratio(optimal_ratio(assumed));
    if (params.total_n) {
        st.total_n = *params.total_n;
        const auto sz = required_sizes(assumed, st.r0, params);
        st.m0 = std::min<std::size_t>(static_cast<std::size_t>(std::ceil(sz.cases_raw)),
                                      st.total_n);
        st.n0 = st.total_n - st.m0;
    } else {
        const auto sz = required_sizes(assumed, st.r0, params);
        st.total_n = sz.total;
        st.m0 = sz.cases;
        st.n0 = sz.controls;
    }
    return st;
}

/// Steps 3-4: re-estimate the variance components from stage-1 data,
/// recalculate the ratio, and rebalance the remaining recruitment.
inline TwoStageState two_stage_update(const TwoStageState& state, const PairedSample& stage1) {
    if (state.phase == TrialPhase::Complete)
        throw std::runtime_error("trial already complete");
    if (state.phase == TrialPhase::Recalculated)
        throw std::runtime_error("trial already recalculated");
    if (state.total_n == 0) throw std::invalid_argument("state carries no total sample size");

    TwoStageState st = state;
    st.m1 = stage1.case_count();
    st.n1 = stage1.control_count();
    if (st.m1 + st.n1 > st.total_n) throw std::invalid_argument("stage one exceeds budget");

    const auto comp = state.estimator.components(stage1);
    st.vx1 = comp.vx;
    st.vy1 = comp.vy;
    st.r1 = planning_ratio(optimal_ratio(comp));
    const auto sizes = second_stage_sizes(st.total_n, st.r1, st.m1, st.n1);
    st.m2 = sizes.first;
    st.n2 = sizes.second;
    st.phase = TrialPhase::Recalculated;
    return st;
}

/// Update driven by already-estimated stage-1 components (pilot summaries).
inline TwoStageState two_stage_update(const TwoStageState& state,
                                      const VarianceComponents& stage1_comp) {
    if (state.phase == TrialPhase::Complete)
        throw std::runtime_error("trial already complete");
    if (state.phase == TrialPhase::Recalculated)
        throw std::runtime_error("trial already recalculated");
    if (state.total_n == 0) throw std::invalid_argument("state carries no total sample size");

    TwoStageState st = state;
    st.m1 = stage1_comp.m;
    st.n1 = stage1_comp.n;
    if (st.m1 + st.n1 > st.total_n) throw std::invalid_argument("stage one exceeds budget");
    st.vx1 = stage1_comp.vx;
    st.vy1 = stage1_comp.vy;
    st.r1 = planning_ratio(optimal_ratio(stage1_comp));
    const auto sizes = second_stage_sizes(st.total_n, st.r1, st.m1, st.n1);
    st.m2 = sizes.first;
    st.n2 = sizes.second;
    st.phase = TrialPhase::Recalculated;
    return st;
}

struct TestResult {
    bool reject = false;
    double z = 0.0;
    double p = 1.0;
    double delta = 0.0;
    bool degenerate = false;
};

/// End-of-trial Z test on the pooled data. A degenerate variance yields a
/// flagged non-rejection rather than an error.
inline TestResult final_test(const PairedSample& sample, const EstimatorSpec& estimator,
                             double alpha, bool one_sided = false) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (sample.case_count() < 2 || sample.control_count() < 2)
        throw std::invalid_argument("insufficient data for variance (need m >= 2 and n >= 2)");

    TestResult res;
    res.delta = estimator.difference(sample);
    const auto comp = estimator.components(sample);
    const double var = comp.statistic_variance();
    if (!(var > 0.0) || !std::isfinite(var)) {
        res.degenerate = true;
        return res;
    }
    res.z = res.delta / std::sqrt(var);
    if (one_sided) {
        res.p = 1.0 - normal_cdf(res.z);
        res.reject = res.z >= normal_quantile(1.0 - alpha);
    } else {
        res.p = 2.0 * (1.0 - normal_cdf(std::fabs(res.z)));
        res.reject = std::fabs(res.z) >= normal_quantile(1.0 - alpha / 2.0);
    }
    return res;
}

} // namespace rocdesign
