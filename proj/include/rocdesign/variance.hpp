#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rocdesign/normal.hpp"
#include "rocdesign/roc.hpp"

namespace rocdesign {

/// Case-side and control-side variance components: the statistic's large
/// sample variance is vx/m + vy/n.
struct VarianceComponents {
    double vx = 0.0;
    double vy = 0.0;
    std::size_t m = 0;
    std::size_t n = 0;
    bool clamped = false; // set when numerical cancellation was clamped at 0

    double statistic_variance() const {
        return vx / static_cast<double>(m) + vy / static_cast<double>(n);
    }
};

/// Gaussian kernel smoothing for the ROC-derivative estimate. bandwidth 0
/// selects Silverman's rule-of-thumb per arm per marker.
struct SmoothingSpec {
    double bandwidth = 0.0;

    static SmoothingSpec silverman() { return {}; }
    static SmoothingSpec fixed(double h) {
        if (!(h > 0.0)) throw std::invalid_argument("bandwidth must be positive");
        return {h};
    }
};

namespace detail {

inline double interp_quantile(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    const double h = (static_cast<double>(n) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= n) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

inline double silverman_bandwidth(const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    double mean = 0.0;
    for (double v : sorted) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : sorted) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double iqr = interp_quantile(sorted, 0.75) - interp_quantile(sorted, 0.25);
    double spread = (iqr > 0.0) ? std::min(sd, iqr / 1.349) : sd;
    if (!(spread > 0.0)) throw std::runtime_error("degenerate distribution");
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

inline double gaussian_kde(const std::vector<double>& values, double h, double x) {
    double s = 0.0;
    for (double v : values) s += normal_pdf((x - v) / h);
    return s / (static_cast<double>(values.size()) * h);
}

inline double sample_variance(const std::vector<double>& v, double divisor) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / divisor;
}

inline void require_variance_counts(const PairedSample& sample) {
    if (sample.case_count() < 2 || sample.control_count() < 2)
        throw std::invalid_argument("insufficient data for variance (need m >= 2 and n >= 2)");
}

inline void require_nondegenerate(const MarkerView& v) {
    if (v.cases.front() == v.cases.back() || v.controls.front() == v.controls.back())
        throw std::runtime_error("degenerate distribution");
}

/// Per-piece ROC derivative estimates: ratio of case/control kernel density
/// estimates at the piece threshold. Only pieces with W-mass are evaluated.
inline std::vector<double> roc_derivative_by_piece(const MarkerView& v, const PieceTable& t,
                                                   const SmoothingSpec& smoothing) {
    require_nondegenerate(v);
    const double h_case = smoothing.bandwidth > 0.0 ? smoothing.bandwidth
                                                    : silverman_bandwidth(v.cases);
    const double h_ctrl = smoothing.bandwidth > 0.0 ? smoothing.bandwidth
                                                    : silverman_bandwidth(v.controls);
    std::vector<double> rp(t.thr.size(), 0.0);
    for (std::size_t p = 0; p < t.thr.size(); ++p) {
        if (t.wmass[p] == 0.0 && t.uint_[p] == 0.0) continue;
        const double fc = gaussian_kde(v.controls, h_ctrl, t.thr[p]);
        if (fc < 1e-12) throw std::runtime_error("derivative estimate unstable");
        rp[p] = gaussian_kde(v.cases, h_case, t.thr[p]) / fc;
    }
    return rp;
}

} // namespace detail

/// DeLong's variance components for the paired AUC difference, exactly the
/// structural-component sums of the original paper with (m-1)/(n-1) divisors.
inline VarianceComponents delong_components(const PairedSample& sample) {
    sample.validate();
    detail::require_variance_counts(sample);
    const std::size_t m = sample.case_count();
    const std::size_t n = sample.control_count();
    const auto v1 = detail::make_view(sample, 1);
    const auto v2 = detail::make_view(sample, 2);

    std::vector<double> d1(m), d2(m), e1(n), e2(n);
    for (std::size_t i = 0; i < m; ++i) {
        d1[i] = detail::psi_row_sum(v1.controls, sample.cases[i].m1) / static_cast<double>(n);
        d2[i] = detail::psi_row_sum(v2.controls, sample.cases[i].m2) / static_cast<double>(n);
    }
    for (std::size_t j = 0; j < n; ++j) {
        // psi(x, y) over cases x: count of cases above y (half for ties)
        e1[j] = (static_cast<double>(detail::count_greater(v1.cases, sample.controls[j].m1)) +
                 0.5 * static_cast<double>(detail::count_geq(v1.cases, sample.controls[j].m1) -
                                           detail::count_greater(v1.cases, sample.controls[j].m1))) /
                static_cast<double>(m);
        e2[j] = (static_cast<double>(detail::count_greater(v2.cases, sample.controls[j].m2)) +
                 0.5 * static_cast<double>(detail::count_geq(v2.cases, sample.controls[j].m2) -
                                           detail::count_greater(v2.cases, sample.controls[j].m2))) /
                static_cast<double>(m);
    }

    double o1 = 0.0, o2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        o1 += d1[i];
        o2 += d2[i];
    }
    o1 /= static_cast<double>(m);
    o2 /= static_cast<double>(m);

    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double t = (d1[i] - o1) - (d2[i] - o2);
        sx += t * t;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double t = (e1[j] - o1) - (e2[j] - o2);
        sy += t * t;
    }

    VarianceComponents out;
    out.m = m;
    out.n = n;
    out.vx = sx / static_cast<double>(m - 1);
    out.vy = sy / static_cast<double>(n - 1);
    if (out.vx < 0.0 || out.vy < 0.0) {
        out.clamped = true;
        out.vx = std::max(out.vx, 0.0);
        out.vy = std::max(out.vy, 0.0);
    }
    return out;
}

/// Plug-in moments of the simplified AUC component expressions
/// (pair-concordance moments over shared-case and shared-control pairs).
inline VarianceComponents auc_moment_components(const PairedSample& sample) {
    sample.validate();
    detail::require_variance_counts(sample);
    const std::size_t m = sample.case_count();
    const std::size_t n = sample.control_count();
    const auto v1 = detail::make_view(sample, 1);
    const auto v2 = detail::make_view(sample, 2);

    std::vector<double> d1(m), d2(m), e1(n), e2(n);
    for (std::size_t i = 0; i < m; ++i) {
        d1[i] = detail::psi_row_sum(v1.controls, sample.cases[i].m1) / static_cast<double>(n);
        d2[i] = detail::psi_row_sum(v2.controls, sample.cases[i].m2) / static_cast<double>(n);
    }
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t g1 = detail::count_greater(v1.cases, sample.controls[j].m1);
        const std::size_t q1 = detail::count_geq(v1.cases, sample.controls[j].m1);
        const std::size_t g2 = detail::count_greater(v2.cases, sample.controls[j].m2);
        const std::size_t q2 = detail::count_geq(v2.cases, sample.controls[j].m2);
        e1[j] = (static_cast<double>(g1) + 0.5 * static_cast<double>(q1 - g1)) /
                static_cast<double>(m);
        e2[j] = (static_cast<double>(g2) + 0.5 * static_cast<double>(q2 - g2)) /
                static_cast<double>(m);
    }
    double o1 = 0.0, o2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        o1 += d1[i];
        o2 += d2[i];
    }
    o1 /= static_cast<double>(m);
    o2 /= static_cast<double>(m);
    const double delta = o1 - o2;

    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double t = d1[i] - d2[i] - delta;
        sx += t * t;
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double t = e1[j] - e2[j] - delta;
        sy += t * t;
    }

    VarianceComponents out;
    out.m = m;
    out.n = n;
    out.vx = sx / static_cast<double>(m);
    out.vy = sy / static_cast<double>(n);
    return out;
}

/// Variance components of the Delta-statistic: empirical variances of the
/// plug-in case terms w_i and control terms v_j, the latter weighting the
/// control indicators by kernel-estimated ROC derivatives.
inline VarianceComponents delta_components(const PairedSample& sample,
                                           const WeightMeasure& weight,
                                           const SmoothingSpec& smoothing = {}) {
    sample.validate();
    detail::require_variance_counts(sample);
    const std::size_t m = sample.case_count();
    const std::size_t n = sample.control_count();
    const auto v1 = detail::make_view(sample, 1);
    const auto v2 = detail::make_view(sample, 2);
    const auto t1 = detail::build_pieces(v1.controls, weight);
    const auto t2 = detail::build_pieces(v2.controls, weight);

    // Case side: w_i differs from P2_i - P1_i by a constant, with
    // P_i = int I(x_i <= q(u)) dW(u) accumulated exactly over pieces.
    std::vector<double> pw1(n + 1, 0.0), pw2(n + 1, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        pw1[p + 1] = pw1[p] + t1.wmass[p];
        pw2[p + 1] = pw2[p] + t2.wmass[p];
    }
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double p1 = pw1[detail::count_geq(v1.controls, sample.cases[i].m1)];
        const double p2 = pw2[detail::count_geq(v2.controls, sample.cases[i].m2)];
        w[i] = p2 - p1;
    }

    // Control side: v_j = sum_l (+/-) sum_p R'_l(p) [I(y_lj <= thr_p) wmass_p - uint_p].
    const auto rp1 = detail::roc_derivative_by_piece(v1, t1, smoothing);
    const auto rp2 = detail::roc_derivative_by_piece(v2, t2, smoothing);
    std::vector<double> prw1(n + 1, 0.0), prw2(n + 1, 0.0);
    double c1 = 0.0, c2 = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        prw1[p + 1] = prw1[p] + rp1[p] * t1.wmass[p];
        prw2[p + 1] = prw2[p] + rp2[p] * t2.wmass[p];
        c1 += rp1[p] * t1.uint_[p];
        c2 += rp2[p] * t2.uint_[p];
    }
    std::vector<double> vj(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double a1 = prw1[detail::count_geq(v1.controls, sample.controls[j].m1)];
        const double a2 = prw2[detail::count_geq(v2.controls, sample.controls[j].m2)];
        vj[j] = (a1 - c1) - (a2 - c2);
    }

    VarianceComponents out;
    out.m = m;
    out.n = n;
    out.vx = detail::sample_variance(w, static_cast<double>(m - 1));
    out.vy = detail::sample_variance(vj, static_cast<double>(n - 1));
    return out;
}

/// Single-marker components. Full AUC uses placement-value variances; a point
/// mass uses the sensitivity-at-FPR forms R(1-R) and R'(u0)^2 u0 (1-u0); a
/// partial window uses the marker's own term of the Delta machinery.
inline VarianceComponents single_marker_components(const PairedSample& sample, int marker,
                                                   const WeightMeasure& weight,
                                                   const SmoothingSpec& smoothing = {}) {
    sample.validate();
    detail::require_variance_counts(sample);
    const std::size_t m = sample.case_count();
    const std::size_t n = sample.control_count();
    const auto v = detail::make_view(sample, marker);
    detail::require_nondegenerate(v);

    VarianceComponents out;
    out.m = m;
    out.n = n;

    if (weight.kind() == WeightMeasure::Kind::PointMass) {
        const auto t = detail::build_pieces(v.controls, weight);
        const auto rp = detail::roc_derivative_by_piece(v, t, smoothing);
        for (std::size_t p = 0; p < n; ++p) {
            if (t.wmass[p] == 0.0) continue;
            const double r =
                static_cast<double>(detail::count_greater(v.cases, t.thr[p])) /
                static_cast<double>(m);
            const double u0 = weight.u0();
            out.vx = r * (1.0 - r);
            out.vy = rp[p] * rp[p] * u0 * (1.0 - u0);
            return out;
        }
        throw std::logic_error("point mass produced no atom piece");
    }

    if (weight.kind() == WeightMeasure::Kind::FullAuc) {
        std::vector<double> px(m), py(n);
        for (std::size_t i = 0; i < m; ++i) {
            const double x = marker == 1 ? sample.cases[i].m1 : sample.cases[i].m2;
            px[i] = static_cast<double>(detail::count_greater(v.controls, x)) /
                    static_cast<double>(n);
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double y = marker == 1 ? sample.controls[j].m1 : sample.controls[j].m2;
            py[j] = static_cast<double>(detail::count_greater(v.cases, y)) /
                    static_cast<double>(m);
        }
        out.vx = detail::sample_variance(px, static_cast<double>(m - 1));
        out.vy = detail::sample_variance(py, static_cast<double>(n - 1));
        return out;
    }

    // Partial window: single-marker terms of the Delta plug-in.
    const auto t = detail::build_pieces(v.controls, weight);
    std::vector<double> pw(n + 1, 0.0);
    for (std::size_t p = 0; p < n; ++p) pw[p + 1] = pw[p] + t.wmass[p];
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double x = marker == 1 ? sample.cases[i].m1 : sample.cases[i].m2;
        w[i] = pw[detail::count_geq(v.controls, x)];
    }
    const auto rp = detail::roc_derivative_by_piece(v, t, smoothing);
    std::vector<double> prw(n + 1, 0.0);
    double c = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        prw[p + 1] = prw[p] + rp[p] * t.wmass[p];
        c += rp[p] * t.uint_[p];
    }
    std::vector<double> vj(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double y = marker == 1 ? sample.controls[j].m1 : sample.controls[j].m2;
        vj[j] = prw[detail::count_geq(v.controls, y)] - c;
    }
    out.vx = detail::sample_variance(w, static_cast<double>(m - 1));
    out.vy = detail::sample_variance(vj, static_cast<double>(n - 1));
    return out;
}

} // namespace rocdesign
