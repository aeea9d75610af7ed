#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rocdesign/paired_sample.hpp"

namespace rocdesign {

/// Mann-Whitney kernel with the half-tie convention: 1 if x > y, 1/2 if
/// x == y, 0 if x < y.
inline double psi(double x, double y) {
    if (x > y) return 1.0;
    if (x == y) return 0.5;
    return 0.0;
}

namespace detail {

struct MarkerView {
    std::vector<double> cases;    // ascending
    std::vector<double> controls; // ascending
};

inline MarkerView make_view(const PairedSample& sample, int marker) {
    require_marker(marker);
    MarkerView v{sample.arm_values(true, marker), sample.arm_values(false, marker)};
    std::sort(v.cases.begin(), v.cases.end());
    std::sort(v.controls.begin(), v.controls.end());
    return v;
}

inline std::size_t count_greater(const std::vector<double>& sorted, double c) {
    return sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), c);
}

inline std::size_t count_geq(const std::vector<double>& sorted, double c) {
    return sorted.end() - std::lower_bound(sorted.begin(), sorted.end(), c);
}

inline std::size_t count_less(const std::vector<double>& sorted, double c) {
    return std::lower_bound(sorted.begin(), sorted.end(), c) - sorted.begin();
}

/// Sum over j of psi(x, sorted[j]) as an exact half-integer.
inline double psi_row_sum(const std::vector<double>& sorted, double x) {
    const std::size_t less = count_less(sorted, x);
    const std::size_t greater = count_greater(sorted, x);
    const std::size_t eq = sorted.size() - less - greater;
    return static_cast<double>(less) + 0.5 * static_cast<double>(eq);
}

/// The empirical inverse FPR function q(u) is a right-continuous step
/// function: on u in [p/n, (p+1)/n) it equals the (p+1)-th largest control
/// value. A PieceTable carries, per piece, the threshold, the W-mass of the
/// piece clipped to the weight's window, and the integral of u against W over
/// the piece. Every plug-in integral against W then reduces to an exact sum.
struct PieceTable {
    std::vector<double> thr;   // piece thresholds, descending
    std::vector<double> wmass; // W-measure of piece
    std::vector<double> uint_; // integral of u dW over piece
};

inline PieceTable build_pieces(const std::vector<double>& controls_sorted,
                               const WeightMeasure& w) {
    const std::size_t n = controls_sorted.size();
    PieceTable t;
    t.thr.resize(n);
    t.wmass.assign(n, 0.0);
    t.uint_.assign(n, 0.0);
    for (std::size_t p = 0; p < n; ++p) t.thr[p] = controls_sorted[n - 1 - p];

    if (w.kind() == WeightMeasure::Kind::PointMass) {
        const std::size_t p0 =
            std::min<std::size_t>(n - 1, static_cast<std::size_t>(w.u0() * static_cast<double>(n)));
        t.wmass[p0] = 1.0;
        t.uint_[p0] = w.u0();
        return t;
    }

    const double u0 = w.u0();
    const double u1 = w.u1();
    const double width = u1 - u0;
    for (std::size_t p = 0; p < n; ++p) {
        const double lo = static_cast<double>(p) / static_cast<double>(n);
        const double hi = static_cast<double>(p + 1) / static_cast<double>(n);
        const double a = std::max(lo, u0);
        const double b = std::min(hi, u1);
        if (b > a) {
            t.wmass[p] = (b - a) / width;
            t.uint_[p] = 0.5 * (b * b - a * a) / width;
        }
    }
    return t;
}

} // namespace detail

/// Tie-corrected empirical AUC, (1/mn) sum_ij psi(x_i, y_j).
inline double auc_tie_corrected(const PairedSample& sample, int marker) {
    sample.validate();
    const auto v = detail::make_view(sample, marker);
    double total = 0.0;
    for (double x : v.cases) total += detail::psi_row_sum(v.controls, x);
    return total / (static_cast<double>(v.cases.size()) * static_cast<double>(v.controls.size()));
}

/// DeLong's paired difference of tie-corrected AUCs, marker 1 minus marker 2.
inline double delong_difference(const PairedSample& sample) {
    sample.validate();
    const auto v1 = detail::make_view(sample, 1);
    const auto v2 = detail::make_view(sample, 2);
    double s1 = 0.0, s2 = 0.0;
    for (double x : v1.cases) s1 += detail::psi_row_sum(v1.controls, x);
    for (double x : v2.cases) s2 += detail::psi_row_sum(v2.controls, x);
    const double mn =
        static_cast<double>(v1.cases.size()) * static_cast<double>(v1.controls.size());
    return s1 / mn - s2 / mn;
}

/// True if any value is duplicated within the pooled case+control values of
/// the marker (the Delta-statistic assumes continuous, tie-free data).
inline bool has_ties(const PairedSample& sample, int marker) {
    std::vector<double> pooled = sample.arm_values(true, marker);
    const auto ctrl = sample.arm_values(false, marker);
    pooled.insert(pooled.end(), ctrl.begin(), ctrl.end());
    std::sort(pooled.begin(), pooled.end());
    return std::adjacent_find(pooled.begin(), pooled.end()) != pooled.end();
}

/// Weighted AUC, the plug-in of the empirical survival functions into
/// int R(u) dW(u). Partial windows are normalized by (u1-u0) so the result is
/// always in [0,1]; wauc_unnormalized() gives the raw partial area.
inline double wauc(const PairedSample& sample, const WeightMeasure& weight, int marker) {
    sample.validate();
    const auto v = detail::make_view(sample, marker);
    const double m = static_cast<double>(v.cases.size());
    const double n = static_cast<double>(v.controls.size());

    if (weight.kind() == WeightMeasure::Kind::FullAuc) {
        // Exact Mann-Whitney count: sum over controls of #{cases above}.
        double total = 0.0;
        for (double y : v.controls)
            total += static_cast<double>(detail::count_greater(v.cases, y));
        return total / (m * n);
    }

    const auto pieces = detail::build_pieces(v.controls, weight);
    double acc = 0.0;
    for (std::size_t p = 0; p < pieces.thr.size(); ++p) {
        if (pieces.wmass[p] == 0.0) continue;
        const double sens =
            static_cast<double>(detail::count_greater(v.cases, pieces.thr[p])) / m;
        acc += pieces.wmass[p] * sens;
    }
    return acc;
}

/// Unnormalized weighted area (identical to wauc except for Partial, where it
/// is the plain area over the window, e.g. the 0.30-style pAUC targets).
inline double wauc_unnormalized(const PairedSample& sample, const WeightMeasure& weight,
                                int marker) {
    return wauc(sample, weight, marker) * weight.width();
}

/// Delta-statistic: difference of weighted AUCs, marker 1 minus marker 2.
/// Sets *tied (when given) if either marker carries tied observations; the
/// plug-in step functions are still used in that case.
inline double delta_statistic(const PairedSample& sample, const WeightMeasure& weight,
                              bool* tied = nullptr) {
    sample.validate();
    if (tied) *tied = has_ties(sample, 1) || has_ties(sample, 2);
    return wauc(sample, weight, 1) - wauc(sample, weight, 2);
}

/// Step-function summary of one marker's empirical ROC: survival functions of
/// both arms over sorted unique thresholds plus the right-continuous inverse
/// FPR lookup.
class EmpiricalRoc {
public:
    EmpiricalRoc(const PairedSample& sample, int marker)
        : marker_(marker), view_(detail::make_view(sample, marker)) {
        sample.validate();
        thresholds_ = view_.controls;
        auto cs = view_.cases;
        thresholds_.insert(thresholds_.end(), cs.begin(), cs.end());
        std::sort(thresholds_.begin(), thresholds_.end());
        thresholds_.erase(std::unique(thresholds_.begin(), thresholds_.end()),
                          thresholds_.end());
    }

    int marker() const { return marker_; }
    const std::vector<double>& thresholds() const { return thresholds_; }

    /// Sensitivity P(X > c).
    double sensitivity(double c) const {
        return static_cast<double>(detail::count_greater(view_.cases, c)) /
               static_cast<double>(view_.cases.size());
    }

    /// False positive rate P(Y > c).
    double fpr(double c) const {
        return static_cast<double>(detail::count_greater(view_.controls, c)) /
               static_cast<double>(view_.controls.size());
    }

    /// Smallest threshold whose FPR is <= u (right-continuous convention).
    /// u = 1 maps below the smallest control value (-infinity), where the
    /// empirical sensitivity is 1.
    double inverse_fpr(double u) const {
        if (!(u >= 0.0 && u <= 1.0))
            throw std::invalid_argument("FPR argument outside [0,1]");
        const std::size_t n = view_.controls.size();
        if (u >= 1.0) return -std::numeric_limits<double>::infinity();
        const std::size_t p = static_cast<std::size_t>(u * static_cast<double>(n));
        return view_.controls[n - 1 - std::min(p, n - 1)];
    }

    /// Empirical ROC value R(u) = sensitivity at the inverse-FPR threshold.
    double roc(double u) const {
        const double c = inverse_fpr(u);
        return std::isinf(c) ? 1.0 : sensitivity(c);
    }

private:
    int marker_;
    detail::MarkerView view_;
    std::vector<double> thresholds_;
};

inline EmpiricalRoc empirical_roc(const PairedSample& sample, int marker) {
    return EmpiricalRoc(sample, marker);
}

} // namespace rocdesign
