#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rocdesign {

/// One diseased (case) or non-diseased (control) subject measured by both
/// markers.
struct MarkerPair {
    double m1 = 0.0;
    double m2 = 0.0;
};

/// Paired two-marker measurements split into case and control arms.
struct PairedSample {
    std::vector<MarkerPair> cases;
    std::vector<MarkerPair> controls;

    std::size_t case_count() const { return cases.size(); }
    std::size_t control_count() const { return controls.size(); }

    /// Marker values of one arm as a flat vector. marker is 1 or 2.
    std::vector<double> arm_values(bool diseased, int marker) const {
        const auto& arm = diseased ? cases : controls;
        std::vector<double> out;
        out.reserve(arm.size());
        for (const auto& p : arm) out.push_back(marker == 1 ? p.m1 : p.m2);
        return out;
    }

    void validate() const {
        if (cases.empty() || controls.empty())
            throw std::invalid_argument("insufficient data: both arms must be nonempty");
        for (const auto& p : cases)
            if (!std::isfinite(p.m1) || !std::isfinite(p.m2))
                throw std::invalid_argument("non-finite case measurement");
        for (const auto& p : controls)
            if (!std::isfinite(p.m1) || !std::isfinite(p.m2))
                throw std::invalid_argument("non-finite control measurement");
    }
};

inline void require_marker(int marker) {
    if (marker != 1 && marker != 2)
        throw std::invalid_argument("marker index must be 1 or 2");
}

/// The probability measure W(u) selecting which ROC summary is compared:
/// the full AUC (W(u)=u), a normalized partial AUC over an FPR window, or
/// sensitivity at one fixed FPR (point mass).
class WeightMeasure {
public:
    enum class Kind { FullAuc, Partial, PointMass };

    static WeightMeasure full_auc() { return WeightMeasure(Kind::FullAuc, 0.0, 1.0); }

    static WeightMeasure partial(double u0, double u1) {
        if (!(u0 >= 0.0 && u0 < u1 && u1 <= 1.0))
            throw std::invalid_argument("partial AUC window requires 0 <= u0 < u1 <= 1");
        // (0,1) recovers W(u)=u exactly; canonicalize so the two spellings
        // share one code path.
        if (u0 == 0.0 && u1 == 1.0) return full_auc();
        return WeightMeasure(Kind::Partial, u0, u1);
    }

    static WeightMeasure point_mass(double u0) {
        if (!(u0 > 0.0 && u0 < 1.0))
            throw std::invalid_argument("sensitivity FPR must lie strictly inside (0,1)");
        return WeightMeasure(Kind::PointMass, u0, u0);
    }

    Kind kind() const { return kind_; }
    double u0() const { return u0_; }
    double u1() const { return u1_; }

    /// Width of the FPR window carrying W's mass (1 for a point mass).
    double width() const {
        return kind_ == Kind::PointMass ? 1.0 : (u1_ - u0_);
    }

    bool operator==(const WeightMeasure&) const = default;

private:
    WeightMeasure(Kind k, double u0, double u1) : kind_(k), u0_(u0), u1_(u1) {}
    Kind kind_;
    double u0_;
    double u1_;
};

} // namespace rocdesign
