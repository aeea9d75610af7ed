#pragma once

#include <vector>

#include "rocdesign/paired_sample.hpp"
#include "rocdesign/rng.hpp"

namespace testutil {

inline rocdesign::PairedSample make_sample(std::vector<std::pair<double, double>> cases,
                                           std::vector<std::pair<double, double>> controls) {
    rocdesign::PairedSample s;
    for (auto& c : cases) s.cases.push_back({c.first, c.second});
    for (auto& c : controls) s.controls.push_back({c.first, c.second});
    return s;
}

/// Sample with one shared column for both markers.
inline rocdesign::PairedSample single_column(std::vector<double> cases,
                                             std::vector<double> controls) {
    rocdesign::PairedSample s;
    for (double v : cases) s.cases.push_back({v, v});
    for (double v : controls) s.controls.push_back({v, v});
    return s;
}

/// Random correlated continuous sample (tie-free with probability 1).
inline rocdesign::PairedSample random_sample(rocdesign::RandomStream& rng, std::size_t m,
                                             std::size_t n, double shift1 = 0.8,
                                             double shift2 = 0.5, double rho = 0.3) {
    rocdesign::PairedSample s;
    const double mix = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < m; ++i) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        s.cases.push_back({shift1 + z1, shift2 + rho * z1 + mix * z2});
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        s.controls.push_back({z1, rho * z1 + mix * z2});
    }
    return s;
}

/// Random sample on a small integer grid, so ties are frequent.
inline rocdesign::PairedSample random_grid_sample(rocdesign::RandomStream& rng, std::size_t m,
                                                  std::size_t n, int levels = 5) {
    rocdesign::PairedSample s;
    auto draw = [&]() { return std::floor(rng.uniform() * levels); };
    for (std::size_t i = 0; i < m; ++i) s.cases.push_back({draw() + 1.0, draw()});
    for (std::size_t j = 0; j < n; ++j) s.controls.push_back({draw(), draw()});
    return s;
}

} // namespace testutil
