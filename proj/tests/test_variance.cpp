#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "rocdesign/variance.hpp"

using namespace rocdesign;
using testutil::make_sample;

namespace {

// Literal transcription of the DeLong structural-component sums: for each
// case the control-averaged kernel, squared/cross terms with (m-1) and (n-1)
// divisors. Kept deliberately naive and independent of the library path.
VarianceComponents brute_delong(const PairedSample& s) {
    const std::size_t m = s.cases.size();
    const std::size_t n = s.controls.size();
    double o1 = 0.0, o2 = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            o1 += psi(s.cases[i].m1, s.controls[j].m1);
            o2 += psi(s.cases[i].m2, s.controls[j].m2);
        }
    o1 /= static_cast<double>(m * n);
    o2 /= static_cast<double>(m * n);

    double vx = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double a = 0.0, b = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            a += psi(s.cases[i].m1, s.controls[j].m1);
            b += psi(s.cases[i].m2, s.controls[j].m2);
        }
        a /= static_cast<double>(n);
        b /= static_cast<double>(n);
        vx += (a - o1) * (a - o1) + (b - o2) * (b - o2) - 2.0 * (a - o1) * (b - o2);
    }
    vx /= static_cast<double>(m - 1);

    double vy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            a += psi(s.cases[i].m1, s.controls[j].m1);
            b += psi(s.cases[i].m2, s.controls[j].m2);
        }
        a /= static_cast<double>(m);
        b /= static_cast<double>(m);
        vy += (a - o1) * (a - o1) + (b - o2) * (b - o2) - 2.0 * (a - o1) * (b - o2);
    }
    vy /= static_cast<double>(n - 1);

    VarianceComponents out;
    out.vx = vx;
    out.vy = vy;
    out.m = m;
    out.n = n;
    return out;
}

// Literal triple-loop transcription of the simplified moment expressions:
// pair-concordance moments over shared-case and shared-control pairs minus
// squared means, with the cross-marker terms subtracted twice.
VarianceComponents brute_moments(const PairedSample& s) {
    const std::size_t m = s.cases.size();
    const std::size_t n = s.controls.size();
    const double mn = static_cast<double>(m) * static_cast<double>(n);
    double o1 = 0.0, o2 = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            o1 += psi(s.cases[i].m1, s.controls[j].m1);
            o2 += psi(s.cases[i].m2, s.controls[j].m2);
        }
    o1 /= mn;
    o2 /= mn;

    double c11 = 0.0, c22 = 0.0, c12 = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = 0; l < n; ++l) {
                c11 += psi(s.cases[i].m1, s.controls[j].m1) * psi(s.cases[i].m1, s.controls[l].m1);
                c22 += psi(s.cases[i].m2, s.controls[j].m2) * psi(s.cases[i].m2, s.controls[l].m2);
                c12 += psi(s.cases[i].m1, s.controls[j].m1) * psi(s.cases[i].m2, s.controls[l].m2);
            }
    const double mnn = mn * static_cast<double>(n);
    const double vx = (c11 / mnn - o1 * o1) + (c22 / mnn - o2 * o2) -
                      2.0 * (c12 / mnn - o1 * o2);

    double d11 = 0.0, d22 = 0.0, d12 = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < m; ++k) {
                d11 += psi(s.cases[i].m1, s.controls[j].m1) * psi(s.cases[k].m1, s.controls[j].m1);
                d22 += psi(s.cases[i].m2, s.controls[j].m2) * psi(s.cases[k].m2, s.controls[j].m2);
                d12 += psi(s.cases[i].m1, s.controls[j].m1) * psi(s.cases[k].m2, s.controls[j].m2);
            }
    const double nmm = mn * static_cast<double>(m);
    const double vy = (d11 / nmm - o1 * o1) + (d22 / nmm - o2 * o2) -
                      2.0 * (d12 / nmm - o1 * o2);

    VarianceComponents out;
    out.vx = vx;
    out.vy = vy;
    out.m = m;
    out.n = n;
    return out;
}

} // namespace

TEST_CASE("identical marker columns have zero difference variance") {
    auto s = testutil::single_column({2, 3, 5, 7}, {1, 4, 6});
    const auto d = delong_components(s);
    CHECK(d.vx == 0.0);
    CHECK(d.vy == 0.0);
    const auto a = auc_moment_components(s);
    CHECK(a.vx == 0.0);
    CHECK(a.vy == 0.0);
    const auto dl = delta_components(s, WeightMeasure::full_auc());
    CHECK(dl.vx == 0.0);
    CHECK(dl.vy == 0.0);
}

TEST_CASE("components require two subjects per arm") {
    auto s = make_sample({{1, 2}}, {{0, 1}, {2, 0}});
    CHECK_THROWS_WITH(delong_components(s),
                      Catch::Matchers::ContainsSubstring("insufficient data for variance"));
    CHECK_THROWS_WITH(auc_moment_components(s),
                      Catch::Matchers::ContainsSubstring("insufficient data for variance"));
    CHECK_THROWS_WITH(delta_components(s, WeightMeasure::full_auc()),
                      Catch::Matchers::ContainsSubstring("insufficient data for variance"));
}

TEST_CASE("delong components match a brute-force transcription") {
    RandomStream rng(101);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t m = 2 + rng.uniform() * 7;
        const std::size_t n = 2 + rng.uniform() * 7;
        auto s = (rep % 2 == 0) ? testutil::random_sample(rng, m, n)
                                : testutil::random_grid_sample(rng, m, n);
        const auto got = delong_components(s);
        const auto want = brute_delong(s);
        CAPTURE(rep, m, n);
        CHECK_THAT(got.vx, Catch::Matchers::WithinAbs(want.vx, 1e-12));
        CHECK_THAT(got.vy, Catch::Matchers::WithinAbs(want.vy, 1e-12));
    }
}

TEST_CASE("moment components match a brute-force transcription") {
    RandomStream rng(202);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t m = 2 + rng.uniform() * 7;
        const std::size_t n = 2 + rng.uniform() * 7;
        auto s = (rep % 2 == 0) ? testutil::random_sample(rng, m, n)
                                : testutil::random_grid_sample(rng, m, n);
        const auto got = auc_moment_components(s);
        const auto want = brute_moments(s);
        CAPTURE(rep, m, n);
        CHECK_THAT(got.vx, Catch::Matchers::WithinAbs(want.vx, 1e-12));
        CHECK_THAT(got.vy, Catch::Matchers::WithinAbs(want.vy, 1e-12));
    }
}

TEST_CASE("moment and delong components differ by the finite-sample factor") {
    RandomStream rng(303);
    auto s = testutil::random_sample(rng, 6, 5);
    const auto d = delong_components(s);
    const auto a = auc_moment_components(s);
    CHECK_THAT(a.vx, Catch::Matchers::WithinRel(d.vx * 5.0 / 6.0, 1e-12));
    CHECK_THAT(a.vy, Catch::Matchers::WithinRel(d.vy * 4.0 / 5.0, 1e-12));
}

TEST_CASE("fully separating marker 1 leaves only the marker-2 case term") {
    // 4x4 grid: marker 1 splits the arms completely, marker 2 is unrelated.
    auto s = make_sample({{10, 1}, {10, 2}, {10, 3}, {10, 4}},
                         {{0, 1.5}, {0, 2.5}, {0, 0.5}, {0, 3.5}});
    const auto got = auc_moment_components(s);
    // marker-2-only case-side moment
    double o2 = 0.0;
    std::vector<double> d2;
    for (const auto& c : s.cases) {
        double t = 0.0;
        for (const auto& y : s.controls) t += psi(c.m2, y.m2);
        d2.push_back(t / 4.0);
        o2 += t / 16.0;
    }
    double expect = 0.0;
    for (double v : d2) expect += (v - o2) * (v - o2);
    expect /= 4.0;
    CHECK_THAT(got.vx, Catch::Matchers::WithinAbs(expect, 1e-15));
}

TEST_CASE("components are invariant under permutations and monotone maps") {
    RandomStream rng(404);
    auto s = testutil::random_sample(rng, 9, 11);
    auto shuffled = s;
    std::reverse(shuffled.cases.begin(), shuffled.cases.end());
    std::rotate(shuffled.controls.begin(), shuffled.controls.begin() + 4,
                shuffled.controls.end());
    auto mono = s;
    for (auto& c : mono.cases) {
        c.m1 = std::exp(c.m1);
        c.m2 = c.m2 * c.m2 * c.m2 + 2.0 * c.m2;
    }
    for (auto& c : mono.controls) {
        c.m1 = std::exp(c.m1);
        c.m2 = c.m2 * c.m2 * c.m2 + 2.0 * c.m2;
    }
    for (auto estimate : {delong_components, auc_moment_components}) {
        const auto base = estimate(s);
        const auto perm = estimate(shuffled);
        const auto tr = estimate(mono);
        CHECK_THAT(perm.vx, Catch::Matchers::WithinAbs(base.vx, 1e-12));
        CHECK_THAT(perm.vy, Catch::Matchers::WithinAbs(base.vy, 1e-12));
        CHECK(tr.vx == base.vx);
        CHECK(tr.vy == base.vy);
    }
}

TEST_CASE("delta components: case side agrees with the moment plug-in") {
    RandomStream rng(505);
    auto s = testutil::random_sample(rng, 400, 300);
    const auto d = delta_components(s, WeightMeasure::full_auc());
    const auto a = auc_moment_components(s);
    // tie-free case placements coincide; only the divisor differs
    CHECK_THAT(d.vx * 399.0 / 400.0, Catch::Matchers::WithinRel(a.vx, 1e-10));
    // control side replaces the case-survival weights by a kernel estimate
    CHECK_THAT(d.vy, Catch::Matchers::WithinRel(a.vy, 0.25));
}

TEST_CASE("delta components degenerate and unstable guards") {
    auto flat = make_sample({{1, 1}, {1, 2}, {1, 3}}, {{0, 1}, {0, 2}, {0, 3}});
    CHECK_THROWS_WITH(delta_components(flat, WeightMeasure::full_auc()),
                      Catch::Matchers::ContainsSubstring("degenerate distribution"));

    RandomStream rng(606);
    auto spread = testutil::random_sample(rng, 12, 12);
    CHECK_THROWS_WITH(
        delta_components(spread, WeightMeasure::full_auc(), SmoothingSpec::fixed(1e-9)),
        Catch::Matchers::ContainsSubstring("derivative estimate unstable"));
}

TEST_CASE("single-marker components") {
    RandomStream rng(707);

    SECTION("degenerate marker errors") {
        auto flat = make_sample({{1, 1}, {1, 2}}, {{0, 1}, {0, 2}});
        CHECK_THROWS_WITH(single_marker_components(flat, 1, WeightMeasure::full_auc()),
                          Catch::Matchers::ContainsSubstring("degenerate distribution"));
    }

    SECTION("full AUC placement variances") {
        auto s = testutil::random_sample(rng, 40, 50);
        const auto got = single_marker_components(s, 1, WeightMeasure::full_auc());
        // direct placement-value recomputation
        std::vector<double> px, py;
        for (const auto& c : s.cases) {
            double t = 0.0;
            for (const auto& y : s.controls) t += (y.m1 > c.m1) ? 1.0 : 0.0;
            px.push_back(t / 50.0);
        }
        for (const auto& y : s.controls) {
            double t = 0.0;
            for (const auto& c : s.cases) t += (c.m1 > y.m1) ? 1.0 : 0.0;
            py.push_back(t / 40.0);
        }
        auto var = [](const std::vector<double>& v) {
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= v.size();
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            return ss / (v.size() - 1.0);
        };
        CHECK_THAT(got.vx, Catch::Matchers::WithinAbs(var(px), 1e-12));
        CHECK_THAT(got.vy, Catch::Matchers::WithinAbs(var(py), 1e-12));
    }

    SECTION("point mass uses the sensitivity forms") {
        auto s = testutil::random_sample(rng, 60, 60);
        const auto got = single_marker_components(s, 1, WeightMeasure::point_mass(0.5));
        CHECK(got.vx >= 0.0);
        CHECK(got.vx <= 0.25); // R(1-R) is bounded by 1/4
        CHECK(got.vy > 0.0);
    }
}
