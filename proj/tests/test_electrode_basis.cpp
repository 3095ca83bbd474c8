#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "dwsim/electrode_basis.hpp"

using namespace dwsim;

namespace {

const TrapGeometry kGeom{};  // 9 electrodes, 200 um / 50 um, R = 400 um

const ElectrodeBasis& default_basis() {
    static const ElectrodeBasis b = ElectrodeBasis::build_analytic(kGeom, 200);
    return b;
}

}  // namespace

TEST_CASE("center electrode on-axis value against dense-series oracle") {
    // Frozen from a direct summation with 10x more terms (2000): the wall
    // potential penetrates partially for width/R = 0.5.
    const double oracle = 0.390132166353759;
    const ElectrodeBasis& b = default_basis();
    CHECK(b.evaluate(4, 0.0, 0) == doctest::Approx(oracle).epsilon(1e-12));

    const ElectrodeBasis dense = ElectrodeBasis::build_analytic(kGeom, 2000);
    CHECK(dense.evaluate(4, 0.0, 0) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("all voltages zero gives zero potential") {
    const ElectrodeBasis& b = default_basis();
    std::vector<double> v(9, 0.0);
    const ComposedPotential pot = b.compose(v);
    for (double z : {-2e-3, -3.5e-4, 0.0, 1e-3}) CHECK(pot.value(z) == 0.0);
}

TEST_CASE("mirror symmetry of the electrode stack") {
    const ElectrodeBasis& b = default_basis();
    for (int i = 0; i < 9; ++i) {
        const int j = 8 - i;
        for (double z : {-8e-4, -1e-4, 2.3e-4, 9e-4}) {
            CHECK(b.evaluate(i, z, 0) ==
                  doctest::Approx(b.evaluate(j, -z, 0)).epsilon(1e-10));
            // odd derivatives flip sign under mirroring
            CHECK(b.evaluate(i, z, 1) ==
                  doctest::Approx(-b.evaluate(j, -z, 1)).epsilon(1e-9));
        }
    }
}

TEST_CASE("superposed unit voltages approximate a uniform cylinder interior") {
    const ElectrodeBasis& b = default_basis();
    std::vector<double> v(9, 1.0);
    const ComposedPotential pot = b.compose(v);
    // frozen oracle (2000 terms): 0.998142787072280 at the center
    CHECK(pot.value(0.0) == doctest::Approx(0.998142787072280).epsilon(1e-12));
    CHECK(pot.value(0.0) > 0.99);
}

TEST_CASE("far-field decay") {
    const ElectrodeBasis& b = default_basis();
    const double peak = b.evaluate(4, 0.0, 0);
    const double far = b.evaluate(4, 0.95 * b.axial_extent(), 0);
    CHECK(std::abs(far / peak) < 1e-3);  // oracle value ~5.9e-8
}

TEST_CASE("derivatives against central finite differences") {
    const ElectrodeBasis& b = default_basis();
    SUBCASE("order 1, tight tolerance at h = 1e-8") {
        const double h = 1e-8;
        for (double z : {-5e-4, -1e-4, 1.5e-4, 6e-4}) {
            const double fd = (b.evaluate(4, z + h, 0) - b.evaluate(4, z - h, 0)) / (2 * h);
            const double an = b.evaluate(4, z, 1);
            CHECK(an == doctest::Approx(fd).epsilon(1e-6));
        }
    }
    SUBCASE("orders 1..4 at 100 random points, relative 1e-5") {
        std::mt19937 gen(12345);
        std::uniform_real_distribution<double> uz(-1.0e-3, 1.0e-3);
        const double h = 1e-7;
        for (int order = 1; order <= 4; ++order) {
            // scale for relative comparison: typical magnitude over the domain
            double scale = 0.0;
            for (int i = 0; i < 50; ++i)
                scale = std::max(scale, std::abs(b.evaluate(2, uz(gen), order)));
            for (int i = 0; i < 100; ++i) {
                const double z = uz(gen);
                const double fd =
                    (b.evaluate(2, z + h, order - 1) - b.evaluate(2, z - h, order - 1)) /
                    (2 * h);
                const double an = b.evaluate(2, z, order);
                CHECK(std::abs(an - fd) <= 1e-5 * (std::abs(an) + scale));
            }
        }
    }
}

TEST_CASE("composition is linear and matches per-electrode evaluation") {
    const ElectrodeBasis& b = default_basis();
    std::vector<double> v = {0.3, -0.1, 0.8, 0.0, -0.5, 0.2, 0.9, -0.4, 0.05};
    const ComposedPotential pot = b.compose(v);
    for (double z : {-7e-4, 0.0, 4.2e-4}) {
        double direct = 0.0;
        for (int i = 0; i < 9; ++i) direct += v[i] * b.evaluate(i, z, 0);
        CHECK(pot.value(z) == doctest::Approx(direct).epsilon(1e-12));
    }
    std::vector<double> v2 = v;
    for (double& x : v2) x *= 2.0;
    const ComposedPotential pot2 = b.compose(v2);
    for (double z : {-7e-4, 1e-4, 4.2e-4})
        CHECK(pot2.value(z) == doctest::Approx(2.0 * pot.value(z)).epsilon(1e-12));
}

TEST_CASE("series tail bound is small and decreasing with more terms") {
    const ElectrodeBasis b100 = ElectrodeBasis::build_analytic(kGeom, 100);
    const ElectrodeBasis& b200 = default_basis();
    for (int order = 0; order <= 4; ++order) {
        CHECK(b200.tail_bound(order) < b100.tail_bound(order));
        CHECK(b200.tail_bound(order) >= 0.0);
    }
    // 4th-derivative scale in this geometry is ~1e13 V/m^4; the truncated
    // tail must be negligible against it
    CHECK(b200.tail_bound(4) < 1e4);
}

TEST_CASE("evaluate rejects out-of-domain and bad order") {
    const ElectrodeBasis& b = default_basis();
    CHECK_THROWS_AS(b.evaluate(4, 1.1 * b.axial_extent(), 0), std::domain_error);
    CHECK_THROWS_AS(b.evaluate(4, 0.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(b.evaluate(11, 0.0, 0), std::out_of_range);
}

TEST_CASE("imported table reproduces the analytic basis") {
    const ElectrodeBasis& ref = default_basis();
    const double ext = 0.98 * ref.axial_extent();
    const int n = 1201;  // ~5 um spacing
    std::vector<double> z(n);
    std::vector<std::vector<double>> phi(9), dphi(9);
    for (int e = 0; e < 9; ++e) {
        phi[e].resize(n);
        dphi[e].resize(n);
    }
    for (int i = 0; i < n; ++i) {
        z[i] = -ext + 2 * ext * i / (n - 1);
        for (int e = 0; e < 9; ++e) {
            phi[e][i] = ref.evaluate(e, z[i], 0);
            dphi[e][i] = ref.evaluate(e, z[i], 1);
        }
    }
    const ElectrodeBasis imp = ElectrodeBasis::import_table(z, phi, dphi, kGeom);
    CHECK(imp.source() == ElectrodeBasis::Source::imported_table);

    // midpoints between grid nodes, interior region
    double max0 = 0.0, max2 = 0.0;
    for (int i = 200; i < n - 200; i += 7) {
        const double zm = 0.5 * (z[i] + z[i + 1]);
        for (int e : {0, 4, 7}) {
            const double r0 = ref.evaluate(e, zm, 0), s0 = imp.evaluate(e, zm, 0);
            const double r2 = ref.evaluate(e, zm, 2), s2 = imp.evaluate(e, zm, 2);
            max0 = std::max(max0, std::abs(s0 - r0) / (std::abs(r0) + 1e-3));
            max2 = std::max(max2, std::abs(s2 - r2) / (std::abs(r2) + 1e3));
        }
    }
    CHECK(max0 < 1e-6);
    CHECK(max2 < 1e-6);
}

TEST_CASE("imported constant column has vanishing derivatives") {
    const int n = 401;
    const double ext = 2e-3;
    std::vector<double> z(n);
    std::vector<std::vector<double>> phi(9), dphi(9);
    for (int e = 0; e < 9; ++e) {
        phi[e].assign(n, 1.0);
        dphi[e].assign(n, 0.0);
    }
    for (int i = 0; i < n; ++i) z[i] = -ext + 2 * ext * i / (n - 1);
    const ElectrodeBasis imp = ElectrodeBasis::import_table(z, phi, dphi, kGeom);
    // zero up to roundoff; high orders amplify machine epsilon by 1/h^order
    const double h = z[1] - z[0];
    for (int order = 1; order <= 4; ++order) {
        const double roundoff = 1e-10 / std::pow(h, order);
        CHECK(std::abs(imp.evaluate(0, 3.3e-4, order)) < std::max(1e-6, roundoff));
    }
}

TEST_CASE("imported table rejects NaN and ragged input") {
    const int n = 401;
    const double ext = 2e-3;
    std::vector<double> z(n);
    for (int i = 0; i < n; ++i) z[i] = -ext + 2 * ext * i / (n - 1);
    std::vector<std::vector<double>> phi(9, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> dphi(9, std::vector<double>(n, 0.0));
    phi[3][77] = std::nan("");
    CHECK_THROWS_WITH_AS(ElectrodeBasis::import_table(z, phi, dphi, kGeom),
                         doctest::Contains("row 77"), std::invalid_argument);

    phi[3][77] = 0.0;
    std::vector<double> z_bad = z;
    z_bad[100] += 1e-5;
    CHECK_THROWS_AS(ElectrodeBasis::import_table(z_bad, phi, dphi, kGeom),
                    std::invalid_argument);
}
