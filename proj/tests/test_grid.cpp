#include <doctest.h>

#include <random>
#include <set>
#include <stdexcept>

#include "nsopt/grid.hpp"

using namespace nsopt;

TEST_CASE("unit square 8x8: spacings and boundary faces") {
    const Grid g = build_grid(1.0, 1.0, 8, 8);
    CHECK(g.hx == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(g.hy == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(g.boundary_faces().size() == 32);
    CHECK(g.perimeter() == doctest::Approx(4.0).epsilon(1e-13));
}

TEST_CASE("anisotropic extents") {
    const Grid g = build_grid(2.0, 1.0, 8, 4);
    CHECK(g.hx == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.hy == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g.perimeter() == doctest::Approx(6.0).epsilon(1e-13));
}

TEST_CASE("invalid grids rejected") {
    CHECK_THROWS_AS(build_grid(0.0, 1.0, 8, 8), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1.0, -1.0, 8, 8), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1.0, 1.0, 3, 8), std::invalid_argument);
    CHECK_THROWS_AS(build_grid(1.0, 1.0, 8, 2), std::invalid_argument);
}

TEST_CASE("boundary face geometry: normals axis-aligned, tangent is nu rotated +90") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> res(4, 24);
    std::uniform_real_distribution<double> len(0.2, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Grid g = build_grid(len(rng), len(rng), res(rng), res(rng));
        double sum = 0;
        for (const auto& f : g.boundary_faces()) {
            CHECK(std::abs(f.nu_x * f.nu_x + f.nu_y * f.nu_y - 1.0) < 1e-14);
            const bool axis = (f.nu_x == 0 && std::abs(f.nu_y) == 1) ||
                              (f.nu_y == 0 && std::abs(f.nu_x) == 1);
            CHECK(axis);
            CHECK(f.tau_x == doctest::Approx(-f.nu_y));
            CHECK(f.tau_y == doctest::Approx(f.nu_x));
            sum += f.length;
        }
        CHECK(sum == doctest::Approx(2 * (g.Lx + g.Ly)).epsilon(1e-12));
    }
}

TEST_CASE("velocity quadrature weights tile the domain") {
    const Grid g = build_grid(1.5, 0.8, 12, 10);
    double wx = 0, wy = 0;
    for (int i = 0; i <= g.nx; ++i)
        for (int j = 0; j <= g.ny + 1; ++j) wx += g.ux_weight(i, j);
    for (int i = 0; i <= g.nx + 1; ++i)
        for (int j = 0; j <= g.ny; ++j) wy += g.uy_weight(i, j);
    CHECK(wx == doctest::Approx(g.Lx * g.Ly).epsilon(1e-13));
    CHECK(wy == doctest::Approx(g.Lx * g.Ly).epsilon(1e-13));
}

TEST_CASE("control mask: area and rejection") {
    const Grid g = build_grid(1.0, 1.0, 16, 16);
    SUBCASE("aligned quarter square") {
        const ControlMask m = build_control_mask(g, 0.25, 0.25, 0.75, 0.75);
        CHECK(m.area == doctest::Approx(0.25).epsilon(1e-13));
        double qa = 0, qb = 0;
        for (double v : m.qx) qa += v;
        for (double v : m.qy) qb += v;
        CHECK(qa == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(qb == doctest::Approx(0.25).epsilon(1e-12));
        for (double v : m.wx) CHECK((v >= 0 && v <= 1 + 1e-14));
        for (double v : m.wy) CHECK((v >= 0 && v <= 1 + 1e-14));
    }
    SUBCASE("whole domain is not compactly contained") {
        CHECK_THROWS_AS(build_control_mask(g, 0.0, 0.0, 1.0, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(build_control_mask(g, 0.1, 0.0, 0.5, 0.5), std::invalid_argument);
    }
    SUBCASE("empty region rejected") {
        CHECK_THROWS_AS(build_control_mask(g, 0.5, 0.5, 0.5, 0.7), std::invalid_argument);
    }
}

TEST_CASE("control mask: unaligned region still integrates exactly") {
    // oracle: count weighted faces x overlap areas must reproduce |omega|
    const Grid g = build_grid(1.0, 1.0, 64, 64);
    const ControlMask m = build_control_mask(g, 0.3, 0.3, 0.4, 0.7);
    double qa = 0;
    for (double v : m.qx) qa += v;
    CHECK(qa == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("control mask: integer-cell translation permutes the weight multiset") {
    const Grid g = build_grid(1.0, 1.0, 16, 16);
    const ControlMask a = build_control_mask(g, 0.20, 0.20, 0.45, 0.40);
    const ControlMask b = build_control_mask(g, 0.20 + 2 * g.hx, 0.20 + 3 * g.hy,
                                             0.45 + 2 * g.hx, 0.40 + 3 * g.hy);
    std::multiset<double> wa, wb;
    for (double v : a.wx)
        if (v > 0) wa.insert(v);
    for (double v : b.wx)
        if (v > 0) wb.insert(v);
    CHECK(wa.size() == wb.size());
    auto ia = wa.begin();
    auto ib = wb.begin();
    for (; ia != wa.end(); ++ia, ++ib) CHECK(*ia == doctest::Approx(*ib).epsilon(1e-12));
}

TEST_CASE("periodic channel grid has only horizontal walls") {
    const Grid g = build_grid(1.0, 1.0, 8, 8, /*periodic_x=*/true);
    CHECK(g.boundary_faces().size() == 16);
    CHECK(g.perimeter() == doctest::Approx(2.0));
}

TEST_CASE("time grid: dt derived from T and nt") {
    const TimeGrid t{0.5, 25};
    CHECK(t.dt() * t.nt == doctest::Approx(0.5).epsilon(1e-16));
    CHECK(t.dt() == doctest::Approx(0.02));
}
