#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hypxray/geometry.hpp"

using namespace hypxray;

namespace {

std::mt19937& rng() {
    static std::mt19937 gen(2024);
    return gen;
}

DiskPoint random_point(double max_abs = 0.85) {
    std::uniform_real_distribution<double> rad(0.0, max_abs), ang(0.0, 2.0 * kPi);
    return DiskPoint(std::polar(rad(rng()), ang(rng())));
}

IsometryElement random_isometry() {
    std::uniform_real_distribution<double> s(-2.0, 2.0), ang(0.0, 2.0 * kPi);
    return IsometryElement::rotation(ang(rng()))
        .compose(IsometryElement::translation(s(rng()), ang(rng())))
        .compose(IsometryElement::rotation(ang(rng())));
}

}  // namespace

TEST_CASE("disk point construction guards the boundary") {
    CHECK_NOTHROW(DiskPoint(0.5, 0.3));
    CHECK_THROWS_AS(DiskPoint(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(DiskPoint(0.7071067812, 0.7071067812), std::invalid_argument);
}

TEST_CASE("identity and rotation actions") {
    DiskPoint p(0.3, -0.2);
    CHECK(std::abs(apply_isometry(IsometryElement::identity(), p).coord - p.coord) < 1e-15);

    double alpha = 0.77;
    DiskPoint q = apply_isometry(IsometryElement::rotation(alpha), p);
    CHECK(std::abs(q.coord - p.coord * std::polar(1.0, alpha)) < 1e-14);
}

TEST_CASE("axis translation moves origin by hyperbolic distance") {
    double s = 1.3;
    DiskPoint img = apply_isometry(IsometryElement::translation(s), DiskPoint());
    CHECK(img.coord.real() == doctest::Approx(std::tanh(0.5 * s)).epsilon(1e-14));
    CHECK(std::abs(img.coord.imag()) < 1e-15);
    CHECK(distance(DiskPoint(), img) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("distance closed form") {
    CHECK(distance(DiskPoint(), DiskPoint()) == 0.0);
    // d(0, 0.5) = ln 3 (= integral of 2/(1-t^2) from 0 to 1/2)
    CHECK(distance(DiskPoint(), DiskPoint(0.5, 0.0)) ==
          doctest::Approx(1.0986122886681098).epsilon(1e-14));
    DiskPoint a(0.3, 0.0), b(0.0, 0.3);
    CHECK(distance(a, b) == doctest::Approx(distance(b, a)).epsilon(1e-15));
}

TEST_CASE("isometry invariance of the distance") {
    for (int i = 0; i < 100; ++i) {
        DiskPoint p = random_point(), q = random_point();
        IsometryElement g = random_isometry();
        double d0 = distance(p, q);
        double d1 = distance(apply_isometry(g, p), apply_isometry(g, q));
        CHECK(std::abs(d0 - d1) <= 1e-10 * (1.0 + d0));
    }
}

TEST_CASE("group closure keeps the SU(1,1) invariant") {
    for (int i = 0; i < 100; ++i) {
        IsometryElement g = random_isometry().compose(random_isometry());
        CHECK(std::abs(g.det_defect()) < 1e-9);
    }
}

TEST_CASE("translate_to_origin") {
    CHECK(std::abs(translate_to_origin(DiskPoint()).a - Complex(1.0, 0.0)) < 1e-15);

    DiskPoint p(0.5, 0.0);
    IsometryElement g = translate_to_origin(p);
    CHECK(std::abs(apply_isometry(g, p).coord) < 1e-12);
    CHECK(std::abs(apply_isometry(g, DiskPoint()).coord - Complex(-0.5, 0.0)) < 1e-13);

    for (int i = 0; i < 30; ++i) {
        DiskPoint q = random_point(), r = random_point();
        IsometryElement t = translate_to_origin(q);
        CHECK(std::abs(distance(apply_isometry(t, q), apply_isometry(t, r)) - distance(q, r)) <
              1e-10);
    }
}

TEST_CASE("geodesic basics") {
    // Through the origin, angle 0, time ln 3 lands at 0.5.
    DiskPoint p = geodesic_point(UnitTangent(DiskPoint(), 0.0), std::log(3.0));
    CHECK(std::abs(p.coord - Complex(0.5, 0.0)) < 1e-14);

    UnitTangent up(DiskPoint(), 0.5 * kPi);
    for (double t : {0.3, 1.0, 2.5}) {
        DiskPoint q = geodesic_point(up, t);
        CHECK(std::abs(q.coord - Complex(0.0, std::tanh(0.5 * t))) < 1e-13);
    }

    DiskPoint base(0.21, -0.4);
    CHECK(std::abs(geodesic_point(UnitTangent(base, 1.1), 0.0).coord - base.coord) < 1e-14);
}

TEST_CASE("unit speed of geodesics") {
    std::uniform_real_distribution<double> tdist(0.0, 5.0), ang(0.0, 2.0 * kPi);
    for (int i = 0; i < 100; ++i) {
        UnitTangent x(random_point(), ang(rng()));
        double t = tdist(rng());
        CHECK(std::abs(distance(x.base, geodesic_point(x, t)) - t) < 1e-9);
    }
}

TEST_CASE("flow property") {
    std::uniform_real_distribution<double> tdist(0.1, 2.0), ang(0.0, 2.0 * kPi);
    for (int i = 0; i < 50; ++i) {
        UnitTangent x(random_point(0.6), ang(rng()));
        double t = tdist(rng()), s = tdist(rng());
        DiskPoint direct = geodesic_point(x, t + s);
        UnitTangent mid = geodesic_flow(x, t);
        DiskPoint chained = geodesic_point(mid, s);
        CHECK(distance(direct, chained) < 1e-9);
    }
}

TEST_CASE("fiber nodes") {
    auto nodes = fiber_nodes(DiskPoint(), 4);
    REQUIRE(nodes.size() == 4);
    CHECK(nodes[0].first.angle == doctest::Approx(0.0));
    CHECK(nodes[1].first.angle == doctest::Approx(0.5 * kPi));
    CHECK(nodes[2].first.angle == doctest::Approx(kPi));
    CHECK(nodes[3].first.angle == doctest::Approx(1.5 * kPi));
    double wsum = 0.0;
    for (auto& [u, w] : nodes) wsum += w;
    CHECK(wsum == doctest::Approx(2.0 * kPi).epsilon(1e-15));

    auto nodes32 = fiber_nodes(DiskPoint(0.2, 0.1), 32);
    Complex circ{};
    for (auto& [u, w] : nodes32) circ += w * std::cos(u.angle);
    CHECK(std::abs(circ) < 1e-14);

    CHECK_THROWS_AS(fiber_nodes(DiskPoint(), 3), std::invalid_argument);
}

TEST_CASE("apply_isometry rejects degenerate denominators") {
    // A valid element can never produce one; forge an invalid element.
    IsometryElement bad;
    bad.a = Complex(0.0, 0.0);
    bad.b = Complex(1.0, 0.0);
    CHECK_THROWS_AS(apply_isometry(bad, DiskPoint()), std::runtime_error);
}
