#include <catch2/catch_amalgamated.hpp>

#include "lpvl1/domain.hpp"
#include "lpvl1/omega.hpp"

using namespace lpvl1;

namespace {

ParamDomain f16_domain() {
    Vec lo(2), hi(2), rlo(2), rhi(2);
    lo << -1, -1;
    hi << 1, 1;
    rlo << -0.02, -0.05;
    rhi << 0.02, 0.05;
    return ParamDomain(lo, hi, rlo, rhi, {11, 6});
}

}  // namespace

TEST_CASE("1-axis grid with 3 samples hits endpoints and midpoint") {
    Vec lo(1), hi(1), z(1);
    lo << -1;
    hi << 1;
    z << 0;
    ParamDomain d(lo, hi, z, z, {3});
    auto pts = d.grid_points();
    REQUIRE(pts.size() == 3);
    REQUIRE(pts[0][0] == -1.0);
    REQUIRE(pts[1][0] == 0.0);
    REQUIRE(pts[2][0] == 1.0);
}

TEST_CASE("2-axis grid with counts (2,2) gives the 4 corners") {
    Vec lo(2), hi(2), z(2);
    lo << 0, 10;
    hi << 1, 20;
    z.setZero();
    ParamDomain d(lo, hi, z, z, {2, 2});
    auto pts = d.grid_points();
    REQUIRE(pts.size() == 4);
    // row-major: axis 0 slowest
    REQUIRE(pts[0][0] == 0.0);
    REQUIRE(pts[0][1] == 10.0);
    REQUIRE(pts[1][1] == 20.0);
    REQUIRE(pts[3][0] == 1.0);
}

TEST_CASE("F-16 grid has 66 points, all inside the box") {
    auto d = f16_domain();
    auto pts = d.grid_points();
    REQUIRE(pts.size() == 66);
    for (const auto& p : pts) REQUIRE(d.contains(p));
}

TEST_CASE("vertices of 1+1 axes give 4 pairs") {
    Vec lo(1), hi(1), rlo(1), rhi(1);
    lo << -1;
    hi << 1;
    rlo << -2;
    rhi << 2;
    ParamDomain d(lo, hi, rlo, rhi, {2});
    REQUIRE(d.vertices().size() == 4);
}

TEST_CASE("F-16 vertex set has 16 pairs inside the boxes") {
    auto d = f16_domain();
    auto vs = d.vertices();
    REQUIRE(vs.size() == 16);
    for (const auto& [th, thd] : vs) {
        REQUIRE(d.contains(th));
        for (int i = 0; i < 2; ++i) {
            REQUIRE(thd[i] >= d.rate_lo[i] - 1e-15);
            REQUIRE(thd[i] <= d.rate_hi[i] + 1e-15);
        }
    }
}

TEST_CASE("b_theta_dot matches the F-16 value") {
    auto d = f16_domain();
    REQUIRE(d.b_theta_dot() == Catch::Approx(std::sqrt(0.02 * 0.02 + 0.05 * 0.05)).epsilon(1e-12));
    REQUIRE(d.b_theta_dot() == Catch::Approx(0.054).margin(5e-4));
}

TEST_CASE("refined counts are nested doublings") {
    auto d = f16_domain();
    auto c = d.refined_counts();
    REQUIRE(c == std::vector<int>{21, 11});
    // every coarse point appears in the fine grid
    auto coarse = d.grid_points();
    auto fine = d.grid_points(c);
    for (const auto& p : coarse) {
        bool found = false;
        for (const auto& q : fine)
            if ((p - q).norm() < 1e-12) found = true;
        REQUIRE(found);
    }
}

TEST_CASE("LTI domain is the single empty point") {
    auto d = ParamDomain::lti();
    REQUIRE(d.dim() == 0);
    REQUIRE(d.grid_points().size() == 1);
    REQUIRE(d.rate_vertices().size() == 1);
    REQUIRE(d.b_theta_dot() == 0.0);
}

TEST_CASE("invalid domains are rejected") {
    Vec lo(1), hi(1), z(1);
    lo << 1;
    hi << -1;
    z << 0;
    REQUIRE_THROWS_AS(ParamDomain(lo, hi, z, z, {3}), std::invalid_argument);
    lo << -1;
    hi << 1;
    REQUIRE_THROWS_AS(ParamDomain(lo, hi, z, z, {1}), std::invalid_argument);
}

TEST_CASE("omega polytope checks row-diagonal dominance") {
    auto ok = OmegaPolytope::scalar_interval(0.5, 1.5);
    REQUIRE(ok.contains_identity);
    REQUIRE(ok.max_norm_inverse() == Catch::Approx(2.0));
    REQUIRE(ok.max_norm_minus_identity() == Catch::Approx(0.5));

    Mat bad(2, 2);
    bad << 1.0, 2.0, 0.0, 1.0;  // |1| <= |2| violates dominance
    REQUIRE_THROWS_AS(OmegaPolytope(2, {bad}), std::invalid_argument);

    Mat flip(1, 1);
    flip << -1.0;
    Mat pos(1, 1);
    pos << 1.0;
    REQUIRE_THROWS_AS(OmegaPolytope(1, {pos, flip}), std::invalid_argument);
}
