#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lpvl1/null_complement.hpp"

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

ParamMatrix f16_B() {
    auto cat = BasisCatalog::affine(2);
    Mat b0(2, 1), b1(2, 1);
    b0 << -0.002, -0.264;
    b1 << 0.001, -0.241;
    ParamMatrix B(b0, cat);
    B.add_term(0, b1);
    return B;
}

}  // namespace

TEST_CASE("canonical complement of B = [1;0]") {
    Vec lo(1), hi(1), z(1);
    lo << -1;
    hi << 1;
    z << 0;
    ParamDomain d(lo, hi, z, z, {3});
    Mat b(2, 1);
    b << 1, 0;
    ParamMatrix B(b, BasisCatalog::affine(1));
    NullComplement nc(B, d);
    Vec th(1);
    th << 0.0;
    Mat bu = nc.eval(th);
    REQUIRE(bu.rows() == 2);
    REQUIRE(bu.cols() == 1);
    REQUIRE(std::abs(bu(0, 0)) < 1e-14);
    REQUIRE(std::abs(std::abs(bu(1, 0)) - 1.0) < 1e-14);
}

TEST_CASE("F-16 complement at the scheduling origin") {
    auto nc = NullComplement(f16_B(), f16_domain());
    Vec th = Vec::Zero(2);
    Mat bu = nc.eval(th);
    Mat b = f16_B().eval(th);
    REQUIRE(std::abs((b.transpose() * bu)(0, 0)) < 1e-12);
    REQUIRE(std::abs(bu.norm() - 1.0) < 1e-12);
    // direction proportional to [-0.264, 0.002] up to sign
    Vec dir(2);
    dir << -0.264, 0.002;
    dir.normalize();
    REQUIRE(std::abs(std::abs(bu.col(0).dot(dir)) - 1.0) < 1e-12);
}

TEST_CASE("orthogonality residual over the whole F-16 grid") {
    auto B = f16_B();
    auto d = f16_domain();
    NullComplement nc(B, d);
    auto pts = d.grid_points();
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Mat bu = nc.at_grid(i);
        worst = std::max(worst, (B.eval(pts[i]).transpose() * bu).norm());
        // [B Bu] nonsingular
        Mat full(2, 2);
        full << B.eval(pts[i]), bu;
        REQUIRE(smallest_singular_value(full) > 1e-6);
    }
    REQUIRE(worst <= 1e-10);
}

TEST_CASE("grid-adjacent bases are sign-aligned") {
    auto B = f16_B();
    auto d = f16_domain();
    NullComplement nc(B, d);
    for (std::size_t i = 1; i < d.grid_points().size(); ++i) {
        double dot = (nc.at_grid(i).transpose() * nc.at_grid(i - 1)).trace();
        REQUIRE(dot > 0.0);  // never flips sign along the enumeration
    }
}

TEST_CASE("off-grid evaluation aligns with the nearest grid basis") {
    auto B = f16_B();
    auto d = f16_domain();
    NullComplement nc(B, d);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        Vec th(2);
        th << u(rng), u(rng);
        Mat bu = nc.eval(th);
        REQUIRE((B.eval(th).transpose() * bu).norm() < 1e-12);
        Mat ref = nc.at_grid(nc.nearest_grid_index(th));
        REQUIRE((bu - ref).norm() < 0.5);  // continuity: same orientation as neighbor
    }
}

TEST_CASE("rank deficiency is reported") {
    Vec lo(1), hi(1), z(1);
    lo << -1;
    hi << 1;
    z << 0;
    ParamDomain d(lo, hi, z, z, {3});
    auto cat = BasisCatalog::affine(1);
    Mat b0(2, 1), b1(2, 1);
    b0 << 0, 0;
    b1 << 1, 1;  // vanishes at theta = 0
    ParamMatrix B(b0, cat);
    B.add_term(0, b1);
    REQUIRE_THROWS_AS(NullComplement(B, d), NumericalError);
}
