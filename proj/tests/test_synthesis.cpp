#include <catch2/catch_amalgamated.hpp>

#include "lpvl1/synthesis.hpp"

using namespace lpvl1;

namespace {

// scalar plant dx = a x + b u on an LTI domain
struct ScalarPlant {
    ParamMatrix A, B;
    ParamDomain d = ParamDomain::lti();
};

ScalarPlant make_scalar(double a, double b) {
    Mat A(1, 1), B(1, 1);
    A << a;
    B << b;
    return {ParamMatrix(A), ParamMatrix(B)};
}

// two-state LTI test plant with one input, used for the synthesis round trip
struct TwoStatePlant {
    ClosedLoopData cl;
    NullComplement Bu;
    ParamDomain d = ParamDomain::lti();
};

TwoStatePlant make_two_state() {
    Mat Am(2, 2), B(2, 1), C(1, 2);
    Am << -1.0, 0.8, -0.8, -2.0;
    B << 0.2, 1.0;
    C << 1.0, 0.0;
    TwoStatePlant p;
    p.cl.Am = ParamMatrix(Am);
    p.cl.B = ParamMatrix(B);
    p.cl.C = ParamMatrix(C);
    Mat kr(1, 1);
    kr << 1.0;
    p.cl.Kr = ParamMatrix(kr);
    p.cl.n = 2;
    p.cl.m = 1;
    p.cl.p = 1;
    p.Bu = NullComplement(p.cl.B, p.d);
    return p;
}

}  // namespace

TEST_CASE("baseline_gain: scalar pole assignment") {
    auto p = make_scalar(0.0, 1.0);
    auto res = baseline_gain(p.A, p.B, p.d, 1.0);
    double k = res.Kx.eval(Vec(0))(0, 0);
    REQUIRE(k <= -1.0 + 1e-6);  // closed loop at or left of -alpha
    REQUIRE(res.cert.verified);
    REQUIRE(res.mu_P == Catch::Approx(2.0));
    // round trip through certify_stability
    Mat Amv(1, 1);
    Amv << 0.0 + k;
    auto cert = certify_stability(ParamMatrix(Amv), p.d, {0.5, 1.0, 2.0});
    REQUIRE(cert.verified);
}

TEST_CASE("baseline_gain: uncontrollable unstable pair is infeasible") {
    auto p = make_scalar(1.0, 0.0);
    REQUIRE_THROWS_AS(baseline_gain(p.A, p.B, p.d, 0.5), InfeasibleError);
}

TEST_CASE("feedforward_gain examples") {
    SECTION("identity DC gain") {
        auto Kr = feedforward_gain(ParamMatrix(-Mat::Identity(2, 2)), ParamMatrix(Mat::Identity(2, 2)),
                                   ParamMatrix(Mat::Identity(2, 2)), 0);
        REQUIRE((Kr.eval(Vec(0)) - Mat::Identity(2, 2)).norm() < 1e-12);
    }
    SECTION("scalar -(1 * (-1/2) * 1)^{-1} = 2") {
        Mat am(1, 1), one(1, 1);
        am << -2.0;
        one << 1.0;
        auto Kr = feedforward_gain(ParamMatrix(am), ParamMatrix(one), ParamMatrix(one), 0);
        REQUIRE(Kr.eval(Vec(0))(0, 0) == Catch::Approx(2.0));
    }
    SECTION("frozen closed-loop DC gain from r to y is identity") {
        auto p = make_two_state();
        auto Kr = feedforward_gain(p.cl.Am, p.cl.B, p.cl.C, 0);
        Mat dc = p.cl.C.eval(Vec(0)) *
                 (-p.cl.Am.eval(Vec(0)).inverse() * p.cl.B.eval(Vec(0)) * Kr.eval(Vec(0)));
        REQUIRE((dc - Mat::Identity(1, 1)).norm() < 1e-9);
    }
}

TEST_CASE("build_generalized_plant block bookkeeping") {
    auto p = make_two_state();
    Mat dw(2, 1);
    dw << 1.0, 0.0;
    auto gp = build_generalized_plant(p.cl, p.Bu, WeightSystem::static_gain(dw));
    REQUIRE(gp.nbar == 4);
    REQUIRE(gp.num() == 1);
    REQUIRE(gp.nz == 2);
    Vec th(0);
    Mat B1 = gp.Bbar1.eval(th);
    REQUIRE((B1.topRows(2) - p.Bu.eval(th)).norm() < 1e-14);
    REQUIRE(B1.bottomRows(2).norm() == 0.0);
    REQUIRE((gp.D21 - Mat::Identity(1, 1)).norm() == 0.0);
    // block-triangular spectrum: eigenvalues of Abar are those of Am doubled
    Mat Ab = gp.Abar.eval(th);
    Eigen::EigenSolver<Mat> esA(p.cl.Am.eval(th), false), esAb(Ab, false);
    std::vector<double> got, expect;
    for (int i = 0; i < 4; ++i) got.push_back(esAb.eigenvalues()[i].real());
    for (int i = 0; i < 2; ++i) {
        expect.push_back(esA.eigenvalues()[i].real());
        expect.push_back(esA.eigenvalues()[i].real());
    }
    std::sort(got.begin(), got.end());
    std::sort(expect.begin(), expect.end());
    for (int i = 0; i < 4; ++i) REQUIRE(got[i] == Catch::Approx(expect[i]).margin(1e-10));
}

TEST_CASE("synthesize_uua: zero weight admits an arbitrarily small gamma") {
    auto p = make_two_state();
    auto gp = build_generalized_plant(p.cl, p.Bu, WeightSystem::static_gain(Mat::Zero(2, 1)));
    auto res = synthesize_uua(gp, p.d, {1.0});
    REQUIRE(res.gamma < 1e-4);
}

TEST_CASE("synthesize_uua beats the open loop and re-verifies") {
    auto p = make_two_state();
    Mat dw(2, 1);
    dw << 1.0, 0.0;
    auto gp = build_generalized_plant(p.cl, p.Bu, WeightSystem::static_gain(dw));

    auto open_ppg = ppg_bound(open_loop_uua_map(gp), p.d, nullptr, {0.5, 1.0, 1.5, 2.0});
    auto res = synthesize_uua(gp, p.d, {0.5, 1.0, 1.5, 2.0});
    CAPTURE(res.gamma, open_ppg.gamma, res.gamma_closed_loop);
    REQUIRE(res.gamma < open_ppg.gamma);
    REQUIRE(res.cert.verified);
    REQUIRE(res.reverified);
    REQUIRE(res.gamma_closed_loop <= 1.1 * res.gamma);
    // X - Y positive definite at every grid point is asserted inside; spot check
    Vec th(0);
    Mat XY = res.cert.decision("X").eval(th) - res.cert.decision("Y").eval(th);
    REQUIRE(min_eig_sym(XY) > 0.0);
}
