#include <catch2/catch_amalgamated.hpp>

#include "lpvl1/analysis.hpp"

using namespace lpvl1;

namespace {

LpvStateSpace lti_first_order(double a, double b, double c, double dd) {
    Mat A(1, 1), B(1, 1), C(1, 1), D(1, 1);
    A << a;
    B << b;
    C << c;
    D << dd;
    return LpvStateSpace::from_matrices("H", ParamMatrix(A), ParamMatrix(B), ParamMatrix(C),
                                        ParamMatrix(D));
}

}  // namespace

TEST_CASE("certify_stability: constant A = -I is feasible at mu = 1 with P ~ I") {
    auto d = ParamDomain::lti();
    ParamMatrix A(-Mat::Identity(2, 2));
    auto cert = certify_stability(A, d, {0.25, 0.5, 1.0});
    REQUIRE(cert.verified);
    REQUIRE(cert.scalar("mu_P") == Catch::Approx(1.0));
    Mat P = cert.decision("P").eval(Vec(0));
    // conditioning objective drives P toward the identity scale
    REQUIRE(max_eig_sym(P) / min_eig_sym(P) < 1.5);
    REQUIRE(cert.max_residual <= 1e-7);
}

TEST_CASE("certify_stability: scalar unstable A = +1 is infeasible for every mu") {
    auto d = ParamDomain::lti();
    Mat a(1, 1);
    a << 1.0;
    REQUIRE_THROWS_AS(certify_stability(ParamMatrix(a), d, {0.1, 1.0}), InfeasibleError);
}

TEST_CASE("ppg_bound: first-order LTI oracle gamma(mu) = 1/sqrt(mu(2-mu))") {
    auto d = ParamDomain::lti();
    auto sys = lti_first_order(-1.0, 1.0, 1.0, 0.0);

    SECTION("fixed mu values match the closed form to 5%") {
        for (double mu : {0.5, 1.0, 1.5}) {
            auto res = ppg_bound(sys, d, nullptr, {mu});
            double expect = 1.0 / std::sqrt(mu * (2.0 - mu));
            CAPTURE(mu, res.gamma, expect);
            REQUIRE(res.gamma == Catch::Approx(expect).epsilon(0.05));
            REQUIRE(res.gamma >= expect - 1e-6);  // upper bound, never below the true value
        }
    }

    SECTION("line search over {0.1,...,1.9} lands in [1.0, 1.05]") {
        std::vector<double> grid;
        for (double mu = 0.1; mu < 1.95; mu += 0.1) grid.push_back(mu);
        auto res = ppg_bound(sys, d, nullptr, grid);
        REQUIRE(res.gamma >= 1.0 - 1e-9);
        REQUIRE(res.gamma <= 1.05);
        REQUIRE(res.mu == Catch::Approx(1.0).margin(0.25));
        REQUIRE(res.certificate.verified);
    }
}

TEST_CASE("ppg_bound: zero output map gives a gamma below any tolerance") {
    auto d = ParamDomain::lti();
    auto sys = lti_first_order(-1.0, 1.0, 0.0, 0.0);
    auto res = ppg_bound(sys, d, nullptr, {1.0});
    REQUIRE(res.gamma < 1e-4);
}

TEST_CASE("ppg_bound scales linearly with the output map") {
    auto d = ParamDomain::lti();
    auto base = ppg_bound(lti_first_order(-1.0, 1.0, 1.0, 0.0), d, nullptr, {0.8});
    double c = 3.7;
    auto scaled = ppg_bound(lti_first_order(-1.0, 1.0, c, 0.0), d, nullptr, {0.8});
    REQUIRE(scaled.gamma / base.gamma == Catch::Approx(c).epsilon(0.01));
}

TEST_CASE("ppg_bound on an LPV system with rate vertices and omega replication") {
    // dx = a(th) x + w u, y = x with a(th) = -2 + 0.5 th in [-2.5, -1.5]
    Vec lo(1), hi(1), rlo(1), rhi(1);
    lo << -1;
    hi << 1;
    rlo << -0.1;
    rhi << 0.1;
    ParamDomain d(lo, hi, rlo, rhi, {5});
    auto cat = BasisCatalog::affine(1);
    Mat a0(1, 1), a1(1, 1);
    a0 << -2.0;
    a1 << 0.5;
    ParamMatrix A(a0, cat);
    A.add_term(0, a1);
    LpvStateSpace sys("lpv1", 1, 1, 1);
    sys.A.base.place(0, 0, A);
    for (int i = 0; i < 1; ++i) {
        Mat one(1, 1);
        one << 1.0;
        sys.B.omega_term(0, 0).place_const(0, 0, one);
    }
    sys.C.base.place_const(0, 0, Mat::Identity(1, 1));
    auto omega = OmegaPolytope::scalar_interval(0.5, 1.5);
    auto res = ppg_bound(sys, d, &omega, {1.0, 1.5, 2.0});
    // frozen worst case: |w| max 1.5, pole -1.5 -> DC gain 1.5/1.5 = 1; PPG bound >= 1
    REQUIRE(res.gamma >= 1.0 - 1e-6);
    REQUIRE(res.gamma < 4.0);
    REQUIRE(res.certificate.verified);
}

TEST_CASE("beta_theta basics") {
    REQUIRE(beta_theta_raw(0.0, 2.0, 1.0, 1.0, 1.0) == 0.0);
    // monotone in t with a finite limit
    double prev = 0.0;
    for (double t : {0.1, 0.5, 1.0, 5.0, 50.0}) {
        double b = beta_theta_raw(t, 2.0, 1.0, 1.0, 1.0);
        REQUIRE(b >= prev);
        prev = b;
    }
    double inf = beta_theta_raw(std::numeric_limits<double>::infinity(), 2.0, 1.0, 1.0, 1.0);
    REQUIRE(prev <= inf);
    REQUIRE(inf == Catch::Approx(1.0));
    // scalar P = 1, B = 1, mu = 2: beta(t) = sqrt(1 - e^{-2t}) * (2/2)
    double t = std::log(2.0);
    REQUIRE(beta_theta_raw(t, 2.0, 1.0, 1.0, 1.0) == Catch::Approx(std::sqrt(0.75)).epsilon(1e-12));
    REQUIRE(beta_theta_raw(0.5 * std::log(2.0), 2.0, 1.0, 1.0, 1.0) ==
            Catch::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("rho_in: identity certificate returns rho0 and is scale invariant") {
    auto d = ParamDomain::lti();
    Certificate cert;
    cert.kind = "stability";
    cert.solve_counts = {};
    cert.decisions["P"] = ParamMatrix(Mat::Identity(2, 2));
    REQUIRE(rho_in(cert, 0.3, d) == Catch::Approx(0.3));
    cert.decisions["P"] = ParamMatrix(5.0 * Mat::Identity(2, 2));
    REQUIRE(rho_in(cert, 0.3, d) == Catch::Approx(0.3));
}
