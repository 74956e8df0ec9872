#include <catch2/catch_amalgamated.hpp>

#include "lpvl1/sdp.hpp"
#include "lpvl1/sdp_solver.hpp"

using namespace lpvl1;

namespace {

// min x subject to [[1, x],[x, 1]] >= 0, i.e. x >= -1
SdpProblem corr_matrix_problem() {
    SdpProblem P;
    int x = P.add_var();
    P.set_objective(x, 1.0);
    LmiBlock b;
    b.tag = "corr";
    b.dim = 2;
    b.g0 = -Mat::Identity(2, 2);  // -(I + x E) <= 0
    b.coef = {{x, 0, 1, -1.0}, {x, 1, 0, -1.0}};
    P.blocks.push_back(b);
    return P;
}

}  // namespace

TEST_CASE("bounded scalar variable: min/max over [-1, 1]") {
    auto P = corr_matrix_problem();
    auto sol = solve_sdp(P);
    REQUIRE(sol.status == SdpSolution::Status::Optimal);
    REQUIRE(sol.obj == Catch::Approx(-1.0).margin(1e-5));

    P.set_objective(0, -1.0);  // maximize x
    auto sol2 = solve_sdp(P);
    REQUIRE(sol2.status == SdpSolution::Status::Optimal);
    REQUIRE(sol2.x[0] == Catch::Approx(1.0).margin(1e-5));
}

TEST_CASE("feasibility: Lyapunov inequality for a stable matrix") {
    // A = [[-1, 1], [0, -2]]; find P > I with A'P + PA < 0
    SdpProblem prob;
    SymMatVar P(prob, 2, 0);
    Mat A(2, 2);
    A << -1, 1, 0, -2;
    Vec w1 = P.value_weights(Vec(0));

    BlockBuilder lyap("lyap", 2);
    lyap.add_LVR(0, 0, A.transpose(), P, w1, Mat::Identity(2, 2));
    lyap.add_LVR(0, 0, Mat::Identity(2, 2), P, w1, A);
    prob.blocks.push_back(lyap.finish(Sense::NegDef, 1e-7, 0.0));

    BlockBuilder lower("P_lower", 2);
    lower.add_const(0, 0, Mat::Identity(2, 2));
    lower.add_LVR(0, 0, Mat::Identity(2, 2), P, w1, Mat::Identity(2, 2), -1.0);
    prob.blocks.push_back(lower.finish(Sense::NegDef, 1e-7, 0.0));

    auto sol = solve_sdp(prob);
    REQUIRE(sol.status == SdpSolution::Status::Feasible);
    Mat Pv = P.value(sol.x, Vec(0));
    REQUIRE(min_eig_sym(Pv) >= 1.0 - 1e-6);
    REQUIRE(max_eig_sym(A.transpose() * Pv + Pv * A) < 0.0);
}

TEST_CASE("infeasibility is detected cleanly") {
    // A = +1 is unstable: no P >= 1 with 2 A P <= -eps
    SdpProblem prob;
    int p = prob.add_var();
    LmiBlock b1;
    b1.tag = "lyap";
    b1.dim = 1;
    b1.g0 = Mat::Zero(1, 1);
    b1.coef = {{p, 0, 0, 2.0}};  // 2Ap = 2p <= 0 forces p <= 0
    prob.blocks.push_back(b1);
    LmiBlock b2;
    b2.tag = "lower";
    b2.dim = 1;
    b2.g0 = Mat::Ones(1, 1);  // 1 - p <= 0 forces p >= 1
    b2.coef = {{p, 0, 0, -1.0}};
    prob.blocks.push_back(b2);
    auto sol = solve_sdp(prob);
    REQUIRE(sol.status == SdpSolution::Status::Infeasible);
    REQUIRE(sol.phase1_s > 0.0);
}

TEST_CASE("linear objective with multiple blocks: projection-style problem") {
    // min t s.t. t >= |a|, t >= |b| encoded as 2x2 psd blocks, a = 0.3, b = -0.7
    SdpProblem prob;
    int t = prob.add_var();
    prob.set_objective(t, 1.0);
    auto abs_block = [&](double v) {
        LmiBlock b;
        b.dim = 2;
        b.g0 = Mat::Zero(2, 2);
        b.g0(0, 1) = -v;
        b.g0(1, 0) = -v;
        b.coef = {{t, 0, 0, -1.0}, {t, 1, 1, -1.0}};  // -(tI + [0 v; v 0]) <= 0
        return b;
    };
    prob.blocks.push_back(abs_block(0.3));
    prob.blocks.push_back(abs_block(-0.7));
    auto sol = solve_sdp(prob);
    REQUIRE(sol.status == SdpSolution::Status::Optimal);
    REQUIRE(sol.obj == Catch::Approx(0.7).margin(1e-5));
}

TEST_CASE("block builder rejects asymmetric assemblies") {
    SdpProblem prob;
    SymMatVar P(prob, 2, 0);
    Mat A(2, 2);
    A << -1, 1, 0, -2;
    BlockBuilder bb("bad", 2);
    bb.add_LVR(0, 0, A.transpose(), P, P.value_weights(Vec(0)), Mat::Identity(2, 2));
    REQUIRE_THROWS_AS(bb.finish(Sense::NegDef, 0.0, 0.0), std::logic_error);
}

TEST_CASE("solver is deterministic") {
    auto P = corr_matrix_problem();
    auto a = solve_sdp(P);
    auto b = solve_sdp(P);
    REQUIRE(a.x == b.x);
    REQUIRE(a.newton_steps == b.newton_steps);
}
