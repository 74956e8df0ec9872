#pragma once

#include <vector>

#include "lpvl1/domain.hpp"
#include "lpvl1/omega.hpp"
#include "lpvl1/realizations.hpp"
#include "lpvl1/sdp.hpp"
#include "lpvl1/state_space.hpp"

namespace lpvl1 {

/// Omega values a robust constraint family must be replicated at: the polytope
/// vertices when the system actually depends on omega, otherwise a single
/// placeholder evaluation.
inline std::vector<Mat> omega_replication(const LpvStateSpace& sys, const OmegaPolytope* omega) {
    if (sys.omega_affine()) {
        if (!omega || omega->vertices.empty())
            throw std::invalid_argument("omega polytope required for an omega-affine system");
        return omega->vertices;
    }
    return {Mat()};
}

inline std::vector<Mat> omega_replication(const OmegaAffineMat& A, const OmegaPolytope* omega) {
    if (A.omega_affine()) {
        if (!omega || omega->vertices.empty())
            throw std::invalid_argument("omega polytope required for an omega-affine system");
        return omega->vertices;
    }
    return {Mat()};
}

// ---------------------------------------------------------------------------
// Stability family:  <A^T P> + Pdot + mu P <= 0,  I <= P <= tau I
// ---------------------------------------------------------------------------

struct StabilityVars {
    SymMatVar P;
    int v_tau = -1;
};

inline StabilityVars assemble_stability(SdpProblem& prob, const OmegaAffineMat& A,
                                        const ParamDomain& d, const OmegaPolytope* omega, double mu,
                                        const std::vector<int>& counts, double eps_rel, double margin,
                                        bool with_tau) {
    const int n = A.rows();
    StabilityVars vars;
    vars.P = SymMatVar(prob, n, d.dim());
    if (with_tau) vars.v_tau = prob.add_var();

    const Mat I = Mat::Identity(n, n);
    auto omegas = omega_replication(A, omega);
    for (const auto& th : d.grid_points(counts)) {
        Vec w = vars.P.value_weights(th);
        for (const auto& thd : d.rate_vertices()) {
            Vec wd = vars.P.rate_weights(thd);
            for (const auto& wv : omegas) {
                Mat Av = A.eval(th, wv);
                BlockBuilder bb("stab", n);
                bb.add_LVR(0, 0, Av.transpose(), vars.P, w, I);
                bb.add_LVR(0, 0, I, vars.P, w, Av);
                bb.add_LVR(0, 0, I, vars.P, wd, I);
                bb.add_LVR(0, 0, I, vars.P, mu * w, I);
                prob.blocks.push_back(bb.finish(Sense::NegDef, eps_rel, margin));
            }
        }
        // normalization P >= I (scale freedom of the Lyapunov inequality)
        BlockBuilder lo("P_lower", n);
        lo.add_const(0, 0, I);
        lo.add_LVR(0, 0, I, vars.P, w, I, -1.0);
        prob.blocks.push_back(lo.finish(Sense::NegDef, eps_rel, 0.0));
        if (with_tau) {
            BlockBuilder hi("P_upper", n);
            hi.add_LVR(0, 0, I, vars.P, w, I);
            hi.add_scalar_diag(0, n, vars.v_tau, -1.0);
            prob.blocks.push_back(hi.finish(Sense::NegDef, eps_rel, 0.0));
        }
    }
    if (with_tau) prob.set_objective(vars.v_tau, 1.0);
    return vars;
}

/// Independent residual of the stability family: largest eigenvalue over all
/// instances of the paper-form blocks (no margins applied).
inline double stability_residual(const OmegaAffineMat& A, const ParamDomain& d,
                                 const OmegaPolytope* omega, double mu, const ParamMatrix& P,
                                 const std::vector<int>& counts) {
    auto omegas = omega_replication(A, omega);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& th : d.grid_points(counts)) {
        Mat Pv = P.eval(th);
        worst = std::max(worst, -min_eig_sym(Pv));  // P(theta) > 0
        for (const auto& thd : d.rate_vertices()) {
            Mat Pd = P.eval_rate(th, thd);
            for (const auto& wv : omegas) {
                Mat Av = A.eval(th, wv);
                Mat M = Av.transpose() * Pv + Pv * Av + Pd + mu * Pv;
                worst = std::max(worst, max_eig_sym(M));
            }
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Peak-to-peak gain family (bounded-real style pair of blocks)
// ---------------------------------------------------------------------------

struct PpgVars {
    SymMatVar P;
    int v_upsilon = -1;
    int v_gamma = -1;
};

inline PpgVars assemble_ppg(SdpProblem& prob, const LpvStateSpace& sys, const ParamDomain& d,
                            const OmegaPolytope* omega, double mu, const std::vector<int>& counts,
                            double eps_rel, double margin) {
    const int nx = sys.nx, nu = sys.nu, ny = sys.ny;
    PpgVars vars;
    vars.P = SymMatVar(prob, nx, d.dim());
    vars.v_upsilon = prob.add_var();
    vars.v_gamma = prob.add_var();
    prob.set_objective(vars.v_gamma, 1.0);

    const Mat Ix = Mat::Identity(nx, nx);
    auto omegas = omega_replication(sys, omega);

    for (const auto& th : d.grid_points(counts)) {
        Vec w = vars.P.value_weights(th);
        for (const auto& wv : omegas) {
            Mat Av = sys.eval_A(th, wv);
            Mat Bv = sys.eval_B(th, wv);
            Mat Cv = sys.eval_C(th, wv);
            Mat Dv = sys.eval_D(th, wv);
            for (const auto& thd : d.rate_vertices()) {
                Vec wd = vars.P.rate_weights(thd);
                BlockBuilder b1("ppg1", nx + nu);
                b1.add_LVR(0, 0, Av.transpose(), vars.P, w, Ix);
                b1.add_LVR(0, 0, Ix, vars.P, w, Av);
                b1.add_LVR(0, 0, Ix, vars.P, mu * w, Ix);
                b1.add_LVR(0, 0, Ix, vars.P, wd, Ix);
                b1.add_LVR(nx, 0, Bv.transpose(), vars.P, w, Ix);
                b1.add_LVR(0, nx, Ix, vars.P, w, Bv);
                b1.add_scalar_diag(nx, nu, vars.v_upsilon, -1.0);
                prob.blocks.push_back(b1.finish(Sense::NegDef, eps_rel, margin));
            }
            BlockBuilder b2("ppg2", nx + nu + ny);
            b2.add_LVR(0, 0, Ix, vars.P, mu * w, Ix);
            b2.add_scalar_diag(nx, nu, vars.v_gamma, 1.0);
            b2.add_scalar_diag(nx, nu, vars.v_upsilon, -1.0);
            b2.add_const(nx + nu, 0, Cv);
            b2.add_const(0, nx + nu, Cv.transpose());
            b2.add_const(nx + nu, nx, Dv);
            b2.add_const(nx, nx + nu, Dv.transpose());
            b2.add_scalar_diag(nx + nu, ny, vars.v_gamma, 1.0);
            prob.blocks.push_back(b2.finish(Sense::PosDef, eps_rel, margin));
        }
    }
    // positivity of the scalars
    BlockBuilder bu("upsilon_pos", 1);
    bu.add_scalar_diag(0, 1, vars.v_upsilon, -1.0);
    prob.blocks.push_back(bu.finish(Sense::NegDef, eps_rel, 0.0));
    BlockBuilder bg("gamma_pos", 1);
    bg.add_scalar_diag(0, 1, vars.v_gamma, -1.0);
    prob.blocks.push_back(bg.finish(Sense::NegDef, eps_rel, 0.0));
    return vars;
}

inline double ppg_residual(const LpvStateSpace& sys, const ParamDomain& d, const OmegaPolytope* omega,
                           double mu, const ParamMatrix& P, double upsilon, double gamma,
                           const std::vector<int>& counts) {
    const int nx = sys.nx, nu = sys.nu, ny = sys.ny;
    auto omegas = omega_replication(sys, omega);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& th : d.grid_points(counts)) {
        Mat Pv = P.eval(th);
        for (const auto& wv : omegas) {
            Mat Av = sys.eval_A(th, wv);
            Mat Bv = sys.eval_B(th, wv);
            Mat Cv = sys.eval_C(th, wv);
            Mat Dv = sys.eval_D(th, wv);
            for (const auto& thd : d.rate_vertices()) {
                Mat M1 = Mat::Zero(nx + nu, nx + nu);
                M1.topLeftCorner(nx, nx) = Av.transpose() * Pv + Pv * Av + mu * Pv + P.eval_rate(th, thd);
                M1.block(nx, 0, nu, nx) = Bv.transpose() * Pv;
                M1.block(0, nx, nx, nu) = Pv * Bv;
                M1.block(nx, nx, nu, nu) = -upsilon * Mat::Identity(nu, nu);
                worst = std::max(worst, max_eig_sym(M1));
            }
            Mat M2 = Mat::Zero(nx + nu + ny, nx + nu + ny);
            M2.topLeftCorner(nx, nx) = mu * Pv;
            M2.block(nx, nx, nu, nu) = (gamma - upsilon) * Mat::Identity(nu, nu);
            M2.block(nx + nu, 0, ny, nx) = Cv;
            M2.block(0, nx + nu, nx, ny) = Cv.transpose();
            M2.block(nx + nu, nx, ny, nu) = Dv;
            M2.block(nx, nx + nu, nu, ny) = Dv.transpose();
            M2.block(nx + nu, nx + nu, ny, ny) = gamma * Mat::Identity(ny, ny);
            worst = std::max(worst, max_eig_sym(-M2));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Baseline decay-rate synthesis:  <A X + B M> + 2 alpha X <= 0, I <= X <= tau I
// ---------------------------------------------------------------------------

struct BaselineVars {
    SymMatVar X;   // constant
    RectMatVar M;  // affine in theta
    int v_tau = -1;
};

inline BaselineVars assemble_baseline(SdpProblem& prob, const ParamMatrix& A, const ParamMatrix& B,
                                      const ParamDomain& d, double alpha,
                                      const std::vector<int>& counts, double eps_rel, double margin) {
    const int n = A.rows(), m = B.cols();
    BaselineVars vars;
    vars.X = SymMatVar(prob, n, d.dim(), /*parameter_dependent=*/false);
    vars.M = RectMatVar(prob, m, n, d.dim());
    vars.v_tau = prob.add_var();
    prob.set_objective(vars.v_tau, 1.0);

    const Mat I = Mat::Identity(n, n);
    Vec wX = vars.X.value_weights(Vec(0));
    for (const auto& th : d.grid_points(counts)) {
        Mat Av = A.eval(th);
        Mat Bv = B.eval(th);
        Vec wM = vars.M.value_weights(th);
        BlockBuilder bb("baseline", n);
        bb.add_LVR(0, 0, Av, vars.X, wX, I);
        bb.add_LVR(0, 0, I, vars.X, wX, Av.transpose());
        bb.add_LVR(0, 0, Bv, vars.M, wM, I);
        bb.add_LVtR(0, 0, I, vars.M, wM, Bv.transpose());
        bb.add_LVR(0, 0, I, vars.X, 2.0 * alpha * wX, I);
        prob.blocks.push_back(bb.finish(Sense::NegDef, eps_rel, margin));
    }
    BlockBuilder lo("X_lower", n);
    lo.add_const(0, 0, I);
    lo.add_LVR(0, 0, I, vars.X, wX, I, -1.0);
    prob.blocks.push_back(lo.finish(Sense::NegDef, eps_rel, 0.0));
    BlockBuilder hi("X_upper", n);
    hi.add_LVR(0, 0, I, vars.X, wX, I);
    hi.add_scalar_diag(0, n, vars.v_tau, -1.0);
    prob.blocks.push_back(hi.finish(Sense::NegDef, eps_rel, 0.0));
    return vars;
}

// ---------------------------------------------------------------------------
// Feedforward (UUA) synthesis conditions
// ---------------------------------------------------------------------------

struct SynthesisVars {
    SymMatVar X, Y;
    RectMatVar Ahat, Bhat, Chat, Dhat;
    int v_upsilon = -1;
    int v_gamma = -1;
    int v_xy_margin = -1;  // set by the conditioning-recovery passes
    int v_x_scale = -1;
    int v_hat_cap = -1;
};

/// Extra constraints for the synthesis recovery passes that trade a capped
/// gain for a well-conditioned X - Y and a bounded controller bandwidth
/// (the reconstruction right-multiplies Ahat, Chat by (X - Y)^{-1}).
struct SynthesisExtras {
    double gamma_cap = std::numeric_limits<double>::infinity();
    double x_cap = std::numeric_limits<double>::infinity();  // fixed bound X,Y <= cap I
    double xy_margin_floor = 0.0;                            // fixed bound X - Y >= floor I
    bool with_xy_margin = false;  // var t: X - Y >= t I
    bool with_x_scale = false;    // var tau: X, Y <= tau I
    bool with_hat_cap = false;    // var kappa: ||Ahat||, ||Chat|| <= kappa
    // linear link kappa <= hat_pole_cap * t; with X - Y >= t I this caps the
    // realized controller bandwidth ||Ahat (X-Y)^{-1}|| <= hat_pole_cap
    double hat_pole_cap = 0.0;
    // fixed-value variant of the hat cap for passes without the t variable
    double hat_cap_value = std::numeric_limits<double>::infinity();
    // objective: minimize obj_gamma*gamma - obj_xy_margin*t + obj_x_scale*tau + obj_hat_cap*kappa
    double obj_gamma = 1.0;
    double obj_xy_margin = 0.0;
    double obj_x_scale = 0.0;
    double obj_hat_cap = 0.0;
};

inline SynthesisVars assemble_synthesis(SdpProblem& prob, const GeneralizedPlant& gp,
                                        const ParamDomain& d, double mu,
                                        const std::vector<int>& counts, double eps_rel,
                                        double margin, const SynthesisExtras& extras = {}) {
    const int nb = gp.nbar, num = gp.num(), nz = gp.nz, m = gp.m;
    SynthesisVars v;
    v.X = SymMatVar(prob, nb, d.dim());
    v.Y = SymMatVar(prob, nb, d.dim());
    v.Ahat = RectMatVar(prob, nb, nb, d.dim());
    v.Bhat = RectMatVar(prob, nb, num, d.dim());
    v.Chat = RectMatVar(prob, m, nb, d.dim());
    v.Dhat = RectMatVar(prob, m, num, d.dim());
    v.v_upsilon = prob.add_var();
    v.v_gamma = prob.add_var();
    if (extras.obj_gamma != 0.0) prob.set_objective(v.v_gamma, extras.obj_gamma);
    if (extras.with_xy_margin) {
        v.v_xy_margin = prob.add_var();
        if (extras.obj_xy_margin != 0.0) prob.set_objective(v.v_xy_margin, -extras.obj_xy_margin);
    }
    if (extras.with_x_scale) {
        v.v_x_scale = prob.add_var();
        if (extras.obj_x_scale != 0.0) prob.set_objective(v.v_x_scale, extras.obj_x_scale);
    }
    if (extras.with_hat_cap) {
        v.v_hat_cap = prob.add_var();
        if (extras.obj_hat_cap != 0.0) prob.set_objective(v.v_hat_cap, extras.obj_hat_cap);
    }

    const Mat Ib = Mat::Identity(nb, nb);
    const Mat D21 = gp.D21;  // identity on the unmatched channel

    for (const auto& th : d.grid_points(counts)) {
        Mat Ab = gp.Abar.eval(th);
        Mat B1 = gp.Bbar1.eval(th);
        Mat B2 = gp.Bbar2.eval(th);
        Mat C1 = gp.Cbar1.eval(th);
        Vec w = v.X.value_weights(th);

        for (const auto& thd : d.rate_vertices()) {
            Vec wd = v.X.rate_weights(thd);
            BlockBuilder b1("synth1", 2 * nb + num);
            // (0,0): -Xdot + <Abar X - Bbar2 Chat> + mu X
            b1.add_LVR(0, 0, Ib, v.X, -wd, Ib);
            b1.add_LVR(0, 0, Ab, v.X, w, Ib);
            b1.add_LVR(0, 0, Ib, v.X, w, Ab.transpose());
            b1.add_LVR(0, 0, B2, v.Chat, w, Ib, -1.0);
            b1.add_LVtR(0, 0, Ib, v.Chat, w, B2.transpose(), -1.0);
            b1.add_LVR(0, 0, Ib, v.X, mu * w, Ib);
            // (1,0): -Ahat - Bbar2 Chat + Abar X - Ydot + Abar^T + mu I
            b1.add_LVR(nb, 0, Ib, v.Ahat, w, Ib, -1.0);
            b1.add_LVR(nb, 0, B2, v.Chat, w, Ib, -1.0);
            b1.add_LVR(nb, 0, Ab, v.X, w, Ib);
            b1.add_LVR(nb, 0, Ib, v.Y, -wd, Ib);
            b1.add_const(nb, 0, Ab.transpose() + mu * Ib);
            // (0,1): transpose of the above
            b1.add_LVtR(0, nb, Ib, v.Ahat, w, Ib, -1.0);
            b1.add_LVtR(0, nb, Ib, v.Chat, w, B2.transpose(), -1.0);
            b1.add_LVR(0, nb, Ib, v.X, w, Ab.transpose());
            b1.add_LVR(0, nb, Ib, v.Y, -wd, Ib);
            b1.add_const(0, nb, Ab + mu * Ib);
            // (1,1): -Ydot + <Abar Y> + mu Y
            b1.add_LVR(nb, nb, Ib, v.Y, -wd, Ib);
            b1.add_LVR(nb, nb, Ab, v.Y, w, Ib);
            b1.add_LVR(nb, nb, Ib, v.Y, w, Ab.transpose());
            b1.add_LVR(nb, nb, Ib, v.Y, mu * w, Ib);
            // (2,0): (Bbar1 + Bbar2 Dhat D21)^T   (and mirror)
            b1.add_const(2 * nb, 0, B1.transpose());
            b1.add_LVtR(2 * nb, 0, D21.transpose(), v.Dhat, w, B2.transpose());
            b1.add_const(0, 2 * nb, B1);
            b1.add_LVR(0, 2 * nb, B2, v.Dhat, w, D21);
            // (2,1): Bbar1^T + D21^T (Bhat^T + Dhat^T Bbar2^T)   (and mirror)
            b1.add_const(2 * nb, nb, B1.transpose());
            b1.add_LVtR(2 * nb, nb, D21.transpose(), v.Bhat, w, Ib);
            b1.add_LVtR(2 * nb, nb, D21.transpose(), v.Dhat, w, B2.transpose());
            b1.add_const(nb, 2 * nb, B1);
            b1.add_LVR(nb, 2 * nb, Ib, v.Bhat, w, D21);
            b1.add_LVR(nb, 2 * nb, B2, v.Dhat, w, D21);
            // (2,2): -upsilon I
            b1.add_scalar_diag(2 * nb, num, v.v_upsilon, -1.0);
            prob.blocks.push_back(b1.finish(Sense::NegDef, eps_rel, margin));
        }

        const int r4 = 2 * nb + num;
        BlockBuilder b2("synth2", 2 * nb + num + nz);
        b2.add_LVR(0, 0, Ib, v.X, mu * w, Ib);
        b2.add_LVR(nb, 0, Ib, v.Y, mu * w, Ib);
        b2.add_LVR(0, nb, Ib, v.Y, mu * w, Ib);
        b2.add_LVR(nb, nb, Ib, v.Y, mu * w, Ib);
        b2.add_scalar_diag(2 * nb, num, v.v_gamma, 1.0);
        b2.add_scalar_diag(2 * nb, num, v.v_upsilon, -1.0);
        b2.add_LVR(r4, 0, C1, v.X, w, Ib);
        b2.add_LVR(0, r4, Ib, v.X, w, C1.transpose());
        b2.add_LVR(r4, nb, C1, v.Y, w, Ib);
        b2.add_LVR(nb, r4, Ib, v.Y, w, C1.transpose());
        b2.add_scalar_diag(r4, nz, v.v_gamma, 1.0);
        prob.blocks.push_back(b2.finish(Sense::PosDef, eps_rel, margin));

        if (extras.with_xy_margin) {
            BlockBuilder xm("xy_margin", nb);
            xm.add_LVR(0, 0, Ib, v.X, w, Ib);
            xm.add_LVR(0, 0, Ib, v.Y, w, Ib, -1.0);
            xm.add_scalar_diag(0, nb, v.v_xy_margin, -1.0);
            prob.blocks.push_back(xm.finish(Sense::PosDef, eps_rel, 0.0));
        }
        if (extras.xy_margin_floor > 0.0) {
            BlockBuilder xf("xy_margin_floor", nb);
            xf.add_LVR(0, 0, Ib, v.X, w, Ib);
            xf.add_LVR(0, 0, Ib, v.Y, w, Ib, -1.0);
            xf.add_const(0, 0, -extras.xy_margin_floor * Ib);
            prob.blocks.push_back(xf.finish(Sense::PosDef, 0.0, 0.0));
        }
        if (extras.with_x_scale) {
            BlockBuilder xs("x_scale", nb);
            xs.add_LVR(0, 0, Ib, v.X, w, Ib);
            xs.add_scalar_diag(0, nb, v.v_x_scale, -1.0);
            prob.blocks.push_back(xs.finish(Sense::NegDef, 0.0, 0.0));
            BlockBuilder ys("y_scale", nb);
            ys.add_LVR(0, 0, Ib, v.Y, w, Ib);
            ys.add_scalar_diag(0, nb, v.v_x_scale, -1.0);
            prob.blocks.push_back(ys.finish(Sense::NegDef, 0.0, 0.0));
        }
        if (extras.with_hat_cap || std::isfinite(extras.hat_cap_value)) {
            // spectral-norm caps ||Ahat|| <= kappa, ||Chat|| <= kappa via
            // [kappa I, M; M^T, kappa I] >= 0 (kappa a variable or a constant)
            BlockBuilder ac("Ahat_cap", 2 * nb);
            if (extras.with_hat_cap)
                ac.add_scalar_diag(0, 2 * nb, v.v_hat_cap, 1.0);
            else
                ac.add_const(0, 0, extras.hat_cap_value * Mat::Identity(2 * nb, 2 * nb));
            ac.add_LVR(0, nb, Ib, v.Ahat, w, Ib);
            ac.add_LVtR(nb, 0, Ib, v.Ahat, w, Ib);
            prob.blocks.push_back(ac.finish(Sense::PosDef, 0.0, 0.0));
            BlockBuilder cc("Chat_cap", m + nb);
            if (extras.with_hat_cap)
                cc.add_scalar_diag(0, m + nb, v.v_hat_cap, 1.0);
            else
                cc.add_const(0, 0, extras.hat_cap_value * Mat::Identity(m + nb, m + nb));
            cc.add_LVR(0, m, Mat::Identity(m, m), v.Chat, w, Ib);
            cc.add_LVtR(m, 0, Ib, v.Chat, w, Mat::Identity(m, m));
            prob.blocks.push_back(cc.finish(Sense::PosDef, 0.0, 0.0));
        }
        if (std::isfinite(extras.x_cap)) {
            BlockBuilder xc("x_cap", nb);
            xc.add_LVR(0, 0, Ib, v.X, w, Ib);
            xc.add_const(0, 0, -extras.x_cap * Ib);
            prob.blocks.push_back(xc.finish(Sense::NegDef, eps_rel, 0.0));
            BlockBuilder yc("y_cap", nb);
            yc.add_LVR(0, 0, Ib, v.Y, w, Ib);
            yc.add_const(0, 0, -extras.x_cap * Ib);
            prob.blocks.push_back(yc.finish(Sense::NegDef, eps_rel, 0.0));
        }
    }
    BlockBuilder bu("upsilon_pos", 1);
    bu.add_scalar_diag(0, 1, v.v_upsilon, -1.0);
    prob.blocks.push_back(bu.finish(Sense::NegDef, eps_rel, 0.0));
    BlockBuilder bg("gamma_pos", 1);
    bg.add_scalar_diag(0, 1, v.v_gamma, -1.0);
    prob.blocks.push_back(bg.finish(Sense::NegDef, eps_rel, 0.0));
    if (std::isfinite(extras.gamma_cap)) {
        BlockBuilder gc("gamma_cap", 1);
        gc.add_scalar_diag(0, 1, v.v_gamma, 1.0);
        gc.add_const(0, 0, -extras.gamma_cap * Mat::Identity(1, 1));
        prob.blocks.push_back(gc.finish(Sense::NegDef, eps_rel, 0.0));
    }
    if (extras.with_xy_margin) {
        BlockBuilder tp("xy_margin_pos", 1);
        tp.add_scalar_diag(0, 1, v.v_xy_margin, -1.0);
        prob.blocks.push_back(tp.finish(Sense::NegDef, 0.0, 0.0));
    }
    if (extras.with_hat_cap && extras.with_xy_margin && extras.hat_pole_cap > 0.0) {
        BlockBuilder pl("hat_pole_link", 1);
        pl.add_scalar_diag(0, 1, v.v_hat_cap, 1.0);
        pl.add_scalar_diag(0, 1, v.v_xy_margin, -extras.hat_pole_cap);
        prob.blocks.push_back(pl.finish(Sense::NegDef, 0.0, 0.0));
    }
    return v;
}

/// Independent synthesis residual over the given grid counts.
struct SynthesisDecisions {
    ParamMatrix X, Y, Ahat, Bhat, Chat, Dhat;
    double upsilon = 0, gamma = 0;
};

inline double synthesis_residual(const GeneralizedPlant& gp, const ParamDomain& d, double mu,
                                 const SynthesisDecisions& s, const std::vector<int>& counts) {
    const int nb = gp.nbar, num = gp.num(), nz = gp.nz;
    const Mat Ib = Mat::Identity(nb, nb);
    const Mat D21 = gp.D21;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& th : d.grid_points(counts)) {
        Mat Ab = gp.Abar.eval(th);
        Mat B1 = gp.Bbar1.eval(th);
        Mat B2 = gp.Bbar2.eval(th);
        Mat C1 = gp.Cbar1.eval(th);
        Mat Xv = s.X.eval(th), Yv = s.Y.eval(th);
        Mat Av = s.Ahat.eval(th), Bv = s.Bhat.eval(th), Cv = s.Chat.eval(th), Dv = s.Dhat.eval(th);
        for (const auto& thd : d.rate_vertices()) {
            Mat Xd = s.X.eval_rate(th, thd), Yd = s.Y.eval_rate(th, thd);
            Mat M = Mat::Zero(2 * nb + num, 2 * nb + num);
            M.topLeftCorner(nb, nb) =
                -Xd + (Ab * Xv - B2 * Cv) + (Ab * Xv - B2 * Cv).transpose() + mu * Xv;
            Mat m21 = -Av - B2 * Cv + Ab * Xv - Yd + Ab.transpose() + mu * Ib;
            M.block(nb, 0, nb, nb) = m21;
            M.block(0, nb, nb, nb) = m21.transpose();
            M.block(nb, nb, nb, nb) = -Yd + Ab * Yv + (Ab * Yv).transpose() + mu * Yv;
            Mat m31 = (B1 + B2 * Dv * D21).transpose();
            M.block(2 * nb, 0, num, nb) = m31;
            M.block(0, 2 * nb, nb, num) = m31.transpose();
            Mat m32 = B1.transpose() + D21.transpose() * (Bv.transpose() + Dv.transpose() * B2.transpose());
            M.block(2 * nb, nb, num, nb) = m32;
            M.block(nb, 2 * nb, nb, num) = m32.transpose();
            M.block(2 * nb, 2 * nb, num, num) = -s.upsilon * Mat::Identity(num, num);
            worst = std::max(worst, max_eig_sym(M));
        }
        const int r4 = 2 * nb + num;
        Mat M2 = Mat::Zero(r4 + nz, r4 + nz);
        M2.topLeftCorner(nb, nb) = mu * Xv;
        M2.block(nb, 0, nb, nb) = mu * Yv;
        M2.block(0, nb, nb, nb) = mu * Yv;
        M2.block(nb, nb, nb, nb) = mu * Yv;
        M2.block(2 * nb, 2 * nb, num, num) = (s.gamma - s.upsilon) * Mat::Identity(num, num);
        M2.block(r4, 0, nz, nb) = C1 * Xv;
        M2.block(0, r4, nb, nz) = (C1 * Xv).transpose();
        M2.block(r4, nb, nz, nb) = C1 * Yv;
        M2.block(nb, r4, nb, nz) = (C1 * Yv).transpose();
        M2.block(r4, r4, nz, nz) = s.gamma * Mat::Identity(nz, nz);
        worst = std::max(worst, max_eig_sym(-M2));
    }
    return worst;
}

}  // namespace lpvl1
