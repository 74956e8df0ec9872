#pragma once

#include <Eigen/Eigenvalues>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lpvl1/certificate.hpp"
#include "lpvl1/errors.hpp"
#include "lpvl1/lmi_families.hpp"
#include "lpvl1/sdp_solver.hpp"

namespace lpvl1 {

struct LmiOptions {
    double eps_rel = 1e-7;      // strictness shift: eps_rel * (1 + ||G0||) per block
    double margin0 = 0.0;       // initial gridding margin
    double verify_tol = 1e-7;   // allowed residual eigenvalue on the verification grid
    int max_margin_retries = 4;
    std::vector<int> grid_counts;  // empty: use the domain's counts
    SdpOptions sdp;
    bool verbose = false;
};

inline std::vector<int> solve_counts_for(const ParamDomain& d, const LmiOptions& opt) {
    return opt.grid_counts.empty() ? d.grid_counts : opt.grid_counts;
}

inline std::vector<int> refine_counts(const std::vector<int>& counts) {
    std::vector<int> out = counts;
    for (auto& c : out) c = 2 * c - 1;
    return out;
}

/// Default geometric mu line-search grid: 20 points spanning
/// [0.05, 2 * deepest-pole estimate] over the grid and omega vertices.
inline std::vector<double> default_mu_grid(const OmegaAffineMat& A, const ParamDomain& d,
                                           const OmegaPolytope* omega, int points = 20) {
    double deepest = 0.0;
    auto omegas = omega_replication(A, omega);
    for (const auto& th : d.grid_points()) {
        for (const auto& wv : omegas) {
            Eigen::EigenSolver<Mat> es(A.eval(th, wv), false);
            for (int i = 0; i < es.eigenvalues().size(); ++i)
                deepest = std::max(deepest, -es.eigenvalues()[i].real());
        }
    }
    double hi = deepest > 0 ? 2.0 * deepest : 10.0;
    double lo = std::min(0.05, 0.5 * hi);
    std::vector<double> grid;
    for (int i = 0; i < points; ++i)
        grid.push_back(lo * std::pow(hi / lo, double(i) / (points - 1)));
    return grid;
}

inline std::vector<double> default_mu_grid(const LpvStateSpace& sys, const ParamDomain& d,
                                           const OmegaPolytope* omega, int points = 20) {
    return default_mu_grid(sys.A, d, omega, points);
}

// ---------------------------------------------------------------------------
// state balancing (composite realizations can be very stiff; the gain bounds
// are invariant under state similarity, so solve balanced and map P back)
// ---------------------------------------------------------------------------

/// Power-of-two diagonal scales equalizing row/column norms of the system
/// triple, so x~ = D^{-1} x with A~ = D^{-1} A D, B~ = D^{-1} B, C~ = C D.
inline Vec balancing_scales(const Mat& A, const Mat& B, const Mat& C) {
    const int n = static_cast<int>(A.rows());
    Vec dvec = Vec::Ones(n);
    Mat M = A.cwiseAbs();
    Mat Mb = B.cwiseAbs();
    Mat Mc = C.cwiseAbs();
    for (int sweep = 0; sweep < 20; ++sweep) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            double r = Mb.row(i).sum(), c = Mc.col(i).sum();
            for (int j = 0; j < n; ++j)
                if (j != i) {
                    r += M(i, j);
                    c += M(j, i);
                }
            if (r <= 0 || c <= 0) continue;
            double f = std::pow(2.0, std::round(0.5 * std::log2(r / c)));
            if (f == 1.0) continue;
            changed = true;
            dvec[i] *= f;
            M.row(i) /= f;
            M.col(i) *= f;
            Mb.row(i) /= f;
            Mc.col(i) *= f;
        }
        if (!changed) break;
    }
    return dvec;
}

inline Mat central_omega(const OmegaPolytope* omega) {
    if (!omega) return Mat();
    if (omega->contains_identity) return Mat::Identity(omega->m, omega->m);
    return omega->vertices.front();
}

/// Balanced copy x~ = D^{-1} x with D from the frozen central point.
/// Certificates found for the balanced system map back via P = D^{-1} P~ D^{-1}.
inline std::pair<LpvStateSpace, Vec> balanced_system(const LpvStateSpace& sys, const ParamDomain& d,
                                                     const OmegaPolytope* omega) {
    Vec mid = d.dim() ? Vec(0.5 * (d.theta_lo + d.theta_hi)) : Vec(0);
    Mat wmid = sys.omega_affine() ? central_omega(omega) : Mat();
    Vec dvec = balancing_scales(sys.eval_A(mid, wmid), sys.eval_B(mid, wmid), sys.eval_C(mid, wmid));
    Vec dinv = dvec.cwiseInverse();
    LpvStateSpace out(sys.name, sys.nx, sys.nu, sys.ny);
    out.A = sys.A.scaled_rows(dinv).scaled_cols(dvec);
    out.B = sys.B.scaled_rows(dinv);
    out.C = sys.C.scaled_cols(dvec);
    out.D = sys.D;
    return {out, dvec};
}

inline ParamMatrix unbalance_P(const ParamMatrix& Pb, const Vec& dvec) {
    Mat Dinv = dvec.cwiseInverse().asDiagonal();
    return Pb.left_multiplied(Dinv).right_multiplied(Dinv);
}

// ---------------------------------------------------------------------------
// certify_stability
// ---------------------------------------------------------------------------

/// Largest feasible mu_P from the grid such that an affine P(theta) satisfies
/// <A^T P> + Pdot <= -mu_P P with I <= P <= tau I, tau minimized.
inline Certificate certify_stability(const OmegaAffineMat& A, const ParamDomain& d,
                                     std::vector<double> mu_grid, const OmegaPolytope* omega = nullptr,
                                     const LmiOptions& opt = {}) {
    if (mu_grid.empty()) throw std::invalid_argument("certify_stability: empty mu grid");
    std::sort(mu_grid.begin(), mu_grid.end());
    auto counts = solve_counts_for(d, opt);
    auto vcounts = refine_counts(counts);

    Certificate cert;
    cert.kind = "stability";
    cert.solve_counts = counts;
    cert.verify_counts = vcounts;
    cert.eps_rel = opt.eps_rel;

    // balance the state similarity at the central frozen point
    Vec mid = d.dim() ? Vec(0.5 * (d.theta_lo + d.theta_hi)) : Vec(0);
    Mat Aref = A.eval(mid, A.omega_affine() ? central_omega(omega) : Mat());
    Vec dvec = balancing_scales(Aref, Mat::Zero(A.rows(), 1), Mat::Zero(1, A.rows()));
    OmegaAffineMat Ab = A.scaled_rows(dvec.cwiseInverse()).scaled_cols(dvec);

    std::string last_msg = "infeasible at every mu";
    for (int k = static_cast<int>(mu_grid.size()) - 1; k >= 0; --k) {
        double mu = mu_grid[k];
        double margin = opt.margin0;
        for (int retry = 0; retry <= opt.max_margin_retries; ++retry) {
            SdpProblem prob;
            auto vars = assemble_stability(prob, Ab, d, omega, mu, counts, opt.eps_rel, margin, true);
            auto sol = solve_sdp(prob, opt.sdp);
            if (!sol.ok()) {
                last_msg = sol.message;
                break;  // next (smaller) mu
            }
            ParamMatrix P = unbalance_P(vars.P.decode(sol.x), dvec);
            double res = stability_residual(A, d, omega, mu, P, vcounts);
            cert.newton_steps += sol.newton_steps;
            if (res <= opt.verify_tol) {
                cert.scalars["mu_P"] = mu;
                cert.scalars["tau"] = sol.x[vars.v_tau];
                cert.decisions["P"] = P;
                cert.max_residual = res;
                cert.margin = margin;
                cert.verified = true;
                cert.solver_status = sol.message;
                return cert;
            }
            margin = std::max(2.0 * margin, 1.2 * (res + opt.verify_tol));
            last_msg = "verification residual " + std::to_string(res);
        }
    }
    throw InfeasibleError("certify_stability: " + last_msg +
                          " (smallest attempted mu = " + std::to_string(mu_grid.front()) + ")");
}

inline Certificate certify_stability(const ParamMatrix& A, const ParamDomain& d,
                                     std::vector<double> mu_grid, const LmiOptions& opt = {}) {
    OmegaAffineMat wrap(A.rows(), A.cols());
    wrap.base.place(0, 0, A);
    return certify_stability(wrap, d, std::move(mu_grid), nullptr, opt);
}

// ---------------------------------------------------------------------------
// ppg_bound
// ---------------------------------------------------------------------------

struct PpgResult {
    double gamma = std::numeric_limits<double>::infinity();
    double mu = 0.0;
    Certificate certificate;
    std::vector<std::pair<double, std::string>> per_mu_status;
};

/// Minimal peak-to-peak gain bound over the mu line search. Constraints are
/// replicated at the domain grid x rate vertices x omega vertices.
inline PpgResult ppg_bound(const LpvStateSpace& sys, const ParamDomain& d, const OmegaPolytope* omega,
                           std::vector<double> mu_grid, const LmiOptions& opt = {}) {
    if (mu_grid.empty()) mu_grid = default_mu_grid(sys, d, omega);
    std::sort(mu_grid.begin(), mu_grid.end());
    auto counts = solve_counts_for(d, opt);
    auto vcounts = refine_counts(counts);

    PpgResult out;
    std::optional<double> best_mu;
    double best_gamma = std::numeric_limits<double>::infinity();

    auto [bsys, dvec] = balanced_system(sys, d, omega);

    for (double mu : mu_grid) {
        SdpProblem prob;
        auto vars = assemble_ppg(prob, bsys, d, omega, mu, counts, opt.eps_rel, opt.margin0);
        (void)vars;
        auto sol = solve_sdp(prob, opt.sdp);
        out.per_mu_status.emplace_back(mu, sol.ok() ? "gamma=" + std::to_string(sol.obj) : sol.message);
        if (sol.ok() && sol.obj < best_gamma) {
            best_gamma = sol.obj;
            best_mu = mu;
        }
    }
    if (!best_mu)
        throw InfeasibleError("ppg_bound(" + sys.name + "): infeasible for every mu in the grid");

    // final solve at the best mu with the verification/margin loop
    double margin = opt.margin0;
    for (int retry = 0; retry <= opt.max_margin_retries; ++retry) {
        SdpProblem prob;
        auto vars = assemble_ppg(prob, bsys, d, omega, *best_mu, counts, opt.eps_rel, margin);
        auto sol = solve_sdp(prob, opt.sdp);
        if (!sol.ok())
            throw NumericalError("ppg_bound(" + sys.name + "): re-solve failed: " + sol.message);
        ParamMatrix P = unbalance_P(vars.P.decode(sol.x), dvec);
        double upsilon = sol.x[vars.v_upsilon];
        double gamma = sol.x[vars.v_gamma];
        double res = ppg_residual(sys, d, omega, *best_mu, P, upsilon, gamma, vcounts);
        Certificate cert;
        cert.kind = "ppg";
        cert.system = sys.name;
        cert.solve_counts = counts;
        cert.verify_counts = vcounts;
        cert.eps_rel = opt.eps_rel;
        cert.margin = margin;
        cert.scalars["mu"] = *best_mu;
        cert.scalars["upsilon"] = upsilon;
        cert.scalars["gamma"] = gamma;
        cert.decisions["P"] = P;
        cert.max_residual = res;
        cert.newton_steps = sol.newton_steps;
        cert.solver_status = sol.message;
        cert.verified = res <= opt.verify_tol;
        if (cert.verified || retry == opt.max_margin_retries) {
            out.gamma = gamma;
            out.mu = *best_mu;
            out.certificate = cert;
            return out;
        }
        margin = std::max(2.0 * (margin > 0 ? margin : opt.verify_tol), 1.2 * (res + opt.verify_tol));
    }
    throw NumericalError("ppg_bound(" + sys.name + "): unreachable");
}

// ---------------------------------------------------------------------------
// scalar helpers from the analysis section
// ---------------------------------------------------------------------------

/// rho_in = rho0 * sqrt(max_th lambda_max(P) / min_th lambda_min(P)) over the
/// certificate's solve grid.
inline double rho_in(const Certificate& stability_cert, double rho0, const ParamDomain& d) {
    const ParamMatrix& P = stability_cert.decision("P");
    double lmax = 0.0, lmin = std::numeric_limits<double>::infinity();
    for (const auto& th : d.grid_points(stability_cert.solve_counts)) {
        Mat Pv = P.eval(th);
        lmax = std::max(lmax, max_eig_sym(Pv));
        lmin = std::min(lmin, min_eig_sym(Pv));
    }
    if (!(lmin > 0)) throw NumericalError("rho_in: certificate P not positive definite on the grid");
    return rho0 * std::sqrt(lmax / lmin);
}

/// State-evolution envelope of a BIBO-stable LPV system:
///   beta(t) = sqrt(sqrt(l2/l1) (1 - e^{-mu t})) * (2 / (mu l1)) * max ||P B||.
inline double beta_theta_raw(double t, double mu, double lam1, double lam2, double max_pb) {
    double decay = std::isinf(t) ? 1.0 : 1.0 - std::exp(-mu * t);
    return std::sqrt(std::sqrt(lam2 / lam1) * decay) * (2.0 / (mu * lam1)) * max_pb;
}

struct BetaThetaData {
    double lam1 = 0, lam2 = 0, max_pb = 0, max_c = 0;
};

/// Grid extrema needed by beta_theta and the gamma0 formula for a system with
/// stability certificate P: lambda bounds of P, max ||P B||, max ||C||.
inline BetaThetaData beta_theta_data(const Certificate& cert, const LpvStateSpace& sys,
                                     const ParamDomain& d, const OmegaPolytope* omega) {
    const ParamMatrix& P = cert.decision("P");
    BetaThetaData out;
    out.lam1 = std::numeric_limits<double>::infinity();
    auto omegasB = omega_replication(sys.B, omega);
    auto omegasC = omega_replication(sys.C, omega);
    for (const auto& th : d.grid_points(cert.solve_counts)) {
        Mat Pv = P.eval(th);
        out.lam1 = std::min(out.lam1, min_eig_sym(Pv));
        out.lam2 = std::max(out.lam2, max_eig_sym(Pv));
        for (const auto& wv : omegasB)
            out.max_pb = std::max(out.max_pb, spectral_norm(Pv * sys.B.eval(th, wv)));
        for (const auto& wv : omegasC)
            out.max_c = std::max(out.max_c, spectral_norm(sys.C.eval(th, wv)));
    }
    return out;
}

inline double beta_theta(double t, double mu, const BetaThetaData& data) {
    return beta_theta_raw(t, mu, data.lam1, data.lam2, data.max_pb);
}

}  // namespace lpvl1
