#pragma once

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "lpvl1/sdp.hpp"

namespace lpvl1 {

struct SdpOptions {
    double gap_tol_abs = 1e-9;
    double gap_tol_rel = 1e-7;
    double phase1_target = -1e-2;  // early exit once this interior margin is reached
    double infeas_tol = 1e-8;      // phase-1 slack above -infeas_tol is treated as infeasible
    int max_outer = 60;
    int max_newton_per_stage = 80;
    int max_total_newton = 8000;
    double t_factor = 20.0;
    bool verbose = false;
};

struct SdpSolution {
    enum class Status { Optimal, Feasible, Infeasible, Error };
    Status status = Status::Error;
    std::vector<double> x;
    double obj = 0.0;
    double phase1_s = 0.0;
    int newton_steps = 0;
    std::string message;

    bool ok() const { return status == Status::Optimal || status == Status::Feasible; }
};

namespace detail {

/// Log-det barrier interior-point method on block-diagonal LMI constraints,
/// phase 1 (slack minimization) followed by objective descent along the
/// central path. Deterministic: no randomization anywhere.
class BarrierSolver {
  public:
    BarrierSolver(const SdpProblem& prob, const SdpOptions& opt) : opt_(opt), nvar_(prob.nvar + 1) {
        slack_ = nvar_ - 1;  // phase-1 slack s: G(x) - s I <= 0
        c_.assign(prob.c.begin(), prob.c.end());
        c_.push_back(0.0);
        total_dim_ = 0;
        blocks_.reserve(prob.blocks.size());
        for (const auto& b : prob.blocks) {
            Block nb;
            nb.dim = b.dim;
            double scale = 1.0 / (1.0 + b.g0.norm());
            nb.scale = scale;
            nb.g0 = scale * b.g0;
            std::vector<std::vector<Trip>> per_var(nvar_);
            for (const auto& t : b.coef) per_var[t.var].push_back({t.r, t.c, scale * t.v});
            for (int i = 0; i < b.dim; ++i) per_var[slack_].push_back({i, i, -scale});
            for (int v = 0; v < nvar_; ++v)
                if (!per_var[v].empty()) nb.vars.push_back({v, std::move(per_var[v])});
            total_dim_ += b.dim;
            blocks_.push_back(std::move(nb));
        }
    }

    SdpSolution solve() {
        SdpSolution sol;
        x_.assign(nvar_, 0.0);
        double s0 = 0.0;
        for (const auto& b : blocks_) s0 = std::max(s0, max_eig_sym(b.g0) / b.scale);
        x_[slack_] = s0 + 1.0;

        // ---- phase 1: minimize the slack
        std::vector<double> e_s(nvar_, 0.0);
        e_s[slack_] = 1.0;
        StageResult p1 = barrier_minimize(e_s, opt_.phase1_target, sol);
        sol.phase1_s = x_[slack_];
        if (p1 == StageResult::Error) {
            sol.x.assign(x_.begin(), x_.end() - 1);
            return sol;
        }
        if (p1 != StageResult::HitTarget && x_[slack_] > -opt_.infeas_tol) {
            sol.status = SdpSolution::Status::Infeasible;
            sol.message = "infeasible: phase-1 slack " + std::to_string(x_[slack_]);
            sol.x.assign(x_.begin(), x_.end() - 1);
            return sol;
        }

        // release the slack: x is strictly feasible for the original constraints
        x_[slack_] = 0.0;
        frozen_slack_ = true;
        if (!refresh_factors(x_)) {
            sol.status = SdpSolution::Status::Error;
            sol.message = "interior point lost after releasing phase-1 slack";
            sol.x.assign(x_.begin(), x_.end() - 1);
            return sol;
        }

        bool has_obj = false;
        for (int v = 0; v + 1 < nvar_; ++v)
            if (c_[v] != 0.0) has_obj = true;
        if (!has_obj) {
            sol.status = SdpSolution::Status::Feasible;
            sol.x.assign(x_.begin(), x_.end() - 1);
            sol.message = "feasible";
            return sol;
        }

        // ---- phase 2: minimize the objective
        StageResult p2 = barrier_minimize(c_, std::numeric_limits<double>::quiet_NaN(), sol);
        sol.obj = std::inner_product(c_.begin(), c_.end() - 1, x_.begin(), 0.0);
        sol.x.assign(x_.begin(), x_.end() - 1);
        if (p2 == StageResult::Converged) {
            sol.status = SdpSolution::Status::Optimal;
            sol.message = "optimal";
        } else if (p2 != StageResult::Error) {
            sol.status = SdpSolution::Status::Feasible;
            sol.message = "feasible, duality gap target not reached";
        }
        return sol;
    }

  private:
    struct Trip {
        int r, c;
        double v;
    };
    struct VarCoef {
        int var;
        std::vector<Trip> trips;
    };
    struct Block {
        int dim = 0;
        double scale = 1.0;
        Mat g0;
        std::vector<VarCoef> vars;
        Eigen::LLT<Mat> llt;
    };

    enum class StageResult { Converged, HitTarget, Stalled, Error };

    StageResult barrier_minimize(const std::vector<double>& obj, double stop_value, SdpSolution& sol) {
        double t = initial_t(obj);
        if (!refresh_factors(x_)) {
            sol.status = SdpSolution::Status::Error;
            sol.message = "initial point not strictly feasible";
            return StageResult::Error;
        }
        for (int outer = 0; outer < opt_.max_outer; ++outer) {
            for (int it = 0; it < opt_.max_newton_per_stage; ++it) {
                if (sol.newton_steps++ > opt_.max_total_newton) {
                    sol.status = SdpSolution::Status::Error;
                    sol.message = "newton budget exhausted";
                    return StageResult::Error;
                }
                if (!std::isnan(stop_value) && x_[slack_] <= stop_value) return StageResult::HitTarget;
                Vec g;
                Mat H;
                grad_hess(t, obj, g, H);
                Vec d = newton_direction(H, g);
                double decrement = -g.dot(d);
                if (decrement <= 2e-11) break;
                if (!line_search(t, obj, d, g)) break;
            }
            if (!std::isnan(stop_value) && x_[slack_] <= stop_value) return StageResult::HitTarget;
            double gap = total_dim_ / t;
            double objv = std::inner_product(obj.begin(), obj.end(), x_.begin(), 0.0);
            if (gap <= std::max(opt_.gap_tol_abs, opt_.gap_tol_rel * (1.0 + std::abs(objv))))
                return StageResult::Converged;
            t *= opt_.t_factor;
        }
        return StageResult::Stalled;
    }

    double initial_t(const std::vector<double>& obj) const {
        double on = 0.0;
        for (double v : obj) on = std::max(on, std::abs(v));
        return std::max(1.0, 1.0 / std::max(1e-8, on));
    }

    /// Factors S_b = -(g0 + sum_v x_v Q_v) of every block; also caches
    /// phi = -log det over all blocks. Returns false off the cone.
    bool refresh_factors(const std::vector<double>& x) {
        double phi = 0.0;
        for (auto& b : blocks_) {
            Mat S = -b.g0;
            for (const auto& vc : b.vars) {
                double xv = x[vc.var];
                if (xv == 0.0) continue;
                for (const auto& tr : vc.trips) S(tr.r, tr.c) -= xv * tr.v;
            }
            b.llt.compute(S);
            if (b.llt.info() != Eigen::Success) return false;
            double ld = 0.0;
            const auto& L = b.llt.matrixLLT();
            for (int i = 0; i < b.dim; ++i) {
                double di = L(i, i);
                if (!(di > 0.0)) return false;
                ld += std::log(di);
            }
            phi -= 2.0 * ld;
        }
        phi_ = phi;
        return true;
    }

    double barrier_value(double t, const std::vector<double>& obj, const std::vector<double>& x) const {
        return t * std::inner_product(obj.begin(), obj.end(), x.begin(), 0.0) + phi_;
    }

    void grad_hess(double t, const std::vector<double>& obj, Vec& g, Mat& H) {
        g = Vec::Zero(nvar_);
        for (int v = 0; v < nvar_; ++v) g[v] = t * obj[v];
        H = Mat::Zero(nvar_, nvar_);
        for (auto& b : blocks_) {
            Mat W = b.llt.solve(Mat::Identity(b.dim, b.dim));
            const int nv = static_cast<int>(b.vars.size());
            std::vector<Mat> Zs(nv);
            for (int a = 0; a < nv; ++a) {
                const auto& vc = b.vars[a];
                double gv = 0.0;
                for (const auto& tr : vc.trips) gv += W(tr.c, tr.r) * tr.v;
                g[vc.var] += gv;
                Mat U = Mat::Zero(b.dim, b.dim);
                for (const auto& tr : vc.trips) U.col(tr.c) += tr.v * W.col(tr.r);
                Zs[a] = U * W;  // = W Q_a W
            }
            for (int a = 0; a < nv; ++a) {
                const Mat& Za = Zs[a];
                for (int e = a; e < nv; ++e) {
                    double h = 0.0;
                    for (const auto& tr : b.vars[e].trips) h += Za(tr.c, tr.r) * tr.v;
                    H(b.vars[a].var, b.vars[e].var) += h;
                    if (e != a) H(b.vars[e].var, b.vars[a].var) += h;
                }
            }
        }
        if (frozen_slack_) {
            g[slack_] = 0.0;
            H.row(slack_).setZero();
            H.col(slack_).setZero();
            H(slack_, slack_) = 1.0;
        }
    }

    Vec newton_direction(Mat& H, const Vec& g) {
        double reg = 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
        for (int attempt = 0; attempt < 12; ++attempt) {
            Mat Hr = H + reg * Mat::Identity(nvar_, nvar_);
            Eigen::LDLT<Mat> ldlt(Hr);
            if (ldlt.info() == Eigen::Success) {
                Vec d = ldlt.solve(-g);
                if (d.allFinite() && -g.dot(d) >= 0.0) return d;
            }
            reg *= 100.0;
        }
        return -g;
    }

    bool line_search(double t, const std::vector<double>& obj, const Vec& d, const Vec& g) {
        const double f0 = barrier_value(t, obj, x_);
        const double slope = g.dot(d);
        std::vector<double> xt(nvar_);
        double alpha = 1.0;
        for (int k = 0; k < 60; ++k) {
            for (int v = 0; v < nvar_; ++v) xt[v] = x_[v] + alpha * d[v];
            if (frozen_slack_) xt[slack_] = x_[slack_];
            if (refresh_factors(xt)) {
                double f1 = barrier_value(t, obj, xt);
                if (f1 <= f0 + 1e-4 * alpha * slope || f1 < f0) {
                    x_ = xt;
                    return true;
                }
            }
            alpha *= 0.5;
        }
        refresh_factors(x_);
        return false;
    }

    SdpOptions opt_;
    int nvar_;
    int slack_;
    bool frozen_slack_ = false;
    std::vector<double> c_;
    std::vector<Block> blocks_;
    std::vector<double> x_;
    double total_dim_ = 0;
    double phi_ = 0.0;
};

}  // namespace detail

inline SdpSolution solve_sdp(const SdpProblem& prob, const SdpOptions& opt = {}) {
    detail::BarrierSolver solver(prob, opt);
    return solver.solve();
}

}  // namespace lpvl1
