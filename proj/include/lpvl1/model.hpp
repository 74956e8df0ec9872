#pragma once

#include <string>

#include "lpvl1/domain.hpp"
#include "lpvl1/linalg.hpp"
#include "lpvl1/null_complement.hpp"
#include "lpvl1/omega.hpp"
#include "lpvl1/param_matrix.hpp"

namespace lpvl1 {

/// Uncertain LPV plant data: dx = A(th) x + B(th) w u_total + f(t,x), y = C(th) x.
struct LpvModel {
    std::string name;
    int n = 0, m = 0, p = 0;
    ParamMatrix A, B, C;
    ParamDomain domain;
    OmegaPolytope omega;
    double rho0 = 0.0;  // bound on ||x(0)||

    void validate() const {
        if (A.rows() != n || A.cols() != n) throw std::invalid_argument("LpvModel: A dimension");
        if (B.rows() != n || B.cols() != m) throw std::invalid_argument("LpvModel: B dimension");
        if (C.rows() != p || C.cols() != n) throw std::invalid_argument("LpvModel: C dimension");
        if (omega.m != m) throw std::invalid_argument("LpvModel: omega dimension");
        domain.validate();
    }
};

/// Worst-case norm and Lipschitz constants of the plant and gain data over the
/// scheduling grid.
struct ModelConstants {
    double b_Am = 0, b_B = 0, b_Bdag = 0, b_C = 0, b_Bu = 0, b_Budag = 0;
    double b_Kx = 0, b_Kr = 0;
    double L_B = 0, L_Bdag = 0, L_Kx = 0, L_Budag = 0;
    double b_theta_dot = 0;
    double max_BKx = 0;           // max ||B(th) K_x(th)||, used by Lemma-1 style constants
    double max_w_minus_I_Kx = 0;  // max over omega vertices and grid of ||(w - I) K_x(th)||
};

namespace detail {

/// Max of ||dM|| / ||dtheta|| over axis-adjacent grid pairs, inflated by `safety`.
inline double lipschitz_over_grid(const ParamMatrix& M, const ParamDomain& d, double safety) {
    if (d.dim() == 0) return 0.0;
    auto pts = d.grid_points();
    // strides of the row-major grid enumeration
    std::vector<long> stride(d.dim(), 1);
    for (int ax = d.dim() - 2; ax >= 0; --ax) stride[ax] = stride[ax + 1] * d.grid_counts[ax + 1];
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        // decode multi-index
        long rem = static_cast<long>(i);
        for (int ax = 0; ax < d.dim(); ++ax) {
            long idx = rem / stride[ax];
            rem %= stride[ax];
            if (idx + 1 < d.grid_counts[ax]) {
                std::size_t j = i + static_cast<std::size_t>(stride[ax]);
                double dth = (pts[j] - pts[i]).norm();
                if (dth > 0) {
                    double q = spectral_norm(M.eval(pts[j]) - M.eval(pts[i])) / dth;
                    best = std::max(best, q);
                }
            }
        }
    }
    return safety * best;
}

}  // namespace detail

/// Computes the norm-bound ledger over the domain grid. Lipschitz constants use
/// sampled difference quotients with the given inflation factor.
inline ModelConstants model_constants(const LpvModel& model, const ParamMatrix& Kx,
                                      const ParamMatrix& Kr, const NullComplement& Bu,
                                      double inflation = 1.1) {
    ModelConstants out;
    const ParamDomain& d = model.domain;
    out.b_theta_dot = d.b_theta_dot();

    auto Bdag = ParamMatrix::from_function("pinv(B)", model.m, model.n, d.dim(),
                                           [B = model.B](const Vec& th) { return pinv(B.eval(th)); });

    auto pts = d.grid_points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const Vec& th = pts[i];
        Mat Bv = model.B.eval(th);
        Mat Kxv = Kx.eval(th);
        Mat Am = model.A.eval(th) + Bv * Kxv;
        Mat Bd = pinv(Bv);
        if (smallest_singular_value(Bv) <= 0)
            throw NumericalError("model_constants: singular pseudo-inverse of B");
        out.b_Am = std::max(out.b_Am, spectral_norm(Am));
        out.b_B = std::max(out.b_B, spectral_norm(Bv));
        out.b_Bdag = std::max(out.b_Bdag, spectral_norm(Bd));
        out.b_C = std::max(out.b_C, spectral_norm(model.C.eval(th)));
        out.b_Bu = std::max(out.b_Bu, spectral_norm(Bu.at_grid(i)));
        out.b_Budag = std::max(out.b_Budag, spectral_norm(Bu.at_grid(i).transpose()));
        out.b_Kx = std::max(out.b_Kx, spectral_norm(Kxv));
        out.b_Kr = std::max(out.b_Kr, spectral_norm(Kr.eval(th)));
        out.max_BKx = std::max(out.max_BKx, spectral_norm(Bv * Kxv));
        for (const auto& w : model.omega.vertices)
            out.max_w_minus_I_Kx = std::max(
                out.max_w_minus_I_Kx,
                spectral_norm((w - Mat::Identity(model.m, model.m)) * Kxv));
    }

    out.L_B = detail::lipschitz_over_grid(model.B, d, inflation);
    out.L_Bdag = detail::lipschitz_over_grid(Bdag, d, inflation);
    out.L_Kx = detail::lipschitz_over_grid(Kx, d, inflation);
    out.L_Budag = detail::lipschitz_over_grid(Bu.pinv_param_matrix(), d, inflation);
    return out;
}

}  // namespace lpvl1
