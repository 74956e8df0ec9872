#pragma once

#include <string>

#include "lpvl1/linalg.hpp"
#include "lpvl1/model.hpp"
#include "lpvl1/null_complement.hpp"
#include "lpvl1/state_space.hpp"

namespace lpvl1 {

/// Dynamic feedforward controller for unmatched-uncertainty attenuation,
/// stored in the synthesis variables. The realized matrices are
///   A(th) = Ahat(th) (X(th)-Y(th))^{-1},  B(th) = Bhat(th),
///   C(th) = Chat(th) (X(th)-Y(th))^{-1},  D(th) = Dhat(th).
struct HbarController {
    int nbar = 0;  // controller order
    int m = 0;     // outputs (matched channel width)
    int num = 0;   // inputs (unmatched channel width)
    ParamMatrix Ahat, Bhat, Chat, Dhat, X, Y;
    double cond_limit = 1e10;
    bool is_zero = false;

    static HbarController zero(int m, int num) {
        HbarController h;
        h.nbar = 0;
        h.m = m;
        h.num = num;
        h.is_zero = true;
        return h;
    }

    Mat xy_inverse_times(const Vec& th, const Mat& lhs) const {
        Mat XY = X.eval(th) - Y.eval(th);
        return solve_checked(XY.transpose(), lhs.transpose(), cond_limit, "HbarController X-Y").transpose();
    }

    Mat A(const Vec& th) const {
        if (is_zero) return Mat::Zero(0, 0);
        return xy_inverse_times(th, Ahat.eval(th));
    }
    Mat B(const Vec& th) const { return is_zero ? Mat::Zero(0, num) : Bhat.eval(th); }
    Mat C(const Vec& th) const {
        if (is_zero) return Mat::Zero(m, 0);
        return xy_inverse_times(th, Chat.eval(th));
    }
    Mat D(const Vec& th) const { return is_zero ? Mat::Zero(m, num) : Dhat.eval(th); }

    int theta_dim() const { return is_zero ? 0 : X.catalog()->theta_dim(); }

    LpvStateSpace as_state_space(int theta_dim_hint = -1) const {
        int d = theta_dim_hint >= 0 ? theta_dim_hint : theta_dim();
        LpvStateSpace ss("Hbar", nbar, num, m);
        auto self = *this;
        if (!is_zero) {
            ss.A.base.place(0, 0, ParamMatrix::from_function("A_Hbar", nbar, nbar, d,
                                                             [self](const Vec& th) { return self.A(th); }));
            ss.B.base.place(0, 0, ParamMatrix::from_function("B_Hbar", nbar, num, d,
                                                             [self](const Vec& th) { return self.B(th); }));
            ss.C.base.place(0, 0, ParamMatrix::from_function("C_Hbar", m, nbar, d,
                                                             [self](const Vec& th) { return self.C(th); }));
        }
        ss.D.base.place(0, 0, ParamMatrix::from_function("D_Hbar", m, num, d,
                                                         [self](const Vec& th) { return self.D(th); }));
        return ss;
    }
};

/// Plant-side data shared by the composite realizations: A_m = A + B K_x.
struct ClosedLoopData {
    ParamMatrix Am;  // n x n
    ParamMatrix B;   // n x m
    ParamMatrix C;   // p x n
    ParamMatrix Kr;  // m x p evaluator (may be non-affine)
    int n = 0, m = 0, p = 0;
};

inline ParamMatrix make_Am(const LpvModel& model, const ParamMatrix& Kx) {
    ParamMatrix BKx = ParamMatrix::from_function(
        "B*Kx", model.n, model.n, model.domain.dim(),
        [B = model.B, Kx](const Vec& th) { return B.eval(th) * Kx.eval(th); });
    // keep the affine structure when both factors are affine in disjoint bases?
    // products are generally quadratic, so the function wrapper is the honest form.
    return ParamMatrix::from_function(
        "Am", model.n, model.n, model.domain.dim(),
        [A = model.A, B = model.B, Kx](const Vec& th) { return A.eval(th) + B.eval(th) * Kx.eval(th); });
}

/// G_xm(theta) = H_xm (I_m - C_f): input eta_1, output the full state.
/// States: [x; x_c] with the filter state x_c in R^m.
inline LpvStateSpace realize_Gxm(const ClosedLoopData& cl, double K) {
    const int n = cl.n, m = cl.m;
    LpvStateSpace ss("Gxm", n + m, m, n);
    ss.A.base.place(0, 0, cl.Am);
    // -B w K on the (x, x_c) block and -wK on the filter diagonal
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            auto& t = ss.A.omega_term(i, j);
            Mat sel = Mat::Zero(m, m);
            sel(i, j) = 1.0;
            t.place(0, n, cl.B.right_multiplied(-K * sel));
            t.place_const(n, n, -K * sel);
        }
    ss.B.base.place(0, 0, cl.B);
    ss.B.base.place_const(n, 0, Mat::Identity(m, m));
    ss.C.base.place_const(0, 0, Mat::Identity(n, n));
    return ss;
}

/// H_xm C_f K_r(theta): input r, output the full state.
inline LpvStateSpace realize_HxmCKr(const ClosedLoopData& cl, double K) {
    const int n = cl.n, m = cl.m, p = cl.p;
    LpvStateSpace ss("HxmCKr", n + m, p, n);
    ss.A.base.place(0, 0, cl.Am);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            auto& t = ss.A.omega_term(i, j);
            Mat sel = Mat::Zero(m, m);
            sel(i, j) = 1.0;
            t.place(0, n, cl.B.right_multiplied(K * sel));
            t.place_const(n, n, -K * sel);
        }
    ss.B.base.place(n, 0, cl.Kr);
    ss.C.base.place_const(0, 0, Mat::Identity(n, n));
    return ss;
}

/// G_xum(theta) = H_xum - H_xm C_f Hbar: input sigma_um, output the full state.
/// States: [x_1 (H_xum); x_H (Hbar); x_c (filter); x_2 (H_xm)].
inline LpvStateSpace realize_Gxum(const ClosedLoopData& cl, double K, const HbarController& hbar,
                                  const NullComplement& Bu) {
    const int n = cl.n, m = cl.m;
    const int nh = hbar.nbar;
    const int num = n - m;
    LpvStateSpace ss("Gxum", n + nh + m + n, num, n);
    auto hss = hbar.as_state_space(cl.Am.catalog()->theta_dim());

    ss.A.base.place(0, 0, cl.Am);
    if (nh > 0) {
        ss.A.base.place(n, n, hss.A.base.ents.at(0).pm);
        ss.A.base.place(n + nh, n, hss.C.base.ents.at(0).pm);
    }
    ss.A.base.place(n + nh + m, n + nh + m, cl.Am);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            auto& t = ss.A.omega_term(i, j);
            Mat sel = Mat::Zero(m, m);
            sel(i, j) = 1.0;
            t.place_const(n + nh, n + nh, -K * sel);                          // filter pole
            t.place(n + nh + m, n + nh, cl.B.right_multiplied(K * sel));      // B w K x_c
        }

    ss.B.base.place(0, 0, Bu.as_param_matrix());
    if (nh > 0) ss.B.base.place(n, 0, hss.B.base.ents.at(0).pm);
    ss.B.base.place(n + nh, 0, hss.D.base.ents.at(0).pm);

    ss.C.base.place_const(0, 0, Mat::Identity(n, n));
    ss.C.base.place_const(0, n + nh + m, -Mat::Identity(n, n));
    return ss;
}

/// F(theta) = C_f (pinv(B) + Hbar pinv(B_u)): input sigma_tilde in R^n, output in R^m.
/// States: [x_H (Hbar); x_c (filter)].
inline LpvStateSpace realize_F(const ClosedLoopData& cl, double K, const HbarController& hbar,
                               const NullComplement& Bu) {
    const int n = cl.n, m = cl.m;
    const int nh = hbar.nbar;
    const int d = cl.Am.catalog()->theta_dim();
    LpvStateSpace ss("F", nh + m, n, m);
    auto hss = hbar.as_state_space(d);

    auto Budag = Bu.pinv_param_matrix();
    auto Bdag = ParamMatrix::from_function("pinv(B)", m, n, d,
                                           [B = cl.B](const Vec& th) { return pinv(B.eval(th)); });

    if (nh > 0) {
        ss.A.base.place(0, 0, hss.A.base.ents.at(0).pm);
        ss.A.base.place(nh, 0, hss.C.base.ents.at(0).pm);
        // Hbar driven by pinv(B_u) sigma_tilde
        const ParamMatrix& Bh = hss.B.base.ents.at(0).pm;
        ss.B.base.place(0, 0, ParamMatrix::from_function("B_Hbar*pinv(Bu)", nh, n, d,
                                                         [Bh, Budag](const Vec& th) {
                                                             return Bh.eval(th) * Budag.eval(th);
                                                         }));
    }
    const ParamMatrix& Dh = hss.D.base.ents.at(0).pm;
    ss.B.base.place(nh, 0, ParamMatrix::from_function("pinv(B)+D_Hbar*pinv(Bu)", m, n, d,
                                                      [Bdag, Dh, Budag](const Vec& th) {
                                                          return Bdag.eval(th) + Dh.eval(th) * Budag.eval(th);
                                                      }));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            auto& ta = ss.A.omega_term(i, j);
            Mat sel = Mat::Zero(m, m);
            sel(i, j) = 1.0;
            ta.place_const(nh, nh, -K * sel);
            auto& tc = ss.C.omega_term(i, j);
            tc.place_const(0, nh, K * sel);
        }
    return ss;
}

/// H_xm(theta): input u, output the full state (no filter, no omega).
inline LpvStateSpace realize_Hxm(const ClosedLoopData& cl) {
    return LpvStateSpace::from_matrices("Hxm", cl.Am, cl.B, ParamMatrix::identity(cl.n),
                                        ParamMatrix::zero(cl.n, cl.m));
}

/// w^{-1} C_f = K (s I + w K)^{-1}: input and output in R^m.
inline LpvStateSpace realize_winv_filter(int m, double K, int theta_dim) {
    (void)theta_dim;
    LpvStateSpace ss("winvC", m, m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            Mat sel = Mat::Zero(m, m);
            sel(i, j) = 1.0;
            ss.A.omega_term(i, j).place_const(0, 0, -K * sel);
        }
    ss.B.base.place_const(0, 0, Mat::Identity(m, m));
    ss.C.base.place_const(0, 0, K * Mat::Identity(m, m));
    return ss;
}

/// w^{-1} C_f Hbar: input sigma_um, output in R^m. States: [x_H; x_c].
inline LpvStateSpace realize_winv_filter_Hbar(const ClosedLoopData& cl, double K,
                                              const HbarController& hbar) {
    const int m = cl.m;
    const int nh = hbar.nbar;
    const int num = cl.n - m;
    const int d = cl.Am.catalog()->theta_dim();
    LpvStateSpace ss("winvCHbar", nh + m, num, m);
    auto hss = hbar.as_state_space(d);
    if (nh > 0) {
        ss.A.base.place(0, 0, hss.A.base.ents.at(0).pm);
        ss.A.base.place(nh, 0, hss.C.base.ents.at(0).pm);
        ss.B.base.place(0, 0, hss.B.base.ents.at(0).pm);
    }
    ss.B.base.place(nh, 0, hss.D.base.ents.at(0).pm);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            Mat sel = Mat::Zero(m, m);
            sel(i, j) = 1.0;
            ss.A.omega_term(i, j).place_const(nh, nh, -K * sel);
        }
    ss.C.base.place_const(0, nh, K * Mat::Identity(m, m));
    return ss;
}

/// (w^{-1} C_f - I) K_r(theta): input r, output in R^m.
inline LpvStateSpace realize_winvC_minus_I_Kr(const ClosedLoopData& cl, double K) {
    const int m = cl.m, p = cl.p;
    LpvStateSpace ss("winvC_minus_I_Kr", m, p, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            Mat sel = Mat::Zero(m, m);
            sel(i, j) = 1.0;
            ss.A.omega_term(i, j).place_const(0, 0, -K * sel);
        }
    ss.B.base.place(0, 0, cl.Kr);
    ss.C.base.place_const(0, 0, K * Mat::Identity(m, m));
    ss.D.base.place(0, 0, cl.Kr.scaled(-1.0));
    return ss;
}

/// H_xm (C_f - I) K_r(theta): input r, output the full state.
/// States: [x_c (filter); x (H_xm)].
inline LpvStateSpace realize_Hxm_C_minus_I_Kr(const ClosedLoopData& cl, double K) {
    const int n = cl.n, m = cl.m, p = cl.p;
    LpvStateSpace ss("Hxm_C_minus_I_Kr", m + n, p, n);
    ss.A.base.place(m, m, cl.Am);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            Mat sel = Mat::Zero(m, m);
            sel(i, j) = 1.0;
            ss.A.omega_term(i, j).place_const(0, 0, -K * sel);
            ss.A.omega_term(i, j).place(m, 0, cl.B.right_multiplied(K * sel));
        }
    ss.B.base.place(0, 0, cl.Kr);
    ss.B.base.place(m, 0, ParamMatrix::from_function("-B*Kr", n, p, cl.Am.catalog()->theta_dim(),
                                                     [B = cl.B, Kr = cl.Kr](const Vec& th) {
                                                         return -(B.eval(th) * Kr.eval(th));
                                                     }));
    ss.C.base.place_const(0, m, Mat::Identity(n, n));
    return ss;
}

/// Applies the plant output map to a state-output system: C(theta) * sys.
/// Requires sys.C and sys.D free of omega terms (true for all realizations here).
inline LpvStateSpace output_mapped(const LpvStateSpace& sys, const ParamMatrix& C,
                                   const std::string& name) {
    if (sys.C.omega_affine() || sys.D.omega_affine())
        throw std::invalid_argument("output_mapped: omega-dependent output map unsupported");
    LpvStateSpace ss(name, sys.nx, sys.nu, C.rows());
    ss.A = sys.A;
    ss.B = sys.B;
    const auto sysC = sys.C.base;
    const auto sysD = sys.D.base;
    const int d = C.catalog()->theta_dim();
    ss.C.base.place(0, 0, ParamMatrix::from_function(name + ".C", C.rows(), sys.nx, d,
                                                     [C, sysC](const Vec& th) {
                                                         return C.eval(th) * sysC.eval(th);
                                                     }));
    ss.D.base.place(0, 0, ParamMatrix::from_function(name + ".D", C.rows(), sys.nu, d,
                                                     [C, sysD](const Vec& th) {
                                                         return C.eval(th) * sysD.eval(th);
                                                     }));
    return ss;
}

/// Generalized plant for the feedforward synthesis, states [x_um; x_m; x_W]:
///   xbar' = Abar xbar + Bbar1 sigma_um + Bbar2 u_um
///   z     = Cbar1 xbar
///   ybar  = sigma_um
struct GeneralizedPlant {
    int n = 0, m = 0, nw = 0;  // plant state, input, weight-state dims
    int nbar = 0;              // 2n + nw
    ParamMatrix Abar, Bbar1, Bbar2, Cbar1;
    Mat D21;  // I_{n-m}
    int nz = 0;

    int num() const { return n - m; }
};

/// Weighting system W with input y = C(x_um + x_m) and output z in R^n.
struct WeightSystem {
    int nw = 0;  // state dimension (0 for a static weight)
    ParamMatrix Aw, Bw, Cw, Dw;

    static WeightSystem static_gain(const Mat& Dw_) {
        WeightSystem w;
        w.nw = 0;
        w.Dw = ParamMatrix(Dw_);
        return w;
    }
};

inline GeneralizedPlant build_generalized_plant(const ClosedLoopData& cl, const NullComplement& Bu,
                                                const WeightSystem& W) {
    const int n = cl.n, m = cl.m, nw = W.nw;
    const int nbar = 2 * n + nw;
    const int d = cl.Am.catalog()->theta_dim();
    GeneralizedPlant gp;
    gp.n = n;
    gp.m = m;
    gp.nw = nw;
    gp.nbar = nbar;
    gp.nz = W.Dw.rows();
    if (W.Dw.cols() != cl.p) throw std::invalid_argument("build_generalized_plant: W input dim != p");

    auto Am = cl.Am;
    auto C = cl.C;
    auto Aw = W.Aw, BwM = W.Bw, CwM = W.Cw, DwM = W.Dw;
    gp.Abar = ParamMatrix::from_function("Abar", nbar, nbar, d, [Am, C, Aw, BwM, n, m, nw, nbar](const Vec& th) {
        Mat out = Mat::Zero(nbar, nbar);
        Mat am = Am.eval(th);
        out.block(0, 0, n, n) = am;
        out.block(n, n, n, n) = am;
        if (nw > 0) {
            Mat bwc = BwM.eval(th) * C.eval(th);
            out.block(2 * n, 0, nw, n) = bwc;
            out.block(2 * n, n, nw, n) = bwc;
            out.block(2 * n, 2 * n, nw, nw) = Aw.eval(th);
        }
        return out;
    });
    gp.Bbar1 = ParamMatrix::from_function("Bbar1", nbar, n - m, d, [Bu, n, m, nbar](const Vec& th) {
        Mat out = Mat::Zero(nbar, n - m);
        out.topRows(n) = Bu.eval(th);
        return out;
    });
    gp.Bbar2 = ParamMatrix::from_function("Bbar2", nbar, m, d, [B = cl.B, n, m, nbar](const Vec& th) {
        Mat out = Mat::Zero(nbar, m);
        out.block(n, 0, n, m) = B.eval(th);
        return out;
    });
    gp.Cbar1 = ParamMatrix::from_function("Cbar1", gp.nz, nbar, d,
                                          [C, CwM, DwM, n, nw, nz = gp.nz, nbar](const Vec& th) {
                                              Mat out = Mat::Zero(nz, nbar);
                                              Mat dwc = DwM.eval(th) * C.eval(th);
                                              out.block(0, 0, nz, n) = dwc;
                                              out.block(0, n, nz, n) = dwc;
                                              if (nw > 0) out.block(0, 2 * n, nz, nw) = CwM.eval(th);
                                              return out;
                                          });
    gp.D21 = Mat::Identity(n - m, n - m);
    return gp;
}

/// Closed loop of the generalized plant with the synthesized controller,
/// mapping sigma_um -> z. States: [xbar; x_H].
inline LpvStateSpace close_generalized_plant(const GeneralizedPlant& gp, const HbarController& hbar) {
    const int nbar = gp.nbar, nh = hbar.nbar, num = gp.num();
    const int d = gp.Abar.catalog()->theta_dim();
    LpvStateSpace ss("uua_closed_loop", nbar + nh, num, gp.nz);
    auto hss = hbar.as_state_space(d);
    ss.A.base.place(0, 0, gp.Abar);
    if (nh > 0) {
        const ParamMatrix& Ch = hss.C.base.ents.at(0).pm;
        ss.A.base.place(0, nbar, ParamMatrix::from_function("Bbar2*C_H", nbar, nh, d,
                                                            [B2 = gp.Bbar2, Ch](const Vec& th) {
                                                                return B2.eval(th) * Ch.eval(th);
                                                            }));
        ss.A.base.place(nbar, nbar, hss.A.base.ents.at(0).pm);
        ss.B.base.place(nbar, 0, hss.B.base.ents.at(0).pm);
    }
    const ParamMatrix& Dh = hss.D.base.ents.at(0).pm;
    ss.B.base.place(0, 0, ParamMatrix::from_function("Bbar1+Bbar2*D_H", nbar, num, d,
                                                     [B1 = gp.Bbar1, B2 = gp.Bbar2, Dh](const Vec& th) {
                                                         return B1.eval(th) + B2.eval(th) * Dh.eval(th);
                                                     }));
    ss.C.base.place(0, 0, gp.Cbar1);
    return ss;
}

/// Uncompensated map sigma_um -> z (controller absent).
inline LpvStateSpace open_loop_uua_map(const GeneralizedPlant& gp) {
    LpvStateSpace ss("uua_open_loop", gp.nbar, gp.num(), gp.nz);
    ss.A.base.place(0, 0, gp.Abar);
    ss.B.base.place(0, 0, gp.Bbar1);
    ss.C.base.place(0, 0, gp.Cbar1);
    return ss;
}

}  // namespace lpvl1
