#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "lpvl1/param_matrix.hpp"

namespace lpvl1 {

/// Block-sparse matrix function of theta: a list of ParamMatrix sub-blocks
/// placed at fixed offsets. Keeps heterogeneous basis catalogs separate.
struct ThetaBlockMat {
    int rows = 0, cols = 0;

    struct Ent {
        int r, c;
        ParamMatrix pm;
    };
    std::vector<Ent> ents;

    ThetaBlockMat() = default;
    ThetaBlockMat(int r, int c) : rows(r), cols(c) {}

    void place(int r, int c, ParamMatrix pm) {
        if (r < 0 || c < 0 || r + pm.rows() > rows || c + pm.cols() > cols)
            throw std::invalid_argument("ThetaBlockMat: placement out of range");
        ents.push_back({r, c, std::move(pm)});
    }

    void place_const(int r, int c, const Mat& M) { place(r, c, ParamMatrix(M)); }

    Mat eval(const Vec& theta) const {
        Mat out = Mat::Zero(rows, cols);
        for (const auto& e : ents) {
            // each sub-block carries its own catalog; evaluate with a slice of
            // theta matching that catalog's dimension (dim 0 ignores theta)
            int d = e.pm.catalog()->theta_dim();
            out.block(e.r, e.c, e.pm.rows(), e.pm.cols()) += e.pm.eval(theta.head(d));
        }
        return out;
    }

    bool empty() const { return ents.empty(); }
};

inline ThetaBlockMat scale_block_rows(const ThetaBlockMat& M, const Vec& d) {
    ThetaBlockMat out(M.rows, M.cols);
    for (const auto& e : M.ents) {
        Mat L = d.segment(e.r, e.pm.rows()).asDiagonal();
        out.place(e.r, e.c, e.pm.left_multiplied(L));
    }
    return out;
}

inline ThetaBlockMat scale_block_cols(const ThetaBlockMat& M, const Vec& d) {
    ThetaBlockMat out(M.rows, M.cols);
    for (const auto& e : M.ents) {
        Mat R = d.segment(e.c, e.pm.cols()).asDiagonal();
        out.place(e.r, e.c, e.pm.right_multiplied(R));
    }
    return out;
}

/// Matrix function affine in the unknown input-gain entries:
///   M(theta, w) = base(theta) + sum_{ij} w(i,j) * term_ij(theta).
struct OmegaAffineMat {
    ThetaBlockMat base;
    struct OTerm {
        int oi, oj;
        ThetaBlockMat mat;
    };
    std::vector<OTerm> terms;

    OmegaAffineMat() = default;
    OmegaAffineMat(int r, int c) : base(r, c) {}

    int rows() const { return base.rows; }
    int cols() const { return base.cols; }
    bool omega_affine() const { return !terms.empty(); }

    ThetaBlockMat& omega_term(int oi, int oj) {
        for (auto& t : terms)
            if (t.oi == oi && t.oj == oj) return t.mat;
        terms.push_back({oi, oj, ThetaBlockMat(base.rows, base.cols)});
        return terms.back().mat;
    }

    Mat eval(const Vec& theta, const Mat& omega) const {
        Mat out = base.eval(theta);
        for (const auto& t : terms) out += omega(t.oi, t.oj) * t.mat.eval(theta);
        return out;
    }

    OmegaAffineMat scaled_rows(const Vec& d) const {
        OmegaAffineMat out(rows(), cols());
        out.base = scale_block_rows(base, d);
        for (const auto& t : terms) out.terms.push_back({t.oi, t.oj, scale_block_rows(t.mat, d)});
        return out;
    }

    OmegaAffineMat scaled_cols(const Vec& d) const {
        OmegaAffineMat out(rows(), cols());
        out.base = scale_block_cols(base, d);
        for (const auto& t : terms) out.terms.push_back({t.oi, t.oj, scale_block_cols(t.mat, d)});
        return out;
    }
};

/// LPV state-space quadruple with optional affine dependence on the input gain.
struct LpvStateSpace {
    std::string name;
    int nx = 0, nu = 0, ny = 0;
    OmegaAffineMat A, B, C, D;

    LpvStateSpace() = default;
    LpvStateSpace(std::string nm, int nx_, int nu_, int ny_)
        : name(std::move(nm)), nx(nx_), nu(nu_), ny(ny_), A(nx_, nx_), B(nx_, nu_), C(ny_, nx_), D(ny_, nu_) {}

    bool omega_affine() const {
        return A.omega_affine() || B.omega_affine() || C.omega_affine() || D.omega_affine();
    }

    /// Plain theta-dependent system (no omega terms) from ParamMatrix data.
    static LpvStateSpace from_matrices(std::string name, const ParamMatrix& A, const ParamMatrix& B,
                                       const ParamMatrix& C, const ParamMatrix& D) {
        LpvStateSpace ss(std::move(name), A.rows(), B.cols(), C.rows());
        ss.A.base.place(0, 0, A);
        ss.B.base.place(0, 0, B);
        ss.C.base.place(0, 0, C);
        ss.D.base.place(0, 0, D);
        return ss;
    }

    Mat eval_A(const Vec& th, const Mat& w) const { return A.eval(th, w); }
    Mat eval_B(const Vec& th, const Mat& w) const { return B.eval(th, w); }
    Mat eval_C(const Vec& th, const Mat& w) const { return C.eval(th, w); }
    Mat eval_D(const Vec& th, const Mat& w) const { return D.eval(th, w); }

    /// Frozen-theta transfer function C (sI - A)^{-1} B + D.
    Eigen::MatrixXcd transfer(std::complex<double> s, const Vec& th, const Mat& w) const {
        Eigen::MatrixXcd As = eval_A(th, w).cast<std::complex<double>>();
        Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(nx, nx);
        Eigen::MatrixXcd X = (s * I - As).fullPivLu().solve(eval_B(th, w).cast<std::complex<double>>());
        return eval_C(th, w).cast<std::complex<double>>() * X + eval_D(th, w).cast<std::complex<double>>();
    }
};

}  // namespace lpvl1
