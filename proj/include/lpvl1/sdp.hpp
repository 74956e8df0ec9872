#pragma once

#include <map>
#include <string>
#include <vector>

#include "lpvl1/linalg.hpp"
#include "lpvl1/param_matrix.hpp"

namespace lpvl1 {

/// Coefficient of one scalar decision variable inside one LMI block.
struct SdpTriplet {
    int var;
    int r, c;
    double v;
};

/// One instantiated constraint block in the canonical form
///   G0 + sum_i x_i * Gi  <=  0   (negative semidefinite).
struct LmiBlock {
    std::string tag;
    int dim = 0;
    Mat g0;
    std::vector<SdpTriplet> coef;
};

enum class Sense { NegDef, PosDef };

/// Scalar-variable pool plus instantiated blocks; objective is min c^T x.
struct SdpProblem {
    int nvar = 0;
    std::vector<LmiBlock> blocks;
    std::vector<double> c;

    int add_var() {
        c.push_back(0.0);
        return nvar++;
    }

    void set_objective(int var, double weight = 1.0) { c.at(var) = weight; }
};

/// Symmetric matrix decision variable with affine theta dependence:
///   V(theta) = V_0 + sum_a theta_a V_a,  each V_l symmetric dim x dim.
struct SymMatVar {
    int dim = 0;
    int theta_dim = 0;
    std::vector<Eigen::MatrixXi> entry;  // [1 + theta_dim] maps (i,j) -> var id

    SymMatVar() = default;

    SymMatVar(SdpProblem& P, int dim_, int theta_dim_, bool parameter_dependent = true)
        : dim(dim_), theta_dim(parameter_dependent ? theta_dim_ : 0) {
        for (int l = 0; l <= theta_dim; ++l) {
            Eigen::MatrixXi e(dim, dim);
            for (int i = 0; i < dim; ++i)
                for (int j = i; j < dim; ++j) {
                    int v = P.add_var();
                    e(i, j) = v;
                    e(j, i) = v;
                }
            entry.push_back(std::move(e));
        }
    }

    /// Basis weights for the value at theta: (1, theta_0, ..).
    Vec value_weights(const Vec& theta) const {
        Vec w = Vec::Zero(entry.size());
        w[0] = 1.0;
        for (int a = 0; a < theta_dim; ++a) w[1 + a] = theta[a];
        return w;
    }

    /// Basis weights for d/dt at theta_dot: (0, thdot_0, ..).
    Vec rate_weights(const Vec& theta_dot) const {
        Vec w = Vec::Zero(entry.size());
        for (int a = 0; a < theta_dim; ++a) w[1 + a] = theta_dot[a];
        return w;
    }

    Mat value(const std::vector<double>& x, const Vec& theta) const {
        Mat out = Mat::Zero(dim, dim);
        Vec w = value_weights(theta);
        for (std::size_t l = 0; l < entry.size(); ++l)
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) out(i, j) += w[l] * x[entry[l](i, j)];
        return out;
    }

    /// Decoded coefficient matrices as an affine ParamMatrix.
    ParamMatrix decode(const std::vector<double>& x) const {
        auto cat = BasisCatalog::affine(theta_dim);
        Mat c0(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) c0(i, j) = x[entry[0](i, j)];
        ParamMatrix pm(c0, cat);
        for (int a = 0; a < theta_dim; ++a) {
            Mat ca(dim, dim);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) ca(i, j) = x[entry[1 + a](i, j)];
            pm.add_term(a, ca);
        }
        return pm;
    }
};

/// Rectangular matrix decision variable with affine theta dependence.
struct RectMatVar {
    int rows = 0, cols = 0;
    int theta_dim = 0;
    std::vector<Eigen::MatrixXi> entry;

    RectMatVar() = default;

    RectMatVar(SdpProblem& P, int rows_, int cols_, int theta_dim_, bool parameter_dependent = true)
        : rows(rows_), cols(cols_), theta_dim(parameter_dependent ? theta_dim_ : 0) {
        for (int l = 0; l <= theta_dim; ++l) {
            Eigen::MatrixXi e(rows, cols);
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j) e(i, j) = P.add_var();
            entry.push_back(std::move(e));
        }
    }

    Vec value_weights(const Vec& theta) const {
        Vec w = Vec::Zero(entry.size());
        w[0] = 1.0;
        for (int a = 0; a < theta_dim; ++a) w[1 + a] = theta[a];
        return w;
    }

    Mat value(const std::vector<double>& x, const Vec& theta) const {
        Mat out = Mat::Zero(rows, cols);
        Vec w = value_weights(theta);
        for (std::size_t l = 0; l < entry.size(); ++l)
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j) out(i, j) += w[l] * x[entry[l](i, j)];
        return out;
    }

    ParamMatrix decode(const std::vector<double>& x) const {
        auto cat = BasisCatalog::affine(theta_dim);
        Mat c0(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) c0(i, j) = x[entry[0](i, j)];
        ParamMatrix pm(c0, cat);
        for (int a = 0; a < theta_dim; ++a) {
            Mat ca(rows, cols);
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j) ca(i, j) = x[entry[1 + a](i, j)];
            pm.add_term(a, ca);
        }
        return pm;
    }
};

/// Accumulates one symmetric matrix expression and compresses it into an
/// LmiBlock. Callers add full (not triangular) contributions; the finished
/// expression must come out symmetric, which is asserted.
class BlockBuilder {
  public:
    BlockBuilder(std::string tag, int dim)
        : tag_(std::move(tag)), dim_(dim), g0_(Mat::Zero(dim, dim)) {}

    void add_const(int r0, int c0, const Mat& M) {
        g0_.block(r0, c0, M.rows(), M.cols()) += M;
    }

    /// Adds s * L * V(weights) * R at offset (r0, c0) for a symmetric matrix var.
    void add_LVR(int r0, int c0, const Mat& L, const SymMatVar& V, const Vec& weights, const Mat& R,
                 double s = 1.0) {
        add_LVR_impl(r0, c0, L, V.entry, weights, R, s);
    }

    void add_LVR(int r0, int c0, const Mat& L, const RectMatVar& V, const Vec& weights, const Mat& R,
                 double s = 1.0) {
        add_LVR_impl(r0, c0, L, V.entry, weights, R, s);
    }

    /// Adds s * L * V(weights)^T * R (transpose of the decision matrix).
    void add_LVtR(int r0, int c0, const Mat& L, const RectMatVar& V, const Vec& weights, const Mat& R,
                  double s = 1.0) {
        // (V^T)_{qp} = V_{pq}
        for (int l = 0; l < static_cast<int>(V.entry.size()); ++l) {
            if (weights[l] == 0.0) continue;
            for (int p = 0; p < V.rows; ++p)
                for (int q = 0; q < V.cols; ++q) {
                    int var = V.entry[l](p, q);
                    // contribution: L(:,q) * R(p,:)
                    for (int i = 0; i < L.rows(); ++i)
                        for (int j = 0; j < R.cols(); ++j) {
                            double v = s * weights[l] * L(i, q) * R(p, j);
                            if (v != 0.0) acc(var, r0 + i, c0 + j, v);
                        }
                }
        }
    }

    /// Adds s * var * I at the diagonal sub-block starting at r0.
    void add_scalar_diag(int r0, int len, int var, double s) {
        for (int i = 0; i < len; ++i) acc(var, r0 + i, r0 + i, s);
    }

    /// Finishes the block: validates symmetry, applies sense and margins.
    /// For Sense::PosDef the expression is negated so that every block is
    /// a <= 0 constraint; `shift` is added to the diagonal afterwards
    /// (strictness epsilon plus any gridding margin).
    LmiBlock finish(Sense sense, double eps_rel, double margin) {
        const double flip = (sense == Sense::NegDef) ? 1.0 : -1.0;
        LmiBlock b;
        b.tag = tag_;
        b.dim = dim_;
        check_symmetric(g0_, "g0");
        b.g0 = flip * 0.5 * (g0_ + g0_.transpose());
        double eps = eps_rel * (1.0 + b.g0.norm());
        b.g0 += (eps + margin) * Mat::Identity(dim_, dim_);
        for (auto& [var, M] : coefs_) {
            check_symmetric(M, "coef");
            Mat S = flip * 0.5 * (M + M.transpose());
            for (int i = 0; i < dim_; ++i)
                for (int j = 0; j < dim_; ++j)
                    if (S(i, j) != 0.0) b.coef.push_back({var, i, j, S(i, j)});
        }
        return b;
    }

  private:
    void add_LVR_impl(int r0, int c0, const Mat& L, const std::vector<Eigen::MatrixXi>& entry,
                      const Vec& weights, const Mat& R, double s) {
        const int vr = static_cast<int>(entry[0].rows());
        const int vc = static_cast<int>(entry[0].cols());
        for (int l = 0; l < static_cast<int>(entry.size()); ++l) {
            if (weights[l] == 0.0) continue;
            for (int p = 0; p < vr; ++p)
                for (int q = 0; q < vc; ++q) {
                    int var = entry[l](p, q);
                    for (int i = 0; i < L.rows(); ++i) {
                        double lip = L(i, p);
                        if (lip == 0.0) continue;
                        for (int j = 0; j < R.cols(); ++j) {
                            double v = s * weights[l] * lip * R(q, j);
                            if (v != 0.0) acc(var, r0 + i, c0 + j, v);
                        }
                    }
                }
        }
    }

    void acc(int var, int i, int j, double v) {
        auto it = coefs_.find(var);
        if (it == coefs_.end()) it = coefs_.emplace(var, Mat::Zero(dim_, dim_)).first;
        it->second(i, j) += v;
    }

    void check_symmetric(const Mat& M, const char* what) const {
        double d = (M - M.transpose()).cwiseAbs().maxCoeff();
        if (d > 1e-9 * (1.0 + M.cwiseAbs().maxCoeff()))
            throw std::logic_error("BlockBuilder(" + tag_ + "): asymmetric " + what);
    }

    std::string tag_;
    int dim_;
    Mat g0_;
    std::map<int, Mat> coefs_;
};

}  // namespace lpvl1
