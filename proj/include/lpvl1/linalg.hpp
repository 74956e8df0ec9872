#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "lpvl1/basis.hpp"
#include "lpvl1/errors.hpp"

namespace lpvl1 {

/// Spectral (2-) norm.
inline double spectral_norm(const Mat& M) {
    if (M.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Mat>(M).singularValues()(0);
}

inline double smallest_singular_value(const Mat& M) {
    Eigen::JacobiSVD<Mat> svd(M);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

/// 2-norm condition number.
inline double cond2(const Mat& M) {
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& s = svd.singularValues();
    double smin = s(s.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

/// Moore-Penrose pseudo-inverse via SVD with relative rank tolerance.
inline Mat pinv(const Mat& M, double rel_tol = 1e-12) {
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    double cut = rel_tol * (s.size() ? s(0) : 0.0);
    Vec inv = Vec::Zero(s.size());
    for (int i = 0; i < s.size(); ++i) inv[i] = s(i) > cut ? 1.0 / s(i) : 0.0;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Largest eigenvalue of a symmetric matrix.
inline double max_eig_sym(const Mat& S) {
    if (S.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

inline double min_eig_sym(const Mat& S) {
    if (S.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

/// Solves M * X = B, failing loudly when M is ill-conditioned.
inline Mat solve_checked(const Mat& M, const Mat& B, double cond_limit, const char* what) {
    double c = cond2(M);
    if (!(c < cond_limit))
        throw NumericalError(std::string(what) + ": condition number " + std::to_string(c) +
                             " exceeds limit");
    return M.fullPivLu().solve(B);
}

}  // namespace lpvl1
