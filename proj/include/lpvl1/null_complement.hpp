#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <limits>
#include <vector>

#include "lpvl1/domain.hpp"
#include "lpvl1/errors.hpp"
#include "lpvl1/linalg.hpp"
#include "lpvl1/param_matrix.hpp"

namespace lpvl1 {

/// Orthonormal complement B_u(theta) of the input map: B(theta)^T B_u(theta) = 0
/// and [B(theta) B_u(theta)] nonsingular on the scheduling box.
///
/// Bases are computed on the domain grid with column-rotation alignment to the
/// predecessor point so the family is continuous along the grid ordering.
/// Off-grid queries recompute the exact basis and align it to the nearest grid
/// point's stored basis.
class NullComplement {
  public:
    NullComplement() = default;

    NullComplement(const ParamMatrix& B, const ParamDomain& d, double rank_tol = 1e-9)
        : n_(B.rows()), m_(B.cols()), domain_(d) {
        grid_ = d.grid_points();
        bases_.reserve(grid_.size());
        Mat prev;
        for (const auto& th : grid_) {
            Mat Q = raw_basis(B.eval(th), rank_tol);
            if (prev.size() > 0) Q = align(Q, prev);
            bases_.push_back(Q);
            prev = Q;
        }
        B_ = B;
    }

    int rows() const { return n_; }
    int cols() const { return n_ - m_; }

    const Mat& at_grid(std::size_t idx) const { return bases_.at(idx); }
    const std::vector<Vec>& grid() const { return grid_; }

    /// Exact basis at theta, aligned to the nearest grid point.
    Mat eval(const Vec& theta) const {
        Mat Q = raw_basis(B_.eval(theta), 1e-9);
        return align(Q, bases_.at(nearest_grid_index(theta)));
    }

    /// Pseudo-inverse; columns are orthonormal so it is just the transpose.
    Mat pinv(const Vec& theta) const { return eval(theta).transpose(); }

    ParamMatrix as_param_matrix() const {
        auto self = *this;
        return ParamMatrix::from_function("B_u", n_, n_ - m_, domain_.dim(),
                                          [self](const Vec& th) { return self.eval(th); });
    }

    ParamMatrix pinv_param_matrix() const {
        auto self = *this;
        return ParamMatrix::from_function("pinv(B_u)", n_ - m_, n_, domain_.dim(),
                                          [self](const Vec& th) { return self.pinv(th); });
    }

    std::size_t nearest_grid_index(const Vec& theta) const {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            double dist = (grid_[i] - theta).norm();
            if (dist < best_d) {
                best_d = dist;
                best = i;
            }
        }
        return best;
    }

  private:
    static Mat raw_basis(const Mat& B, double rank_tol) {
        const int n = static_cast<int>(B.rows());
        const int m = static_cast<int>(B.cols());
        Eigen::JacobiSVD<Mat> svd(B, Eigen::ComputeFullU);
        const auto& s = svd.singularValues();
        if (s.size() == 0 || s(s.size() - 1) <= rank_tol * s(0))
            throw NumericalError("NullComplement: B(theta) rank-deficient at a grid point");
        return svd.matrixU().rightCols(n - m);
    }

    /// Orthogonal Procrustes alignment of span-equal bases.
    static Mat align(const Mat& Q, const Mat& ref) {
        Eigen::JacobiSVD<Mat> svd(Q.transpose() * ref, Eigen::ComputeFullU | Eigen::ComputeFullV);
        return Q * (svd.matrixU() * svd.matrixV().transpose());
    }

    int n_ = 0, m_ = 0;
    ParamMatrix B_;
    ParamDomain domain_;
    std::vector<Vec> grid_;
    std::vector<Mat> bases_;
};

}  // namespace lpvl1
