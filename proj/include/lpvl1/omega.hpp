#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "lpvl1/basis.hpp"
#include "lpvl1/linalg.hpp"

namespace lpvl1 {

/// Convex polytope of admissible input-gain matrices omega, given by its
/// vertex list. Every vertex must be strictly row-diagonally dominant with a
/// consistent diagonal sign pattern.
struct OmegaPolytope {
    int m = 0;
    std::vector<Mat> vertices;
    bool contains_identity = false;
    bool diagonally_dominant_checked = false;

    OmegaPolytope() = default;

    OmegaPolytope(int dim, std::vector<Mat> verts) : m(dim), vertices(std::move(verts)) {
        if (vertices.empty()) throw std::invalid_argument("OmegaPolytope: empty vertex list");
        for (const auto& w : vertices)
            if (w.rows() != m || w.cols() != m)
                throw std::invalid_argument("OmegaPolytope: vertex dimension mismatch");
        check_diagonal_dominance();
        contains_identity = identity_is_member();
    }

    /// Scalar interval [lo, hi] of gains, the common single-input case.
    static OmegaPolytope scalar_interval(double lo, double hi) {
        Mat a(1, 1), b(1, 1);
        a << lo;
        b << hi;
        return OmegaPolytope(1, {a, b});
    }

    /// The trivial known-gain case omega == I.
    static OmegaPolytope identity(int dim) { return OmegaPolytope(dim, {Mat::Identity(dim, dim)}); }

    void check_diagonal_dominance() {
        for (const auto& w : vertices) {
            for (int i = 0; i < m; ++i) {
                double off = 0.0;
                for (int j = 0; j < m; ++j)
                    if (j != i) off += std::abs(w(i, j));
                if (std::abs(w(i, i)) <= off)
                    throw std::invalid_argument("OmegaPolytope: vertex not strictly row-diagonally dominant");
                // diagonal signs must agree across vertices
                if ((w(i, i) > 0) != (vertices.front()(i, i) > 0))
                    throw std::invalid_argument("OmegaPolytope: inconsistent diagonal signs");
            }
        }
        diagonally_dominant_checked = true;
    }

    double max_norm() const {
        return max_over_vertices([](const Mat& w) { return spectral_norm(w); });
    }

    double max_norm_minus_identity() const {
        return max_over_vertices([this](const Mat& w) {
            return spectral_norm(w - Mat::Identity(m, m));
        });
    }

    double max_norm_inverse() const {
        return max_over_vertices([](const Mat& w) { return spectral_norm(w.inverse()); });
    }

  private:
    bool identity_is_member() const {
        if (m == 1) {
            double lo = vertices.front()(0, 0), hi = lo;
            for (const auto& w : vertices) {
                lo = std::min(lo, w(0, 0));
                hi = std::max(hi, w(0, 0));
            }
            return lo <= 1.0 && 1.0 <= hi;
        }
        for (const auto& w : vertices)
            if ((w - Mat::Identity(m, m)).norm() < 1e-12) return true;
        return false;  // membership test beyond vertex equality is not attempted
    }

    template <typename F>
    double max_over_vertices(F f) const {
        double best = 0.0;
        for (const auto& w : vertices) best = std::max(best, f(w));
        return best;
    }
};

}  // namespace lpvl1
