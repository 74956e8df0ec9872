#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpvl1/basis.hpp"

namespace lpvl1 {

/// Scheduling boxes Theta (values) and Theta_d (rates) with per-axis grid
/// counts. A zero-dimensional domain models an LTI system: its grid is the
/// single empty point.
struct ParamDomain {
    Vec theta_lo, theta_hi;
    Vec rate_lo, rate_hi;
    std::vector<int> grid_counts;

    ParamDomain() = default;

    ParamDomain(Vec lo, Vec hi, Vec rlo, Vec rhi, std::vector<int> counts)
        : theta_lo(std::move(lo)),
          theta_hi(std::move(hi)),
          rate_lo(std::move(rlo)),
          rate_hi(std::move(rhi)),
          grid_counts(std::move(counts)) {
        validate();
    }

    static ParamDomain lti() { return ParamDomain(Vec(0), Vec(0), Vec(0), Vec(0), {}); }

    int dim() const { return static_cast<int>(theta_lo.size()); }

    void validate() const {
        const int d = dim();
        if (theta_hi.size() != d || rate_lo.size() != d || rate_hi.size() != d ||
            static_cast<int>(grid_counts.size()) != d)
            throw std::invalid_argument("ParamDomain: inconsistent axis counts");
        for (int i = 0; i < d; ++i) {
            if (theta_lo[i] > theta_hi[i] || rate_lo[i] > rate_hi[i])
                throw std::invalid_argument("ParamDomain: lo > hi on axis " + std::to_string(i));
            if (grid_counts[i] < 2)
                throw std::invalid_argument("ParamDomain: grid count < 2 on axis " + std::to_string(i));
        }
    }

    /// Euclidean norm of the componentwise max-magnitude rate vector.
    double b_theta_dot() const {
        double s = 0.0;
        for (int i = 0; i < dim(); ++i) {
            double m = std::max(std::abs(rate_lo[i]), std::abs(rate_hi[i]));
            s += m * m;
        }
        return std::sqrt(s);
    }

    bool contains(const Vec& theta, double tol = 1e-12) const {
        if (theta.size() != dim()) return false;
        for (int i = 0; i < dim(); ++i)
            if (theta[i] < theta_lo[i] - tol || theta[i] > theta_hi[i] + tol) return false;
        return true;
    }

    /// Uniform per-axis samples including endpoints, row-major (axis 0 slowest).
    std::vector<Vec> grid_points() const { return grid_points(grid_counts); }

    std::vector<Vec> grid_points(const std::vector<int>& counts) const {
        if (static_cast<int>(counts.size()) != dim())
            throw std::invalid_argument("ParamDomain: grid counts dimension mismatch");
        std::vector<Vec> out;
        long total = 1;
        for (int c : counts) total *= c;
        out.reserve(total);
        Vec theta(dim());
        enumerate_grid(counts, 0, theta, out);
        return out;
    }

    /// Corners of the rate box Theta_d (2^d points; one empty point if d == 0).
    std::vector<Vec> rate_vertices() const { return box_vertices(rate_lo, rate_hi); }

    /// Corners of the value box Theta.
    std::vector<Vec> theta_vertices() const { return box_vertices(theta_lo, theta_hi); }

    /// All corners of Theta x Theta_d in deterministic (theta-major) order.
    std::vector<std::pair<Vec, Vec>> vertices() const {
        std::vector<std::pair<Vec, Vec>> out;
        auto tv = theta_vertices();
        auto rv = rate_vertices();
        out.reserve(tv.size() * rv.size());
        for (const auto& t : tv)
            for (const auto& r : rv) out.emplace_back(t, r);
        return out;
    }

    /// Nested refinement: per-axis counts doubled minus one.
    std::vector<int> refined_counts(int times = 1) const {
        std::vector<int> c = grid_counts;
        for (int k = 0; k < times; ++k)
            for (auto& v : c) v = 2 * v - 1;
        return c;
    }

    /// Grid spacing along one axis.
    double cell_width(int axis) const {
        return (theta_hi[axis] - theta_lo[axis]) / (grid_counts[axis] - 1);
    }

  private:
    void enumerate_grid(const std::vector<int>& counts, int axis, Vec& theta,
                        std::vector<Vec>& out) const {
        if (axis == dim()) {
            out.push_back(theta);
            return;
        }
        for (int k = 0; k < counts[axis]; ++k) {
            double t = (counts[axis] == 1)
                           ? 0.5 * (theta_lo[axis] + theta_hi[axis])
                           : theta_lo[axis] + (theta_hi[axis] - theta_lo[axis]) * k / (counts[axis] - 1);
            theta[axis] = t;
            enumerate_grid(counts, axis + 1, theta, out);
        }
    }

    static std::vector<Vec> box_vertices(const Vec& lo, const Vec& hi) {
        const int d = static_cast<int>(lo.size());
        std::vector<Vec> out;
        out.reserve(1u << d);
        for (unsigned mask = 0; mask < (1u << d); ++mask) {
            Vec v(d);
            for (int i = 0; i < d; ++i) v[i] = (mask >> i) & 1u ? hi[i] : lo[i];
            out.push_back(std::move(v));
        }
        return out;
    }
};

}  // namespace lpvl1
