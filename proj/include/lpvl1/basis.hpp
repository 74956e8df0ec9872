#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpvl1 {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// One scalar basis function of the scheduling vector theta.
struct BasisFn {
    std::string name;
    std::function<double(const Vec&)> f;
    std::function<Vec(const Vec&)> grad;  // empty when no gradient was registered
    int affine_axis = -1;                 // >= 0 when f(theta) == theta[axis]
};

/// Catalog of scalar basis functions over a fixed-dimension theta.
///
/// A catalog is built once and then shared immutably between all ParamMatrix
/// instances that reference its ids.
class BasisCatalog {
  public:
    explicit BasisCatalog(int theta_dim) : theta_dim_(theta_dim) {
        if (theta_dim < 0) throw std::invalid_argument("BasisCatalog: negative theta dimension");
    }

    /// Catalog containing exactly the affine functions theta_0, ..., theta_{d-1}.
    static std::shared_ptr<const BasisCatalog> affine(int theta_dim) {
        auto cat = std::make_shared<BasisCatalog>(theta_dim);
        for (int i = 0; i < theta_dim; ++i) cat->add_affine(i);
        return cat;
    }

    int add_affine(int axis) {
        if (axis < 0 || axis >= theta_dim_) throw std::invalid_argument("BasisCatalog: affine axis out of range");
        BasisFn fn;
        fn.name = "theta_" + std::to_string(axis);
        fn.f = [axis](const Vec& th) { return th[axis]; };
        fn.grad = [axis, d = theta_dim_](const Vec&) {
            Vec g = Vec::Zero(d);
            g[axis] = 1.0;
            return g;
        };
        fn.affine_axis = axis;
        fns_.push_back(std::move(fn));
        return static_cast<int>(fns_.size()) - 1;
    }

    int add(std::string name, std::function<double(const Vec&)> f,
            std::function<Vec(const Vec&)> grad = nullptr) {
        BasisFn fn;
        fn.name = std::move(name);
        fn.f = std::move(f);
        fn.grad = std::move(grad);
        fns_.push_back(std::move(fn));
        return static_cast<int>(fns_.size()) - 1;
    }

    int theta_dim() const { return theta_dim_; }
    int size() const { return static_cast<int>(fns_.size()); }

    const BasisFn& at(int id) const {
        if (id < 0 || id >= size()) throw std::invalid_argument("BasisCatalog: unregistered basis id");
        return fns_[id];
    }

    double value(int id, const Vec& theta) const {
        check_theta(theta);
        return at(id).f(theta);
    }

    /// d/dt of basis id along theta_dot; requires a registered gradient.
    double rate(int id, const Vec& theta, const Vec& theta_dot) const {
        check_theta(theta);
        const BasisFn& fn = at(id);
        if (fn.affine_axis >= 0) return theta_dot[fn.affine_axis];
        if (!fn.grad) throw std::invalid_argument("BasisCatalog: no gradient registered for '" + fn.name + "'");
        return fn.grad(theta).dot(theta_dot);
    }

    void check_theta(const Vec& theta) const {
        if (theta.size() != theta_dim_)
            throw std::invalid_argument("BasisCatalog: theta dimension mismatch (got " +
                                        std::to_string(theta.size()) + ", expected " +
                                        std::to_string(theta_dim_) + ")");
    }

  private:
    int theta_dim_;
    std::vector<BasisFn> fns_;
};

using BasisCatalogPtr = std::shared_ptr<const BasisCatalog>;

}  // namespace lpvl1
