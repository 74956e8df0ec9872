#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpvl1/basis.hpp"

namespace lpvl1 {

/// Matrix-valued function of the scheduling vector theta, represented as a
/// constant part plus coefficient matrices against scalar basis functions:
///
///     M(theta) = constant + sum_l  f_l(theta) * coef_l
class ParamMatrix {
  public:
    struct Term {
        int basis;
        Mat coef;
    };

    ParamMatrix() = default;

    explicit ParamMatrix(Mat constant, BasisCatalogPtr catalog = nullptr)
        : rows_(static_cast<int>(constant.rows())),
          cols_(static_cast<int>(constant.cols())),
          constant_(std::move(constant)),
          catalog_(std::move(catalog)) {
        if (!catalog_) catalog_ = BasisCatalog::affine(0);
    }

    static ParamMatrix zero(int rows, int cols, BasisCatalogPtr catalog = nullptr) {
        return ParamMatrix(Mat::Zero(rows, cols), std::move(catalog));
    }

    static ParamMatrix identity(int n, BasisCatalogPtr catalog = nullptr) {
        return ParamMatrix(Mat::Identity(n, n), std::move(catalog));
    }

    /// Wraps an arbitrary matrix-valued function as a ParamMatrix by
    /// registering one basis entry per matrix element. No gradients, so the
    /// result supports eval() but not eval_rate().
    static ParamMatrix from_function(const std::string& name, int rows, int cols, int theta_dim,
                                     std::function<Mat(const Vec&)> fn) {
        auto cat = std::make_shared<BasisCatalog>(theta_dim);
        ParamMatrix out(Mat::Zero(rows, cols), nullptr);
        out.catalog_ = cat;
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                int id = cat->add(name + "[" + std::to_string(i) + "," + std::to_string(j) + "]",
                                  [fn, i, j](const Vec& th) { return fn(th)(i, j); });
                Mat e = Mat::Zero(rows, cols);
                e(i, j) = 1.0;
                out.terms_.push_back({id, std::move(e)});
            }
        }
        return out;
    }

    void add_term(int basis_id, Mat coef) {
        if (coef.rows() != rows_ || coef.cols() != cols_)
            throw std::invalid_argument("ParamMatrix: coefficient dimension mismatch");
        catalog_->at(basis_id);  // validates the id
        terms_.push_back({basis_id, std::move(coef)});
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Mat& constant() const { return constant_; }
    const std::vector<Term>& terms() const { return terms_; }
    const BasisCatalogPtr& catalog() const { return catalog_; }

    /// True when every term is an affine basis function theta_i. Required for
    /// matrices used as LMI decision variables.
    bool affine() const {
        for (const auto& t : terms_)
            if (catalog_->at(t.basis).affine_axis < 0) return false;
        return true;
    }

    Mat eval(const Vec& theta) const {
        catalog_->check_theta(theta);
        Mat out = constant_;
        for (const auto& t : terms_) out += catalog_->at(t.basis).f(theta) * t.coef;
        return out;
    }

    /// d/dt M(theta(t)) for the given theta, theta_dot.
    Mat eval_rate(const Vec& theta, const Vec& theta_dot) const {
        catalog_->check_theta(theta);
        Mat out = Mat::Zero(rows_, cols_);
        for (const auto& t : terms_) out += catalog_->rate(t.basis, theta, theta_dot) * t.coef;
        return out;
    }

    ParamMatrix transpose() const {
        ParamMatrix out(constant_.transpose(), catalog_);
        for (const auto& t : terms_) out.terms_.push_back({t.basis, t.coef.transpose()});
        return out;
    }

    ParamMatrix scaled(double s) const {
        ParamMatrix out(s * constant_, catalog_);
        for (const auto& t : terms_) out.terms_.push_back({t.basis, s * t.coef});
        return out;
    }

    /// L * M(theta) for a constant L.
    ParamMatrix left_multiplied(const Mat& L) const {
        ParamMatrix out(L * constant_, catalog_);
        for (const auto& t : terms_) out.terms_.push_back({t.basis, L * t.coef});
        return out;
    }

    /// M(theta) * R for a constant R.
    ParamMatrix right_multiplied(const Mat& R) const {
        ParamMatrix out(constant_ * R, catalog_);
        for (const auto& t : terms_) out.terms_.push_back({t.basis, t.coef * R});
        return out;
    }

    ParamMatrix operator+(const ParamMatrix& other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_)
            throw std::invalid_argument("ParamMatrix: size mismatch in addition");
        if (catalog_ != other.catalog_)
            throw std::invalid_argument("ParamMatrix: basis catalogs differ in addition");
        ParamMatrix out(constant_ + other.constant_, catalog_);
        out.terms_ = terms_;
        out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
        return out;
    }

  private:
    int rows_ = 0, cols_ = 0;
    Mat constant_;
    std::vector<Term> terms_;
    BasisCatalogPtr catalog_;
};

}  // namespace lpvl1
