#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lpvl1/param_matrix.hpp"

using namespace lpvl1;

namespace {

Mat random_mat(std::mt19937& rng, int r, int c) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = u(rng);
    return m;
}

Vec random_vec(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = u(rng);
    return v;
}

}  // namespace

TEST_CASE("eval with no terms returns the constant part") {
    Mat c(2, 2);
    c << 1, 2, 3, 4;
    ParamMatrix m(c, BasisCatalog::affine(3));
    Vec th(3);
    th << 0.3, -0.5, 7.0;
    REQUIRE((m.eval(th) - c).norm() == 0.0);
}

TEST_CASE("F-16 style affine evaluation at the origin") {
    Mat a0(2, 2), a1(2, 2), a2(2, 2);
    a0 << -0.97, 0.94, -3.44, -1.30;
    a1 << 0.70, 0.02, 2.99, 0.89;
    a2 << 0.004, 0.0, -0.086, 0.004;
    auto cat = BasisCatalog::affine(2);
    ParamMatrix A(a0, cat);
    A.add_term(0, -a1);
    A.add_term(1, -a2);
    Vec th = Vec::Zero(2);
    REQUIRE((A.eval(th) - a0).norm() < 1e-15);
    REQUIRE(A.affine());
}

TEST_CASE("random affine eval matches brute-force term summation") {
    std::mt19937 rng(42);
    auto cat = BasisCatalog::affine(3);
    for (int trial = 0; trial < 20; ++trial) {
        Mat c = random_mat(rng, 3, 2);
        ParamMatrix m(c, cat);
        std::vector<Mat> coefs;
        for (int a = 0; a < 3; ++a) {
            coefs.push_back(random_mat(rng, 3, 2));
            m.add_term(a, coefs.back());
        }
        Vec th = random_vec(rng, 3);
        Mat expect = c;
        for (int a = 0; a < 3; ++a) expect += th[a] * coefs[a];
        REQUIRE((m.eval(th) - expect).norm() < 1e-14);
    }
}

TEST_CASE("eval is additive over representations") {
    std::mt19937 rng(7);
    auto cat = BasisCatalog::affine(2);
    ParamMatrix m1(random_mat(rng, 2, 2), cat), m2(random_mat(rng, 2, 2), cat);
    m1.add_term(0, random_mat(rng, 2, 2));
    m2.add_term(1, random_mat(rng, 2, 2));
    auto sum = m1 + m2;
    for (int trial = 0; trial < 10; ++trial) {
        Vec th = random_vec(rng, 2);
        REQUIRE((sum.eval(th) - (m1.eval(th) + m2.eval(th))).norm() < 1e-14);
    }
}

TEST_CASE("eval_rate of a constant matrix is zero") {
    ParamMatrix m(Mat::Identity(3, 3), BasisCatalog::affine(2));
    Vec th(2), thd(2);
    th << 0.1, 0.2;
    thd << 5.0, -3.0;
    REQUIRE(m.eval_rate(th, thd).norm() == 0.0);
}

TEST_CASE("eval_rate of an affine term selects the coefficient") {
    auto cat = BasisCatalog::affine(2);
    Mat c0 = Mat::Zero(2, 2), c1(2, 2);
    c1 << 1, 2, 3, 4;
    ParamMatrix m(c0, cat);
    m.add_term(0, c1);
    Vec th(2), e1(2);
    th << 0.3, -0.7;
    e1 << 1, 0;
    REQUIRE((m.eval_rate(th, e1) - c1).norm() == 0.0);
}

TEST_CASE("eval_rate matches finite differences for a quadratic basis") {
    auto cat = std::make_shared<BasisCatalog>(2);
    int q = cat->add(
        "theta0_sq", [](const Vec& th) { return th[0] * th[0]; },
        [](const Vec& th) {
            Vec g(2);
            g << 2.0 * th[0], 0.0;
            return g;
        });
    Mat coef(2, 2);
    coef << 1, -1, 2, 0.5;
    ParamMatrix m(Mat::Zero(2, 2), cat);
    m.add_term(q, coef);
    REQUIRE_FALSE(m.affine());

    Vec th(2), thd(2);
    th << 0.3, 0.9;
    thd << 2.0, 0.0;
    Mat analytic = m.eval_rate(th, thd);
    REQUIRE((analytic - 2.0 * 0.3 * 2.0 * coef).norm() < 1e-12);

    double h = 1e-6;
    Mat fd = (m.eval(th + h * thd) - m.eval(th)) / h;
    REQUIRE((analytic - fd).norm() < 2e-5);
}

TEST_CASE("eval_rate matches central differences of t -> eval(theta(t)) to O(h^2)") {
    auto cat = std::make_shared<BasisCatalog>(1);
    int s = cat->add(
        "sin", [](const Vec& th) { return std::sin(th[0]); },
        [](const Vec& th) {
            Vec g(1);
            g << std::cos(th[0]);
            return g;
        });
    Mat coef(1, 1);
    coef << 3.0;
    ParamMatrix m(Mat::Zero(1, 1), cat);
    m.add_term(s, coef);

    // theta(t) = 0.4 + 0.2 t, so theta_dot = 0.2
    auto theta_of = [](double t) {
        Vec v(1);
        v << 0.4 + 0.2 * t;
        return v;
    };
    Vec thd(1);
    thd << 0.2;
    double t0 = 1.3;
    Mat analytic = m.eval_rate(theta_of(t0), thd);
    double err_prev = -1.0;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        Mat cd = (m.eval(theta_of(t0 + h)) - m.eval(theta_of(t0 - h))) / (2.0 * h);
        double err = (cd - analytic).norm();
        if (err_prev > 0) REQUIRE(err < 0.3 * err_prev);  // ~ h^2 decay
        err_prev = err;
    }
}

TEST_CASE("eval_rate without a registered gradient fails") {
    auto cat = std::make_shared<BasisCatalog>(1);
    int id = cat->add("opaque", [](const Vec& th) { return th[0] * th[0]; });
    ParamMatrix m(Mat::Zero(1, 1), cat);
    m.add_term(id, Mat::Identity(1, 1));
    Vec th(1), thd(1);
    th << 1.0;
    thd << 1.0;
    REQUIRE_NOTHROW(m.eval(th));
    REQUIRE_THROWS_AS(m.eval_rate(th, thd), std::invalid_argument);
}

TEST_CASE("dimension mismatches are rejected") {
    auto cat = BasisCatalog::affine(2);
    ParamMatrix m(Mat::Zero(2, 2), cat);
    REQUIRE_THROWS_AS(m.add_term(0, Mat::Zero(3, 2)), std::invalid_argument);
    REQUIRE_THROWS_AS(m.add_term(5, Mat::Zero(2, 2)), std::invalid_argument);
    Vec th(3);
    th.setZero();
    REQUIRE_THROWS_AS(m.eval(th), std::invalid_argument);
}

TEST_CASE("from_function wraps arbitrary matrix functions") {
    auto pm = ParamMatrix::from_function("inv_gain", 1, 1, 1, [](const Vec& th) {
        Mat out(1, 1);
        out << 1.0 / (2.0 + th[0]);
        return out;
    });
    Vec th(1);
    th << 0.5;
    REQUIRE(pm.eval(th)(0, 0) == Catch::Approx(0.4).epsilon(1e-14));
}
