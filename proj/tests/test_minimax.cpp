#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hpa/minimax.hpp"

using namespace hpa;

namespace {

// min c^T x over A x = b, x >= 0 by enumerating every basis.
double lp_by_enumeration(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
    const int m = static_cast<int>(A.rows()), n = static_cast<int>(A.cols());
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> pick(m);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == m) {
            Eigen::MatrixXd Bm(m, m);
            for (int i = 0; i < m; ++i) Bm.col(i) = A.col(pick[i]);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(Bm);
            if (lu.rank() < m) return;
            const Eigen::VectorXd xb = lu.solve(b);
            if (xb.minCoeff() < -1e-12) return;
            double v = 0;
            for (int i = 0; i < m; ++i) v += c[pick[i]] * xb[i];
            best = std::min(best, v);
            return;
        }
        for (int j = start; j < n; ++j) pick[depth] = j, rec(j + 1, depth + 1);
    };
    rec(0, 0);
    return best;
}

// Best line a + b x: the inner problem in a is closed form, the outer one convex in b.
double best_line_error(const Eigen::VectorXd& x, const Eigen::VectorXd& f) {
    auto err = [&](double b) {
        const Eigen::ArrayXd r = f.array() - b * x.array();
        return 0.5 * (r.maxCoeff() - r.minCoeff());
    };
    double lo = -100, hi = 100;
    for (int i = 0; i < 300; ++i) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        (err(m1) < err(m2) ? hi : lo) = (err(m1) < err(m2) ? m2 : m1);
    }
    return err(0.5 * (lo + hi));
}

} // namespace

TEST(Simplex, MatchesBasisEnumeration) {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1, 1), pos(0.1, 1);
    for (int trial = 0; trial < 30; ++trial) {
        const int m = 2 + trial % 3, n = m + 3 + trial % 3;
        Eigen::MatrixXd A(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = u(rng);
        // b = A x0 with x0 > 0 keeps the problem feasible; positive costs keep it bounded.
        Eigen::VectorXd x0(n), c(n);
        for (int j = 0; j < n; ++j) x0[j] = pos(rng), c[j] = pos(rng) + (j % 2 ? 0.0 : u(rng) * 0.05);
        const Eigen::VectorXd b = A * x0;
        const auto lp = solve_standard_lp(A, b, c);
        EXPECT_NEAR(lp.objective, lp_by_enumeration(A, b, c), 1e-9) << "trial " << trial;
        EXPECT_LT((A * lp.x - b).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_GE(lp.x.minCoeff(), -1e-12);
    }
}

TEST(Simplex, DegenerateRowsAndInfeasibility) {
    Eigen::MatrixXd A(2, 3);
    A << 1, 1, 1, 2, 2, 2; // second row repeats the first
    Eigen::VectorXd b(2), c(3);
    b << 1, 2;
    c << 3, 1, 2;
    EXPECT_NEAR(solve_standard_lp(A, b, c).objective, 1.0, 1e-12);
    b << 1, 3;
    EXPECT_THROW(solve_standard_lp(A, b, c), NumericError);
}

TEST(Minimax, ConstantFitIsMidrange) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-3, 3);
    Eigen::VectorXd f(40);
    for (int i = 0; i < 40; ++i) f[i] = u(rng);
    const auto fit = discrete_minimax(Eigen::MatrixXd::Ones(40, 1), f);
    EXPECT_NEAR(fit.coef[0], 0.5 * (f.maxCoeff() + f.minCoeff()), 1e-12);
    EXPECT_NEAR(fit.lp_error, 0.5 * (f.maxCoeff() - f.minCoeff()), 1e-12);
    EXPECT_NEAR(fit.grid_error, fit.lp_error, 1e-12);
}

TEST(Minimax, LineFitMatchesNestedSearch) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd x(30), f(30);
        for (int i = 0; i < 30; ++i) x[i] = u(rng), f[i] = std::sin(3 * x[i]) + 0.3 * u(rng);
        Eigen::MatrixXd B(30, 2);
        B.col(0).setOnes();
        B.col(1) = x;
        const auto fit = discrete_minimax(B, f);
        EXPECT_NEAR(fit.lp_error, best_line_error(x, f), 1e-9);
        EXPECT_NEAR(fit.grid_error, fit.lp_error, 1e-10);
    }
}

TEST(Minimax, ExpLineOnInterval) {
    // Best linear approximation of e^x on [-1, 1]: slope sinh(1), error known in closed form.
    const int M = 4001;
    Eigen::VectorXd x(M), f(M);
    for (int i = 0; i < M; ++i) x[i] = -1 + 2.0 * i / (M - 1), f[i] = std::exp(x[i]);
    Eigen::MatrixXd B(M, 2);
    B.col(0).setOnes();
    B.col(1) = x;
    const auto fit = discrete_minimax(B, f);
    const double s = std::sinh(1.0), xi = std::log(s);
    const double err = 0.5 * (std::exp(-1.0) + s - (std::exp(xi) - s * xi));
    EXPECT_NEAR(fit.coef[1], s, 1e-6);
    EXPECT_NEAR(fit.lp_error, err, 1e-7);
}

TEST(Minimax, HighDegreeChebyshevEquioscillation) {
    // x^n minus its best degree n-1 approximation is T_n / 2^(n-1).
    const int n = 20, M = 2001;
    Eigen::VectorXd f(M);
    Eigen::MatrixXd B(M, n);
    for (int i = 0; i < M; ++i) {
        const double x = std::cos(3.141592653589793 * i / (M - 1));
        f[i] = std::pow(x, n);
        for (int k = 0; k < n; ++k) B(i, k) = std::cos(k * std::acos(x));
    }
    const auto fit = discrete_minimax(B, f);
    EXPECT_NEAR(fit.lp_error, std::pow(2.0, 1 - n), 1e-14);
}

TEST(Minimax, RankDeficientBasis) {
    // x^2 on a grid containing 0, 1/2, 1: the best line leaves 1/8.
    Eigen::MatrixXd B(51, 3);
    Eigen::VectorXd f(51);
    for (int i = 0; i < 51; ++i) {
        const double x = i / 50.0;
        B(i, 0) = 1, B(i, 1) = x, B(i, 2) = 2 * x;
        f[i] = x * x;
    }
    const auto fit = discrete_minimax(B, f);
    EXPECT_EQ(fit.rank, 2);
    EXPECT_NEAR(fit.lp_error, 0.125, 1e-12);
    EXPECT_NEAR(fit.grid_error, 0.125, 1e-12);
}

TEST(Minimax, Preconditions) {
    EXPECT_THROW(discrete_minimax(Eigen::MatrixXd::Ones(3, 3), Eigen::VectorXd::Ones(3)), PreconditionError);
    EXPECT_THROW(discrete_minimax(Eigen::MatrixXd::Ones(5, 1), Eigen::VectorXd::Ones(4)), PreconditionError);
}
