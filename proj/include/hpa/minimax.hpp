#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace hpa {

struct LpResult {
    Eigen::VectorXd x;      // primal solution
    Eigen::VectorXd y;      // simplex multipliers of the equality rows
    double objective = 0;
    int iterations = 0;
};

// min c^T x subject to A x = b, x >= 0, by a dense revised simplex.
// Dantzig pricing with a Harris ratio test, switching to Bland's rule when the objective stalls.
// A feasible starting basis skips phase 1; otherwise artificials are driven out first.
inline LpResult solve_standard_lp(Eigen::MatrixXd A, Eigen::VectorXd b, const Eigen::VectorXd& c,
                                  std::vector<int> start = {}, int max_iterations = 100000) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    for (int i = 0; i < m; ++i)
        if (b[i] < 0) A.row(i) *= -1, b[i] = -b[i];

    // Columns n..n+m-1 are artificials (identity).
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;
    Eigen::MatrixXd Binv = Eigen::MatrixXd::Identity(m, m);
    auto column = [&](int j) -> Eigen::VectorXd {
        if (j < n) return A.col(j);
        return Eigen::VectorXd::Unit(m, j - n);
    };
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    const double piv_tol = 1e-9 * scale;
    const double feas_tol = 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff());

    int iterations = 0;
    auto refactor = [&]() {
        Eigen::MatrixXd B(m, m);
        for (int i = 0; i < m; ++i) B.col(i) = column(basis[i]);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
        if (!lu.isInvertible()) throw NumericError("simplex: basis became singular");
        Binv = lu.inverse();
    };

    auto run_phase = [&](const Eigen::VectorXd& cost_real, bool phase1) {
        auto cost = [&](int j) { return j < n ? cost_real[j] : (phase1 ? 1.0 : 0.0); };
        std::vector<char> in_basis(n + m, 0);
        for (int j : basis) in_basis[j] = 1;
        double best_obj = std::numeric_limits<double>::infinity();
        int stall = 0;
        // Columns whose direction had no pivot even after a fresh factorization.
        std::vector<char> blocked(n, 0);
        bool fresh = false;
        const double dtol = 1e-11 * std::max(1.0, cost_real.cwiseAbs().maxCoeff());
        while (true) {
            if (++iterations > max_iterations) throw NumericError("simplex: iteration limit reached");
            if (iterations % 32 == 0 && !fresh) refactor(), fresh = true;
            Eigen::VectorXd cB(m);
            for (int i = 0; i < m; ++i) cB[i] = cost(basis[i]);
            const Eigen::VectorXd xB = Binv * b;
            const double obj = cB.dot(xB);
            if (!std::isfinite(best_obj) || obj < best_obj - 1e-13 * std::max(1.0, std::abs(best_obj)))
                best_obj = obj, stall = 0;
            else
                ++stall;
            const bool bland = stall > 50;
            const Eigen::VectorXd y = Binv.transpose() * cB;
            const Eigen::VectorXd d = cost_real - A.transpose() * y;
            int q = -1;
            double best = -dtol;
            for (int j = 0; j < n; ++j) {
                if (in_basis[j] || blocked[j]) continue;
                if (d[j] < best) {
                    q = j;
                    best = d[j];
                    if (bland) break;
                }
            }
            if (q < 0) return;
            const Eigen::VectorXd u = Binv * A.col(q);
            int r = -1;
            // A leftover artificial must stay at zero in phase 2.
            if (!phase1)
                for (int i = 0; i < m && r < 0; ++i)
                    if (basis[i] >= n && std::abs(u[i]) > piv_tol) r = i;
            if (r < 0) {
                double theta = std::numeric_limits<double>::infinity();
                for (int i = 0; i < m; ++i)
                    if (u[i] > piv_tol) theta = std::min(theta, (std::max(0.0, xB[i]) + feas_tol) / u[i]);
                double big = 0;
                for (int i = 0; i < m; ++i) {
                    if (u[i] <= piv_tol || std::max(0.0, xB[i]) / u[i] > theta) continue;
                    if (bland ? (r < 0 || basis[i] < basis[r]) : u[i] > big) r = i, big = u[i];
                }
            }
            if (r < 0) {
                // The feasible sets solved here are bounded, so this is rounding drift.
                if (!fresh) {
                    refactor();
                    fresh = true;
                } else {
                    blocked[q] = 1;
                }
                continue;
            }
            fresh = false;
            std::fill(blocked.begin(), blocked.end(), 0);
            in_basis[basis[r]] = 0;
            in_basis[q] = 1;
            basis[r] = q;
            const double piv = u[r];
            Binv.row(r) /= piv;
            for (int i = 0; i < m; ++i)
                if (i != r && u[i] != 0) Binv.row(i) -= u[i] * Binv.row(r);
        }
    };

    if (!start.empty()) {
        if (static_cast<int>(start.size()) != m) throw PreconditionError("solve_standard_lp: start basis has the wrong size");
        basis = start;
        refactor();
        if ((Binv * b).minCoeff() < -1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff()))
            throw PreconditionError("solve_standard_lp: start basis is infeasible");
    } else {
        run_phase(Eigen::VectorXd::Zero(n), true);
        refactor();
        const Eigen::VectorXd xB = Binv * b;
        double infeas = 0;
        for (int i = 0; i < m; ++i)
            if (basis[i] >= n) infeas += std::abs(xB[i]);
        if (infeas > 1e-8 * std::max(1.0, b.cwiseAbs().maxCoeff())) throw NumericError("simplex: problem is infeasible");
        // Pivot zero-level artificials out where possible.
        for (int i = 0; i < m; ++i) {
            if (basis[i] < n) continue;
            std::vector<char> in_basis(n, 0);
            for (int j : basis)
                if (j < n) in_basis[j] = 1;
            for (int j = 0; j < n; ++j) {
                if (in_basis[j]) continue;
                const Eigen::VectorXd u = Binv * A.col(j);
                if (std::abs(u[i]) > 1e-9 * scale) {
                    basis[i] = j;
                    refactor();
                    break;
                }
            }
        }
    }
    run_phase(c, false);
    refactor();

    LpResult res;
    res.iterations = iterations;
    res.x = Eigen::VectorXd::Zero(n);
    const Eigen::VectorXd xB = Binv * b;
    Eigen::VectorXd cB(m);
    for (int i = 0; i < m; ++i) {
        cB[i] = basis[i] < n ? c[basis[i]] : 0.0;
        if (basis[i] < n) res.x[basis[i]] = std::max(0.0, xB[i]);
    }
    res.y = Binv.transpose() * cB;
    res.objective = c.dot(res.x);
    return res;
}

struct MinimaxFit {
    Eigen::VectorXd coef;  // coefficients in the columns of the input basis
    double lp_error = 0;   // optimal value of the linear program
    double grid_error = 0; // max |f - B coef| recomputed in the input basis
    int rank = 0;
    int iterations = 0;
};

// min_c max_i |f_i - (B c)_i|. The basis is orthonormalized (column-pivoted QR) before the
// linear program, which is solved on its dual: max f^T(u - v) s.t. Q^T(u - v) = 0, 1^T(u + v) = 1.
inline MinimaxFit discrete_minimax(const Eigen::MatrixXd& B, const Eigen::VectorXd& f) {
    const int M = static_cast<int>(B.rows());
    const int k = static_cast<int>(B.cols());
    if (f.size() != M || M <= k) throw PreconditionError("discrete_minimax: need more nodes than basis functions");
    Eigen::VectorXd norms(k);
    Eigen::MatrixXd Bn = B;
    for (int j = 0; j < k; ++j) {
        norms[j] = B.col(j).norm();
        if (!(norms[j] > 0)) norms[j] = 1;
        Bn.col(j) /= norms[j];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Bn);
    qr.setThreshold(1e-13);
    const int r = static_cast<int>(qr.rank());
    const Eigen::MatrixXd Q = (qr.householderQ() * Eigen::MatrixXd::Identity(M, r)) * std::sqrt(static_cast<double>(M));

    Eigen::MatrixXd A(r + 1, 2 * M);
    A.topLeftCorner(r, M) = Q.transpose();
    A.topRightCorner(r, M) = -Q.transpose();
    A.row(r).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(r + 1);
    rhs[r] = 1;
    Eigen::VectorXd cost(2 * M);
    cost.head(M) = -f;
    cost.tail(M) = f;
    // Start from r + 1 well-spread nodes carrying a null vector of their Q rows: u - v = lambda / |lambda|_1.
    Eigen::MatrixXd S(r + 1, M);
    S.topRows(r) = Q.transpose();
    S.row(r).setOnes();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> pick(S);
    std::vector<int> nodes(r + 1);
    Eigen::MatrixXd QS(r, r + 1);
    for (int i = 0; i <= r; ++i) {
        nodes[i] = pick.colsPermutation().indices()[i];
        QS.col(i) = Q.row(nodes[i]).transpose();
    }
    const Eigen::VectorXd lambda = QS.fullPivLu().kernel().col(0);
    std::vector<int> start(r + 1);
    for (int i = 0; i <= r; ++i) start[i] = lambda[i] >= 0 ? nodes[i] : M + nodes[i];
    const LpResult lp = solve_standard_lp(A, rhs, cost, start);

    // Reduced-cost optimality gives f_i + y_Q . Q_i in [y_E, -y_E]: coefficients -y_Q, error -y_E.
    const Eigen::VectorXd d = -lp.y.head(r);
    MinimaxFit fit;
    fit.lp_error = -lp.y[r];
    fit.rank = r;
    fit.iterations = lp.iterations;
    const Eigen::MatrixXd R11 = qr.matrixR().topLeftCorner(r, r).triangularView<Eigen::Upper>();
    const Eigen::VectorXd c1 =
        R11.triangularView<Eigen::Upper>().solve(d * std::sqrt(static_cast<double>(M)));
    Eigen::VectorXd cperm = Eigen::VectorXd::Zero(k);
    cperm.head(r) = c1;
    const Eigen::VectorXd cn = qr.colsPermutation() * cperm;
    fit.coef = cn.cwiseQuotient(norms);
    fit.grid_error = (f - B * fit.coef).cwiseAbs().maxCoeff();
    return fit;
}

} // namespace hpa
