#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "geometry.hpp"
#include "minimax.hpp"
#include "polys.hpp"
#include "weight.hpp"

namespace hpa {

inline constexpr int kWeightedDegreeCap = 128;

// Best uniform approximation of f by W^n p_n on the compactified line.
struct WeightedApproximant {
    int n = 0;
    std::vector<double> coef; // p_n(t) = sum_k coef[k] t^k, also the coefficients of x^(n-k) y^k
    double sup_error = 0;     // max |f - W^n p_n| over the dense check grid
    double lp_error = 0;      // value of the last discrete minimax problem
    int grid = 0;             // nodes in the last linear program
    int check_grid = 0;
    int refinements = 0;
    int iterations = 0;

    long double p(long double t) const {
        long double s = 0;
        for (int k = static_cast<int>(coef.size()) - 1; k >= 0; --k) s = s * t + coef[k];
        return s;
    }
};

namespace detail {

inline std::vector<std::vector<long double>> binomials(int n) {
    std::vector<std::vector<long double>> C(n + 1);
    for (int i = 0; i <= n; ++i) {
        C[i].assign(i + 1, 1.0L);
        for (int k = 1; k < i; ++k) C[i][k] = C[i - 1][k - 1] + C[i - 1][k];
    }
    return C;
}

// sum_k a_k c^(m-k) s^k, evaluated in long double.
inline long double angular_poly(const std::vector<double>& a, long double c, long double s) {
    const int m = static_cast<int>(a.size()) - 1;
    long double acc = 0, sp = 1;
    std::vector<long double> cp(m + 1, 1.0L);
    for (int k = 1; k <= m; ++k) cp[k] = cp[k - 1] * c;
    for (int k = 0; k <= m; ++k) {
        acc += a[k] * cp[m - k] * sp;
        sp *= s;
    }
    return acc;
}

// Trig coefficients (cos j, sin j for j = m mod 2, ..., m) times (c^2 + s^2)^((m-j)/2), in monomials c^(m-k) s^k.
inline std::vector<long double> trig_to_monomial(int m, const Eigen::VectorXd& coef, long double scale) {
    const auto C = binomials(m);
    std::vector<long double> a(m + 1, 0.0L);
    int col = 0;
    for (int j = m % 2; j <= m; j += 2) {
        const long double alpha = coef[col++];
        const long double beta = j > 0 ? coef[col++] : 0.0L;
        const int q = (m - j) / 2;
        for (int k = 0; k <= j; ++k) {
            // Re/Im of i^k
            long double w = 0;
            if (k % 2 == 0) w = alpha * ((k / 2) % 2 == 0 ? 1 : -1);
            else w = beta * (((k - 1) / 2) % 2 == 0 ? 1 : -1);
            if (w == 0) continue;
            w *= C[j][k];
            for (int l = 0; l <= q; ++l) a[k + 2 * l] += w * C[q][l];
        }
    }
    for (auto& v : a) v *= scale;
    return a;
}

struct TrigFit {
    std::vector<double> a; // monomial coefficients in (cos, sin)
    double lp_error = 0;
    double sup_error = 0;
    int grid = 0;
    int check_grid = 0;
    int refinements = 0;
    int iterations = 0;
};

// min over a of max_phi |g(phi) - omega(phi)^m sum_k a_k cos^(m-k) sin^k| on [-pi/2, pi/2].
// The basis is R^m {cos j psi, sin j psi} in the rescaled point (X, Y) = omega (cos, sin) / (ax, ay) = R (cos psi, sin psi);
// matching ax, ay to the extent of the curve keeps R nearly constant.
inline TrigFit trig_minimax(const std::function<double(double)>& g, const std::function<double(double)>& omega, int m,
                            int grid = 4001, double ax = 1.0, double ay = 1.0) {
    if (!(ax > 0) || !(ay > 0)) throw PreconditionError("trig_minimax: axis scales must be positive");
    if (m < 0) throw PreconditionError("trig_minimax: degree must be >= 0");
    if (grid < 2 * m + 8) throw PreconditionError("trig_minimax: grid too coarse for the degree");
    const double pi = std::numbers::pi;
    const int dense = 10 * (grid - 1) + 1;
    std::vector<double> dphi(dense), dg(dense), dom(dense), dR(dense), dpsi(dense);
    double rmax = 0;
    for (int i = 0; i < dense; ++i) {
        dphi[i] = i == dense - 1 ? pi / 2 : -pi / 2 + pi * i / (dense - 1);
        dg[i] = g(dphi[i]);
        dom[i] = omega(dphi[i]);
        if (!std::isfinite(dg[i])) throw NumericError("weighted minimax: target is not finite at phi = " + std::to_string(dphi[i]));
        if (!(dom[i] > 0) || !std::isfinite(dom[i])) throw NumericError("weighted minimax: weight is not positive");
        const double X = dom[i] * std::cos(dphi[i]) / ax, Y = dom[i] * std::sin(dphi[i]) / ay;
        dR[i] = std::hypot(X, Y);
        dpsi[i] = std::atan2(Y, X);
        rmax = std::max(rmax, dR[i]);
    }
    std::vector<int> nodes;
    for (int i = 0; i < grid; ++i) nodes.push_back(10 * i);

    const int ncols = m + 1;
    TrigFit out;
    out.check_grid = dense;
    for (int round = 0;; ++round) {
        const int M = static_cast<int>(nodes.size());
        Eigen::MatrixXd B(M, ncols);
        Eigen::VectorXd f(M);
        for (int r = 0; r < M; ++r) {
            const int i = nodes[r];
            const double w = std::pow(dR[i] / rmax, m);
            int col = 0;
            for (int j = m % 2; j <= m; j += 2) {
                B(r, col++) = w * std::cos(j * dpsi[i]);
                if (j > 0) B(r, col++) = w * std::sin(j * dpsi[i]);
            }
            f[r] = dg[i];
        }
        const MinimaxFit fit = discrete_minimax(B, f);
        const auto a = trig_to_monomial(m, fit.coef, std::pow(static_cast<long double>(rmax), -m));
        out.a.resize(m + 1);
        for (int k = 0; k <= m; ++k)
            out.a[k] = static_cast<double>(a[k] / (std::pow(static_cast<long double>(ax), m - k) *
                                                   std::pow(static_cast<long double>(ay), k)));
        out.lp_error = fit.lp_error;
        out.grid = M;
        out.iterations += fit.iterations;
        out.refinements = round;

        std::vector<double> res(dense);
        double err = 0;
        for (int i = 0; i < dense; ++i) {
            const long double c = std::cos(static_cast<long double>(dphi[i]));
            const long double s = std::sin(static_cast<long double>(dphi[i]));
            const long double v = std::pow(static_cast<long double>(dom[i]), m) * angular_poly(out.a, c, s);
            res[i] = std::abs(dg[i] - static_cast<double>(v));
            err = std::max(err, res[i]);
        }
        out.sup_error = err;
        if (err <= 1.05 * fit.lp_error + 1e-10 || round == 3) break;

        // Remez-style pass: add the worst local maxima of the dense residual.
        std::vector<int> peaks;
        for (int i = 0; i < dense; ++i) {
            const bool left = i == 0 || res[i] >= res[i - 1];
            const bool right = i == dense - 1 || res[i] >= res[i + 1];
            if (left && right && res[i] > fit.lp_error && i % 10 != 0) peaks.push_back(i);
        }
        std::sort(peaks.begin(), peaks.end(), [&](int x, int y) { return res[x] > res[y] || (res[x] == res[y] && x < y); });
        if (peaks.size() > 200) peaks.resize(200);
        if (peaks.empty()) break;
        std::sort(peaks.begin(), peaks.end());
        nodes.insert(nodes.end(), peaks.begin(), peaks.end());
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    }
    return out;
}

} // namespace detail

// Limit of f at sign * infinity: f(+-inf) when finite, else the value at |t| = 1e8 once it has settled.
inline double limit_at_infinity(const std::function<double(double)>& f, int sign) {
    const double s = sign >= 0 ? 1.0 : -1.0;
    double direct = std::numeric_limits<double>::quiet_NaN();
    try {
        direct = f(s * std::numeric_limits<double>::infinity());
    } catch (const NumericError&) {
        // e.g. inf - inf inside an expression; fall back to large |t|
    }
    if (std::isfinite(direct)) return direct;
    const double a = f(s * 1e6), b = f(s * 1e8);
    if (std::isfinite(a) && std::isfinite(b) && std::abs(a - b) <= 1e-6 * (1.0 + std::abs(b))) return b;
    throw SolverRejection(std::string("no finite limit at ") + (sign >= 0 ? "+" : "-") + "infinity");
}

inline WeightedApproximant weighted_minimax(const std::function<double(double)>& f, const Weight& w, int n,
                                            int grid = 4001) {
    if (n < 0 || n % 2 != 0) throw PreconditionError("weighted_minimax: n must be a non-negative even integer");
    if (n > kWeightedDegreeCap)
        throw DegreeCapError("weighted_minimax: n = " + std::to_string(n) + " exceeds the degree cap " +
                             std::to_string(kWeightedDegreeCap));
    const double lp = limit_at_infinity(f, 1), lm = limit_at_infinity(f, -1);
    if (std::abs(lp - lm) > 1e-8 * (1.0 + std::abs(lp) + std::abs(lm)))
        throw SolverRejection("weighted_minimax: f has unequal limits at -inf and +inf (" + std::to_string(lm) + " vs " +
                              std::to_string(lp) + ")");
    const double pi = std::numbers::pi;
    auto g = [&](double phi) {
        if (phi <= -pi / 2) return lm;
        if (phi >= pi / 2) return lp;
        return f(std::tan(phi));
    };
    auto om = [&w](double phi) { return w.omega(phi); };
    const auto fit = detail::trig_minimax(g, om, n, grid);
    WeightedApproximant wa;
    wa.n = n;
    wa.coef = fit.a;
    wa.sup_error = fit.sup_error;
    wa.lp_error = fit.lp_error;
    wa.grid = fit.grid;
    wa.check_grid = fit.check_grid;
    wa.refinements = fit.refinements;
    wa.iterations = fit.iterations;
    return wa;
}

// W(t)^n p_n(t), including the limits at +-inf (rho^n times the top coefficient).
inline double weighted_value(const WeightedApproximant& wa, const Weight& w, double t) {
    if (std::isnan(t)) throw PreconditionError("weighted_value: t is NaN");
    const long double phi = std::isinf(t) ? (t > 0 ? std::numbers::pi_v<long double> / 2 : -std::numbers::pi_v<long double> / 2)
                                          : std::atan(static_cast<long double>(t));
    const long double c = std::isinf(t) ? 0.0L : std::cos(phi);
    const long double s = std::isinf(t) ? (t > 0 ? 1.0L : -1.0L) : std::sin(phi);
    const long double om = std::isinf(t) ? w.rho : w.omega(static_cast<double>(phi));
    return static_cast<double>(std::pow(om, static_cast<long double>(wa.n)) * detail::angular_poly(wa.coef, c, s));
}

// h_n(x, y) = sum_k a_k x^(n-k) y^k, so that h_n(x(t), y(t)) = W(t)^n p_n(t) on the boundary.
inline HomogeneousPoly<double> homog_from_weighted(const WeightedApproximant& wa, const ConvexBody& body) {
    if (wa.n % 2 != 0) throw PreconditionError("homog_from_weighted: n must be even");
    if (body.dim() != 2) throw PreconditionError("homog_from_weighted: body must be planar");
    if (static_cast<int>(wa.coef.size()) != wa.n + 1) throw PreconditionError("homog_from_weighted: need n + 1 coefficients");
    HomogeneousPoly<double> h(2, wa.n);
    for (int k = 0; k <= wa.n; ++k)
        if (wa.coef[k] != 0) h.add({wa.n - k, k, 0}, wa.coef[k]);
    return h;
}

// f / W^s with the values at +-inf taken as limits.
inline std::function<double(double)> divide_out_weight(const std::function<double(double)>& f, const Weight& w, int s) {
    if (s < 0) throw PreconditionError("divide_out_weight: s must be >= 0");
    auto ratio = [f, w, s](double t) { return f(t) / std::pow(w.W(t), s); };
    const double lp = limit_at_infinity(ratio, 1);
    const double lm = limit_at_infinity(ratio, -1);
    return [ratio, lp, lm](double t) {
        if (std::isinf(t)) return t > 0 ? lp : lm;
        const double v = ratio(t);
        if (!std::isfinite(v)) throw NumericError("divide_out_weight: f / W^s is not finite at t = " + std::to_string(t));
        return v;
    };
}

} // namespace hpa
