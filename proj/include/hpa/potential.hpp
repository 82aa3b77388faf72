#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "errors.hpp"
#include "weight.hpp"

namespace hpa {

struct ConditionReport {
    bool pass = false;
    bool positive = false;
    double worst_second_difference = 0; // most negative second difference seen
    std::array<double, 3> worst_triple{0, 0, 0};
};

struct WeightDiagnostics {
    ConditionReport reciprocal;  // 1/W positive and convex
    ConditionReport inverted;    // |t| / W(-1/t) positive and convex
    double rho = 0;
    bool pass() const { return reciprocal.pass && inverted.pass; }
};

namespace detail {

inline ConditionReport convexity_report(const std::vector<double>& t, const std::vector<double>& v, double tol) {
    ConditionReport r;
    r.positive = std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x) && x > 0; });
    r.worst_second_difference = std::numeric_limits<double>::infinity();
    bool finite = true;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const double d2 = v[i - 1] - 2 * v[i] + v[i + 1];
        if (!std::isfinite(d2)) {
            finite = false;
            r.worst_second_difference = -std::numeric_limits<double>::infinity();
            r.worst_triple = {t[i - 1], t[i], t[i + 1]};
            continue;
        }
        if (d2 < r.worst_second_difference) {
            r.worst_second_difference = d2;
            r.worst_triple = {t[i - 1], t[i], t[i + 1]};
        }
    }
    r.pass = r.positive && finite && r.worst_second_difference >= -tol;
    return r;
}

} // namespace detail

// Checks both weight conditions on a uniform grid over [-span, span] that contains 0.
inline WeightDiagnostics check_weight(const Weight& w, int grid = 2001, double span = 8.0) {
    WeightDiagnostics diag;
    diag.rho = w.rho;
    const int half = std::max(2, grid / 2);
    std::vector<double> t(2 * half + 1), rec(t.size()), inv(t.size());
    for (int i = -half; i <= half; ++i) t[i + half] = span * i / half;
    for (std::size_t i = 0; i < t.size(); ++i) {
        rec[i] = 1.0 / w.W(t[i]);
        // |t| / W(-1/t) tends to 1/rho at t = 0.
        inv[i] = t[i] == 0.0 ? 1.0 / w.rho : std::abs(t[i]) / w.W(-1.0 / t[i]);
    }
    const double tol = w.lower_accuracy ? 1e-8 : 1e-9;
    diag.reciprocal = detail::convexity_report(t, rec, tol);
    diag.inverted = detail::convexity_report(t, inv, tol);
    return diag;
}

// W0(x) = W(-1/x) / |x|, with W0(0) = rho and rho0 = W(0).
inline Weight invert_weight(const Weight& w) {
    if (!check_weight(w).pass()) throw PreconditionError("invert_weight: weight fails the convexity conditions");
    Weight v;
    const double rho = w.rho;
    auto W = w.W;
    auto Q = w.Q;
    auto dQ = w.dQ;
    v.W = [W, rho](double x) {
        if (x == 0.0) return rho;
        if (std::isinf(x)) return 0.0;
        return W(-1.0 / x) / std::abs(x);
    };
    v.Q = [Q, rho](double x) {
        if (x == 0.0) return -std::log(rho);
        if (std::isinf(x)) return std::numeric_limits<double>::infinity();
        return std::log(std::abs(x)) + Q(-1.0 / x);
    };
    auto dq = [dQ](double x) { return 1.0 / x + dQ(-1.0 / x) / (x * x); };
    v.dQ = [dq](double x) {
        if (std::isinf(x)) return 0.0;
        if (x == 0.0) {
            const double e = 1e-6;
            return 0.5 * (dq(e) + dq(-e));
        }
        return dq(x);
    };
    v.rho = w.W(0.0);
    v.provenance = "inverted(" + w.provenance + ")";
    v.lower_accuracy = w.lower_accuracy;
    if (w.radial_of_angle) {
        // Inversion rotates the slope chart by a quarter turn: phi -> phi + pi/2.
        auto r = w.radial_of_angle;
        v.radial_of_angle = [r](double phi) { return r(phi + std::numbers::pi / 2); };
    }
    return v;
}

namespace detail {

// (1/pi) int_{-1}^{1} g(u) / sqrt(1-u^2) du by K-point Gauss-Chebyshev.
inline double gauss_chebyshev_mean(const std::function<double(double)>& g, int K) {
    double s = 0;
    for (int i = 0; i < K; ++i) s += g(std::cos(std::numbers::pi * (i + 0.5) / K));
    return s / K;
}

inline Eigen::Vector2d mrs_residual(const Weight& w, double lambda, double c, double s, int K) {
    const double f1 = gauss_chebyshev_mean([&](double u) { return lambda * w.dQ(c + s * u); }, K);
    const double f2 = gauss_chebyshev_mean([&](double u) { return lambda * w.dQ(c + s * u) * (c + s * u); }, K);
    return {f1, f2 - 1.0};
}

} // namespace detail

// Endpoints of the equilibrium support for the field lambda*Q.
inline std::pair<double, double> mrs_support(const Weight& w, double lambda, int nodes = 4096) {
    if (!(lambda > 1.0)) throw PreconditionError("mrs_support: lambda must be > 1");
    double c = 0, s = 1;
    for (int i = 0; i < 200 && detail::mrs_residual(w, lambda, c, s, nodes)[1] < 0; ++i) s *= 2;
    double logs = std::log(s);
    Eigen::Vector2d F = detail::mrs_residual(w, lambda, c, s, nodes);
    for (int it = 0; it < 100; ++it) {
        if (F.norm() < 1e-13) return {c - std::exp(logs), c + std::exp(logs)};
        Eigen::Matrix2d J;
        const double hc = 1e-7 * std::max(1.0, std::abs(c) + std::exp(logs)), hl = 1e-7;
        J.col(0) = (detail::mrs_residual(w, lambda, c + hc, std::exp(logs), nodes) -
                    detail::mrs_residual(w, lambda, c - hc, std::exp(logs), nodes)) / (2 * hc);
        J.col(1) = (detail::mrs_residual(w, lambda, c, std::exp(logs + hl), nodes) -
                    detail::mrs_residual(w, lambda, c, std::exp(logs - hl), nodes)) / (2 * hl);
        const Eigen::Vector2d step = J.fullPivLu().solve(-F);
        double damp = 1.0;
        bool improved = false;
        for (int k = 0; k < 40; ++k, damp *= 0.5) {
            const double cn = c + damp * step[0], ln = logs + damp * step[1];
            const Eigen::Vector2d Fn = detail::mrs_residual(w, lambda, cn, std::exp(ln), nodes);
            if (Fn.allFinite() && Fn.norm() < F.norm()) {
                c = cn, logs = ln, F = Fn;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    if (F.norm() < 1e-11) return {c - std::exp(logs), c + std::exp(logs)};
    throw NumericError("mrs_support: no convergence (residuals " + std::to_string(F[0]) + ", " +
                       std::to_string(F[1]) + ")");
}

// Equilibrium density V(x) = psi(v) / sqrt((x-a)(b-x)), v = (x-c)/s, psi a Chebyshev series.
struct EquilibriumMeasure {
    double lambda = 0;
    double a = 0, b = 0;
    Eigen::VectorXd psi; // Chebyshev coefficients of psi on [-1, 1]
    double robin = 0;    // U^mu + lambda Q on the support
    double mass = 0;     // independent quadrature of V

    double center() const { return 0.5 * (a + b); }
    double half_width() const { return 0.5 * (b - a); }

    double psi_at(double v) const {
        double b1 = 0, b2 = 0;
        for (int k = static_cast<int>(psi.size()) - 1; k >= 1; --k) {
            const double b0 = 2 * v * b1 - b2 + psi[k];
            b2 = b1;
            b1 = b0;
        }
        return v * b1 - b2 + psi[0];
    }

    double V(double x) const {
        if (!(x > a && x < b)) return 0.0;
        return psi_at((x - center()) / half_width()) / std::sqrt((x - a) * (b - x));
    }

    // int log|t - x| V(t) dt from the closed-form log integrals of Chebyshev polynomials.
    double log_potential(double x) const {
        const double v = (x - center()) / half_width();
        if (std::abs(v) > 1) throw PreconditionError("log_potential: x outside the support");
        double s = std::log(half_width()) * std::numbers::pi * psi[0] - std::numbers::pi * psi[0] * std::log(2.0);
        double tkm1 = 1, tk = v;
        for (int j = 1; j < psi.size(); ++j) {
            s -= std::numbers::pi * psi[j] * tk / j;
            const double tn = 2 * v * tk - tkm1;
            tkm1 = tk;
            tk = tn;
        }
        return s;
    }
};

namespace detail {

inline Eigen::VectorXd chebyshev_coefficients(const std::function<double(double)>& g, int K) {
    Eigen::VectorXd vals(K), c(K);
    for (int j = 0; j < K; ++j) vals[j] = g(std::cos(std::numbers::pi * (j + 0.5) / K));
    for (int k = 0; k < K; ++k) {
        double s = 0;
        for (int j = 0; j < K; ++j) s += vals[j] * std::cos(std::numbers::pi * k * (j + 0.5) / K);
        c[k] = (k == 0 ? 1.0 : 2.0) / K * s;
    }
    return c;
}

// Tanh-sinh on [lo, hi]. The interval is mapped onto [0, 1/4]: Boost 1.74 only uses its
// endpoint-complement branch for endpoints of magnitude below 1/2, the other branch can
// round an abscissa onto the endpoint.
inline double integrate(const std::function<double(double)>& f, double lo, double hi, double tol, int levels = 12) {
    if (hi == lo) return 0.0;
    boost::math::quadrature::tanh_sinh<double> ts(levels);
    const double scale = (hi - lo) / 0.25;
    return scale * ts.integrate([&](double u) { return f(lo + scale * u); }, 0.0, 0.25, tol);
}

// int_0^pi g(cos theta) d theta, split where the integrand is singular.
inline double theta_integral(const std::function<double(double)>& g, double split = -1) {
    auto f = [&](double th) { return g(std::cos(th)); };
    if (split <= 0 || split >= std::numbers::pi) return integrate(f, 0.0, std::numbers::pi, 1e-13);
    return integrate(f, 0.0, split, 1e-13) + integrate(f, split, std::numbers::pi, 1e-13);
}

} // namespace detail

inline EquilibriumMeasure density(const Weight& w, double lambda, std::pair<double, double> support) {
    auto [a, b] = support;
    if (!(b > a)) throw PreconditionError("density: empty support");
    const double c = 0.5 * (a + b), s = 0.5 * (b - a);
    auto g = [&](double u) { return w.dQ(c + s * u); };
    Eigen::VectorXd gk;
    bool converged = false;
    for (int K = 64; K <= 4096; K *= 2) {
        gk = detail::chebyshev_coefficients(g, K);
        const double scale = std::max(1.0, gk.cwiseAbs().maxCoeff());
        const double tail = gk.tail(K / 8).cwiseAbs().maxCoeff();
        if (tail < 1e-10 * scale) {
            converged = true;
            break;
        }
    }
    if (!converged) throw NumericError("density: Chebyshev expansion of Q' did not converge by 4096 terms");
    // Trim trailing negligible coefficients.
    int n = static_cast<int>(gk.size());
    while (n > 1 && std::abs(gk[n - 1]) < 1e-17) --n;
    gk.conservativeResize(n);

    // H = sum g_k h_k with h_0 = -pi T_1, h_1 = -pi/2 T_2, h_k = -pi/2 (T_{k+1} - T_{k-1}).
    Eigen::VectorXd H = Eigen::VectorXd::Zero(n + 2);
    const double pi = std::numbers::pi;
    for (int k = 0; k < n; ++k) {
        if (k == 0) H[1] += -pi * gk[0];
        else if (k == 1) H[2] += -pi / 2 * gk[1];
        else {
            H[k + 1] += -pi / 2 * gk[k];
            H[k - 1] += pi / 2 * gk[k];
        }
    }
    EquilibriumMeasure em;
    em.lambda = lambda;
    em.a = a;
    em.b = b;
    em.psi = lambda * s / (pi * pi) * H;
    em.psi[0] += 1.0 / pi;
    em.mass = detail::theta_integral([&](double v) { return em.psi_at(v); });
    // Robin constant: average of U^mu + lambda Q over Chebyshev points of the support.
    double acc = 0;
    const int m = 16;
    for (int i = 0; i < m; ++i) {
        const double v = std::cos(pi * (i + 0.5) / m);
        acc += -em.log_potential(c + s * v) + lambda * w.Q(c + s * v);
    }
    em.robin = acc / m;
    return em;
}

// Max over interior points of |int log|t-x| V(t) dt - lambda Q(x) - C|, C the mean.
inline double equilibrium_check(const EquilibriumMeasure& em, const Weight& w, int points = 40) {
    const double c = em.center(), s = em.half_width();
    std::vector<double> dev;
    for (int i = 0; i < points; ++i) {
        const double th = std::numbers::pi * (i + 0.5) / points;
        const double v = std::cos(th);
        const double x = c + s * v;
        // t = c + s cos(phi): V dt = psi(cos phi) d phi; log singularity at phi = th.
        const double I = detail::theta_integral(
            [&](double u) {
                const double d = std::abs(u - v);
                return d == 0 ? 0.0 : std::log(s * d) * em.psi_at(u);
            },
            th);
        dev.push_back(I - em.lambda * w.Q(x));
    }
    double mean = 0;
    for (double d : dev) mean += d;
    mean /= dev.size();
    double worst = 0;
    for (double d : dev) worst = std::max(worst, std::abs(d - mean));
    return worst;
}

// Worst |int_I f / int_J f - 1| over adjacent intervals of length eps on a grid of step eps/4.
inline double smooth_integral_diag(const std::function<double(double)>& f, double a, double b, double eps) {
    if (!(eps > 0) || !(eps < (b - a) / 2)) throw PreconditionError("smooth_integral_diag: need 0 < eps < (b-a)/2");
    // A quadrature node can land exactly on an integrable singularity; that single value is dropped.
    auto finite = [&f](double x) {
        const double v = f(x);
        return std::isfinite(v) ? v : 0.0;
    };
    auto integral = [&](double lo, double hi) { return detail::integrate(finite, lo, hi, 1e-10, 10); };
    double worst = 0;
    const double step = eps / 4;
    const int count = static_cast<int>(std::floor((b - a - 2 * eps) / step + 1e-9));
    for (int i = 0; i <= count; ++i) {
        const double x = a + i * step;
        const double I = integral(x, x + eps);
        const double J = integral(x + eps, x + 2 * eps);
        if (I == 0 || J == 0) return std::numeric_limits<double>::infinity();
        worst = std::max({worst, std::abs(I / J - 1), std::abs(J / I - 1)});
    }
    return worst;
}

} // namespace hpa
