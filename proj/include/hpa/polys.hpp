#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "geometry.hpp"

namespace hpa {

// Exponent tuple; unused trailing slots stay 0.
using Exponent = std::array<int, 3>;

inline int total_degree(const Exponent& e) { return e[0] + e[1] + e[2]; }

namespace detail {

template <class T>
std::vector<std::vector<T>> power_table(const Point& x, int n) {
    std::vector<std::vector<T>> pw(x.size(), std::vector<T>(n + 1));
    for (int i = 0; i < x.size(); ++i) {
        pw[i][0] = T(1);
        for (int k = 1; k <= n; ++k) pw[i][k] = pw[i][k - 1] * T(x[i]);
    }
    return pw;
}

template <class T>
T eval_terms(const std::map<Exponent, T>& terms, const Point& x, int max_deg) {
    const auto pw = power_table<T>(x, max_deg);
    T s(0);
    for (const auto& [e, c] : terms) {
        T m = c;
        for (int i = 0; i < x.size(); ++i) m *= pw[i][e[i]];
        s += m;
    }
    return s;
}

template <class T>
std::map<Exponent, T> multiply_terms(const std::map<Exponent, T>& a, const std::map<Exponent, T>& b) {
    std::map<Exponent, T> out;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            const Exponent e{ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]};
            out[e] += ca * cb;
        }
    return out;
}

} // namespace detail

// Degree-n homogeneous polynomial in d variables.
template <class T = double>
class HomogeneousPoly {
public:
    HomogeneousPoly(int dim, int degree) : dim_(dim), degree_(degree) {
        if (dim < 1 || dim > 3) throw PreconditionError("HomogeneousPoly: dimension must be 1..3");
        if (degree < 0) throw PreconditionError("HomogeneousPoly: negative degree");
    }

    static HomogeneousPoly constant(int dim, T c) {
        HomogeneousPoly p(dim, 0);
        p.add({0, 0, 0}, c);
        return p;
    }

    // <x, w>
    static HomogeneousPoly linear_form(const Point& w) {
        HomogeneousPoly p(static_cast<int>(w.size()), 1);
        for (int i = 0; i < w.size(); ++i) {
            Exponent e{0, 0, 0};
            e[i] = 1;
            if (w[i] != 0) p.add(e, T(w[i]));
        }
        return p;
    }

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    const std::map<Exponent, T>& terms() const { return terms_; }

    void add(const Exponent& e, T c) {
        if (total_degree(e) != degree_) throw PreconditionError("HomogeneousPoly: exponent sum does not match degree");
        for (int i = dim_; i < 3; ++i)
            if (e[i] != 0) throw PreconditionError("HomogeneousPoly: exponent outside dimension");
        terms_[e] += c;
    }

    T coeff(const Exponent& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? T(0) : it->second;
    }

    // Evaluates at x/s and rescales by s^n, s = max |x_i|.
    T eval(const Point& x) const {
        if (x.size() != dim_) throw PreconditionError("HomogeneousPoly: point dimension mismatch");
        double s = 0;
        for (int i = 0; i < dim_; ++i) s = std::max(s, std::abs(x[i]));
        if (s == 0) return degree_ == 0 ? coeff({0, 0, 0}) : T(0);
        const Point y = x / s;
        const T v = detail::eval_terms(terms_, y, degree_);
        if (s == 1.0) return v;
        return v * static_cast<T>(std::pow(static_cast<long double>(s), degree_));
    }

    // sum |c_e| |x^e|: the scale against which rounding in eval is measured.
    T abs_eval(const Point& x) const {
        std::map<Exponent, T> a;
        for (const auto& [e, c] : terms_) a[e] = c < 0 ? -c : c;
        Point ax = x.cwiseAbs();
        return detail::eval_terms(a, ax, degree_);
    }

    HomogeneousPoly operator*(const HomogeneousPoly& o) const {
        check_dim(o);
        HomogeneousPoly r(dim_, degree_ + o.degree_);
        r.terms_ = detail::multiply_terms(terms_, o.terms_);
        return r;
    }

    HomogeneousPoly operator+(const HomogeneousPoly& o) const {
        check_dim(o);
        if (o.degree_ != degree_) throw PreconditionError("HomogeneousPoly: adding different degrees");
        HomogeneousPoly r = *this;
        for (const auto& [e, c] : o.terms_) r.terms_[e] += c;
        return r;
    }

    HomogeneousPoly operator-(const HomogeneousPoly& o) const { return *this + o * T(-1); }

    HomogeneousPoly operator*(T s) const {
        HomogeneousPoly r = *this;
        for (auto& [e, c] : r.terms_) c *= s;
        return r;
    }

    HomogeneousPoly pow(int k) const {
        HomogeneousPoly r = constant(dim_, T(1));
        HomogeneousPoly b = *this;
        while (k > 0) {
            if (k & 1) r = r * b;
            k >>= 1;
            if (k) b = b * b;
        }
        return r;
    }

    template <class U>
    HomogeneousPoly<U> cast() const {
        HomogeneousPoly<U> r(dim_, degree_);
        for (const auto& [e, c] : terms_) r.add(e, static_cast<U>(c));
        return r;
    }

private:
    void check_dim(const HomogeneousPoly& o) const {
        if (o.dim_ != dim_) throw PreconditionError("HomogeneousPoly: dimension mismatch");
    }

    int dim_;
    int degree_;
    std::map<Exponent, T> terms_;
};

// Polynomial of total degree at most `bound`.
template <class T = double>
class DensePoly {
public:
    DensePoly(int dim, int bound) : dim_(dim), bound_(bound) {
        if (dim < 1 || dim > 3) throw PreconditionError("DensePoly: dimension must be 1..3");
    }

    int dim() const { return dim_; }
    int bound() const { return bound_; }
    const std::map<Exponent, T>& terms() const { return terms_; }

    void add(const Exponent& e, T c) {
        if (total_degree(e) > bound_) throw PreconditionError("DensePoly: monomial exceeds degree bound");
        terms_[e] += c;
    }

    void add(const HomogeneousPoly<T>& h) {
        if (h.dim() != dim_) throw PreconditionError("DensePoly: dimension mismatch");
        for (const auto& [e, c] : h.terms()) add(e, c);
    }

    T coeff(const Exponent& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? T(0) : it->second;
    }

    T eval(const Point& x) const {
        if (x.size() != dim_) throw PreconditionError("DensePoly: point dimension mismatch");
        return detail::eval_terms(terms_, x, bound_);
    }

    // Largest total degree carrying a nonzero coefficient (-1 for the zero polynomial).
    int degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_)
            if (c != T(0)) d = std::max(d, total_degree(e));
        return d;
    }

    bool is_even() const {
        for (const auto& [e, c] : terms_)
            if (total_degree(e) % 2 != 0 && c != T(0)) return false;
        return true;
    }

    HomogeneousPoly<T> graded_part(int m) const {
        HomogeneousPoly<T> h(dim_, m);
        for (const auto& [e, c] : terms_)
            if (total_degree(e) == m) h.add(e, c);
        return h;
    }

private:
    int dim_;
    int bound_;
    std::map<Exponent, T> terms_;
};

// Multiplies the degree-2m part of an even p by <x,w>^(2n-2m); the result agrees with
// p on the hyperplane pair <x,w> = +-1.
template <class T>
HomogeneousPoly<T> homogenize_even(const DensePoly<T>& p, const SupportLine& line, int target_degree) {
    if (target_degree < 0 || target_degree % 2 != 0)
        throw PreconditionError("homogenize_even: target degree must be even and non-negative");
    if (!p.is_even()) throw PreconditionError("homogenize_even: polynomial has odd-degree monomials");
    if (p.degree() > target_degree) throw PreconditionError("homogenize_even: target degree below polynomial degree");
    if (line.normal.size() != p.dim()) throw PreconditionError("homogenize_even: dimension mismatch");
    const auto b2 = HomogeneousPoly<T>::linear_form(line.normal).pow(2);
    HomogeneousPoly<T> out(p.dim(), target_degree);
    // Powers of b^2 built up from the top degree down.
    HomogeneousPoly<T> factor = HomogeneousPoly<T>::constant(p.dim(), T(1));
    for (int m = target_degree; m >= 0; m -= 2) {
        const auto part = p.graded_part(m);
        if (!part.terms().empty()) out = out + part * factor;
        if (m > 0) factor = factor * b2;
    }
    return out;
}

// Tensor-product Chebyshev interpolant on an interval or rectangle.
struct ChebSeries {
    std::vector<double> lo, hi;
    int degree = 0;
    Eigen::MatrixXd coef; // coef(i, j): T_i in the first variable, T_j in the second (one column in 1-D)

    int vars() const { return static_cast<int>(lo.size()); }

    double eval(const Point& x) const {
        if (x.size() != vars()) throw PreconditionError("ChebSeries: point dimension mismatch");
        auto scaled = [&](int k) { return (2.0 * x[k] - (lo[k] + hi[k])) / (hi[k] - lo[k]); };
        auto clenshaw = [](const Eigen::VectorXd& c, double u) {
            double b1 = 0, b2 = 0;
            for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
                const double b0 = 2 * u * b1 - b2 + c[k];
                b2 = b1;
                b1 = b0;
            }
            return u * b1 - b2 + c[0];
        };
        if (vars() == 1) return clenshaw(coef.col(0), scaled(0));
        const double u = scaled(0), v = scaled(1);
        Eigen::VectorXd inner(coef.rows());
        for (int i = 0; i < coef.rows(); ++i) inner[i] = clenshaw(coef.row(i).transpose(), v);
        return clenshaw(inner, u);
    }

    // Monomial form in the ambient box variables.
    template <class T = long double>
    DensePoly<T> to_dense() const {
        const int n = degree;
        // Monomial coefficients of T_k(u), u = alpha x + beta.
        auto cheb_in_x = [&](int var) {
            const T alpha = T(2) / T(hi[var] - lo[var]);
            const T beta = -T(lo[var] + hi[var]) / T(hi[var] - lo[var]);
            std::vector<std::vector<T>> tk(n + 1, std::vector<T>(n + 1, T(0)));
            tk[0][0] = 1;
            if (n >= 1) tk[1][0] = beta, tk[1][1] = alpha;
            for (int k = 2; k <= n; ++k)
                for (int i = 0; i <= k; ++i) {
                    T v = -tk[k - 2][i];
                    if (i <= k - 1) v += T(2) * beta * tk[k - 1][i];
                    if (i >= 1) v += T(2) * alpha * tk[k - 1][i - 1];
                    tk[k][i] = v;
                }
            return tk;
        };
        const int nv = vars();
        DensePoly<T> out(nv, nv * n);
        const auto t0 = cheb_in_x(0);
        if (nv == 1) {
            for (int k = 0; k <= n; ++k)
                for (int i = 0; i <= k; ++i) out.add({i, 0, 0}, T(coef(k, 0)) * t0[k][i]);
            return out;
        }
        const auto t1 = cheb_in_x(1);
        for (int a = 0; a <= n; ++a)
            for (int b = 0; b <= n; ++b) {
                if (coef(a, b) == 0) continue;
                for (int i = 0; i <= a; ++i)
                    for (int j = 0; j <= b; ++j) out.add({i, j, 0}, T(coef(a, b)) * t0[a][i] * t1[b][j]);
            }
        return out;
    }
};

// Interpolation at Chebyshev-Gauss nodes of the given degree per variable. On a symmetric
// box, coefficients of odd total index are zeroed when they are negligible (even f).
inline ChebSeries cheb_fit(const std::function<double(const Point&)>& f, const std::vector<double>& lo,
                           const std::vector<double>& hi, int degree) {
    if (lo.size() != hi.size() || lo.empty() || lo.size() > 2) throw PreconditionError("cheb_fit: box must be 1-D or 2-D");
    if (degree < 0) throw PreconditionError("cheb_fit: negative degree");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(hi[i] > lo[i])) throw PreconditionError("cheb_fit: empty box");
    const int m = degree + 1;
    const int nv = static_cast<int>(lo.size());
    std::vector<double> node(m);
    for (int j = 0; j < m; ++j) node[j] = std::cos(std::numbers::pi * (j + 0.5) / m);
    auto to_box = [&](int var, double u) { return 0.5 * (lo[var] + hi[var]) + 0.5 * (hi[var] - lo[var]) * u; };
    // DCT matrix: c_k = (2 - [k=0]) / m * sum_j f(u_j) T_k(u_j)
    Eigen::MatrixXd dct(m, m);
    for (int k = 0; k < m; ++k)
        for (int j = 0; j < m; ++j)
            dct(k, j) = (k == 0 ? 1.0 : 2.0) / m * std::cos(std::numbers::pi * k * (j + 0.5) / m);
    ChebSeries cs{lo, hi, degree, {}};
    if (nv == 1) {
        Eigen::VectorXd vals(m);
        for (int j = 0; j < m; ++j) {
            Point x(1);
            x[0] = to_box(0, node[j]);
            vals[j] = f(x);
        }
        cs.coef = dct * vals;
    } else {
        Eigen::MatrixXd vals(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) vals(i, j) = f(point2(to_box(0, node[i]), to_box(1, node[j])));
        cs.coef = dct * vals * dct.transpose();
    }
    bool symmetric = true;
    for (int i = 0; i < nv; ++i) symmetric = symmetric && std::abs(lo[i] + hi[i]) <= 1e-14 * (hi[i] - lo[i]);
    if (symmetric) {
        const double scale = cs.coef.cwiseAbs().maxCoeff();
        bool odd_negligible = true;
        for (int i = 0; i < cs.coef.rows(); ++i)
            for (int j = 0; j < cs.coef.cols(); ++j)
                if ((i + j) % 2 == 1 && std::abs(cs.coef(i, j)) > 1e-12 * std::max(1.0, scale)) odd_negligible = false;
        if (odd_negligible)
            for (int i = 0; i < cs.coef.rows(); ++i)
                for (int j = 0; j < cs.coef.cols(); ++j)
                    if ((i + j) % 2 == 1) cs.coef(i, j) = 0;
    }
    return cs;
}

// (2|x|/a)^n for a univariate p of degree n.
template <class T>
double growth_bound_check(const DensePoly<T>& p, double a, double x) {
    if (p.dim() != 1) throw PreconditionError("growth_bound_check: polynomial must be univariate");
    if (!(a > 0) || !(std::abs(x) > a)) throw PreconditionError("growth_bound_check: need |x| > a > 0");
    return std::pow(2.0 * std::abs(x) / a, std::max(0, p.degree()));
}

struct GrowthCheck {
    bool hypothesis = false; // sup over [-a, a] <= 1 on a dense Chebyshev grid
    bool holds = false;      // |p(x)| <= bound
    double value = 0;
    double bound = 0;
};

template <class T>
GrowthCheck growth_bound_holds(const DensePoly<T>& p, double a, double x) {
    GrowthCheck g;
    g.bound = growth_bound_check(p, a, x);
    double sup = 0;
    const int m = 4001;
    for (int j = 0; j < m; ++j) {
        Point u(1);
        u[0] = a * std::cos(std::numbers::pi * j / (m - 1));
        sup = std::max(sup, std::abs(static_cast<double>(p.eval(u))));
    }
    g.hypothesis = sup <= 1.0 + 1e-12;
    Point xp(1);
    xp[0] = x;
    g.value = std::abs(static_cast<double>(p.eval(xp)));
    g.holds = g.value <= g.bound * (1.0 + 1e-12);
    return g;
}

// Chart coordinates on a supporting hyperplane: b = <x,w> and l_i = <x,tau_i> - <base,tau_i> b,
// homogeneous linear forms with l_i = <x - base, tau_i> on the hyperplane itself.
struct HyperplaneChart {
    SupportLine line;
    std::vector<Point> tangents;
    std::vector<double> base_offsets;

    explicit HyperplaneChart(const SupportLine& l) : line(l) {
        const int d = static_cast<int>(l.normal.size());
        const Point n = l.normal.normalized();
        // Gram-Schmidt on the coordinate axes, skipping the one most aligned with n.
        int skip = 0;
        for (int i = 1; i < d; ++i)
            if (std::abs(n[i]) > std::abs(n[skip])) skip = i;
        for (int i = 0; i < d; ++i) {
            if (i == skip) continue;
            Point t = Point::Zero(d);
            t[i] = 1;
            t -= t.dot(n) * n;
            for (const auto& q : tangents) t -= t.dot(q) * q;
            t.normalize();
            tangents.push_back(t);
        }
        // In 2-D orient the tangent counterclockwise relative to the normal.
        if (d == 2 && n[0] * tangents[0][1] - n[1] * tangents[0][0] < 0) tangents[0] = -tangents[0];
        for (const auto& t : tangents) base_offsets.push_back(l.base.dot(t));
    }

    int chart_dim() const { return static_cast<int>(tangents.size()); }
    double b(const Point& x) const { return x.dot(line.normal); }
    double l(int i, const Point& x) const { return x.dot(tangents[i]) - base_offsets[i] * b(x); }

    template <class T = long double>
    HomogeneousPoly<T> b_form() const { return HomogeneousPoly<T>::linear_form(line.normal); }

    template <class T = long double>
    HomogeneousPoly<T> l_form(int i) const {
        return HomogeneousPoly<T>::linear_form(tangents[i] - base_offsets[i] * line.normal);
    }
};

// Lifts a chart polynomial P(l_1,...) of degree <= 2n (monomial coefficients keyed by chart
// exponents) to H_{2n}: parity completion by b, then homogenize_even.
template <class T>
HomogeneousPoly<T> lift_chart_poly(const std::map<Exponent, T>& chart_terms, const HyperplaneChart& chart,
                                   int target_degree) {
    const int d = static_cast<int>(chart.line.normal.size());
    const auto bf = chart.b_form<T>();
    std::vector<HomogeneousPoly<T>> lf;
    for (int i = 0; i < chart.chart_dim(); ++i) lf.push_back(chart.l_form<T>(i));
    DensePoly<T> even(d, target_degree);
    std::map<int, std::vector<HomogeneousPoly<T>>> lpow;
    auto lpower = [&](int i, int k) -> const HomogeneousPoly<T>& {
        auto& v = lpow[i];
        if (v.empty()) v.push_back(HomogeneousPoly<T>::constant(d, T(1)));
        while (static_cast<int>(v.size()) <= k) v.push_back(v.back() * lf[i]);
        return v[k];
    };
    for (const auto& [e, c] : chart_terms) {
        const int deg = total_degree(e);
        if (deg > target_degree) throw PreconditionError("lift_chart_poly: chart degree exceeds target");
        HomogeneousPoly<T> m = HomogeneousPoly<T>::constant(d, c);
        for (int i = 0; i < chart.chart_dim(); ++i)
            if (e[i] > 0) m = m * lpower(i, e[i]);
        if (deg % 2 == 1) m = m * bf;
        if (m.degree() > target_degree) throw PreconditionError("lift_chart_poly: parity completion exceeds target");
        even.add(m);
    }
    return homogenize_even(even, chart.line, target_degree);
}

} // namespace hpa
