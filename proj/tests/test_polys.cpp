#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hpa/polys.hpp"
#include "hpa/sampling.hpp"
#include "hpa/unity.hpp"

using namespace hpa;

namespace {

double direct_eval(const std::map<Exponent, double>& terms, const Point& x) {
    double s = 0;
    for (const auto& [e, c] : terms) {
        double m = c;
        for (int i = 0; i < x.size(); ++i) m *= std::pow(x[i], e[i]);
        s += m;
    }
    return s;
}

DensePoly<double> random_even_poly(std::mt19937_64& rng, int d, int deg) {
    std::uniform_real_distribution<double> u(-1, 1);
    DensePoly<double> p(d, deg);
    for (int t = 0; t <= deg; t += 2)
        for (int a = t; a >= 0; --a)
            for (int b = (d == 3 ? t - a : 0); b >= 0; --b) {
                const int c = d == 3 ? t - a - b : 0;
                if (d == 2) p.add({a, t - a, 0}, u(rng));
                else p.add({a, b, c}, u(rng));
                if (d == 2) break;
            }
    return p;
}

Point random_unit(std::mt19937_64& rng, int d) {
    std::normal_distribution<double> g;
    Point x(d);
    for (int i = 0; i < d; ++i) x[i] = g(rng);
    return x.normalized();
}

} // namespace

TEST(HomogeneousPoly, EvalMatchesDirectSum) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int d = 1; d <= 3; ++d) {
        HomogeneousPoly<double> h(d, 5);
        for (int a = 5; a >= 0; --a)
            for (int b = 5 - a; b >= 0; --b) {
                const int c = 5 - a - b;
                if (d == 1 && (b || c)) continue;
                if (d == 2 && c) continue;
                h.add({a, b, c}, u(rng));
            }
        for (int i = 0; i < 50; ++i) {
            const Point x = 3.0 * random_unit(rng, d);
            EXPECT_NEAR(h.eval(x), direct_eval(h.terms(), x), 1e-12 * (1 + h.abs_eval(x)));
        }
    }
}

TEST(HomogeneousPoly, HomogeneityAndProducts) {
    std::mt19937_64 rng(22);
    const auto a = HomogeneousPoly<double>::linear_form(point2(0.3, -1.2));
    const auto b = HomogeneousPoly<double>::linear_form(point2(2.0, 0.5)).pow(3);
    const auto ab = a * b;
    EXPECT_EQ(ab.degree(), 4);
    for (int i = 0; i < 50; ++i) {
        const Point x = random_unit(rng, 2);
        const double s = 0.1 + 3 * std::abs(x[0]);
        EXPECT_NEAR(ab.eval(x), a.eval(x) * b.eval(x), 1e-13);
        EXPECT_NEAR(ab.eval(s * x), std::pow(s, 4) * ab.eval(x), 1e-12 * std::pow(s, 4));
        EXPECT_NEAR((b - b).eval(x), 0.0, 1e-15);
    }
    EXPECT_THROW(a + b, PreconditionError);
    EXPECT_THROW(HomogeneousPoly<double>(2, 3).add({1, 1, 0}, 1.0), PreconditionError);
    EXPECT_THROW(HomogeneousPoly<double>(2, 2).add({1, 0, 1}, 1.0), PreconditionError);
}

TEST(Homogenize, AgreesOnTheHyperplanePair) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> s(-2, 2);
    const std::vector<ConvexBody> bodies{ConvexBody::disk(), ConvexBody::ellipse({2, 1}), ConvexBody::disk(1, 3),
                                         ConvexBody::ellipse({1, 2, 0.5})};
    for (int trial = 0; trial < 40; ++trial) {
        const auto& body = bodies[trial % bodies.size()];
        const int d = body.dim();
        const auto p = random_even_poly(rng, d, 6);
        const auto line = support_line(body, body.boundary_point(random_unit(rng, d)));
        const HyperplaneChart chart(line);
        const auto h = homogenize_even(p, line, 10);
        for (int i = 0; i < 20; ++i) {
            Point x = line.base;
            for (const auto& t : chart.tangents) x += s(rng) * t;
            std::map<Exponent, double> absterms;
            for (const auto& [e, c] : p.terms()) absterms[e] = std::abs(c);
            const double scale = 1 + direct_eval(absterms, x.cwiseAbs());
            EXPECT_NEAR(h.eval(x), p.eval(x), 1e-10 * scale);
            EXPECT_NEAR(h.eval(Point(-x)), p.eval(x), 1e-10 * scale);
        }
    }
}

TEST(Homogenize, Preconditions) {
    DensePoly<double> odd(2, 3);
    odd.add({1, 0, 0}, 1.0);
    const SupportLine line{point2(1, 0), point2(1, 0)};
    EXPECT_THROW(homogenize_even(odd, line, 4), PreconditionError);
    DensePoly<double> even(2, 4);
    even.add({2, 2, 0}, 1.0);
    EXPECT_THROW(homogenize_even(even, line, 2), PreconditionError);
    EXPECT_THROW(homogenize_even(even, line, 5), PreconditionError);
}

TEST(Chart, LiftAgreesWithChartPolynomial) {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int d : {2, 3}) {
        const auto body = d == 2 ? ConvexBody::ellipse({2, 1}) : ConvexBody::ellipse({1, 1.5, 2});
        const auto line = support_line(body, body.boundary_point(random_unit(rng, d)));
        const HyperplaneChart chart(line);
        std::map<Exponent, double> terms;
        for (int a = 0; a <= 3; ++a)
            for (int b = 0; b <= (d == 3 ? 3 - a : 0); ++b) terms[{a, b, 0}] = u(rng);
        const auto h = lift_chart_poly(terms, chart, 8);
        for (int i = 0; i < 30; ++i) {
            std::vector<double> l(chart.chart_dim());
            Point x = line.base;
            for (int j = 0; j < chart.chart_dim(); ++j) l[j] = 2 * u(rng), x += l[j] * chart.tangents[j];
            double p = 0;
            for (const auto& [e, c] : terms) p += c * std::pow(l[0], e[0]) * (d == 3 ? std::pow(l[1], e[1]) : 1.0);
            for (int j = 0; j < chart.chart_dim(); ++j) EXPECT_NEAR(chart.l(j, x), l[j], 1e-13);
            EXPECT_NEAR(chart.b(x), 1.0, 1e-13);
            EXPECT_NEAR(static_cast<double>(h.eval(x)), p, 1e-10 * (1 + std::abs(p)));
        }
    }
}

// A lifted chart polynomial bounded by 1 on the patch is at most (2/3)^(2n) at boundary
// points whose ray crosses the hyperplane outside the patch.
TEST(Chart, OffPatchSuppression) {
    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> u(-1, 1), far(1.0, 50.0);
    for (int d : {2, 3})
        for (int n : {4, 8, 16}) {
            const auto body = d == 2 ? ConvexBody::ellipse({2, 1}) : ConvexBody::ellipse({1, 1.5, 2});
            const double R = 4 * delta_K(body);
            const auto line = support_line(body, body.boundary_point(random_unit(rng, d)));
            const HyperplaneChart chart(line);
            const auto idx = detail::chart_indices(chart.chart_dim(), 2 * n);
            // sum |c| = 1 keeps the chart polynomial within [-1, 1] on the patch box.
            Eigen::VectorXd c(idx.size());
            for (int k = 0; k < c.size(); ++k) c[k] = u(rng);
            c /= c.cwiseAbs().sum();
            const auto h = lift_chart_chebyshev(idx, c, chart, R, 2 * n);
            double worst = 0;
            for (int i = 0; i < 1000; ++i) {
                Point dir = Point::Zero(d);
                for (const auto& t : chart.tangents) dir += u(rng) * t;
                Point x = line.base + far(rng) * R * dir.normalized();
                x /= body.gauge(x);
                worst = std::max(worst, std::abs(static_cast<double>(h.eval(x))));
            }
            EXPECT_LE(worst, std::pow(2.0 / 3.0, 2 * n) * (1 + 1e-6)) << "d=" << d << " n=" << n;
        }
}

TEST(Growth, RandomUnitPolynomials) {
    std::mt19937_64 rng(26);
    std::uniform_real_distribution<double> u(-1, 1), ext(1.0001, 20.0);
    int violations = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 12;
        const double a = 0.5 + std::abs(u(rng));
        DensePoly<double> p(1, n);
        for (int k = 0; k <= n; ++k) p.add({k, 0, 0}, u(rng));
        // Normalize to sup 1 on [-a, a] with a grid finer than the check's.
        double sup = 0;
        for (int j = 0; j <= 20000; ++j) {
            Point x(1);
            x[0] = -a + 2 * a * j / 20000;
            sup = std::max(sup, std::abs(p.eval(x)));
        }
        DensePoly<double> q(1, n);
        for (const auto& [e, c] : p.terms()) q.add(e, c / (sup * (1 + 1e-9)));
        for (int i = 0; i < 100; ++i) {
            const double x = (u(rng) < 0 ? -1 : 1) * a * ext(rng);
            const auto g = growth_bound_holds(q, a, x);
            EXPECT_TRUE(g.hypothesis);
            violations += !g.holds;
        }
    }
    EXPECT_EQ(violations, 0);
}

TEST(Growth, ChebyshevIsNearlyExtremal) {
    // T_n(x) ~ (2x)^n / 2 for large x: the bound is sharp up to a factor 2.
    DensePoly<double> t8(1, 8);
    for (auto [k, c] : std::vector<std::pair<int, double>>{{0, 1}, {2, -32}, {4, 160}, {6, -256}, {8, 128}}) t8.add({k, 0, 0}, c);
    const auto g = growth_bound_holds(t8, 1.0, 100.0);
    EXPECT_TRUE(g.hypothesis);
    EXPECT_TRUE(g.holds);
    EXPECT_GT(g.value / g.bound, 0.49);
    EXPECT_THROW(growth_bound_check(t8, 1.0, 0.5), PreconditionError);
}

TEST(ChebFit, SpectralAccuracy) {
    auto f = [](const Point& x) { return std::exp(x[0]) * std::cos(x.size() > 1 ? x[1] : 0.0); };
    const auto c1 = cheb_fit(f, {-1}, {2}, 20);
    const auto c2 = cheb_fit(f, {-1, -1}, {1, 1}, 20);
    for (double x = -1; x <= 2; x += 0.01) {
        Point p(1);
        p[0] = x;
        EXPECT_NEAR(c1.eval(p), std::exp(x), 1e-13);
    }
    for (double x = -1; x <= 1; x += 0.1)
        for (double y = -1; y <= 1; y += 0.1) EXPECT_NEAR(c2.eval(point2(x, y)), f(point2(x, y)), 1e-13);
    const auto dense = c1.to_dense<long double>();
    Point p(1);
    p[0] = 0.5;
    EXPECT_NEAR(static_cast<double>(dense.eval(p)), std::exp(0.5), 1e-12);
}

TEST(ChebFit, EvenTargetDropsOddCoefficients) {
    const auto cs = cheb_fit([](const Point& x) { return x[0] * x[0] + x[1] * x[1] * x[1] * x[1]; }, {-1, -1}, {1, 1}, 6);
    for (int i = 0; i < cs.coef.rows(); ++i)
        for (int j = 0; j < cs.coef.cols(); ++j)
            if ((i + j) % 2) EXPECT_EQ(cs.coef(i, j), 0.0);
    EXPECT_TRUE(cs.to_dense<double>().is_even());
}
