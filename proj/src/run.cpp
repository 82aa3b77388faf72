#include "run.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include <boost/version.hpp>
#include <Eigen/Core>

#include "hpa/config.hpp"
#include "hpa/expr.hpp"
#include "hpa/io.hpp"
#include "hpa/partition.hpp"
#include "hpa/pipeline.hpp"
#include "hpa/potential.hpp"
#include "hpa/unity.hpp"
#include "hpa/weighted_approx.hpp"

namespace hpa::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

struct Context {
    fs::path out;
    std::vector<std::string> outputs;
    std::map<std::string, double> timings;
    std::ostream& log;
    std::vector<std::string> warnings;

    void write(const std::string& name, const std::string& content) {
        write_atomic(out / name, content);
        outputs.push_back(name);
    }
    void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError("", what + ": cannot read number \"" + s + "\"");
    return v;
}

json number_list(const std::string& s, const std::string& what) {
    json arr = json::array();
    for (const auto& p : split(s, ',')) arr.push_back(to_number(p, what));
    return arr;
}

BoundaryFunction boundary_function(const std::string& text) {
    const Expr e = Expr::parse(text);
    return [e](const Point& p) { return e(p[0], p[1], p.size() > 2 ? p[2] : 0.0); };
}

json condition_json(const ConditionReport& r) {
    return {{"pass", r.pass},
            {"positive", r.positive},
            {"worst_second_difference", r.worst_second_difference},
            {"worst_triple", {r.worst_triple[0], r.worst_triple[1], r.worst_triple[2]}}};
}

void run_approx(const RunConfig& rc, Context& ctx) {
    const ConvexBody& body = *rc.body;
    const auto f = boundary_function(rc.f);
    PipelineOptions opt;
    opt.check_samples = rc.samples;
    opt.fresh_samples = rc.fresh_samples;
    opt.seed = rc.seed;
    opt.grid = rc.grid;
    opt.m = rc.m;
    opt.delta = rc.delta;
    opt.unity = rc.unity;

    json results = json::array(), coeffs = json::array();
    Csv errors({"n", "degree_even", "degree_odd", "sup_error", "check_error", "fresh_error"});
    Csv trace({"n", "s", "x", "y", "z", "f", "approx", "residual"});
    std::string route;
    for (int n : rc.n_list) {
        const HomPair hp = approximate(body, f, n, rc.route, opt);
        route = hp.route;
        ctx.timings["n=" + std::to_string(n)] = hp.seconds;
        ctx.log << "approx n=" << n << " route=" << hp.route << " sup_error=" << fmt17(hp.sup_error) << "\n";
        json r{{"n", n},
               {"degree_even", hp.h_even.degree()},
               {"degree_odd", hp.h_odd.degree()},
               {"sup_error", hp.sup_error},
               {"check_error", hp.check_error},
               {"fresh_error", hp.fresh_error},
               {"check_samples", hp.check_samples},
               {"fresh_samples", hp.fresh_samples},
               {"rounding_floor", hp.rounding_floor}};
        if (hp.rounding_floor > 0.1 * hp.sup_error) {
            ctx.warnings.push_back("n=" + std::to_string(n) + ": monomial rounding floor " + fmt17(hp.rounding_floor) +
                                   " is comparable to the error");
            ctx.log << "warning: " << ctx.warnings.back() << "\n";
        }
        if (hp.route == "planar-potential") {
            r["even_lp_error"] = hp.even_lp_error;
            r["odd_lp_error"] = hp.odd_lp_error;
        } else {
            r["weierstrass_degree"] = hp.weierstrass_degree;
            r["weierstrass_error"] = hp.weierstrass_error;
            r["error_bound"] = hp.error_bound;
            json terms = json::array();
            for (const auto& t : hp.terms)
                terms.push_back({{"j", t.j}, {"unity_n", t.unity_n}, {"part_norm", t.part_norm}, {"unity_error", t.unity_error}});
            r["graded_terms"] = terms;
        }
        results.push_back(r);
        coeffs.push_back({{"n", n}, {"h_even", poly_json(hp.h_even)}, {"h_odd", poly_json(hp.h_odd)}});
        errors.row({double(n), double(hp.h_even.degree()), double(hp.h_odd.degree()), hp.sup_error, hp.check_error,
                    hp.fresh_error});

        std::vector<Point> pts;
        std::vector<double> s;
        if (body.dim() == 2) {
            for (int i = 0; i < rc.trace_points; ++i) {
                const double a = 2 * std::numbers::pi * i / rc.trace_points;
                s.push_back(a);
                pts.push_back(body.boundary_point(point2(std::cos(a), std::sin(a))));
            }
        } else {
            pts = boundary_samples(body, rc.trace_points);
            for (int i = 0; i < rc.trace_points; ++i) s.push_back(i);
        }
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const Point& x = pts[i];
            const double fv = f(x), av = hp.eval(x);
            trace.row({double(n), s[i], x[0], x[1], x.size() > 2 ? x[2] : 0.0, fv, av, fv - av});
        }
    }
    ctx.write_json("approx_report.json", {{"subcommand", "approx"},
                                          {"body", rc.canonical["body"]},
                                          {"f", rc.f},
                                          {"route", route},
                                          {"sup_error", results.back()["sup_error"]},
                                          {"results", results}});
    ctx.write_json("approx_coefficients.json", {{"body", rc.canonical["body"]}, {"f", rc.f}, {"results", coeffs}});
    ctx.write("approx_errors.csv", errors.str());
    ctx.write("approx_trace.csv", trace.str());
}

void run_unity(const RunConfig& rc, Context& ctx) {
    const ConvexBody& body = *rc.body;
    json results = json::array(), coeffs = json::array();
    Csv errors({"n", "degree", "sup_error", "mean_error"});
    for (int n : rc.n_list) {
        Stopwatch sw;
        UnityParams up = rc.unity;
        up.n = n;
        const auto res = approximate_unity_detailed(body, up);
        const auto rep = unity_error_report(body, res.poly, rc.samples);
        ctx.timings["n=" + std::to_string(n)] = sw.seconds();
        ctx.log << "unity n=" << n << " degree=" << res.poly.degree() << " sup_error=" << fmt17(rep.sup_error) << "\n";
        double tmax = 0, off = 0;
        for (const auto& p : res.patches) tmax = std::max(tmax, p.max_t_minus_1), off = std::max(off, p.off_patch_max);
        results.push_back({{"n", n},
                           {"degree", res.poly.degree()},
                           {"sup_error", rep.sup_error},
                           {"mean_error", rep.mean_error},
                           {"samples", rep.samples},
                           {"h", res.h},
                           {"jackson_order", res.m},
                           {"gamma", res.gamma},
                           {"patches", res.patches.size()},
                           {"max_t_minus_1", tmax},
                           {"max_off_patch", off}});
        coeffs.push_back({{"n", n}, {"poly", poly_json(res.poly)}});
        errors.row({double(n), double(res.poly.degree()), rep.sup_error, rep.mean_error});
    }
    ctx.write_json("unity_report.json", {{"subcommand", "unity"},
                                         {"body", rc.canonical["body"]},
                                         {"sup_error", results.back()["sup_error"]},
                                         {"results", results}});
    ctx.write_json("unity_coefficients.json", {{"body", rc.canonical["body"]}, {"results", coeffs}});
    ctx.write("unity_errors.csv", errors.str());
}

void run_equilibrium(const RunConfig& rc, Context& ctx) {
    const Weight& w = *rc.weight;
    json results = json::array();
    Csv curve({"lambda", "x", "density"});
    for (double lambda : rc.lambdas) {
        Stopwatch sw;
        const auto support = mrs_support(w, lambda);
        const auto em = density(w, lambda, support);
        const double dev = equilibrium_check(em, w);
        ctx.timings["lambda=" + fmt17(lambda)] = sw.seconds();
        ctx.log << "equilibrium lambda=" << lambda << " support=[" << fmt17(em.a) << ", " << fmt17(em.b)
                << "] deviation=" << dev << "\n";
        results.push_back({{"lambda", lambda},
                           {"a", em.a},
                           {"b", em.b},
                           {"robin", em.robin},
                           {"mass", em.mass},
                           {"deviation", dev}});
        for (int i = 0; i < rc.curve_points; ++i) {
            const double th = std::numbers::pi * (rc.curve_points - i - 0.5) / rc.curve_points;
            const double x = em.center() + em.half_width() * std::cos(th);
            curve.row({lambda, x, em.V(x)});
        }
    }
    ctx.write_json("equilibrium.json", {{"subcommand", "equilibrium"}, {"weight", w.provenance}, {"results", results}});
    ctx.write("equilibrium_density.csv", curve.str());
}

void run_wapprox(const RunConfig& rc, Context& ctx) {
    const Weight& w = *rc.weight;
    const Expr e = Expr::parse(rc.f);
    auto f = [&e](double t) { return e(0, 0, 0, t); };
    json results = json::array();
    Csv errors({"n", "sup_error", "lp_error"});
    for (int n : rc.n_list) {
        Stopwatch sw;
        const auto wa = weighted_minimax(f, w, n, rc.grid);
        ctx.timings["n=" + std::to_string(n)] = sw.seconds();
        ctx.log << "wapprox n=" << n << " sup_error=" << fmt17(wa.sup_error) << "\n";
        json p = json::array();
        for (int k = 0; k <= n; ++k) p.push_back({{"exponents", {k}}, {"coeff", wa.coef[k]}});
        json r{{"n", n},
               {"sup_error", wa.sup_error},
               {"lp_error", wa.lp_error},
               {"grid", wa.grid},
               {"check_grid", wa.check_grid},
               {"refinements", wa.refinements},
               {"p", p}};
        if (rc.body && rc.body->dim() == 2 && w.provenance.rfind("body:", 0) == 0)
            r["homogeneous"] = poly_json(homog_from_weighted(wa, *rc.body));
        results.push_back(r);
        errors.row({double(n), wa.sup_error, wa.lp_error});
    }
    ctx.write_json("wapprox_coefficients.json",
                   {{"subcommand", "wapprox"}, {"weight", w.provenance}, {"f", rc.f}, {"results", results}});
    ctx.write("wapprox_errors.csv", errors.str());
}

void run_partition(const RunConfig& rc, Context& ctx) {
    const int d = rc.dim;
    std::mt19937_64 rng(rc.seed);
    auto unit = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<std::string> header{"h"};
    for (int i = 0; i < d; ++i) header.push_back("x" + std::to_string(i + 1));
    header.insert(header.end(), {"sum", "overlap"});
    Csv csv(header);
    json results = json::array();
    for (double h : rc.h_list) {
        Stopwatch sw;
        double worst = 0;
        int overlap = 0;
        for (int i = 0; i < rc.points; ++i) {
            Point x(d);
            for (int j = 0; j < d; ++j) x[j] = 6 * unit() - 3;
            const auto ps = partition_at(h, x);
            worst = std::max(worst, std::abs(ps.sum - 1));
            overlap = std::max(overlap, ps.overlap);
            std::vector<double> row{h};
            for (int j = 0; j < d; ++j) row.push_back(x[j]);
            row.push_back(ps.sum);
            row.push_back(ps.overlap);
            csv.row(row);
        }
        const BumpFamily fam{h, d};
        const auto active = fam.active().size();
        ctx.timings["h=" + fmt17(h)] = sw.seconds();
        results.push_back({{"h", h},
                           {"points", rc.points},
                           {"max_abs_sum_minus_1", worst},
                           {"max_overlap", overlap},
                           {"overlap_bound", 1 << d},
                           {"active_count", active},
                           {"count_bound", fam.count_bound()}});
    }
    ctx.write_json("partition_summary.json", {{"subcommand", "partition-diag"}, {"dim", d}, {"results", results}});
    ctx.write("partition.csv", csv.str());
}

void run_check_weight(const RunConfig& rc, Context& ctx) {
    const auto diag = check_weight(*rc.weight, rc.grid, rc.span);
    ctx.log << "check-weight " << rc.weight->provenance << " pass=" << (diag.pass() ? "true" : "false") << "\n";
    ctx.write_json("check_weight.json", {{"subcommand", "check-weight"},
                                         {"weight", rc.weight->provenance},
                                         {"rho", diag.rho},
                                         {"pass", diag.pass()},
                                         {"reciprocal", condition_json(diag.reciprocal)},
                                         {"inverted", condition_json(diag.inverted)}});
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

} // namespace

json body_from_flag(const std::string& spec) {
    const auto parts = split(spec, ':');
    const std::string type = parts.empty() ? "" : parts[0];
    if (type == "disk") {
        json b{{"type", "disk"}};
        if (parts.size() > 1) b["radius"] = to_number(parts[1], "--body");
        if (parts.size() > 2) b["dim"] = static_cast<int>(to_number(parts[2], "--body"));
        return b;
    }
    if (type == "ellipse" && parts.size() == 2) return {{"type", "ellipse"}, {"semi_axes", number_list(parts[1], "--body")}};
    if (type == "pnorm" && parts.size() >= 2) {
        json b{{"type", "pnorm"}, {"p", to_number(parts[1], "--body")}};
        if (parts.size() > 2) b["semi_axes"] = number_list(parts[2], "--body");
        return b;
    }
    if (type == "square") {
        json b{{"type", "square"}};
        if (parts.size() > 1) b["half_width"] = to_number(parts[1], "--body");
        return b;
    }
    if (type == "polygon" && parts.size() == 2) {
        json verts = json::array();
        for (const auto& v : split(parts[1], ';')) verts.push_back(number_list(v, "--body"));
        return {{"type", "polygon"}, {"vertices", verts}};
    }
    throw ConfigError("/body", "cannot read --body \"" + spec + "\"");
}

json weight_from_flag(const std::string& spec) {
    auto parts = split(spec, ':');
    json w = json::object();
    if (!parts.empty() && parts.back() == "inverted") {
        w["inverted"] = true;
        parts.pop_back();
    }
    if (parts.size() == 1 && parts[0] == "body") {
        w["type"] = "body";
        return w;
    }
    if (parts.size() == 2 && parts[0] == "power") {
        w["type"] = "power";
        w["m"] = to_number(parts[1], "--weight");
        return w;
    }
    throw ConfigError("/weight", "cannot read --weight \"" + spec + "\"");
}

int run(const RunRequest& req, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    Context ctx{req.out_dir, {}, {}, log, {}};
    json manifest{{"tool", "hpa"}, {"version", kVersion}, {"subcommand", req.subcommand}};
    int code = kOk;
    std::string status = "ok", message;
    json config = json::object();
    std::uint64_t hash = fnv1a(req.config_text.value_or("") + req.overrides.dump());
    try {
        fs::create_directories(req.out_dir);
    } catch (const std::exception& e) {
        log << "error: cannot create output directory: " << e.what() << "\n";
        return kOtherFailure;
    }
    try {
        if (req.config_text) {
            try {
                config = json::parse(*req.config_text);
            } catch (const json::parse_error& e) {
                throw ConfigError("", std::string("syntax error: ") + e.what());
            }
            if (!config.is_object()) throw ConfigError("", "config must be a JSON object");
        }
        // Flags win; nested objects merge, except body and weight which are replaced whole.
        for (const auto& [k, v] : req.overrides.items()) {
            if (k != "body" && k != "weight" && v.is_object() && config.contains(k) && config[k].is_object())
                config[k].merge_patch(v);
            else
                config[k] = v;
        }
        if (req.seed) config["seed"] = *req.seed;
        const RunConfig rc = parse_config(config, req.subcommand);
        config = rc.canonical;
        hash = fnv1a(rc.canonical.dump());
        for (const auto& w : rc.warnings) log << "warning: " << w << "\n";
        ctx.warnings = rc.warnings;
        if (rc.subcommand == "approx") run_approx(rc, ctx);
        else if (rc.subcommand == "unity") run_unity(rc, ctx);
        else if (rc.subcommand == "equilibrium") run_equilibrium(rc, ctx);
        else if (rc.subcommand == "wapprox") run_wapprox(rc, ctx);
        else if (rc.subcommand == "partition-diag") run_partition(rc, ctx);
        else run_check_weight(rc, ctx);
    } catch (const PreconditionError& e) {
        code = kConfigFailure;
        status = "config_failure";
        message = e.what();
    } catch (const NumericError& e) {
        code = kNumericFailure;
        status = "numeric_failure";
        message = e.what();
    } catch (const std::exception& e) {
        code = kOtherFailure;
        status = "failure";
        message = e.what();
    }
    if (code != kOk) log << "error: " << message << "\n";
    manifest["warnings"] = ctx.warnings;

    manifest["status"] = status;
    manifest["exit_code"] = code;
    manifest["message"] = message;
    manifest["inputs_hash"] = "fnv1a64:" + hex64(hash);
    manifest["config"] = config;
    manifest["seed"] = config.contains("seed") ? config["seed"] : json(kFreshSeed);
    manifest["outputs"] = ctx.outputs;
    std::ostringstream eigen;
    eigen << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "." << EIGEN_MINOR_VERSION;
    manifest["versions"] = {{"hpa", kVersion},
                            {"eigen", eigen.str()},
                            {"boost", BOOST_LIB_VERSION},
                            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                            {"compiler", __VERSION__}};
    json timings = ctx.timings;
    timings["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["timings_seconds"] = timings;
    try {
        write_atomic(req.out_dir / "run_manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        log << "error: cannot write run manifest: " << e.what() << "\n";
        if (code == kOk) code = kOtherFailure;
    }
    return code;
}

} // namespace hpa::cli
