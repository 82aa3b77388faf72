#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "expr.hpp"
#include "geometry.hpp"
#include "potential.hpp"
#include "unity.hpp"
#include "weight.hpp"

namespace hpa {

using json = nlohmann::json;

// Config failure with the JSON pointer of the offending value.
struct ConfigError : PreconditionError {
    ConfigError(const std::string& ptr, const std::string& msg)
        : PreconditionError("config: " + (ptr.empty() ? std::string("/") : ptr) + ": " + msg), pointer(ptr) {}
    std::string pointer;
};

inline const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> s{"approx", "unity", "equilibrium", "wapprox", "partition-diag", "check-weight"};
    return s;
}

struct RunConfig {
    std::string subcommand;
    json canonical;                 // validated input with defaults filled in
    std::optional<ConvexBody> body;
    std::optional<Weight> weight;
    std::string f;                  // expression text
    std::vector<int> n_list;
    std::string route = "auto";
    int m = 8;
    double delta = 1e-3;
    int samples = 20000;
    int fresh_samples = 4000;
    int grid = 4001;
    int trace_points = 721;
    std::uint64_t seed = 0xB17E;
    UnityParams unity;
    std::vector<double> lambdas;
    int curve_points = 401;
    std::vector<double> h_list;
    int dim = 2;
    int points = 10000;
    double span = 8.0;
    std::vector<std::string> warnings;
};

namespace detail {

inline std::string join_ptr(const std::string& base, const std::string& key) { return base + "/" + key; }

inline void allow_keys(const json& obj, const std::string& ptr, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(ptr, "expected an object");
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) throw ConfigError(join_ptr(ptr, k), "unknown key");
}

inline double get_number(const json& obj, const std::string& ptr, const std::string& key, double def, double lo, double hi,
                         bool open_lo = false) {
    if (!obj.contains(key)) return def;
    const auto& v = obj.at(key);
    const std::string p = join_ptr(ptr, key);
    if (!v.is_number()) throw ConfigError(p, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x) || (open_lo ? !(x > lo) : !(x >= lo)) || !(x <= hi)) {
        std::ostringstream os;
        os << "out of range: " << x << " not in " << (open_lo ? "(" : "[") << lo << ", " << hi << "]";
        throw ConfigError(p, os.str());
    }
    return x;
}

inline int get_int(const json& obj, const std::string& ptr, const std::string& key, int def, int lo, int hi) {
    if (!obj.contains(key)) return def;
    const auto& v = obj.at(key);
    const std::string p = join_ptr(ptr, key);
    if (!v.is_number_integer()) throw ConfigError(p, "expected an integer");
    const auto x = v.get<long long>();
    if (x < lo || x > hi)
        throw ConfigError(p, "out of range: " + std::to_string(x) + " not in [" + std::to_string(lo) + ", " +
                                 std::to_string(hi) + "]");
    return static_cast<int>(x);
}

inline std::string get_string(const json& obj, const std::string& ptr, const std::string& key, const std::string& def,
                              const std::set<std::string>& choices = {}) {
    if (!obj.contains(key)) return def;
    const auto& v = obj.at(key);
    const std::string p = join_ptr(ptr, key);
    if (!v.is_string()) throw ConfigError(p, "expected a string");
    const auto s = v.get<std::string>();
    if (!choices.empty() && !choices.count(s)) {
        std::string list;
        for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
        throw ConfigError(p, "must be one of " + list + " (got \"" + s + "\")");
    }
    return s;
}

inline std::vector<double> number_array(const json& v, const std::string& p, std::size_t min_size, std::size_t max_size) {
    if (!v.is_array()) throw ConfigError(p, "expected an array of numbers");
    if (v.size() < min_size || v.size() > max_size)
        throw ConfigError(p, "expected " + std::to_string(min_size) + ".." + std::to_string(max_size) + " entries");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(p + "/" + std::to_string(i), "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

inline ConvexBody parse_body(const json& b, const std::string& ptr) {
    if (!b.is_object()) throw ConfigError(ptr, "expected an object");
    if (!b.contains("type")) throw ConfigError(join_ptr(ptr, "type"), "missing required key");
    const auto type = get_string(b, ptr, "type", "", {"disk", "ellipse", "pnorm", "polygon", "square", "radial"});
    try {
        if (type == "disk") {
            allow_keys(b, ptr, {"type", "radius", "dim"});
            return ConvexBody::disk(get_number(b, ptr, "radius", 1.0, 0.0, 1e6, true), get_int(b, ptr, "dim", 2, 2, 3));
        }
        if (type == "ellipse") {
            allow_keys(b, ptr, {"type", "semi_axes"});
            if (!b.contains("semi_axes")) throw ConfigError(join_ptr(ptr, "semi_axes"), "missing required key");
            return ConvexBody::ellipse(number_array(b.at("semi_axes"), join_ptr(ptr, "semi_axes"), 2, 3));
        }
        if (type == "pnorm") {
            allow_keys(b, ptr, {"type", "p", "semi_axes"});
            std::vector<double> axes{1.0, 1.0};
            if (b.contains("semi_axes")) axes = number_array(b.at("semi_axes"), join_ptr(ptr, "semi_axes"), 2, 3);
            return ConvexBody::pnorm(get_number(b, ptr, "p", 4.0, 1.0, 1e3), axes);
        }
        if (type == "square") {
            allow_keys(b, ptr, {"type", "half_width"});
            const double s = get_number(b, ptr, "half_width", 1.0, 0.0, 1e6, true);
            return ConvexBody::polygon({{s, s}, {-s, s}, {-s, -s}, {s, -s}});
        }
        if (type == "polygon") {
            allow_keys(b, ptr, {"type", "vertices"});
            const std::string p = join_ptr(ptr, "vertices");
            if (!b.contains("vertices")) throw ConfigError(p, "missing required key");
            const auto& vs = b.at("vertices");
            if (!vs.is_array()) throw ConfigError(p, "expected an array of [x, y] pairs");
            std::vector<Eigen::Vector2d> verts;
            for (std::size_t i = 0; i < vs.size(); ++i) {
                const auto xy = number_array(vs[i], p + "/" + std::to_string(i), 2, 2);
                verts.emplace_back(xy[0], xy[1]);
            }
            return ConvexBody::polygon(verts);
        }
        allow_keys(b, ptr, {"type", "angles", "radii"});
        if (!b.contains("angles")) throw ConfigError(join_ptr(ptr, "angles"), "missing required key");
        if (!b.contains("radii")) throw ConfigError(join_ptr(ptr, "radii"), "missing required key");
        return ConvexBody::radial_samples(number_array(b.at("angles"), join_ptr(ptr, "angles"), 4, 100000),
                                          number_array(b.at("radii"), join_ptr(ptr, "radii"), 4, 100000));
    } catch (const ConfigError&) {
        throw;
    } catch (const PreconditionError& e) {
        throw ConfigError(ptr, e.what());
    }
}

inline Weight parse_weight(const json& w, const std::string& ptr, const std::optional<ConvexBody>& body) {
    if (!w.is_object()) throw ConfigError(ptr, "expected an object");
    const auto type = get_string(w, ptr, "type", "body", {"power", "body"});
    Weight out;
    if (type == "power") {
        allow_keys(w, ptr, {"type", "m", "inverted"});
        out = power_family_weight(get_number(w, ptr, "m", 2.0, 1.0, 64.0));
    } else {
        allow_keys(w, ptr, {"type", "inverted"});
        if (!body) throw ConfigError(join_ptr(ptr, "type"), "weight type \"body\" needs a body");
        if (body->dim() != 2) throw ConfigError("/body", "weights come from planar bodies only");
        out = weight_from_body(*body);
    }
    if (w.contains("inverted")) {
        if (!w.at("inverted").is_boolean()) throw ConfigError(join_ptr(ptr, "inverted"), "expected true or false");
        if (w.at("inverted").get<bool>()) {
            try {
                out = invert_weight(out);
            } catch (const PreconditionError& e) {
                throw ConfigError(ptr, e.what());
            }
        }
    }
    return out;
}

inline std::vector<int> parse_n(const json& c, bool required, const std::function<void(int, const std::string&)>& check) {
    std::vector<int> out;
    if (c.contains("n") && c.contains("n_list")) throw ConfigError("/n_list", "give either n or n_list, not both");
    if (c.contains("n")) {
        if (!c.at("n").is_number_integer()) throw ConfigError("/n", "expected an integer");
        out.push_back(c.at("n").get<int>());
        check(out.back(), "/n");
    } else if (c.contains("n_list")) {
        const auto& v = c.at("n_list");
        if (!v.is_array() || v.empty()) throw ConfigError("/n_list", "expected a non-empty array of integers");
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string p = "/n_list/" + std::to_string(i);
            if (!v[i].is_number_integer()) throw ConfigError(p, "expected an integer");
            out.push_back(v[i].get<int>());
            check(out.back(), p);
        }
    } else if (required) {
        throw ConfigError("/n", "missing required key (n or n_list)");
    }
    return out;
}

inline void parse_unity_params(const json& c, const std::string& ptr, UnityParams& up) {
    allow_keys(c, ptr, {"eps", "tau", "m", "gamma", "mesh", "h", "mu", "density", "radius_factor"});
    up.eps = get_number(c, ptr, "eps", up.eps, 0.0, 1.0, true);
    up.tau = get_number(c, ptr, "tau", up.tau, 0.0, 1.0, true);
    up.m = get_int(c, ptr, "m", up.m, 0, 1000);
    up.gamma = get_number(c, ptr, "gamma", up.gamma, 0.0, 1.0);
    up.mesh = get_string(c, ptr, "mesh", up.mesh, {"fixed", "schedule"});
    up.h = get_number(c, ptr, "h", up.h, 0.0, 1.0, true);
    up.mu = get_number(c, ptr, "mu", up.mu, 0.0, 1.0);
    up.density = get_int(c, ptr, "density", up.density, 1, 1000);
    up.radius_factor = get_number(c, ptr, "radius_factor", up.radius_factor, 3.0, 100.0, true);
}

} // namespace detail

// Validates a config object for `subcommand` (taken from the object when empty).
inline RunConfig parse_config(const json& c, std::string subcommand = "") {
    using namespace detail;
    if (!c.is_object()) throw ConfigError("", "config must be a JSON object");
    if (c.contains("subcommand")) {
        const auto s = get_string(c, "", "subcommand", "");
        if (subcommand.empty()) subcommand = s;
        else if (s != subcommand)
            throw ConfigError("/subcommand", "config is for \"" + s + "\" but \"" + subcommand + "\" was requested");
    }
    if (subcommand.empty()) throw ConfigError("/subcommand", "missing required key");
    bool known = false;
    for (const auto& s : subcommands()) known = known || s == subcommand;
    if (!known) throw ConfigError("/subcommand", "unknown subcommand \"" + subcommand + "\"");

    RunConfig rc;
    rc.subcommand = subcommand;
    const std::string sc = subcommand;
    std::set<std::string> keys{"subcommand", "seed"};
    if (sc == "approx")
        keys.insert({"body", "f", "n", "n_list", "route", "m", "delta", "samples", "fresh_samples", "grid", "unity",
                     "trace_points"});
    else if (sc == "unity")
        keys.insert({"body", "n", "n_list", "samples", "unity"});
    else if (sc == "equilibrium")
        keys.insert({"body", "weight", "lambda", "curve_points"});
    else if (sc == "wapprox")
        keys.insert({"body", "weight", "f", "n", "n_list", "grid"});
    else if (sc == "partition-diag")
        keys.insert({"dim", "h", "points"});
    else
        keys.insert({"body", "weight", "grid", "span"});
    allow_keys(c, "", keys);

    if (c.contains("seed")) {
        const auto& s = c.at("seed");
        if (!s.is_number_unsigned()) throw ConfigError("/seed", "expected a non-negative integer");
        rc.seed = s.get<std::uint64_t>();
    }
    if (c.contains("body")) rc.body = parse_body(c.at("body"), "/body");

    if (sc == "approx" || sc == "unity") {
        if (!rc.body) throw ConfigError("/body", "missing required key");
    }
    if (sc == "equilibrium" || sc == "wapprox" || sc == "check-weight") {
        if (c.contains("weight")) rc.weight = parse_weight(c.at("weight"), "/weight", rc.body);
        else if (rc.body) rc.weight = parse_weight(json{{"type", "body"}}, "/weight", rc.body);
        else throw ConfigError("/weight", "missing required key (weight or body)");
    }
    if (sc == "approx" || sc == "wapprox") {
        if (!c.contains("f")) throw ConfigError("/f", "missing required key");
        rc.f = get_string(c, "", "f", "");
        try {
            const auto e = Expr::parse(rc.f);
            if (sc == "wapprox" && (e.uses('x') || e.uses('y') || e.uses('z')))
                throw ConfigError("/f", "wapprox functions are in the slope variable t only");
            if (sc == "approx" && e.uses('t')) throw ConfigError("/f", "boundary functions use x, y, z, not t");
            if (sc == "approx" && e.uses('z') && rc.body->dim() == 2) throw ConfigError("/f", "z used on a planar body");
        } catch (const ExprParseError& e) {
            throw ConfigError("/f", e.what());
        }
    }

    if (sc == "approx") {
        rc.route = get_string(c, "", "route", "auto", {"auto", "geometric", "planar"});
        const bool planar = rc.route == "planar" || (rc.route == "auto" && rc.body->dim() == 2);
        if (planar && rc.body->dim() != 2) throw ConfigError("/route", "the planar route needs a planar body");
        if (!planar && !rc.body->smooth())
            throw ConfigError("/route", "the geometric route needs a smooth body (got " + rc.body->type_name() + ")");
        rc.n_list = parse_n(c, true, [planar](int n, const std::string& p) {
            if (planar && (n < 2 || n > 128)) throw ConfigError(p, "out of range: planar degree n must be in [2, 128]");
            if (!planar && (n < 1 || n > 64)) throw ConfigError(p, "out of range: geometric n must be in [1, 64]");
        });
        rc.m = get_int(c, "", "m", 8, 0, 24);
        rc.delta = get_number(c, "", "delta", 1e-3, 0.0, 1e3, true);
        rc.samples = get_int(c, "", "samples", 20000, 100, 10000000);
        rc.fresh_samples = get_int(c, "", "fresh_samples", 4000, 100, 10000000);
        rc.grid = get_int(c, "", "grid", 4001, 101, 1000001);
        rc.trace_points = get_int(c, "", "trace_points", 721, 2, 1000000);
        if (c.contains("unity")) parse_unity_params(c.at("unity"), "/unity", rc.unity);
        if (!planar)
            for (int n : rc.n_list)
                if (n - rc.m / 2 < 1) throw ConfigError("/m", "the Weierstrass degree m needs n > m/2 for every n");
    } else if (sc == "unity") {
        if (!rc.body->smooth())
            throw ConfigError("/body/type", "unity needs a smooth body; use approx with route planar for " +
                                                rc.body->type_name());
        rc.n_list = parse_n(c, true, [&rc](int n, const std::string& p) {
            if (n < 4 || n % 2 != 0) throw ConfigError(p, "out of range: n must be an even integer >= 4 (got " + std::to_string(n) + ")");
            if (2 * n > 128) throw ConfigError(p, "out of range: degree 2n = " + std::to_string(2 * n) + " exceeds the cap 128");
            if (2 * n > 64) rc.warnings.push_back("degree 2n = " + std::to_string(2 * n) + " above 64 loses accuracy in double");
        });
        rc.samples = get_int(c, "", "samples", 20000, 100, 10000000);
        if (c.contains("unity")) parse_unity_params(c.at("unity"), "/unity", rc.unity);
    } else if (sc == "equilibrium") {
        if (!c.contains("lambda")) throw ConfigError("/lambda", "missing required key");
        const auto& l = c.at("lambda");
        if (l.is_number()) rc.lambdas.push_back(l.get<double>());
        else rc.lambdas = number_array(l, "/lambda", 1, 1000);
        for (std::size_t i = 0; i < rc.lambdas.size(); ++i) {
            const std::string p = l.is_number() ? "/lambda" : "/lambda/" + std::to_string(i);
            if (!(rc.lambdas[i] > 1.0) || !std::isfinite(rc.lambdas[i]))
                throw ConfigError(p, "out of range: lambda must be > 1");
        }
        rc.curve_points = get_int(c, "", "curve_points", 401, 2, 1000000);
    } else if (sc == "wapprox") {
        rc.n_list = parse_n(c, true, [](int n, const std::string& p) {
            if (n < 0 || n % 2 != 0 || n > 128)
                throw ConfigError(p, "out of range: n must be an even integer in [0, 128] (got " + std::to_string(n) + ")");
        });
        rc.grid = get_int(c, "", "grid", 4001, 101, 1000001);
        for (int n : rc.n_list)
            if (rc.grid < 2 * n + 8) throw ConfigError("/grid", "grid too coarse for n = " + std::to_string(n));
    } else if (sc == "partition-diag") {
        rc.dim = get_int(c, "", "dim", 2, 1, 3);
        if (!c.contains("h")) rc.h_list = {1.0, 0.5, 0.1};
        else if (c.at("h").is_number()) rc.h_list = {c.at("h").get<double>()};
        else rc.h_list = number_array(c.at("h"), "/h", 1, 100);
        for (std::size_t i = 0; i < rc.h_list.size(); ++i)
            if (!(rc.h_list[i] > 0 && rc.h_list[i] <= 1))
                throw ConfigError(c.contains("h") && c.at("h").is_array() ? "/h/" + std::to_string(i) : "/h",
                                  "out of range: h must be in (0, 1]");
        rc.points = get_int(c, "", "points", 10000, 1, 10000000);
    } else {
        rc.grid = get_int(c, "", "grid", 2001, 5, 1000001);
        rc.span = get_number(c, "", "span", 8.0, 0.0, 1e6, true);
    }

    // Canonical form: input keys plus the resolved defaults.
    json out = c;
    out["subcommand"] = sc;
    out["seed"] = rc.seed;
    if (sc == "approx") {
        out["route"] = rc.route;
        out["m"] = rc.m;
        out["delta"] = rc.delta;
        out["samples"] = rc.samples;
        out["fresh_samples"] = rc.fresh_samples;
        out["grid"] = rc.grid;
        out["trace_points"] = rc.trace_points;
    } else if (sc == "unity") {
        out["samples"] = rc.samples;
    } else if (sc == "equilibrium") {
        out["curve_points"] = rc.curve_points;
    } else if (sc == "wapprox") {
        out["grid"] = rc.grid;
    } else if (sc == "partition-diag") {
        out["dim"] = rc.dim;
        out["h"] = rc.h_list;
        out["points"] = rc.points;
    } else if (sc == "check-weight") {
        out["grid"] = rc.grid;
        out["span"] = rc.span;
    }
    if (sc == "approx" || sc == "unity") {
        out["unity"] = json{{"eps", rc.unity.eps},   {"tau", rc.unity.tau},     {"m", rc.unity.m},
                            {"gamma", rc.unity.gamma}, {"mesh", rc.unity.mesh}, {"h", rc.unity.h},
                            {"mu", rc.unity.mu},     {"density", rc.unity.density}, {"radius_factor", rc.unity.radius_factor}};
    }
    rc.canonical = out;
    return rc;
}

inline RunConfig parse_config(const std::string& text, const std::string& subcommand = "") {
    json c;
    try {
        c = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("syntax error: ") + e.what());
    }
    return parse_config(c, subcommand);
}

inline RunConfig parse_config(const char* text, const std::string& subcommand = "") {
    return parse_config(std::string(text), subcommand);
}

} // namespace hpa
