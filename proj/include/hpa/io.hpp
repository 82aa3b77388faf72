#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "polys.hpp"

namespace hpa {

// [{"exponents": [..], "coeff": c}, ...] in exponent order; exponents has one entry per variable.
template <class T>
nlohmann::json poly_terms_json(const HomogeneousPoly<T>& p) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [e, c] : p.terms()) {
        nlohmann::json ex = nlohmann::json::array();
        for (int i = 0; i < p.dim(); ++i) ex.push_back(e[i]);
        arr.push_back({{"exponents", ex}, {"coeff", static_cast<double>(c)}});
    }
    return arr;
}

inline nlohmann::json poly_json(const HomogeneousPoly<double>& p) {
    return {{"dim", p.dim()}, {"degree", p.degree()}, {"terms", poly_terms_json(p)}};
}

inline HomogeneousPoly<double> poly_from_json(const nlohmann::json& j) {
    try {
        const int dim = j.at("dim").get<int>();
        const int degree = j.at("degree").get<int>();
        HomogeneousPoly<double> p(dim, degree);
        for (const auto& t : j.at("terms")) {
            const auto& ex = t.at("exponents");
            if (static_cast<int>(ex.size()) != dim) throw PreconditionError("poly_from_json: exponent length != dim");
            Exponent e{0, 0, 0};
            for (int i = 0; i < dim; ++i) e[i] = ex[i].get<int>();
            p.add(e, t.at("coeff").get<double>());
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw PreconditionError(std::string("poly_from_json: ") + e.what());
    }
}

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Small CSV builder: header row, then rows of numbers printed with 17 significant digits.
class Csv {
public:
    explicit Csv(const std::vector<std::string>& header) : cols_(header.size()) {
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }
    void row(const std::vector<double>& values) {
        if (values.size() != cols_) throw PreconditionError("Csv: row width does not match the header");
        for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << fmt17(values[i]);
        out_ << "\n";
    }
    std::string str() const { return out_.str(); }

private:
    std::size_t cols_;
    std::ostringstream out_;
};

// Writes to a temporary sibling and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.parent_path() / (path.filename().string() + ".tmp");
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace hpa
