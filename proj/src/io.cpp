#include "treewave/io.hpp"

#include "treewave/errors.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>

namespace treewave {

using nlohmann::json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(std::vector<std::string> fields) {
    if (fields.size() != header_.size()) throw Error("CSV row width does not match the header", false);
    rows_.push_back(std::move(fields));
    return *this;
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& f) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (i) out += ',';
            out += f[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
        throw Error("SHA-256 digest failed", false);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

OutputSink::OutputSink(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error("cannot create output directory " + dir_.string() + ": " + ec.message(), false);
}

void OutputSink::write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw Error("cannot write " + path.string(), false);
    files_.push_back({name, sha256_hex(content), content.size()});
}

json RunManifest::to_json() const {
    json files = json::array();
    for (const auto& f : outputs) files.push_back({{"file", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    return {{"command", command},
            {"params", params},
            {"version", tool_version},
            {"wall_seconds", wall_seconds},
            {"outputs", files}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

CsvTable trajectory_csv(const std::vector<TrajectoryRow>& rows) {
    CsvTable t({"time", "front_position", "u_min", "u_max"});
    for (const auto& r : rows)
        t.row({format_double(r.time), format_double(r.front_position), format_double(r.u_min), format_double(r.u_max)});
    return t;
}

namespace {

/// NaN and infinities become null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

} // namespace

json speed_json(const SpeedEstimate& e) {
    return {{"c_hat", number(e.c_hat)},
            {"c_hat_defined", e.valid},
            {"stderr", number(e.stderr_c)},
            {"r_squared", number(e.r_squared)},
            {"pinned", e.pinned},
            {"samples", e.samples},
            {"displacement", number(e.displacement)}};
}

CsvTable profile_csv(const WaveSolution& w) {
    CsvTable t({"xi", "phi"});
    for (std::size_t j = 0; j < w.phi.size(); ++j) t.row({format_double(w.xi(j)), format_double(w.phi[j])});
    return t;
}

json solution_json(const WaveSolution& w) {
    const bool discrete = w.mode == WaveMode::discrete;
    return {{"mode", discrete ? "discrete" : "continuum"},
            {"a", w.a},
            {"d", discrete ? number(w.d) : json(nullptr)},
            {"k", discrete ? number(w.k) : json(nullptr)},
            {"h", discrete ? number(w.h) : json(nullptr)},
            {"dxi", w.dxi},
            {"nodes", w.phi.size()},
            {"c", w.c},
            {"c_lattice", discrete ? number(w.c_lattice()) : json(nullptr)},
            {"c_compare", discrete ? number(w.c_compare()) : json(nullptr)},
            {"residual", w.residual_norm},
            {"newton_iterations", w.newton_iters}};
}

CsvTable layer_csv(const std::vector<LayerSample>& samples) {
    CsvTable t({"time", "layer", "mean", "spread"});
    for (const auto& s : samples)
        for (std::size_t l = 0; l < s.mean.size(); ++l)
            t.row({format_double(s.time), std::to_string(l), format_double(s.mean[l]), format_double(s.spread[l])});
    return t;
}

CsvTable region_csv(const std::vector<RegionPoint>& points) {
    CsvTable t({"a", "d", "k", "c_hat", "classification", "method"});
    for (const auto& p : points)
        t.row({format_double(p.a), format_double(p.d), format_double(p.k), format_double(p.c_hat),
               to_string(p.classification), to_string(p.method)});
    return t;
}

CsvTable boundary_csv(const std::vector<BoundaryCurve>& curves) {
    CsvTable t({"a", "d_boundary", "kind"});
    for (const auto& c : curves)
        for (const auto& [a, d] : c.points) t.row({format_double(a), format_double(d), to_string(c.kind)});
    return t;
}

CsvTable convergence_csv(const ConvergenceStudy& s) {
    CsvTable t({"h", "c_compare", "err_c", "err_profile"});
    for (const auto& r : s.rows)
        t.row({format_double(r.h), format_double(r.c_compare), format_double(r.err_c), format_double(r.err_profile)});
    return t;
}

json convergence_json(const ConvergenceStudy& s) {
    json rows = json::array();
    for (const auto& r : s.rows) {
        json row = {{"h", r.h},
                    {"c", number(r.c)},
                    {"c_compare", number(r.c_compare)},
                    {"err_c", number(r.err_c)},
                    {"err_profile", number(r.err_profile)},
                    {"ok", r.ok}};
        if (!r.ok) row["error"] = r.message;
        rows.push_back(row);
    }
    return {{"a", s.a},         {"k", s.k},
            {"sigma_star", s.sigma_star}, {"slope", number(s.slope)},
            {"empirical_K", s.empirical_K}, {"rows", rows}};
}

json corollary_json(const CorollaryReport& r) {
    auto pair = [](const double* v) { return json{{"theta_minus", number(v[0])}, {"theta_plus", number(v[1])}}; };
    auto sq = [](const double* v) {
        return json{{"theta_minus", number(v[0] * v[0])}, {"theta_plus", number(v[1] * v[1])}};
    };
    auto interval = [](Interval iv) { return json{{"lo", number(iv.lo)}, {"hi", number(iv.hi)}}; };
    json j = {{"a", r.a},
              {"k", r.k},
              {"K_used", r.K_used},
              {"h_diamond", r.h_diamond ? json(*r.h_diamond) : json(nullptr)},
              {"d_crit", number(r.d_crit)},
              {"gamma", number(r.gamma)},
              {"E", pair(r.E)},
              {"nu_minus", pair(r.nu_minus)},
              {"nu_plus", pair(r.nu_plus)},
              {"nu_minus_sq", sq(r.nu_minus)},
              {"nu_plus_sq", sq(r.nu_plus)},
              {"nu_diamond", r.nu_diamond},
              {"D_minus", interval(r.D_minus)},
              {"D_plus", interval(r.D_plus)},
              {"preconditions", {{"d_crit_ge_1", r.d_crit_ge_1}, {"gamma_le_1", r.gamma_le_1},
                                 {"real_valued", r.real_valued}}},
              {"checks", {{"nu_plus_minus1_upper", r.check_upper}, {"nu_minus_plus1_lower", r.check_lower_minus},
                          {"nu_plus_plus1_lower", r.check_lower_plus}}},
              {"reason", r.reason}};
    return j;
}

} // namespace treewave
