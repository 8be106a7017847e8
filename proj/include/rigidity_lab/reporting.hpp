/* Copyright 2026 The rigidity-lab Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 * ========================================================================= */
// Run artifacts: CSV traces, SVG charts, a SHA-256 manifest, and the
// orchestration behind the CLI subcommands. Nothing written here carries a
// timestamp, so equal (config, seed) pairs give byte-identical directories.

#ifndef RIGIDITY_LAB_REPORTING_HPP
#define RIGIDITY_LAB_REPORTING_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "rigidity_lab/analysis.hpp"
#include "rigidity_lab/certificate.hpp"
#include "rigidity_lab/config.hpp"
#include "rigidity_lab/displacement.hpp"
#include "rigidity_lab/error.hpp"
#include "rigidity_lab/gallery.hpp"
#include "rigidity_lab/hyperbolic.hpp"
#include "rigidity_lab/presentation.hpp"

namespace rigidity_lab {

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("reporting", "SHA-256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("reporting", "cannot read '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

inline std::string fmt_num(double v, const char* format = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

inline std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_num(*v) : std::string(); }

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace detail

// Writes files under one directory and remembers their hashes.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw Error("reporting", "cannot create '" + dir_.string() + "': " + ec.message());
    }

    const std::filesystem::path& dir() const noexcept { return dir_; }

    void write(const std::string& rel, const std::string& content) {
        const auto path = dir_ / rel;
        std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw Error("reporting", "cannot write '" + path.string() + "'");
        files_[rel] = {sha256_hex(content), content.size()};
    }

    void write_json(const std::string& rel, const nlohmann::json& j) { write(rel, j.dump(2) + "\n"); }

    nlohmann::json manifest() const {
        nlohmann::json files = nlohmann::json::array();
        for (const auto& [path, entry] : files_)
            files.push_back({{"path", path}, {"sha256", entry.first}, {"bytes", entry.second}});
        return {{"files", files}};
    }

    // manifest.json lists every other file written through this writer.
    void finish() {
        const std::string text = manifest().dump(2) + "\n";
        std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
        out << text;
        if (!out) throw Error("reporting", "cannot write manifest");
    }

private:
    std::filesystem::path dir_;
    std::map<std::string, std::pair<std::string, std::size_t>> files_;
};

inline const char* kOrbitCsvHeader = "step,x,norm_plus,norm_minus,ratio,mccarthy_lhs,mccarthy_rhs,holds";

inline std::string orbit_csv(const Certificate& c) {
    std::string out = std::string(kOrbitCsvHeader) + "\n";
    for (const auto& r : c.trace.orbit) {
        out += std::to_string(r.step) + "," + detail::fmt_num(r.x) + "," + detail::fmt_num(r.norm_plus) + "," +
               detail::fmt_num(r.norm_minus) + "," + detail::fmt_opt(r.ratio) + "," + detail::fmt_opt(r.mccarthy_lhs) +
               "," + detail::fmt_opt(r.mccarthy_rhs) + "," + (r.holds ? "true" : "false") + "\n";
    }
    return out;
}

struct TraceRow {
    int step = 0;
    double norm_plus = 0.0;
    double norm_minus = 0.0;
};

inline std::vector<TraceRow> parse_trace_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kOrbitCsvHeader) throw Error("reporting", "trace CSV has an unexpected header");
    std::vector<TraceRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != 8) throw Error("reporting", "trace CSV line " + std::to_string(lineno) + " needs 8 cells");
        try {
            rows.push_back({std::stoi(cells[0]), std::stod(cells[2]), std::stod(cells[3])});
        } catch (const std::exception&) {
            throw Error("reporting", "trace CSV line " + std::to_string(lineno) + " is not numeric");
        }
    }
    return rows;
}

// Log-scale line chart of norm_plus and norm_minus against step. Zero values
// sit on the bottom edge; an all-zero trace is drawn flat and flagged.
inline std::string emit_plot(const std::string& trace_csv) {
    const auto rows = parse_trace_csv(trace_csv);
    if (rows.size() < 2) throw Error("reporting", "plot needs at least 2 trace rows, got " + std::to_string(rows.size()));

    constexpr double W = 640, H = 400, L = 72, R = 24, T = 36, B = 52;
    const double pw = W - L - R, ph = H - T - B;
    double vmin = 0.0, vmax = 0.0;
    bool any = false;
    for (const auto& r : rows)
        for (const double v : {r.norm_plus, r.norm_minus})
            if (v > 0.0 && std::isfinite(v)) {
                vmin = any ? std::min(vmin, v) : v;
                vmax = any ? std::max(vmax, v) : v;
                any = true;
            }
    const bool degenerate = !any;
    int lo = 0, hi = 1;
    if (!degenerate) {
        lo = static_cast<int>(std::floor(std::log10(vmin)));
        hi = static_cast<int>(std::ceil(std::log10(vmax)));
        if (hi <= lo) hi = lo + 1;
    }
    const int s0 = rows.front().step, s1 = std::max(rows.back().step, s0 + 1);
    const auto px = [&](int step) { return L + pw * (step - s0) / static_cast<double>(s1 - s0); };
    const auto py = [&](double v) {
        if (!(v > 0.0) || !std::isfinite(v)) return T + ph;
        return T + ph - ph * (std::log10(v) - lo) / static_cast<double>(hi - lo);
    };
    const auto f = [](double v) { return detail::fmt_num(v, "%.2f"); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + f(W) + "\" height=\"" + f(H) + "\" viewBox=\"0 0 " +
         f(W) + " " + f(H) + "\" data-degenerate=\"" + (degenerate ? "true" : "false") + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + f(L) + "\" y=\"22\" font-family=\"sans-serif\" font-size=\"14\">orbit displacement, log scale</text>\n";
    s += "<g stroke=\"#888\" stroke-width=\"1\">\n";
    s += "<line x1=\"" + f(L) + "\" y1=\"" + f(T + ph) + "\" x2=\"" + f(L + pw) + "\" y2=\"" + f(T + ph) + "\"/>\n";
    s += "<line x1=\"" + f(L) + "\" y1=\"" + f(T) + "\" x2=\"" + f(L) + "\" y2=\"" + f(T + ph) + "\"/>\n";
    s += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    const int dstep = std::max(1, (hi - lo + 7) / 8);
    for (int e = lo; e <= hi; e += dstep) {
        const double y = T + ph - ph * (e - lo) / static_cast<double>(hi - lo);
        s += "<text x=\"" + f(L - 6) + "\" y=\"" + f(y + 4) + "\" text-anchor=\"end\">1e" + std::to_string(e) + "</text>\n";
    }
    const int xstep = std::max(1, (s1 - s0 + 9) / 10);
    for (int k = s0; k <= s1; k += xstep)
        s += "<text x=\"" + f(px(k)) + "\" y=\"" + f(T + ph + 16) + "\" text-anchor=\"middle\">" + std::to_string(k) +
             "</text>\n";
    s += "<text x=\"" + f(L + pw / 2) + "\" y=\"" + f(H - 12) + "\" text-anchor=\"middle\">step</text>\n";
    s += "</g>\n";

    const std::pair<const char*, const char*> series[] = {{"norm_plus", "#c0392b"}, {"norm_minus", "#2c6fbb"}};
    for (int k = 0; k < 2; ++k) {
        std::string pts;
        for (const auto& r : rows) {
            if (!pts.empty()) pts += " ";
            pts += f(px(r.step)) + "," + f(py(k == 0 ? r.norm_plus : r.norm_minus));
        }
        s += std::string("<polyline class=\"") + series[k].first + "\" fill=\"none\" stroke=\"" + series[k].second +
             "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
        s += "<text x=\"" + f(L + pw - 90) + "\" y=\"" + f(T + 14 + 16 * k) + "\" font-family=\"sans-serif\" " +
             "font-size=\"12\" fill=\"" + series[k].second + "\">" + series[k].first + "</text>\n";
    }
    if (degenerate)
        s += "<text class=\"degenerate\" x=\"" + f(L + pw / 2) + "\" y=\"" + f(T + ph / 2) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">degenerate: every norm is zero</text>\n";
    s += "</svg>\n";
    return s;
}

// A, K, k0, k, eigenvalues and p0 (null when A is not hyperbolic).
inline nlohmann::json constants_report(const SemidirectPresentation& p, const P0Options& opt) {
    const auto c = compute_constants(p);
    nlohmann::json j = constants_json(p, c);
    const Matrix A = to_real(c.A);
    const auto h = is_hyperbolic(c.A);
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& l : eigenvalues(A)) ev.push_back({l.real(), l.imag()});
    j["eigenvalues"] = ev;
    j["hyperbolic"] = h.hyperbolic;
    j["spectral_margin"] = h.margin;
    j["p0"] = nullptr;
    if (h.hyperbolic) {
        auto s = invariant_splitting(A);
        j["p0"] = compute_p0(s, opt);
    }
    return j;
}

inline nlohmann::json splitting_report(const SemidirectPresentation& p, const P0Options& opt) {
    const IntMatrix Ai = compute_constants(p).A;
    const Matrix A = to_real(Ai);
    const auto h = is_hyperbolic(Ai);
    if (!h.hyperbolic) {
        nlohmann::json ev = nlohmann::json::array();
        for (const auto& l : eigenvalues(A)) ev.push_back({l.real(), l.imag()});
        return {{"hyperbolic", false}, {"eigenvalues", ev}, {"margin", h.margin}};
    }
    auto s = invariant_splitting(A);
    compute_p0(s, opt);
    auto j = splitting_json(s);
    j["hyperbolic"] = true;
    return j;
}

// The validated config with every default filled in. output.dir is left out
// so that the same run written to two places hashes the same.
inline nlohmann::json config_echo(const ExperimentConfig& cfg) {
    auto j = cfg.json();
    j["output"].erase("dir");
    return j;
}

struct RunResult {
    std::filesystem::path dir;
    std::vector<std::string> lines;  // human-readable summary
};

inline RunResult run_constants(const ExperimentConfig& cfg) {
    ArtifactWriter w(cfg.output_dir());
    w.write_json("config.json", config_echo(cfg));
    const auto j = constants_report(cfg.presentation(), cfg.certify_params().p0);
    w.write_json("constants.json", j);
    w.finish();
    return {w.dir(),
            {"A = " + j.at("A").dump(), "K = " + j.at("K").dump() + ", k0 = " + j.at("k0").dump() + ", k = " +
                                            j.at("k").dump() + ", p0 = " + j.at("p0").dump()}};
}

inline RunResult run_splitting(const ExperimentConfig& cfg) {
    ArtifactWriter w(cfg.output_dir());
    w.write_json("config.json", config_echo(cfg));
    const auto j = splitting_report(cfg.presentation(), cfg.certify_params().p0);
    w.write_json("splitting.json", j);
    w.finish();
    std::vector<std::string> lines{"hyperbolic: " + j.at("hyperbolic").dump()};
    if (j.at("hyperbolic").get<bool>())
        lines.push_back("dim E+ = " + j.at("dim_E_plus").dump() + ", dim E- = " + j.at("dim_E_minus").dump() +
                        ", p0 = " + j.at("p0").dump());
    return {w.dir(), lines};
}

namespace detail {

// Certificate, CSV trace and chart for one tuple, under `prefix`.
inline Certificate write_certificate(ArtifactWriter& w, const std::string& prefix, const RepTuple& rep,
                                     const CertifyParams& params, bool plots) {
    auto rj = rep.to_json();
    rj["distance_to_trivial"] = distance_to_trivial(rep);
    w.write_json(prefix + "rep.json", rj);
    const Certificate c = certify(rep, params);
    w.write_json(prefix + "certificate.json", c.to_json());
    const std::string csv = orbit_csv(c);
    w.write(prefix + "orbit.csv", csv);
    if (plots && c.trace.orbit.size() >= 2) w.write(prefix + "orbit.svg", emit_plot(csv));
    return c;
}

inline std::string verdict_line(const Certificate& c) {
    return "verdict: " + to_string(c.verdict) +
           (c.binding_constraint.empty() ? "" : " (binding constraint: " + c.binding_constraint + ")");
}

}  // namespace detail

inline nlohmann::json pingpong_report(const PingPongAction& a, int grid) {
    nlohmann::json sup = nlohmann::json::object();
    double worst = 0.0;
    for (std::size_t g = 0; g < a.generators().size(); ++g) {
        const double s = a.sup_displacement(static_cast<int>(g), grid);
        sup[a.generators()[g]] = s;
        worst = std::max(worst, s);
    }
    auto j = a.to_json();
    j["certificate"] = a.certify().to_json();
    j["sup_displacement"] = sup;
    j["max_sup_displacement"] = worst;
    j["within_delta"] = worst <= a.delta();
    return j;
}

// constants -> splitting -> action -> certify, all written to the output directory.
inline RunResult run_certify(const ExperimentConfig& cfg) {
    const auto action = cfg.build();
    ArtifactWriter w(cfg.output_dir());
    const auto params = cfg.certify_params();
    w.write_json("config.json", config_echo(cfg));
    w.write_json("constants.json", constants_report(cfg.presentation(), params.p0));
    w.write_json("splitting.json", splitting_report(cfg.presentation(), params.p0));
    RunResult out{w.dir(), {}};
    if (const auto* pp = std::get_if<PingPongAction>(&action)) {
        const auto j = pingpong_report(*pp, params.grid_size);
        w.write_json("pingpong.json", j);
        out.lines.push_back("ping-pong faithful: " + j.at("certificate").at("holds").dump() +
                            ", max sup displacement = " + j.at("max_sup_displacement").dump() +
                            " (C^0 action, no rigidity certificate)");
    } else {
        const auto c = detail::write_certificate(w, "", std::get<RepTuple>(action), params, cfg.plots());
        out.lines.push_back(detail::verdict_line(c));
    }
    w.finish();
    return out;
}

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    int points = 0;
};

// Least squares of log10(y) against log10(x) over the pairs with y > 0.
inline std::optional<SlopeFit> loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
        if (x[i] > 0.0 && y[i] > 0.0) {
            lx.push_back(std::log10(x[i]));
            ly.push_back(std::log10(y[i]));
        }
    if (lx.size() < 2) return std::nullopt;
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i] / n;
        my += ly[i] / n;
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) return std::nullopt;
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.points = static_cast<int>(lx.size());
    return f;
}

// Worst linearization residual over the words psi(s), s in S0, at x.
inline LinearizationResidual psi_linearization(const RepTuple& r, double x) {
    LinearizationResidual worst;
    const auto& p = r.presentation();
    for (std::size_t j = 0; j < p.d(); ++j) {
        const auto lr = linearization_residual(r, p.psi()[j], x);
        worst.residual = std::max(worst.residual, lr.residual);
        worst.reference = std::max(worst.reference, lr.reference);
        worst.eta_hat = std::max(worst.eta_hat, lr.eta_hat);
        worst.degenerate = worst.degenerate || lr.degenerate;
    }
    return worst;
}

inline RunResult run_sweep(const ExperimentConfig& cfg) {
    const auto eps = cfg.eps_list();
    if (eps.empty()) throw ConfigError("/analysis/eps_list", "sweep needs at least one eps");
    for (std::size_t i = 1; i < eps.size(); ++i)
        if (!(eps[i] < eps[i - 1]))
            throw ConfigError("/analysis/eps_list/" + std::to_string(i), "eps list must be strictly decreasing");
    const auto& action = cfg.action();
    if (!action.contains("gallery")) throw ConfigError("/action", "sweep needs a gallery family, not explicit images");
    const auto family = action.at("gallery").get<std::string>();
    if (family != "commuting_flow" && family != "bump")
        throw ConfigError("/action/gallery", "sweep needs a scalable family (commuting_flow or bump), got '" + family + "'");

    std::vector<RepTuple> reps;
    for (const double e : eps) reps.push_back(std::get<RepTuple>(cfg.build(e)));

    ArtifactWriter w(cfg.output_dir());
    const auto params = cfg.certify_params();
    w.write_json("config.json", config_echo(cfg));
    w.write_json("constants.json", constants_report(cfg.presentation(), params.p0));
    std::string csv = "eps,rep_distance,defect,verdict,max_eta_hat,residual\n";
    nlohmann::json rows = nlohmann::json::array();
    std::vector<double> residuals;
    RunResult out{w.dir(), {}};
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const auto& rep = reps[i];
        const auto c = detail::write_certificate(w, "eps_" + std::to_string(i) + "/", rep, params, cfg.plots());
        const double dist = distance_to_trivial(rep);
        const auto lr = psi_linearization(rep, cfg.probe_x());
        residuals.push_back(lr.residual);
        csv += detail::fmt_num(eps[i]) + "," + detail::fmt_num(dist) + "," + detail::fmt_num(rep.defect().aggregate) +
               "," + to_string(c.verdict) + "," + detail::fmt_num(lr.eta_hat) + "," + detail::fmt_num(lr.residual) + "\n";
        rows.push_back({{"eps", eps[i]},
                        {"rep_distance", dist},
                        {"defect", rep.defect().aggregate},
                        {"verdict", to_string(c.verdict)},
                        {"binding_constraint", c.binding_constraint},
                        {"max_eta_hat", lr.eta_hat},
                        {"residual", lr.residual},
                        {"certificate", "eps_" + std::to_string(i) + "/certificate.json"}});
        out.lines.push_back("eps = " + detail::fmt_num(eps[i]) + ": " + detail::verdict_line(c));
    }
    w.write("sweep.csv", csv);
    nlohmann::json fit;
    if (const auto f = loglog_fit(eps, residuals)) {
        fit = {{"slope", f->slope}, {"intercept", f->intercept}, {"points", f->points}};
        out.lines.push_back("log-log slope of residual vs eps: " + detail::fmt_num(f->slope, "%.4f"));
    } else {
        fit = {{"slope", nullptr}, {"reason", "needs two eps values with a positive residual"}};
        out.lines.push_back("log-log slope of residual vs eps: not enough points");
    }
    w.write_json("sweep.json", {{"family", family}, {"probe_x", cfg.probe_x()}, {"rows", rows}, {"fit", fit}});
    w.finish();
    return out;
}

struct ReplayEntry {
    std::string path;
    bool identical = false;
    std::string detail;
};

struct ReplayReport {
    std::vector<ReplayEntry> certificates;
    std::vector<std::string> manifest_mismatches;
    bool manifest_present = false;

    bool ok() const {
        if (certificates.empty() || !manifest_mismatches.empty()) return false;
        return std::all_of(certificates.begin(), certificates.end(), [](const auto& e) { return e.identical; });
    }
};

// Re-derives every certificate.json below `dir` and checks manifest hashes.
inline ReplayReport replay_directory(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw Error("reporting", "'" + dir.string() + "' is not a directory");
    ReplayReport rep;
    std::vector<fs::path> certs;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().filename() == "certificate.json") certs.push_back(e.path());
    std::sort(certs.begin(), certs.end());
    for (const auto& p : certs) {
        ReplayEntry e;
        e.path = fs::relative(p, dir).generic_string();
        try {
            const auto r = replay_certificate(read_text_file(p));
            e.identical = r.identical;
            if (!r.identical) e.detail = "re-derived certificate differs";
        } catch (const std::exception& ex) {
            e.detail = ex.what();
        }
        rep.certificates.push_back(e);
    }
    const auto manifest = dir / "manifest.json";
    if (fs::exists(manifest)) {
        rep.manifest_present = true;
        const auto j = nlohmann::json::parse(read_text_file(manifest));
        for (const auto& f : j.at("files")) {
            const auto rel = f.at("path").get<std::string>();
            const auto p = dir / rel;
            if (!fs::exists(p) || sha256_hex(read_text_file(p)) != f.at("sha256").get<std::string>())
                rep.manifest_mismatches.push_back(rel);
        }
    }
    return rep;
}

}  // namespace rigidity_lab

#endif  // RIGIDITY_LAB_REPORTING_HPP
