#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rkha/errors.hpp"
#include "rkha/lattice.hpp"
#include "rkha/sampled_kernel.hpp"
#include "rkha/spectral.hpp"
#include "rkha/weights.hpp"

namespace rkha::io {

// ---------------------------------------------------------------------------
// Deterministic JSON emission: insertion order preserved, every double printed
// with 17 significant digits so emitted values round-trip exactly.

class jwriter {
public:
    jwriter& begin_obj() {
        sep();
        out_ += "{";
        first_.push_back(true);
        return *this;
    }
    jwriter& end_obj() {
        out_ += "}";
        first_.pop_back();
        return *this;
    }
    jwriter& begin_arr() {
        sep();
        out_ += "[";
        first_.push_back(true);
        return *this;
    }
    jwriter& end_arr() {
        out_ += "]";
        first_.pop_back();
        return *this;
    }

    jwriter& key(const std::string& k) {
        sep();
        out_ += quote(k);
        out_ += ":";
        after_key_ = true;
        return *this;
    }

    jwriter& value(double x) { return std::isfinite(x) ? raw(fmt17(x)) : raw("null"); }
    jwriter& value(int x) { return raw(std::to_string(x)); }
    jwriter& value(std::int64_t x) { return raw(std::to_string(x)); }
    jwriter& value(std::uint64_t x) { return raw(std::to_string(x)); }
    jwriter& value(bool b) { return raw(b ? "true" : "false"); }
    jwriter& value(const char* s) { return raw(quote(s)); }
    jwriter& value(const std::string& s) { return raw(quote(s)); }
    jwriter& null() { return raw("null"); }

    const std::string& str() const { return out_; }

    static std::string quote(const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            switch (c) {
                case '"': q += "\\\""; break;
                case '\\': q += "\\\\"; break;
                case '\n': q += "\\n"; break;
                case '\r': q += "\\r"; break;
                case '\t': q += "\\t"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        q += buf;
                    } else {
                        q += c;
                    }
            }
        }
        q += "\"";
        return q;
    }

private:
    jwriter& raw(const std::string& s) {
        sep();
        out_ += s;
        return *this;
    }

    // separator before any item: a value right after "key": needs none; the
    // first item of a container needs none; everything else takes a comma
    void sep() {
        if (after_key_) {
            after_key_ = false;
            return;
        }
        if (!first_.empty()) {
            if (!first_.back()) out_ += ",";
            first_.back() = false;
        }
    }

    std::string out_;
    std::vector<bool> first_;
    bool after_key_ = false;
};

// ---------------------------------------------------------------------------
// Low-level headered binary files: one JSON header line, then little-endian
// f64 payload (complex values interleaved re/im).

namespace detail {

inline std::uint64_t to_le(std::uint64_t x) {
    if constexpr (std::endian::native == std::endian::little) return x;
    std::uint64_t y = 0;
    for (int i = 0; i < 8; ++i) y = (y << 8) | ((x >> (8 * i)) & 0xff);
    return y;
}

inline void put_f64(std::string& buf, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    bits = to_le(bits);
    char b[8];
    std::memcpy(b, &bits, 8);
    buf.append(b, 8);
}

inline double get_f64(const char* p) {
    std::uint64_t bits;
    std::memcpy(&bits, p, 8);
    bits = to_le(bits);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

} // namespace detail

inline void write_headered(const std::string& path, const std::string& header_json,
                           const std::vector<cplx>& payload) {
    std::string buf = header_json;
    buf += '\n';
    for (const auto& z : payload) {
        detail::put_f64(buf, z.real());
        detail::put_f64(buf, z.imag());
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    require(bool(f), errc::parse_error, "cannot open '" + path + "' for writing");
    f.write(buf.data(), std::streamsize(buf.size()));
    require(bool(f), errc::parse_error, "write failed for '" + path + "'");
}

struct headered_file {
    nlohmann::json header;
    std::vector<cplx> payload;
};

inline headered_file read_headered(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require(bool(f), errc::parse_error, "cannot open '" + path + "'");
    std::string line;
    require(bool(std::getline(f, line)), errc::parse_error, "missing header line in '" + path + "'");
    headered_file out;
    try {
        out.header = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
        fail(errc::parse_error, "bad header in '" + path + "': " + e.what());
    }
    std::string rest((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    require(rest.size() % 16 == 0, errc::parse_error, "payload of '" + path + "' is not complex f64");
    out.payload.resize(rest.size() / 16);
    for (std::size_t i = 0; i < out.payload.size(); ++i)
        out.payload[i] = cplx(detail::get_f64(rest.data() + 16 * i),
                              detail::get_f64(rest.data() + 16 * i + 8));
    return out;
}

// ---------------------------------------------------------------------------
// Lattice arrays

inline void lattice_header(jwriter& w, const dual_lattice& lat) {
    w.key("kind").value(lat.kind == lattice_kind::integer_lattice ? "Zd" : "Rd");
    w.key("d").value(lat.dim);
    w.key("h").value(lat.step);
    w.key("R").value(lat.radius);
}

inline dual_lattice parse_lattice_header(const nlohmann::json& h) {
    require(h.contains("kind") && h.contains("d") && h.contains("R"), errc::parse_error,
            "lattice header needs kind, d, R");
    const std::string kind = h.at("kind").get<std::string>();
    const int d = h.at("d").get<int>();
    const int radius = h.at("R").get<int>();
    if (kind == "Zd") return make_integer_lattice(d, radius);
    require(kind == "Rd", errc::parse_error, "kind must be Zd or Rd");
    require(h.contains("h"), errc::parse_error, "Rd lattice header needs h");
    return make_scaled_grid(d, h.at("h").get<double>(), radius);
}

inline void write_lattice_array(const std::string& path, const lattice_array& a) {
    jwriter w;
    w.begin_obj();
    lattice_header(w, a.lattice);
    w.end_obj();
    write_headered(path, w.str(), a.values);
}

inline lattice_array read_lattice_array(const std::string& path) {
    auto hf = read_headered(path);
    dual_lattice lat = parse_lattice_header(hf.header);
    require(hf.payload.size() == lat.node_count(), errc::parse_error,
            "payload size does not match lattice in '" + path + "'");
    return lattice_array(lat, std::move(hf.payload));
}

// ---------------------------------------------------------------------------
// Weight specs
//
//   {"group":"Zd"|"Rd", "d":1, "h":0.015625, "R":512,
//    "family":{"name":"subexp","tau":1.0,"p":0.5}}
// or, replacing "family", "table":"path/to/lattice-array" (positive reals) or
// "table_inline":[...] (row-major values, used when embedding in headers).

inline void weight_spec(jwriter& w, const weight& wt) {
    const dual_lattice& lat = wt.lattice();
    w.begin_obj();
    w.key("group").value(lat.kind == lattice_kind::integer_lattice ? "Zd" : "Rd");
    w.key("d").value(lat.dim);
    w.key("h").value(lat.step);
    w.key("R").value(lat.radius);
    if (wt.is_family()) {
        w.key("family").begin_obj();
        w.key("name").value("subexp");
        w.key("tau").value(wt.family()->tau);
        w.key("p").value(wt.family()->p);
        w.end_obj();
    } else {
        w.key("table_inline").begin_arr();
        auto tab = wt.tabulate(lat);
        for (double v : tab) w.value(v);
        w.end_arr();
    }
    w.end_obj();
}

inline std::string weight_spec_json(const weight& wt) {
    jwriter w;
    weight_spec(w, wt);
    return w.str();
}

inline weight parse_weight_spec(const nlohmann::json& j, const std::string& base_dir = "") {
    require(j.contains("group") && j.contains("d") && j.contains("R"), errc::parse_error,
            "weight spec needs group, d, R");
    const std::string group = j.at("group").get<std::string>();
    const int d = j.at("d").get<int>();
    const int radius = j.at("R").get<int>();
    dual_lattice lat;
    if (group == "Zd") {
        lat = make_integer_lattice(d, radius);
    } else {
        require(group == "Rd", errc::parse_error, "group must be Zd or Rd");
        require(j.contains("h"), errc::parse_error, "Rd weight spec needs h");
        lat = make_scaled_grid(d, j.at("h").get<double>(), radius);
    }
    if (j.contains("family")) {
        const auto& fam = j.at("family");
        require(fam.at("name").get<std::string>() == "subexp", errc::parse_error,
                "unknown weight family");
        return weight::subexp(lat, fam.at("tau").get<double>(), fam.at("p").get<double>());
    }
    if (j.contains("table_inline")) {
        std::vector<double> tab = j.at("table_inline").get<std::vector<double>>();
        return weight::from_table(lat, std::move(tab));
    }
    require(j.contains("table"), errc::parse_error, "weight spec needs family or table");
    std::filesystem::path p = j.at("table").get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    auto arr = read_lattice_array(p.string());
    require(arr.lattice == lat || arr.lattice.same_geometry(lat), errc::parse_error,
            "table lattice does not match weight spec");
    std::vector<double> tab(arr.values.size());
    for (std::size_t i = 0; i < tab.size(); ++i) {
        require(std::fabs(arr.values[i].imag()) <= 1e-12 * std::fabs(arr.values[i].real()),
                errc::non_positive_weight, "weight table entries must be real");
        tab[i] = arr.values[i].real();
    }
    return weight::from_table(arr.lattice, std::move(tab));
}

// Accepts a file path or an inline JSON object string.
inline weight load_weight_spec(const std::string& path_or_inline) {
    std::string text = path_or_inline;
    std::string base;
    if (!path_or_inline.empty() && path_or_inline.front() != '{') {
        std::ifstream f(path_or_inline);
        require(bool(f), errc::parse_error, "cannot open weight spec '" + path_or_inline + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        text = ss.str();
        base = std::filesystem::path(path_or_inline).parent_path().string();
    }
    try {
        return parse_weight_spec(nlohmann::json::parse(text), base);
    } catch (const error&) {
        throw;
    } catch (const std::exception& e) {
        fail(errc::parse_error, std::string("bad weight spec: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Spectral functions: lattice-array format plus the weight spec in the header.

inline void write_spectral_fn(const std::string& path, const spectral_fn& f) {
    jwriter w;
    w.begin_obj();
    lattice_header(w, f.lattice());
    w.key("weight");
    weight_spec(w, f.w);
    w.end_obj();
    write_headered(path, w.str(), f.coeffs.values);
}

inline spectral_fn read_spectral_fn(const std::string& path) {
    auto hf = read_headered(path);
    dual_lattice lat = parse_lattice_header(hf.header);
    require(hf.header.contains("weight"), errc::parse_error,
            "spectral function file lacks a weight spec");
    weight wt = parse_weight_spec(hf.header.at("weight"),
                                  std::filesystem::path(path).parent_path().string());
    require(hf.payload.size() == lat.node_count(), errc::parse_error,
            "payload size does not match lattice in '" + path + "'");
    require(lat.same_geometry(wt.lattice()), errc::parse_error,
            "coefficient lattice and weight lattice disagree");
    return spectral_fn{std::move(wt), lattice_array(lat, std::move(hf.payload))};
}

// ---------------------------------------------------------------------------
// Sampled kernels: {"points":[...]} header plus the dense gram payload.

inline void write_kernel(const std::string& path, const sampled_kernel& k,
                         const std::vector<std::string>& empty_fiber_points = {}) {
    jwriter w;
    w.begin_obj();
    w.key("points").begin_arr();
    for (const auto& p : k.points) w.value(p);
    w.end_arr();
    if (!empty_fiber_points.empty()) {
        // pushout outputs retain zero rows for points with no preimage; the
        // header names them so downstream tools can drop them if they prefer
        w.key("empty_fibers").begin_arr();
        for (const auto& p : empty_fiber_points) w.value(p);
        w.end_arr();
    }
    w.end_obj();
    write_headered(path, w.str(), k.gram.data());
}

inline sampled_kernel read_kernel(const std::string& path) {
    auto hf = read_headered(path);
    require(hf.header.contains("points"), errc::parse_error, "kernel file lacks points");
    std::vector<std::string> points = hf.header.at("points").get<std::vector<std::string>>();
    const std::size_t n = points.size();
    require(hf.payload.size() == n * n, errc::parse_error, "gram payload size mismatch");
    cmatrix g(n, n);
    g.data() = std::move(hf.payload);
    return make_kernel(std::move(points), std::move(g));
}

// phi maps as JSON objects {"s":"x", ...}; insertion order preserved.
inline label_map read_label_map(const std::string& path) {
    std::ifstream f(path);
    require(bool(f), errc::parse_error, "cannot open map '" + path + "'");
    nlohmann::ordered_json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        fail(errc::parse_error, std::string("bad map json: ") + e.what());
    }
    require(j.is_object(), errc::parse_error, "map must be a JSON object");
    label_map out;
    for (auto it = j.begin(); it != j.end(); ++it)
        out.emplace_back(it.key(), it.value().get<std::string>());
    return out;
}

// ---------------------------------------------------------------------------
// Reports

inline void probe_array(jwriter& w, const std::vector<int>& probe) {
    w.begin_arr();
    for (int k : probe) w.value(k);
    w.end_arr();
}

inline std::string weight_report_json(const weight& wt, const weight_report& rep) {
    jwriter w;
    w.begin_obj();
    w.key("weight");
    weight_spec(w, wt);
    // asymmetric tables are admitted but flagged: the GRS theorem assumes
    // lambda(-gamma) = lambda(gamma)
    w.key("symmetric").value(wt.symmetric());

    w.key("subconvolutivity").begin_obj();
    if (rep.subconv == subconv_verdict::unbounded) {
        w.key("C").null();
        w.key("unbounded").value(true);
    } else {
        w.key("C").value(rep.c_subconv);
        w.key("unbounded").value(false);
    }
    w.key("certified").value(rep.subconv == subconv_verdict::certified);
    w.key("verdict").value(subconv_verdict_name(rep.subconv));
    w.key("argmax");
    probe_array(w, rep.argmax);
    w.key("convergence").begin_arr();
    for (const auto& [r, c] : rep.c_convergence) {
        w.begin_arr();
        w.value(r);
        w.value(c);
        w.end_arr();
    }
    w.end_arr();
    w.key("stabilization_tol").value(rep.stabilization_tol);
    w.key("growth_threshold").value(rep.growth_threshold);
    w.end_obj();

    w.key("grs").begin_obj();
    w.key("verdict").value(verdict_name(rep.grs.combined));
    w.key("evidence").value(evidence_name(rep.grs.evidence));
    w.key("n_max").value(rep.grs.n_max);
    w.key("tol").value(rep.grs.tol);
    w.key("probes").begin_arr();
    for (const auto& p : rep.grs.probes) {
        w.begin_obj();
        w.key("gamma");
        probe_array(w, p.probe);
        w.key("verdict").value(verdict_name(p.v));
        w.key("sequence").begin_arr();
        for (double a : p.sequence) w.value(a);
        w.end_arr();
        w.end_obj();
    }
    w.end_arr();
    w.end_obj();

    w.key("bd").begin_obj();
    w.key("verdict").value(verdict_name(rep.bd.combined));
    w.key("evidence").value(evidence_name(rep.bd.evidence));
    w.key("n_max").value(rep.bd.n_max);
    w.key("probes").begin_arr();
    for (const auto& p : rep.bd.probes) {
        w.begin_obj();
        w.key("gamma");
        probe_array(w, p.probe);
        w.key("verdict").value(verdict_name(p.v));
        if (std::isfinite(p.tail_bound))
            w.key("tail_bound").value(p.tail_bound);
        else
            w.key("tail_bound").null();
        w.key("partial_sums").begin_arr();
        for (double s : p.partial_sums) w.value(s);
        w.end_arr();
        w.end_obj();
    }
    w.end_arr();
    w.end_obj();

    w.end_obj();
    return w.str();
}

inline std::string probe_csv_label(const std::vector<int>& probe) {
    std::string s;
    for (std::size_t i = 0; i < probe.size(); ++i)
        s += (i ? ";" : "") + std::to_string(probe[i]);
    return s;
}

// CSV projection: section,probe,n,value
inline std::string weight_report_csv(const weight_report& rep) {
    std::string out = "section,probe,n,value\n";
    for (const auto& [r, c] : rep.c_convergence)
        out += "subconv_C,," + std::to_string(r) + "," + fmt17(c) + "\n";
    for (const auto& p : rep.grs.probes)
        for (std::size_t n = 0; n < p.sequence.size(); ++n)
            out += "grs," + probe_csv_label(p.probe) + "," + std::to_string(n + 1) + "," +
                   fmt17(p.sequence[n]) + "\n";
    for (const auto& p : rep.bd.probes)
        for (std::size_t n = 0; n < p.partial_sums.size(); ++n)
            out += "bd," + probe_csv_label(p.probe) + "," + std::to_string(n + 1) + "," +
                   fmt17(p.partial_sums[n]) + "\n";
    return out;
}

// CSV of kernel values, distances and kappa: table,i,j,re,im
inline std::string metric_csv(const metric_table& t, const cmatrix& gram) {
    std::string out = "table,i,j,re,im\n";
    const std::size_t n = t.kappa.size();
    for (std::size_t i = 0; i < n; ++i)
        out += "kappa," + std::to_string(i) + ",," + fmt17(t.kappa[i]) + ",0\n";
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out += "k," + std::to_string(i) + "," + std::to_string(j) + "," +
                   fmt17(gram(i, j).real()) + "," + fmt17(gram(i, j).imag()) + "\n";
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out += "d," + std::to_string(i) + "," + std::to_string(j) + "," +
                   fmt17(t.dist[i][j]) + ",0\n";
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    require(bool(f), errc::parse_error, "cannot open '" + path + "' for writing");
    f.write(text.data(), std::streamsize(text.size()));
    require(bool(f), errc::parse_error, "write failed for '" + path + "'");
}

inline std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    require(bool(f), errc::parse_error, "cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace rkha::io
