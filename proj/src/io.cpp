#include "myl/io.hpp"

#include "myl/symbolic.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace myl {

// ---------------------------------------------------------------------------
// MYL1
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {0x4D, 0x59, 0x4C, 0x31};

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw error("MYL1: truncated file");
    return v;
}

}  // namespace

void write_myl(const std::string& path, const MylArray& a) {
    std::ofstream os(path, std::ios::binary);
    require(bool(os), "MYL1: cannot open " + path + " for writing");
    os.write(kMagic, 4);
    put<uint32_t>(os, uint32_t(a.dims.size()));
    size_t count = 1;
    for (uint32_t d : a.dims) {
        put<uint32_t>(os, d);
        count *= d;
    }
    put<uint32_t>(os, a.block_tag);
    if (a.block_tag != 0) {
        for (double v : a.header_f64) put<double>(os, v);
        for (uint32_t v : a.header_u32) put<uint32_t>(os, v);
    }
    require(a.data.size() == count, "MYL1: payload size does not match dims");
    for (const cplx& z : a.data) {
        put<double>(os, z.real());
        put<double>(os, z.imag());
    }
    require(bool(os), "MYL1: write failed for " + path);
}

MylArray read_myl(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(bool(is), "MYL1: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    require(bool(is) && std::memcmp(magic, kMagic, 4) == 0, "MYL1: bad magic in " + path);
    MylArray a;
    const uint32_t rank = get<uint32_t>(is);
    require(rank >= 1 && rank <= 4, "MYL1: unsupported rank");
    size_t count = 1;
    for (uint32_t r = 0; r < rank; ++r) {
        a.dims.push_back(get<uint32_t>(is));
        count *= a.dims.back();
    }
    require(count > 0 && count < (1u << 28), "MYL1: unreasonable dims");
    a.block_tag = get<uint32_t>(is);
    require(a.block_tag <= 2, "MYL1: unknown header block tag");
    if (a.block_tag != 0) {
        for (double& v : a.header_f64) v = get<double>(is);
        for (uint32_t& v : a.header_u32) v = get<uint32_t>(is);
    }
    a.data.resize(count);
    for (cplx& z : a.data) {
        const double re = get<double>(is);
        const double im = get<double>(is);
        z = cplx(re, im);
    }
    return a;
}

MylArray to_myl(const GridFunction& f) {
    MylArray a;
    a.dims = {uint32_t(f.grid.n_q), uint32_t(f.grid.n_p)};
    a.block_tag = 1;
    a.header_f64[0] = f.grid.q_min;
    a.header_f64[1] = f.grid.q_max;
    a.header_f64[2] = f.grid.p_min;
    a.header_f64[3] = f.grid.p_max;
    a.header_u32[0] = uint32_t(f.grid.n_q);
    a.header_u32[1] = uint32_t(f.grid.n_p);
    a.data = f.v;
    return a;
}

MylArray to_myl(const OperatorMatrix& m) {
    MylArray a;
    a.dims = {uint32_t(m.basis.n_x), uint32_t(m.basis.n_x)};
    a.block_tag = 2;
    a.header_f64[0] = m.basis.x_min;
    a.header_f64[1] = m.basis.x_max;
    a.header_u32[0] = uint32_t(m.basis.n_x);
    a.data = m.m;
    return a;
}

GridFunction grid_function_from_myl(const MylArray& a) {
    require(a.block_tag == 1, "MYL1: not a phase-grid array");
    require(a.dims.size() == 2, "MYL1: grid function must have rank 2");
    PhaseGrid g = make_grid(a.header_f64[0], a.header_f64[1], a.header_u32[0], a.header_f64[2],
                            a.header_f64[3], a.header_u32[1]);
    require(a.dims[0] == g.n_q && a.dims[1] == g.n_p, "MYL1: dims disagree with grid block");
    GridFunction f(g);
    f.v = a.data;
    return f;
}

OperatorMatrix operator_from_myl(const MylArray& a) {
    require(a.block_tag == 2, "MYL1: not a basis array");
    require(a.dims.size() == 2 && a.dims[0] == a.dims[1], "MYL1: operator must be square");
    PositionBasis b = make_basis(a.header_f64[0], a.header_f64[1], a.header_u32[0]);
    require(a.dims[0] == b.n_x, "MYL1: dims disagree with basis block");
    OperatorMatrix m(b);
    m.m = a.data;
    return m;
}

void write_myl(const std::string& path, const GridFunction& f) { write_myl(path, to_myl(f)); }
void write_myl(const std::string& path, const OperatorMatrix& m) { write_myl(path, to_myl(m)); }

void write_csv(const std::string& path, const GridFunction& f) {
    std::ofstream os(path);
    require(bool(os), "csv: cannot open " + path);
    char buf[96];
    for (size_t j = 0; j < f.grid.n_q; ++j) {
        for (size_t k = 0; k < f.grid.n_p; ++k) {
            const cplx z = f.at(j, k);
            std::snprintf(buf, sizeof buf, "%.17g%+.17gj", z.real(), z.imag());
            os << buf << (k + 1 < f.grid.n_p ? "," : "");
        }
        os << "\n";
    }
}

void write_audit_csv(const std::string& path, const std::vector<AuditRow>& rows) {
    std::ofstream os(path);
    require(bool(os), "csv: cannot open " + path);
    os << "t,trace_drift,imag_leak\n";
    char buf[96];
    for (const AuditRow& r : rows) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", r.t, r.trace_drift, r.imag_leak);
        os << buf;
    }
}

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> keys) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : keys)
            if (it.key() == k) known = true;
        if (!known) throw error("config: unknown key '" + where + "." + it.key() + "'");
    }
}

double num_or(const json& obj, const std::string& where, const char* key, double dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number()) throw error("config: '" + where + "." + key + "' must be a number");
    return obj[key].get<double>();
}

double num_required(const json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) throw error("config: missing field '" + where + "." + key + "'");
    if (!obj[key].is_number()) throw error("config: '" + where + "." + key + "' must be a number");
    return obj[key].get<double>();
}

size_t count_or(const json& obj, const std::string& where, const char* key, size_t dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number_unsigned())
        throw error("config: '" + where + "." + key + "' must be a positive integer");
    return obj[key].get<size_t>();
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const std::exception& e) {
        throw error(std::string("config: ") + e.what());
    }
    require(root.is_object(), "config: top level must be an object");
    reject_unknown(root, "", {"grid", "basis", "weight", "model"});

    RunConfig cfg;

    if (root.contains("grid")) {
        const json& g = root["grid"];
        reject_unknown(g, "grid",
                       {"q_min", "q_max", "n_q", "p_min", "p_max", "n_p", "taper_radius",
                        "taper_width"});
        cfg.grid.grid = make_grid(num_or(g, "grid", "q_min", -8), num_or(g, "grid", "q_max", 8),
                                  count_or(g, "grid", "n_q", 64), num_or(g, "grid", "p_min", -8),
                                  num_or(g, "grid", "p_max", 8), count_or(g, "grid", "n_p", 64));
        cfg.grid.taper_radius = num_or(g, "grid", "taper_radius", 0);
        cfg.grid.taper_width = num_or(g, "grid", "taper_width", 0);
    }
    if (root.contains("basis")) {
        const json& b = root["basis"];
        reject_unknown(b, "basis", {"x_min", "x_max", "n_x"});
        cfg.basis = make_basis(num_or(b, "basis", "x_min", cfg.grid.grid.q_min),
                               num_or(b, "basis", "x_max", cfg.grid.grid.q_max),
                               count_or(b, "basis", "n_x", 2 * cfg.grid.grid.n_q));
    } else {
        cfg.basis = make_basis(cfg.grid.grid.q_min, cfg.grid.grid.q_max, 2 * cfg.grid.grid.n_q);
    }

    cfg.weight = weyl_weight(1.0);
    if (root.contains("weight")) {
        const json& w = root["weight"];
        reject_unknown(w, "weight",
                       {"family", "lambda_re", "lambda_im", "kappa", "hbar", "hbar_scaling"});
        const std::string family = w.contains("family") ? w["family"].get<std::string>() : "weyl";
        const double hbar = num_or(w, "weight", "hbar", 1.0);
        require(hbar > 0, "config: weight.hbar must be positive");
        HbarScaling scaling = HbarScaling::fixed;
        if (w.contains("hbar_scaling")) {
            const std::string s = w["hbar_scaling"].get<std::string>();
            if (s == "linear")
                scaling = HbarScaling::linear;
            else if (s != "fixed")
                throw error("config: weight.hbar_scaling must be 'fixed' or 'linear'");
        }
        if (family == "weyl") {
            cfg.weight = weyl_weight(hbar);
        } else if (family == "lambda") {
            const double lre = num_required(w, "weight", "lambda_re");
            const double lim = num_or(w, "weight", "lambda_im", 0.0);
            cfg.weight = lambda_weight(cplx(lre, lim), hbar, scaling);
        } else if (family == "gauss") {
            cfg.weight = gauss_weight(num_required(w, "weight", "kappa"), hbar, scaling);
        } else if (family == "product") {
            const double lre = num_required(w, "weight", "lambda_re");
            const double lim = num_or(w, "weight", "lambda_im", 0.0);
            cfg.weight =
                product_weight(cplx(lre, lim), num_required(w, "weight", "kappa"), hbar, scaling);
        } else {
            throw error("config: weight.family must be weyl|lambda|gauss|product");
        }
    }

    if (root.contains("model")) {
        const json& m = root["model"];
        reject_unknown(m, "model", {"hamiltonian", "jumps", "lamb_shift", "lambda_coupling"});
        ModelConfig mc;
        if (!m.contains("hamiltonian"))
            throw error("config: missing field 'model.hamiltonian'");
        mc.hamiltonian = m["hamiltonian"].get<std::string>();
        if (m.contains("jumps")) {
            require(m["jumps"].is_array(), "config: model.jumps must be an array");
            for (const auto& j : m["jumps"]) mc.jumps.push_back(j.get<std::string>());
        }
        if (m.contains("lamb_shift")) mc.lamb_shift = m["lamb_shift"].get<std::string>();
        mc.lambda_coupling = num_or(m, "model", "lambda_coupling", 1.0);
        cfg.model = std::move(mc);
    }

    cfg.digest = root.dump();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    require(bool(is), "config: cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

GridFunction sample_model_symbol(const std::string& poly_text, const GridConfig& gc,
                                 double hbar) {
    const sym::CPolynomial poly = sym::parse_poly(poly_text);
    return sample_tapered(
        gc.grid, [&](double q, double p) { return poly.eval(q, p, hbar); }, gc.taper_radius,
        gc.taper_width);
}

LindbladModel model_from_config(const RunConfig& cfg) {
    require(cfg.model.has_value(), "config: a 'model' block is required for this command");
    const ModelConfig& mc = *cfg.model;
    LindbladModel model;
    model.w = cfg.weight;
    model.lambda_coupling = mc.lambda_coupling;
    model.hamiltonian = sample_model_symbol(mc.hamiltonian, cfg.grid, cfg.weight.hbar);
    for (const std::string& j : mc.jumps)
        model.jumps.push_back(sample_model_symbol(j, cfg.grid, cfg.weight.hbar));
    if (!mc.lamb_shift.empty()) {
        model.lamb_shift = sample_model_symbol(mc.lamb_shift, cfg.grid, cfg.weight.hbar);
        model.has_lamb_shift = true;
    }
    return model;
}

}  // namespace myl
