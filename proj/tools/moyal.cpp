// moyal: batch tool for generalized Weyl/Wigner transforms, star products on
// phase space, and Lindblad-type kinetic equations in phase-space form.

#include "myl/bipartite.hpp"
#include "myl/io.hpp"
#include "myl/kinetics.hpp"
#include "myl/symbolic.hpp"
#include "myl/transforms.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>

using namespace myl;

namespace {

void log_run_header(const RunConfig& cfg) {
    const size_t digest = std::hash<std::string>{}(cfg.digest);
    std::printf("# config digest %zx\n", digest);
    std::printf("# hbar %.17g  family %d  grid %zux%zu on (%g,%g)x(%g,%g)\n", cfg.weight.hbar,
                int(cfg.weight.family), cfg.grid.grid.n_q, cfg.grid.grid.n_p, cfg.grid.grid.q_min,
                cfg.grid.grid.q_max, cfg.grid.grid.p_min, cfg.grid.grid.p_max);
    std::printf("# audit tolerances: predicates 1e-12, boundary 1e-6, evolve audit 1e-6\n");
}

WeightFunction weight_from_flags(const std::string& family, double lre, double lim, double kappa,
                                 double hbar, const std::string& scaling) {
    HbarScaling sc = scaling == "linear" ? HbarScaling::linear : HbarScaling::fixed;
    if (family == "weyl") return weyl_weight(hbar);
    if (family == "lambda") return lambda_weight(cplx(lre, lim), hbar, sc);
    if (family == "gauss") return gauss_weight(kappa, hbar, sc);
    if (family == "product") return product_weight(cplx(lre, lim), kappa, hbar, sc);
    throw error("unknown family '" + family + "'");
}

GridFunction load_grid_function(const std::string& path) {
    return grid_function_from_myl(read_myl(path));
}

void write_vector_csv(const std::string& path, const std::vector<double>& axis,
                      const std::vector<cplx>& vals, const char* axis_name) {
    std::ofstream os(path);
    require(bool(os), "csv: cannot open " + path);
    os << axis_name << ",re,im\n";
    char buf[120];
    for (size_t i = 0; i < vals.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", axis[i], vals[i].real(),
                      vals[i].imag());
        os << buf;
    }
}

int run(int argc, char** argv) {
    CLI::App app{"phase-space star products, generalized Weyl transforms, Lindblad kinetics"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker thread count (default: hardware)")
        ->each([](const std::string& s) { set_thread_count(std::atoi(s.c_str())); });

    std::string config_path, in_path, in_path_b, out_path, expr_a, expr_b;
    double dt = 1e-3, t_end = 1.0;
    size_t snap_every = 100;

    // quantize / dequantize ---------------------------------------------------
    auto* cmd_q = app.add_subcommand("quantize", "symbol -> operator kernel matrix");
    cmd_q->add_option("--config", config_path)->required();
    cmd_q->add_option("--in", in_path, "input symbol (MYL1)");
    cmd_q->add_option("--expr", expr_a, "polynomial symbol text (alternative to --in)");
    cmd_q->add_option("--out", out_path)->required();
    cmd_q->callback([&] {
        RunConfig cfg = load_config(config_path);
        log_run_header(cfg);
        GridFunction f = !in_path.empty() ? load_grid_function(in_path)
                                          : sample_model_symbol(expr_a, cfg.grid, cfg.weight.hbar);
        require(!in_path.empty() || !expr_a.empty(), "quantize: need --in or --expr");
        QuantizeReport rep;
        OperatorMatrix M = quantize(f, cfg.weight, cfg.basis, &rep);
        if (rep.flagged)
            std::fprintf(stderr, "warning: interpolation residual %.3g above 1e-6\n",
                         rep.interp_residual);
        write_myl(out_path, M);
    });

    auto* cmd_d = app.add_subcommand("dequantize", "operator kernel matrix -> symbol");
    cmd_d->add_option("--config", config_path)->required();
    cmd_d->add_option("--in", in_path)->required();
    cmd_d->add_option("--out", out_path)->required();
    cmd_d->callback([&] {
        RunConfig cfg = load_config(config_path);
        log_run_header(cfg);
        OperatorMatrix M = operator_from_myl(read_myl(in_path));
        write_myl(out_path, dequantize(M, cfg.weight, cfg.grid.grid));
    });

    // star / bracket / lstar --------------------------------------------------
    auto add_binary = [&](const char* name, const char* help,
                          std::function<GridFunction(const GridFunction&, const GridFunction&,
                                                     const RunConfig&)>
                              op) {
        auto* cmd = app.add_subcommand(name, help);
        cmd->add_option("a", in_path, "left operand (MYL1)")->required();
        cmd->add_option("b", in_path_b, "right operand (MYL1)")->required();
        cmd->add_option("--config", config_path)->required();
        cmd->add_option("--out", out_path)->required();
        cmd->callback([&app, &in_path, &in_path_b, &config_path, &out_path, op] {
            RunConfig cfg = load_config(config_path);
            log_run_header(cfg);
            GridFunction a = load_grid_function(in_path);
            GridFunction b = load_grid_function(in_path_b);
            write_myl(out_path, op(a, b, cfg));
        });
        return cmd;
    };
    add_binary("star", "star product under the configured weight",
               [](const GridFunction& a, const GridFunction& b, const RunConfig& cfg) {
                   return star(a, b, cfg.weight);
               });
    add_binary("bracket", "generalized Moyal bracket",
               [](const GridFunction& a, const GridFunction& b, const RunConfig& cfg) {
                   return bracket(a, b, cfg.weight);
               });

    double l_re = 0, l_im = 0, nu_re = 0, nu_im = 0;
    auto* cmd_l = app.add_subcommand("lstar", "two-parameter lambda star product");
    cmd_l->add_option("a", in_path)->required();
    cmd_l->add_option("b", in_path_b)->required();
    cmd_l->add_option("--lambda-re", l_re)->required();
    cmd_l->add_option("--lambda-im", l_im);
    cmd_l->add_option("--nu-re", nu_re);
    cmd_l->add_option("--nu-im", nu_im, "defaults to hbar/2 when nu is omitted");
    cmd_l->add_option("--out", out_path)->required();
    cmd_l->callback([&] {
        GridFunction a = load_grid_function(in_path);
        GridFunction b = load_grid_function(in_path_b);
        cplx nu(nu_re, nu_im);
        if (nu == cplx(0)) nu = cplx(0, 0.5);
        write_myl(out_path, lambda_star(a, b, cplx(l_re, l_im), nu));
    });

    // marginals ---------------------------------------------------------------
    std::string out_pos, out_mom;
    auto* cmd_m = app.add_subcommand("marginals", "position/momentum marginals of a symbol");
    cmd_m->add_option("--config", config_path)->required();
    cmd_m->add_option("--in", in_path)->required();
    cmd_m->add_option("--out-position", out_pos)->required();
    cmd_m->add_option("--out-momentum", out_mom)->required();
    cmd_m->callback([&] {
        RunConfig cfg = load_config(config_path);
        log_run_header(cfg);
        GridFunction rho = load_grid_function(in_path);
        Marginals m = marginals(rho, cfg.weight);
        std::vector<double> qs, ps;
        for (size_t j = 0; j < rho.grid.n_q; ++j) qs.push_back(rho.grid.q(j));
        for (size_t k = 0; k < rho.grid.n_p; ++k) ps.push_back(rho.grid.p(k));
        write_vector_csv(out_pos, qs, m.position, "q");
        write_vector_csv(out_mom, ps, m.momentum, "p");
    });

    // oracle ------------------------------------------------------------------
    std::string o_family = "weyl", o_lre = "0", o_lim = "0";
    auto signed_rat = [](const std::string& s) {
        if (!s.empty() && s[0] == '-') return sym::Rat(0) - sym::rat_from_decimal(s.substr(1));
        if (!s.empty() && s[0] == '+') return sym::rat_from_decimal(s.substr(1));
        return sym::rat_from_decimal(s);
    };
    auto o_lambda = [&]() {
        return sym::HPoly(sym::CRat(signed_rat(o_lre), signed_rat(o_lim)));
    };
    auto* cmd_o = app.add_subcommand("oracle", "exact symbolic engine");
    cmd_o->require_subcommand(1);
    auto* o_order = cmd_o->add_subcommand("order", "print the normal-ordered operator");
    o_order->add_option("--family", o_family, "weyl|lambda");
    o_order->add_option("--lambda-re", o_lre, "exact decimal, e.g. 0.25");
    o_order->add_option("--lambda-im", o_lim);
    o_order->add_option("--expr", expr_a)->required();
    o_order->callback([&] {
        using namespace sym;
        CPolynomial f = parse_poly(expr_a);
        NCPolynomial out;
        if (o_family == "weyl")
            out = weyl_order(f);
        else if (o_family == "lambda")
            out = lambda_order(f, o_lambda());
        else
            throw error("oracle order: family must be weyl or lambda");
        std::printf("%s\n", to_string(out).c_str());
    });
    auto* o_star = cmd_o->add_subcommand("star", "print the exact star product");
    o_star->add_option("--family", o_family, "weyl|lambda");
    o_star->add_option("--lambda-re", o_lre);
    o_star->add_option("--lambda-im", o_lim);
    o_star->add_option("--a", expr_a)->required();
    o_star->add_option("--b", expr_b)->required();
    o_star->callback([&] {
        using namespace sym;
        StarFamily fam = StarFamily::weyl();
        if (o_family == "lambda")
            fam = StarFamily::lambda_family(o_lambda());
        else if (o_family != "weyl")
            throw error("oracle star: family must be weyl or lambda");
        std::printf("%s\n",
                    to_string(star_poly(parse_poly(expr_a), parse_poly(expr_b), fam)).c_str());
    });

    // spectrum ------------------------------------------------------------------
    std::string data_path;
    size_t n_alpha = 1;
    std::vector<double> omegas;
    auto* cmd_s = app.add_subcommand("spectrum", "correlation spectra from time samples");
    cmd_s->add_option("--data", data_path, "CSV: s, then re,im per (alpha,beta) pair")->required();
    cmd_s->add_option("--alpha", n_alpha, "number of coupling labels");
    cmd_s->add_option("--omega", omegas, "frequencies to evaluate")->required();
    cmd_s->callback([&] {
        std::ifstream is(data_path);
        require(bool(is), "spectrum: cannot open " + data_path);
        std::vector<double> s_grid;
        std::vector<std::vector<cplx>> h;
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::vector<double> nums;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) nums.push_back(std::stod(cell));
            require(nums.size() == 1 + 2 * n_alpha * n_alpha,
                    "spectrum: expected 1 + 2*alpha^2 columns");
            s_grid.push_back(nums[0]);
            std::vector<cplx> row(n_alpha * n_alpha);
            for (size_t e = 0; e < row.size(); ++e) row[e] = cplx(nums[1 + 2 * e], nums[2 + 2 * e]);
            h.push_back(std::move(row));
        }
        CorrelationData data = make_correlation_data(n_alpha, s_grid, h);
        CorrelationSpectrum spec = correlation_spectrum(data, omegas);
        for (size_t io = 0; io < omegas.size(); ++io) {
            std::printf("omega %.12g\n", omegas[io]);
            for (size_t a = 0; a < n_alpha; ++a)
                for (size_t b = 0; b < n_alpha; ++b)
                    std::printf("  h[%zu][%zu] = %.12g%+.12gi   s[%zu][%zu] = %.12g%+.12gi\n", a,
                                b, spec.h_tilde[io][a * n_alpha + b].real(),
                                spec.h_tilde[io][a * n_alpha + b].imag(), a, b,
                                spec.s_mat[io][a * n_alpha + b].real(),
                                spec.s_mat[io][a * n_alpha + b].imag());
            const bool psd = psd_check(spec.h_tilde[io], n_alpha);
            std::printf("  psd %s\n", psd ? "true" : "false");
        }
    });

    // evolve --------------------------------------------------------------------
    std::string rho_path, out_prefix = "snap", audit_path;
    auto* cmd_e = app.add_subcommand("evolve", "integrate the phase-space kinetic equation");
    cmd_e->add_option("--model", config_path, "config with a model block")->required();
    cmd_e->add_option("--rho0", rho_path, "initial symbol (MYL1)")->required();
    cmd_e->add_option("--dt", dt);
    cmd_e->add_option("--t-end", t_end);
    cmd_e->add_option("--snap-every", snap_every);
    cmd_e->add_option("--out-prefix", out_prefix);
    cmd_e->add_option("--audit-log", audit_path);
    cmd_e->callback([&] {
        RunConfig cfg = load_config(config_path);
        log_run_header(cfg);
        LindbladModel model = model_from_config(cfg);
        GridFunction rho0 = load_grid_function(rho_path);
        Generator gen(model);
        EvolveOptions opt;
        opt.dt = dt;
        opt.t_end = t_end;
        opt.snap_every = snap_every;
        EvolveResult res = evolve(rho0, gen, opt);
        for (size_t i = 0; i < res.snapshots.size(); ++i) {
            char name[512];
            std::snprintf(name, sizeof name, "%s_%06zu.myl", out_prefix.c_str(), i);
            write_myl(name, res.snapshots[i]);
        }
        write_myl(out_prefix + std::string("_final.myl"), res.final_state);
        if (!audit_path.empty()) write_audit_csv(audit_path, res.audit);
        std::printf("evolved to t = %.12g (%zu snapshots)\n", t_end, res.snapshots.size());
    });

    // check-ordering --------------------------------------------------------------
    std::string f_family = "weyl", f_scaling = "fixed";
    double f_lre = 0, f_lim = 0, f_kappa = 0, f_hbar = 1.0;
    auto* cmd_co = app.add_subcommand("check-ordering", "structural predicates of a weight");
    cmd_co->add_option("--family", f_family)->required();
    cmd_co->add_option("--lambda-re", f_lre);
    cmd_co->add_option("--lambda-im", f_lim);
    cmd_co->add_option("--kappa", f_kappa);
    cmd_co->add_option("--hbar", f_hbar);
    cmd_co->add_option("--hbar-scaling", f_scaling);
    cmd_co->callback([&] {
        WeightFunction w = weight_from_flags(f_family, f_lre, f_lim, f_kappa, f_hbar, f_scaling);
        std::printf("trace_pairing   %s\n", check_trace_pairing(w) ? "true" : "false");
        std::printf("hermiticity     %s\n", check_hermiticity(w) ? "true" : "false");
        std::printf("marginal        %s\n", check_marginal_condition(w) ? "true" : "false");
        std::printf("classical_limit %s\n", check_classical_limit(w) ? "true" : "false");
    });

    // check-projection ---------------------------------------------------------
    double proj_lambda = 0.4;
    size_t proj_n = 16;
    auto* cmd_cp = app.add_subcommand("check-projection",
                                      "open-system projection identities on a bipartite grid");
    cmd_cp->add_option("--config", config_path)->required();
    cmd_cp->add_option("--coupling", proj_lambda);
    cmd_cp->add_option("--points", proj_n, "points per axis of each factor grid");
    cmd_cp->callback([&] {
        RunConfig cfg = load_config(config_path);
        log_run_header(cfg);
        const PhaseGrid g = make_grid(6.0, proj_n);
        ProjectionConfig pc;
        pc.ws = cfg.weight;
        pc.wr = cfg.weight;
        pc.joint = tensor_weight(pc.ws, pc.wr);
        GridFunction rr = sample(g, [](double q, double p) {
            return cplx(std::exp(-(q * q + p * p) / 2.0), 0);
        });
        pc.rho_R = (1.0 / integrate(rr)) * rr;
        pc.H_S = sample_tapered(g, [](double q, double p) { return cplx(0.5 * (q * q + p * p), 0); });
        pc.H_R = pc.H_S;
        GridFunction qs = sample_tapered(g, [](double q, double) { return cplx(q, 0); });
        pc.H_I = separable(qs, qs);
        pc.lambda = proj_lambda;
        GridFunction u = sample(g, [](double q, double p) {
            return cplx((1.0 + 0.3 * q) * std::exp(-(q * q + p * p) / 2.0), 0);
        });
        GridFunction v = sample(g, [](double q, double p) {
            return cplx((1.0 - 0.2 * p) * std::exp(-((q - 0.4) * (q - 0.4) + p * p) / 2.0), 0);
        });
        BipartiteFunction rho = separable(u, v) + separable(v, u);
        BipartiteFunction obs = separable(v, u);
        ProjectionReport rep = projection_checks(pc, rho, obs);
        const std::pair<const char*, double> rows[] = {
            {"p_idempotent", rep.p_idempotent},
            {"p_reduction", rep.p_reduction},
            {"sep_product", rep.sep_product},
            {"commute_sys", rep.commute_sys},
            {"annihilate_res_left", rep.annihilate_res_left},
            {"annihilate_res_right", rep.annihilate_res_right},
            {"h_integral", rep.h_integral},
            {"adjoint_identity", rep.adjoint_identity},
            {"liouville_selfadjoint", rep.liouville_selfadjoint},
        };
        bool ok = true;
        for (const auto& [name, val] : rows) {
            std::printf("%-24s %.3e\n", name, val);
            ok = ok && val <= 1e-7;
        }
        if (!ok) throw audit_error("projection residuals exceed 1e-7");
    });

    // check-diagram --------------------------------------------------------------
    double max_residual = 0;
    auto* cmd_cd = app.add_subcommand(
        "check-diagram", "matrix-route vs phase-space-route evolution residual");
    cmd_cd->add_option("--config", config_path)->required();
    cmd_cd->add_option("--dt", dt);
    cmd_cd->add_option("--t-end", t_end);
    cmd_cd->add_option("--max-residual", max_residual, "exit 2 when exceeded");
    cmd_cd->callback([&] {
        RunConfig cfg = load_config(config_path);
        log_run_header(cfg);
        LindbladModel model = model_from_config(cfg);
        GridFunction f0 = sample(cfg.grid.grid, [](double q, double p) {
            return cplx(2.0 * std::exp(-((q - 1.2) * (q - 1.2) + p * p)), 0);
        });
        DiagramReport rep = diagram_commutes(f0, model, cfg.basis, t_end, dt);
        std::printf("state_residual        %.3e\n", rep.state_residual);
        std::printf("expectation_residual  %.3e\n", rep.expectation_residual);
        if (max_residual > 0 && (rep.state_residual > max_residual))
            throw audit_error("diagram residual exceeds the requested bound");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (threads > 0) set_thread_count(threads);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const audit_error& e) {
        std::fprintf(stderr, "numeric audit failure: %s\n", e.what());
        return 2;
    } catch (const error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
