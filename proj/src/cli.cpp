#include "torustau/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "torustau/combinatorics.hpp"
#include "torustau/dynamics.hpp"
#include "torustau/fredholm.hpp"

namespace torustau::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* const setting_keys[] = {
    "a", "m", "nu", "rho", "tau", "max_boxes", "max_charge", "modes", "quad_points", "steps",
    "tol", "dtau", "radius_first", "radius_second", "tau_start", "tau_end", "format", "out",
};

std::string normalise_key(std::string k)
{
    for (char& c : k)
        if (c == '-')
            c = '_';
    return k;
}

std::string dashed(std::string k)
{
    for (char& c : k)
        if (c == '_')
            c = '-';
    return k;
}

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text)
{
    std::string t = trim(text);
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(t, &used);
    } catch (...) {
        throw error(errc::config, "not a number: '" + text + "'");
    }
    if (used != t.size())
        throw error(errc::config, "not a number: '" + text + "'");
    return v;
}

int parse_int(const std::string& text)
{
    std::string t = trim(text);
    std::size_t used = 0;
    int v;
    try {
        v = std::stoi(t, &used);
    } catch (...) {
        throw error(errc::config, "not an integer: '" + text + "'");
    }
    if (used != t.size())
        throw error(errc::config, "not an integer: '" + text + "'");
    return v;
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void put(ordered_json& j, const std::string& key, cplx v)
{
    j[key + "_re"] = v.real();
    j[key + "_im"] = v.imag();
}

std::string csv_cell(const ordered_json& v)
{
    if (v.is_number_float())
        return fmt(v.get<double>());
    if (v.is_string())
        return v.get<std::string>();
    return v.dump();
}

/* flat object as one header line and one data line */
std::string flat_csv(const ordered_json& j)
{
    std::string head, row;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it != j.begin()) {
            head += ',';
            row += ',';
        }
        head += it.key();
        row += csv_cell(it.value());
    }
    return head + "\n" + row + "\n";
}

void emit(const run_config& cfg, const std::string& text)
{
    if (cfg.out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f)
        throw error(errc::domain, "cannot open " + cfg.out);
    f << text;
}

void emit_record(const run_config& cfg, const ordered_json& j)
{
    emit(cfg, cfg.format == "csv" ? flat_csv(j) : j.dump(2) + "\n");
}

block_params block_point(const run_config& c)
{
    return {c.a, c.m, c.nu, c.rho, c.tau};
}

truncation trunc_of(const run_config& c)
{
    return {c.max_boxes, c.max_charge};
}

fredholm_config fredholm_of(const run_config& c)
{
    fredholm_config f;
    f.modes = c.modes;
    f.quad_points = c.quad_points;
    f.radius_first = c.radius_first;
    f.radius_second = c.radius_second;
    return f;
}

void echo_inputs(ordered_json& j, const run_config& c)
{
    put(j, "a", c.a);
    put(j, "m", c.m);
    put(j, "nu", c.nu);
    put(j, "rho", c.rho);
    put(j, "tau", c.tau);
}

class stopwatch {
public:
    stopwatch() : t0_(std::chrono::steady_clock::now()) {}
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }
private:
    std::chrono::steady_clock::time_point t0_;
};

struct path_result {
    std::vector<cplx> taus, Q_blocks, tau_comb;
    std::vector<dynamic_state> states;
    double max_deviation = 0;
    cplx increment_H, increment_comb;
};

path_result run_path(const run_config& c)
{
    path_result r;
    validate(c);
    const int n = c.steps;
    const truncation tr = trunc_of(c);
    for (int j = 0; j <= n; j++) {
        cplx tau = c.tau_start + double(j) * (c.tau_end - c.tau_start) / double(n);
        block_params p = block_point(c);
        p.tau = tau;
        cplx Q = j == 0 ? transcendent_from_blocks(p, tr) : transcendent_from_blocks(p, tr, r.Q_blocks.back());
        r.taus.push_back(tau);
        r.Q_blocks.push_back(Q);
        r.tau_comb.push_back(tau_combinatorial(p, Q, tr));
    }
    const double two_pi = 2 * std::numbers::pi;
    cplx guess = cplx(0, two_pi) * (r.Q_blocks[1] - r.Q_blocks[0]) / (r.taus[1] - r.taus[0]);
    cplx P0 = shoot_momentum(r.Q_blocks[0], r.Q_blocks[1], r.taus[0], r.taus[1], c.m, guess);
    r.states = integrate_cm({r.Q_blocks[0], P0, r.taus[0]}, c.m, {c.tau_start, c.tau_end, n});
    for (int j = 0; j <= n; j++)
        r.max_deviation = std::max(r.max_deviation, std::abs(r.states[std::size_t(j)].Q - r.Q_blocks[std::size_t(j)]));
    r.increment_H = tau_from_hamiltonian(r.states, c.m);
    r.increment_comb = std::log(r.tau_comb.back() / r.tau_comb.front());
    return r;
}

int cmd_tau_comb(const run_config& c, const std::string& sectors_file, bool timing)
{
    stopwatch sw;
    validate(c);
    const block_params p = block_point(c);
    const truncation tr = trunc_of(c);
    cplx Q = transcendent_from_blocks(p, tr);
    cplx T = tau_combinatorial(p, Q, tr);

    ordered_json j;
    j["command"] = "tau-comb";
    echo_inputs(j, c);
    j["max_boxes"] = c.max_boxes;
    j["max_charge"] = c.max_charge;
    put(j, "Q", Q);
    put(j, "value", T);
    bool pass = true;
    if (c.max_boxes > 0) {
        truncation lower = tr;
        lower.max_boxes -= 1;
        double conv = std::abs(T - tau_combinatorial(p, Q, lower)) / std::abs(T);
        j["convergence"] = conv;
        pass = conv < c.tol.value_or(1e-6);
    } else {
        j["convergence"] = nullptr;
    }
    j["pass"] = pass;
    if (timing)
        j["wall_time"] = sw.seconds();

    if (!sectors_file.empty()) {
        std::string text = "n,k,|Y1|,|Y2|,re,im\n";
        for (const auto& s : tau_comb_sectors(p, Q, tr))
            text += std::to_string(s.n) + "," + std::to_string(s.k) + "," + std::to_string(s.size1) + ","
                  + std::to_string(s.size2) + "," + fmt(s.value.real()) + "," + fmt(s.value.imag()) + "\n";
        std::ofstream f(sectors_file, std::ios::binary);
        if (!f)
            throw error(errc::domain, "cannot open " + sectors_file);
        f << text;
    }
    emit_record(c, j);
    return pass ? exit_pass : exit_tolerance;
}

int cmd_tau_fredholm(const run_config& c, const std::string& dump_file, bool timing)
{
    stopwatch sw;
    validate(c);
    const block_params p = block_point(c);
    const fredholm_config fc = fredholm_of(c);
    coefficient_table t = fourier_coefficients(c.a, c.m, c.nu, 2, fc);
    determinant_value d = fredholm_determinant(t, c.rho, c.tau);
    if (!dump_file.empty())
        write_ttk1(dump_file, assemble_K(t, c.rho, c.tau));
    theorem1_report r = theorem1_residual(p, fc, trunc_of(c), c.dtau);

    ordered_json j;
    j["command"] = "tau-fredholm";
    echo_inputs(j, c);
    j["modes"] = c.modes;
    j["quad_points"] = c.quad_points;
    put(j, "det", d.value);
    j["convergence"] = d.convergence;
    put(j, "Q_det", r.Q_det);
    put(j, "theorem1_lhs", r.lhs);
    put(j, "theorem1_rhs", r.rhs);
    j["theorem1_residual"] = r.residual;
    bool pass = r.residual < c.tol.value_or(1e-3);
    j["pass"] = pass;
    if (timing)
        j["wall_time"] = sw.seconds();
    emit_record(c, j);
    return pass ? exit_pass : exit_tolerance;
}

int cmd_transcendent(const run_config& c, bool timing)
{
    stopwatch sw;
    validate(c);
    const block_params p = block_point(c);
    cplx Qb = transcendent_from_blocks(p, trunc_of(c));
    coefficient_table t = fourier_coefficients(c.a, c.m, c.nu, 2, fredholm_of(c));
    cplx Qd = transcendent_from_det(t, c.tau, Qb);

    ordered_json j;
    j["command"] = "transcendent";
    echo_inputs(j, c);
    put(j, "Q_blocks", Qb);
    put(j, "Q_det", Qd);
    double diff = std::abs(Qb - Qd);
    j["abs_diff"] = diff;
    bool pass = diff < c.tol.value_or(1e-5);
    j["pass"] = pass;
    if (timing)
        j["wall_time"] = sw.seconds();
    emit_record(c, j);
    return pass ? exit_pass : exit_tolerance;
}

int cmd_ode(const run_config& c, bool timing)
{
    stopwatch sw;
    path_result r = run_path(c);
    double inc_diff = std::abs(r.increment_H - r.increment_comb);
    bool pass = std::max(r.max_deviation, inc_diff) < c.tol.value_or(1e-4);

    if (c.format == "csv") {
        std::string text = "tau_re,tau_im,Q_re,Q_im,P_re,P_im,H_re,H_im\n";
        for (const auto& s : r.states) {
            cplx H = hamiltonian(s, c.m);
            text += fmt(s.tau.real()) + "," + fmt(s.tau.imag()) + "," + fmt(s.Q.real()) + "," + fmt(s.Q.imag())
                  + "," + fmt(s.P.real()) + "," + fmt(s.P.imag()) + "," + fmt(H.real()) + "," + fmt(H.imag()) + "\n";
        }
        emit(c, text);
        return pass ? exit_pass : exit_tolerance;
    }

    ordered_json j;
    j["command"] = "ode";
    put(j, "a", c.a);
    put(j, "m", c.m);
    put(j, "nu", c.nu);
    put(j, "tau_start", c.tau_start);
    put(j, "tau_end", c.tau_end);
    j["steps"] = c.steps;
    put(j, "P0", r.states.front().P);
    put(j, "Q_end", r.states.back().Q);
    put(j, "Q_blocks_end", r.Q_blocks.back());
    j["max_deviation"] = r.max_deviation;
    put(j, "log_tau_increment_H", r.increment_H);
    put(j, "log_tau_increment_comb", r.increment_comb);
    j["increment_diff"] = inc_diff;
    j["conservation_residual"] = std::abs(hamiltonian_flow_residual(r.states.front(), c.m));
    j["pass"] = pass;
    if (timing)
        j["wall_time"] = sw.seconds();
    emit_record(c, j);
    return pass ? exit_pass : exit_tolerance;
}

struct check {
    std::string name;
    cplx lhs, rhs;
    double tol;
};

int cmd_crosscheck(const run_config& c, bool timing)
{
    stopwatch sw;
    validate(c);
    const block_params p = block_point(c);
    const truncation tr = trunc_of(c);
    const fredholm_config fc = fredholm_of(c);

    std::vector<check> checks;
    coefficient_table t = fourier_coefficients(c.a, c.m, c.nu, 2, fc);
    cplx Qb = transcendent_from_blocks(p, tr);
    cplx Qd = transcendent_from_det(t, c.tau, Qb);
    checks.push_back({"transcendent", Qb, Qd, 1e-5});

    theorem1_report th = theorem1_residual(p, fc, tr, c.dtau);
    checks.push_back({"theorem1", th.lhs, th.rhs, 1e-3});

    checks.push_back({"comb_vs_fourier", tau_combinatorial(p, Qb, tr), tau_fourier_blocks(p, Qb, tr), 1e-9});

    path_result r = run_path(c);
    checks.push_back({"ode_track", r.states.back().Q, r.Q_blocks.back(), 1e-4});
    checks.push_back({"log_tau_increment", r.increment_H, r.increment_comb, 1e-4});

    gauge_report g = gauge_residual(p, fc, c.dtau);
    checks.push_back({"gauge", g.lhs, g.rhs, 1e-4});

    const std::vector<cplx> zg{cplx(0.3, 0.1), cplx(0.6, -0.2), cplx(0.15, 0.05)};
    checks.push_back({"zero_curvature", zero_curvature_residual(r.states.front(), c.m, zg, 1e-4), 0.0, 1e-6});

    const monodromy_set ms = monodromy_matrices(c.a, c.m, c.nu);
    checks.push_back({"monodromy_trace", ms.M0.trace(), 2.0 * std::cos(2 * std::numbers::pi * c.m), 1e-12});

    bool all = true;
    ordered_json j;
    j["command"] = "crosscheck";
    echo_inputs(j, c);
    std::string text = "name,lhs_re,lhs_im,rhs_re,rhs_im,abs_diff,rel_diff,tol,pass\n";
    for (auto& k : checks) {
        if (c.tol)
            k.tol = *c.tol;
        double ad = std::abs(k.lhs - k.rhs);
        double scale = std::max(std::abs(k.lhs), std::abs(k.rhs));
        double rd = (k.rhs == 0.0 || scale == 0) ? ad : ad / scale;
        bool pass = rd < k.tol;
        all = all && pass;
        put(j, k.name + "_lhs", k.lhs);
        put(j, k.name + "_rhs", k.rhs);
        j[k.name + "_abs_diff"] = ad;
        j[k.name + "_rel_diff"] = rd;
        j[k.name + "_tol"] = k.tol;
        j[k.name + "_pass"] = pass;
        text += k.name + "," + fmt(k.lhs.real()) + "," + fmt(k.lhs.imag()) + "," + fmt(k.rhs.real()) + ","
              + fmt(k.rhs.imag()) + "," + fmt(ad) + "," + fmt(rd) + "," + fmt(k.tol) + ","
              + (pass ? "true" : "false") + "\n";
    }
    j["all_pass"] = all;
    if (timing)
        j["wall_time"] = sw.seconds();
    emit(c, c.format == "csv" ? text : j.dump(2) + "\n");
    return all ? exit_pass : exit_tolerance;
}

int cmd_specfun_eval(const run_config& c, const std::string& fn, cplx z, bool csv)
{
    validate(c);
    const modular_parameter<double> mp(c.tau);
    cplx v;
    if (fn == "theta1" || fn == "theta2" || fn == "theta3" || fn == "theta4")
        v = theta(fn[5] - '0', z, mp);
    else if (fn == "theta1_prime")
        v = theta1_z_derivative(1, z, mp);
    else if (fn == "wp")
        v = weierstrass_p(z, mp).p;
    else if (fn == "wp_prime")
        v = weierstrass_p(z, mp).p_prime;
    else if (fn == "eta")
        v = dedekind_eta(mp);
    else if (fn == "dlog_eta")
        v = dlog_eta(mp);
    else if (fn == "gamma")
        v = gamma(z);
    else
        throw error(errc::config, "unknown function '" + fn + "'");

    if (csv) {
        emit(c, fmt(v.real()) + "," + fmt(v.imag()) + "\n");
    } else {
        ordered_json j;
        j["command"] = "specfun-eval";
        j["fn"] = fn;
        put(j, "z", z);
        put(j, "tau", c.tau);
        j["re"] = v.real();
        j["im"] = v.imag();
        emit(c, j.dump(2) + "\n");
    }
    return exit_pass;
}

int exit_for(errc e)
{
    switch (e) {
    case errc::config: return exit_config;
    case errc::non_convergent:
    case errc::root_not_found:
    case errc::quadrature_stall:
    case errc::singularity_hit: return exit_tolerance;
    default: return exit_domain;
    }
}

void report_error(const std::string& kind, const std::string& message, int code)
{
    ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    j["exit_code"] = code;
    std::cerr << j.dump() << "\n";
}

} // namespace

cplx parse_complex(const std::string& text)
{
    auto comma = text.find(',');
    if (comma == std::string::npos)
        return parse_real(text);
    return {parse_real(text.substr(0, comma)), parse_real(text.substr(comma + 1))};
}

std::map<std::string, std::string> parse_config_text(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw error(errc::config, "config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = normalise_key(trim(line.substr(0, eq)));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw error(errc::config, "config line " + std::to_string(lineno) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

void apply_setting(run_config& cfg, const std::string& raw_key, const std::string& value)
{
    const std::string key = normalise_key(raw_key);
    if (key == "a") cfg.a = parse_complex(value);
    else if (key == "m") cfg.m = parse_complex(value);
    else if (key == "nu") cfg.nu = parse_complex(value);
    else if (key == "rho") cfg.rho = parse_complex(value);
    else if (key == "tau") cfg.tau = parse_complex(value);
    else if (key == "tau_start") cfg.tau_start = parse_complex(value);
    else if (key == "tau_end") cfg.tau_end = parse_complex(value);
    else if (key == "max_boxes") cfg.max_boxes = parse_int(value);
    else if (key == "max_charge") cfg.max_charge = parse_int(value);
    else if (key == "modes") cfg.modes = parse_int(value);
    else if (key == "quad_points") cfg.quad_points = parse_int(value);
    else if (key == "steps") cfg.steps = parse_int(value);
    else if (key == "tol") cfg.tol = parse_real(value);
    else if (key == "dtau") cfg.dtau = parse_real(value);
    else if (key == "radius_first") cfg.radius_first = parse_real(value);
    else if (key == "radius_second") cfg.radius_second = parse_real(value);
    else if (key == "format") {
        if (value != "json" && value != "csv")
            throw error(errc::config, "format must be json or csv");
        cfg.format = value;
    } else if (key == "out") cfg.out = value;
    else
        throw error(errc::config, "unknown setting '" + raw_key + "'");
}

void apply_preset(run_config& cfg, const std::string& name)
{
    if (name != "generic")
        throw error(errc::config, "unknown preset '" + name + "'");
    cfg.a = 0.31;
    cfg.m = 0.17;
    cfg.nu = 0.23;
    cfg.rho = 0.11;
    cfg.tau = {0.1, 0.9};
}

void validate(const run_config& cfg)
{
    if (cfg.tau.imag() < 0.3)
        throw error(errc::domain, "Im(tau) must be at least 0.3");
    if (cfg.tau_start.imag() < 0.3 || cfg.tau_end.imag() < 0.3)
        throw error(errc::domain, "the ODE path needs Im(tau) >= 0.3");
    if (cfg.max_boxes < 0 || cfg.max_charge < 0 || cfg.modes < 0 || cfg.quad_points < 0 || cfg.steps < 1)
        throw error(errc::domain, "truncations must be nonnegative and steps positive");
    if (!(cfg.dtau > 0))
        throw error(errc::domain, "dtau must be positive");
}

int run(int argc, char** argv)
{
    CLI::App app{"Torus isomonodromic tau function: combinatorial, Fredholm and ODE routes"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::map<std::string, std::string> flags;
    std::vector<std::pair<std::string, CLI::Option*>> bound;
    std::string config_file, preset, sectors_file, dump_file, fn = "theta1", z_text = "0";
    bool timing = false;

    auto add_common = [&](CLI::App* sub) {
        for (const char* k : setting_keys)
            bound.emplace_back(k, sub->add_option("--" + dashed(k), flags[k]));
        sub->add_option("--config", config_file, "key=value settings file");
        sub->add_option("--preset", preset, "named parameter point (generic)");
        sub->add_flag("--timing", timing, "add wall_time to the report");
    };

    auto* comb = app.add_subcommand("tau-comb", "combinatorial tau function");
    add_common(comb);
    comb->add_option("--sectors", sectors_file, "per-sector CSV dump");
    auto* fred = app.add_subcommand("tau-fredholm", "Fredholm determinant and its tau-shift residual");
    add_common(fred);
    fred->add_option("--dump-k", dump_file, "binary dump of the assembled K");
    auto* trans = app.add_subcommand("transcendent", "Q(tau) from blocks and from the determinant");
    add_common(trans);
    auto* ode = app.add_subcommand("ode", "integrate the Calogero-Moser flow along a path");
    add_common(ode);
    auto* cross = app.add_subcommand("crosscheck", "full cross-validation report");
    add_common(cross);
    auto* spec = app.add_subcommand("specfun", "special-function evaluation");
    spec->require_subcommand(1);
    auto* eval = spec->add_subcommand("eval", "evaluate one function");
    add_common(eval);
    eval->add_option("--fn", fn, "theta1..theta4, theta1_prime, wp, wp_prime, eta, dlog_eta, gamma");
    eval->add_option("--z", z_text, "argument re,im");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("ConfigError", e.what(), exit_config);
        return exit_config;
    }

    run_config cfg;
    try {
        if (!preset.empty())
            apply_preset(cfg, preset);
        if (!config_file.empty()) {
            std::ifstream f(config_file);
            if (!f)
                throw error(errc::config, "cannot read config file " + config_file);
            std::stringstream ss;
            ss << f.rdbuf();
            for (const auto& [k, v] : parse_config_text(ss.str()))
                apply_setting(cfg, k, v);
        }
        for (const auto& [k, opt] : bound)
            if (opt->count() > 0)
                apply_setting(cfg, k, flags[k]);
    } catch (const error& e) {
        report_error(errc_name(e.code()), e.what(), exit_config);
        return exit_config;
    }

    try {
        if (comb->parsed())
            return cmd_tau_comb(cfg, sectors_file, timing);
        if (fred->parsed())
            return cmd_tau_fredholm(cfg, dump_file, timing);
        if (trans->parsed())
            return cmd_transcendent(cfg, timing);
        if (ode->parsed())
            return cmd_ode(cfg, timing);
        if (cross->parsed())
            return cmd_crosscheck(cfg, timing);
        if (eval->parsed()) {
            bool csv = cfg.format != "json";
            return cmd_specfun_eval(cfg, fn, parse_complex(z_text), csv);
        }
    } catch (const error& e) {
        int code = exit_for(e.code());
        report_error(errc_name(e.code()), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        report_error("Error", e.what(), exit_domain);
        return exit_domain;
    }
    return exit_domain;
}

} // namespace torustau::cli
