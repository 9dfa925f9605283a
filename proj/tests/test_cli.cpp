#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "torustau/cli.hpp"

using namespace torustau;
using namespace torustau::cli;
namespace fs = std::filesystem;

namespace {

struct scratch_dir {
    fs::path dir;
    scratch_dir() : dir(fs::temp_directory_path() / "torustau_cli_test") { fs::create_directories(dir); }
    ~scratch_dir() { fs::remove_all(dir); }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

int run_args(std::vector<std::string> args)
{
    args.insert(args.begin(), "torustau");
    std::vector<char*> argv;
    for (auto& s : args)
        argv.push_back(s.data());
    return run(int(argv.size()), argv.data());
}

std::string slurp(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

nlohmann::json read_json(const std::string& path)
{
    return nlohmann::json::parse(slurp(path));
}

errc code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return errc::domain;
}

} // namespace

TEST_CASE("complex parsing")
{
    CHECK(parse_complex("0.1,0.9") == cplx(0.1, 0.9));
    CHECK(parse_complex("0.31") == cplx(0.31, 0));
    CHECK(parse_complex(" -1e-3 , 2 ") == cplx(-1e-3, 2));
    CHECK(code_of([] { parse_complex("abc"); }) == errc::config);
    CHECK(code_of([] { parse_complex("0.1,"); }) == errc::config);
}

TEST_CASE("config text parsing")
{
    auto kv = parse_config_text("# comment\nmax-boxes = 6\n\ntau=0.1,0.8  # trailing\nm=0.2\n");
    CHECK(kv.size() == 3);
    CHECK(kv.at("max_boxes") == "6");
    CHECK(kv.at("tau") == "0.1,0.8");
    CHECK(code_of([] { parse_config_text("novalue\n"); }) == errc::config);
    CHECK(code_of([] { parse_config_text("=3\n"); }) == errc::config);
}

TEST_CASE("settings, presets and validation")
{
    run_config c;
    apply_setting(c, "max-charge", "3");
    apply_setting(c, "rho", "0.2,0.01");
    CHECK(c.max_charge == 3);
    CHECK(c.rho == cplx(0.2, 0.01));
    CHECK(code_of([&] { apply_setting(c, "bogus", "1"); }) == errc::config);
    CHECK(code_of([&] { apply_setting(c, "format", "xml"); }) == errc::config);
    CHECK(code_of([&] { apply_setting(c, "modes", "1.5"); }) == errc::config);
    CHECK(code_of([&] { apply_preset(c, "other"); }) == errc::config);

    apply_setting(c, "m", "0.4");
    apply_preset(c, "generic");
    CHECK(c.m == cplx(0.17));
    CHECK(c.tau == cplx(0.1, 0.9));

    c.tau = {0, 0.2};
    CHECK(code_of([&] { validate(c); }) == errc::domain);
    c.tau = {0, 0.9};
    c.steps = 0;
    CHECK(code_of([&] { validate(c); }) == errc::domain);
}

TEST_CASE("flags override config, config overrides preset")
{
    scratch_dir d;
    std::ofstream(d.file("c.cfg")) << "m = 0.2\ntau = 0.05,0.85\nmax_boxes = 4\n";
    int code = run_args({"tau-comb", "--preset", "generic", "--config", d.file("c.cfg"), "--m", "0.1",
                         "--out", d.file("o.json")});
    CHECK((code == exit_pass || code == exit_tolerance));
    auto j = read_json(d.file("o.json"));
    CHECK(j["m_re"].get<double>() == 0.1);
    CHECK(j["tau_re"].get<double>() == 0.05);
    CHECK(j["tau_im"].get<double>() == 0.85);
    CHECK(j["a_re"].get<double>() == 0.31);
    CHECK(j["max_boxes"].get<int>() == 4);
}

TEST_CASE("exit codes")
{
    scratch_dir d;
    CHECK(run_args({"tau-comb", "--bogus", "1"}) == exit_config);
    CHECK(run_args({"tau-comb", "--preset", "nope"}) == exit_config);
    CHECK(run_args({"tau-comb", "--config", d.file("missing.cfg")}) == exit_config);
    CHECK(run_args({"tau-comb", "--tau", "0,0.2", "--out", d.file("x")}) == exit_domain);
    CHECK(run_args({"specfun", "eval", "--fn", "nothing", "--out", d.file("x")}) == exit_config);
    CHECK(run_args({"specfun", "eval", "--fn", "theta1", "--z", "0.2,0.1", "--out", d.file("x")}) == exit_pass);
}

TEST_CASE("specfun eval prints re,im")
{
    scratch_dir d;
    REQUIRE(run_args({"specfun", "eval", "--fn", "theta1", "--z", "0,0", "--tau", "0,1", "--out", d.file("t")}) == 0);
    auto t = slurp(d.file("t"));
    REQUIRE(t.find(',') != std::string::npos);
    CHECK(t.back() == '\n');
    CHECK(std::abs(std::stod(t.substr(0, t.find(',')))) < 1e-15);
    CHECK(std::abs(std::stod(t.substr(t.find(',') + 1))) < 1e-15);
    REQUIRE(run_args({"specfun", "eval", "--fn", "gamma", "--z", "5", "--out", d.file("g")}) == 0);
    auto g = slurp(d.file("g"));
    CHECK(std::stod(g.substr(0, g.find(','))) == doctest::Approx(24.0).epsilon(1e-13));
}

TEST_CASE("tau-comb: prefactor only, free field, determinism, sector dump")
{
    scratch_dir d;
    run_args({"tau-comb", "--max-boxes", "0", "--max-charge", "0", "--out", d.file("p.json")});
    auto p = read_json(d.file("p.json"));
    CHECK(p["convergence"].is_null());
    CHECK(p["max_boxes"].get<int>() == 0);

    run_args({"tau-comb", "--m", "0", "--out", d.file("f.json")});
    CHECK(read_json(d.file("f.json"))["pass"].get<bool>());

    run_args({"tau-comb", "--out", d.file("a.json"), "--sectors", d.file("s.csv")});
    run_args({"tau-comb", "--out", d.file("b.json")});
    CHECK(slurp(d.file("a.json")) == slurp(d.file("b.json")));
    auto sectors = slurp(d.file("s.csv"));
    CHECK(sectors.rfind("n,k,|Y1|,|Y2|,re,im\n", 0) == 0);
}

TEST_CASE("tau-fredholm: modes 0 and the default residual")
{
    scratch_dir d;
    run_args({"tau-fredholm", "--modes", "0", "--out", d.file("z.json")});
    auto z = read_json(d.file("z.json"));
    CHECK(z["det_re"].get<double>() == 1.0);
    CHECK(z["det_im"].get<double>() == 0.0);

    CHECK(run_args({"tau-fredholm", "--out", d.file("f.json"), "--dump-k", d.file("k.bin")}) == exit_pass);
    auto f = read_json(d.file("f.json"));
    CHECK(f["theorem1_residual"].get<double>() < 1e-3);
    CHECK(fs::file_size(d.file("k.bin")) == 12 + 16 * 48 * 48);

    run_args({"tau-fredholm", "--modes", "16", "--out", d.file("c.json")});
    CHECK(read_json(d.file("c.json"))["convergence"].get<double>() < 1e-6);
}

TEST_CASE("transcendent and ode commands")
{
    scratch_dir d;
    CHECK(run_args({"transcendent", "--out", d.file("t.json")}) == exit_pass);
    CHECK(read_json(d.file("t.json"))["abs_diff"].get<double>() < 1e-5);

    CHECK(run_args({"ode", "--format", "csv", "--steps", "4", "--out", d.file("o.csv")}) == exit_pass);
    auto csv = slurp(d.file("o.csv"));
    CHECK(csv.rfind("tau_re,tau_im,Q_re,Q_im,P_re,P_im,H_re,H_im\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("crosscheck CSV report lists every check")
{
    scratch_dir d;
    run_args({"crosscheck", "--format", "csv", "--out", d.file("c.csv")});
    auto csv = slurp(d.file("c.csv"));
    for (const char* name : {"transcendent,", "theorem1,", "comb_vs_fourier,", "ode_track,", "log_tau_increment,",
                             "gauge,", "zero_curvature,", "monodromy_trace,"})
        CHECK(csv.find(std::string("\n") + name) != std::string::npos);
}
