#include "doctest.h"

#include "cpg/config.hpp"
#include "cpg/constants.hpp"
#include "cpg/plane_reflection.hpp"
#include "cpg/potential.hpp"
#include "lorentz_data.hpp"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cpg;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string log;
};

Result cli(std::initializer_list<std::string> args) {
    std::vector<std::string> owned{"cpg"};
    owned.insert(owned.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : owned) argv.push_back(a.c_str());
    std::ostringstream out, log;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, log);
    return {code, out.str(), log.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("cpg_cli_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const char* name) const { return (path / name).string(); }
};

// a cheap, explicitly specified grating run
const std::initializer_list<std::string> small = {"--nmax", "1", "--n-xi", "8", "--n-ky", "8", "--n-kx0", "4", "--no-check"};

Result cli_small(std::initializer_list<std::string> args) {
    std::vector<std::string> all(args);
    all.insert(all.end(), small.begin(), small.end());
    std::vector<std::string> owned{"cpg"};
    owned.insert(owned.end(), all.begin(), all.end());
    std::vector<const char*> argv;
    for (const auto& a : owned) argv.push_back(a.c_str());
    std::ostringstream out, log;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, log);
    return {code, out.str(), log.str()};
}

} // namespace

TEST_CASE("plane subcommand") {
    const auto r = cli({"plane", "--z", "1e-6"});
    REQUIRE(r.code == exit_ok);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0][0] == "x_A_m");
    CHECK(rows[0][2] == "U_J");
    const double want = plane_potential_checked(presets::rubidium(), presets::silicon(), 1e-6, {}).value;
    CHECK(std::stod(rows[1][2]) == want);

    // with a CSV file, stdout carries the value in words
    TempDir tmp;
    const auto w = cli({"plane", "--z", "1e-6", "-o", tmp.file("p.csv")});
    REQUIRE(w.code == exit_ok);
    CHECK(w.out.find("U0(") != std::string::npos);
    CHECK(w.out.find(rows[1][2]) != std::string::npos);
}

TEST_CASE("help and version") {
    const auto h = cli({"--help"});
    CHECK(h.code == exit_ok);
    CHECK(h.out.find("Exit codes") != std::string::npos);
    CHECK(h.out.find("CPG_CACHE_DIR") != std::string::npos);
    CHECK(cli({"--version"}).out == std::string(program_version) + "\n");
}

TEST_CASE("config file with flag overrides") {
    TempDir tmp;
    const std::string cfg = tmp.file("run.ini");
    {
        std::ofstream f(cfg);
        f << "# plane run\nz = 2e-6\nn-xi = 24\n";
    }
    const std::string out = tmp.file("out.csv");
    REQUIRE(cli({"plane", "--config", cfg, "--z", "1e-6", "-o", out}).code == exit_ok);
    const auto rows = csv_rows(slurp(out));
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][1]) == 1e-6);
    const auto manifest = nlohmann::json::parse(slurp(out + ".manifest.json"));
    CHECK(manifest["inputs"]["quadrature"]["n_xi"] == 24);

    REQUIRE(cli({"plane", "--config", cfg, "-o", out}).code == exit_ok);
    CHECK(std::stod(csv_rows(slurp(out))[1][1]) == 2e-6);

    {
        std::ofstream f(cfg);
        f << "z = 2e-6\nno-such-key = 3\n";
    }
    const auto bad = cli({"plane", "--config", cfg});
    CHECK(bad.code == exit_config);
    CHECK(bad.log.find("no-such-key") != std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(cli({}).code == exit_config);
    CHECK(cli({"plane", "--z", "banana"}).code == exit_config);
    CHECK(cli({"plane"}).code == exit_config); // no heights
    CHECK(cli({"plane", "--z", "1e-6", "--n-xi", "2"}).code == exit_config);
    CHECK(cli_small({"potential", "--z", "50e-9", "--x", "0"}).code == exit_region);
    const auto unsafe = cli_small({"potential", "--z", "50e-9", "--x", "0", "--allow-unsafe"});
    CHECK(unsafe.code == exit_ok);
    CHECK(unsafe.out.find("unsafe") != std::string::npos);
    CHECK(cli({"potential", "--z", "300e-9", "--x", "0", "--nmax", "1", "--n-xi", "4", "--n-ky", "4", "--n-kx0", "4",
               "--tolerance", "1e-10"})
              .code == exit_convergence);
    CHECK(cli_small({"rho", "--z", "300e-9", "--x", "150e-9"}).code == exit_ambiguous);
}

TEST_CASE("reruns are bit identical and traceable") {
    TempDir tmp;
    const std::string a = tmp.file("a.csv");
    const std::string b = tmp.file("b.csv");
    REQUIRE(cli_small({"potential", "--z", "300e-9,400e-9", "--x-points", "8", "-o", a, "-j", "1"}).code == exit_ok);
    REQUIRE(cli_small({"potential", "--z", "300e-9,400e-9", "--x-points", "8", "-o", b, "-j", "2"}).code == exit_ok);
    const std::string ca = slurp(a);
    CHECK(ca == slurp(b));
    const auto manifest = nlohmann::json::parse(slurp(a + ".manifest.json"));
    auto other = nlohmann::json::parse(slurp(b + ".manifest.json"));
    other["output"]["csv"] = manifest["output"]["csv"];
    CHECK(manifest == other);

    const std::string hash = manifest["inputs_hash"];
    CHECK(ca.rfind("# cpg csv v1 command=potential inputs_hash=" + hash, 0) == 0);
    CHECK(manifest["output"]["rows"] == 16);
    CHECK(manifest["format_version"] == manifest_format_version);
    CHECK(csv_rows(ca).size() == 17);

    // a result-relevant change moves the hash
    REQUIRE(cli_small({"potential", "--z", "300e-9,400e-9", "--x-points", "8", "-o", b, "--s", "250e-9"}).code == exit_ok);
    CHECK(nlohmann::json::parse(slurp(b + ".manifest.json"))["inputs_hash"] != hash);
}

TEST_CASE("cache directory does not change results") {
    TempDir tmp;
    const std::string a = tmp.file("a.csv");
    const std::string b = tmp.file("b.csv");
    const std::string cache = tmp.file("r.cache");
    REQUIRE(cli_small({"potential", "--z", "300e-9", "--x", "0", "-o", a}).code == exit_ok);
    REQUIRE(cli_small({"potential", "--z", "300e-9", "--x", "0", "-o", b, "--cache", cache}).code == exit_ok);
    CHECK(fs::exists(cache));
    CHECK(slurp(a) == slurp(b));
    REQUIRE(cli_small({"potential", "--z", "300e-9", "--x", "0", "-o", b, "--cache", cache}).code == exit_ok);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("converge subcommand matches the library") {
    const auto r = cli_small({"converge", "--z", "500e-9", "--x", "0", "--nmax-list", "1,2,3"});
    REQUIRE(r.code == exit_ok);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0][4] == "rel_deviation");
    QuadratureSpec q;
    q.n_xi = 8;
    q.n_ky = 8;
    q.n_kx0 = 4;
    const PotentialProblem p{presets::rubidium(), presets::silicon(), {600e-9, 100e-9, 300e-9}, {1}, q};
    const auto t = converge_nmax(p, 500e-9, {1, 2, 3}, {0.0});
    for (int k = 0; k < 3; ++k) {
        CHECK(std::stoi(rows[k + 1][2]) == t.n_list[k]);
        CHECK(std::stod(rows[k + 1][3]) == t.rows[0].values[k]);
        CHECK(std::stod(rows[k + 1][4]) == t.rows[0].deviations[k]);
    }
}

TEST_CASE("figure recipe fills the scan") {
    const auto r = cli_small({"fig2", "--points", "3"});
    REQUIRE(r.code == exit_ok);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 4);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][0]) == doctest::Approx(300e-9)); // plateau midpoint of d = 6a
        CHECK(std::stod(rows[i][4]) < 1.0);
        CHECK(rows[i][6].find("plateau") == 0);
    }
    CHECK(std::stod(rows[1][1]) == doctest::Approx(200e-9));
    CHECK(std::stod(rows[3][1]) == doctest::Approx(1000e-9));
}

TEST_CASE("kk subcommand") {
    TempDir tmp;
    const testing::DampedLorentz osc;
    const auto samples = osc.sample(1e12, 1e19, 4000);
    const std::string rad = tmp.file("rad.dat");
    const std::string ev = tmp.file("ev.dat");
    {
        std::ofstream f(rad), g(ev);
        f.precision(17);
        g.precision(17);
        g << "# units: eV\n";
        for (const auto& s : samples) {
            f << s.omega << " " << s.im_eps << "\n";
            g << s.omega / constants::ev_to_rad_per_s << " " << s.im_eps << "\n";
        }
    }
    const auto a = cli({"kk", "--input", rad, "--xi-min", "1e13", "--xi-max", "1e17", "--kk-points", "17"});
    const auto b = cli({"kk", "--input", ev, "--xi-min", "1e13", "--xi-max", "1e17", "--kk-points", "17"});
    REQUIRE(a.code == exit_ok);
    REQUIRE(b.code == exit_ok);
    const auto ra = csv_rows(a.out);
    const auto rb = csv_rows(b.out);
    REQUIRE(ra.size() == 18);
    REQUIRE(rb.size() == 18);
    for (std::size_t i = 1; i < ra.size(); ++i) {
        const double xi = std::stod(ra[i][0]);
        const double e = std::stod(ra[i][1]);
        CHECK(std::abs(e / osc.on_imaginary_axis(xi) - 1.0) <= 1e-3);
        CHECK(std::stod(rb[i][1]) == doctest::Approx(e).epsilon(1e-12));
    }

    const std::string empty = tmp.file("empty.dat");
    { std::ofstream f(empty); }
    const auto r = cli({"kk", "--input", empty});
    CHECK(r.code == exit_config);
    CHECK(r.log.find("line") != std::string::npos);

    const std::string broken = tmp.file("broken.dat");
    {
        std::ofstream f(broken);
        f << "1e15 0.1\n2e15 0.2\n3e15\n";
    }
    const auto rr = cli({"kk", "--input", broken});
    CHECK(rr.code == exit_config);
    CHECK(rr.log.find("line 3") != std::string::npos);
}
