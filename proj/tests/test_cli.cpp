#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code = 0;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(BETTILAB_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    RunResult r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::size_t n = 0;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string golden(const std::string& name) {
    return read_file(std::string(BETTILAB_GOLDEN_DIR) + "/" + name);
}

std::string data_file(const std::string& name) {
    return std::string(BETTILAB_DATA_DIR) + "/" + name;
}

// the golden command lines, one per subcommand
const std::pair<const char*, const char*> kGoldenRuns[] = {
    {"betti.json", "betti --g 1 --Z i --w 0.5+0.5i --seed 1"},
    {"betti_scaling.json", "betti --scaling --N 2"},
    {"nondegeneracy.json",
     "nondegeneracy --family legendre --section two_torsion_0 --lambda 0.3"},
    {"height.json", "height --curve A=0,B=-2 --P 3,5 --tol 1e-4"},
    {"silverman_tate.json", "silverman-tate --grid 8 --tol 1e-3 --digit-budget 2000000"},
    {"siu.json", "siu --Fd 100 --MF 10 --d 2 --N 1 --c1 4"},
    {"count_bound.json", "count bound --c 7 --rho 2"},
    {"count_hurwitz.json", "count hurwitz --g 2"},
};

} // namespace

TEST_CASE("golden reports per command") {
    for (const auto& [file, args] : kGoldenRuns) {
        INFO("command: " << args);
        const RunResult r = run_cli(args);
        CHECK(r.exit_code == 0);
        CHECK(r.out == golden(file));
    }
}

TEST_CASE("golden reports with data files") {
    {
        const RunResult r =
            run_cli("count cover --points " + data_file("points.csv") + " --r 0.6");
        CHECK(r.exit_code == 0);
        // path-bearing config lines vary with the checkout; compare results only
        CHECK(r.out.find("\"count\": 5") != std::string::npos);
        CHECK(r.out.find("\"within_bound\": true") != std::string::npos);
    }
    {
        const RunResult r =
            run_cli("count split --heights " + data_file("heights.csv") + " --B 1.0");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("\"p4\"") != std::string::npos);
    }
    {
        const RunResult r = run_cli("alon --system " + data_file("system_conic.json") +
                                    " --sigma " + data_file("sigma_conic.csv") + " --M 2");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("\"not_contained\": false") != std::string::npos);
    }
    {
        const RunResult r = run_cli("count dichotomy --curve A=0,B=-2 --candidates " +
                                    data_file("candidates.csv") +
                                    " --P 3,5 --c3 2 --c4 inf --h-base 0 --tol 1e-5");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("\"label\": \"AlternativeII\"") != std::string::npos);
        CHECK(r.out.find("\"count\": 1") != std::string::npos);
    }
}

TEST_CASE("every report carries the published schema") {
    // {command, config, results, errors, meta} at the top level; meta.version
    for (const auto& [file, args] : kGoldenRuns) {
        const RunResult r = run_cli(args);
        for (const char* key :
             {"\"command\":", "\"config\":", "\"results\":", "\"errors\":", "\"meta\":",
              "\"version\":"}) {
            INFO("command: " << args << ", key: " << key);
            CHECK(r.out.find(key) != std::string::npos);
        }
    }
}

TEST_CASE("determinism: identical config gives byte-identical reports") {
    for (const std::string args :
         {std::string("betti --g 2 --Z '1+1i,0.2+0.1i;0.2+0.1i,-0.3+2i' --w 0.3+0.4i,0.1-0.2i "
                      "--seed 42 --psd-samples 50"),
          std::string("silverman-tate --grid 12 --tol 1e-3 --digit-budget 2000000"),
          std::string("nondegeneracy --section const_x2 --lambda 0.35+0.02i")}) {
        const RunResult a = run_cli(args);
        const RunResult b = run_cli(args);
        CHECK(a.exit_code == 0);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("exit code contract") {
    SECTION("0 on success") {
        CHECK(run_cli("count hurwitz --g 5").exit_code == 0);
    }
    SECTION("2 on validation failure") {
        CHECK(run_cli("betti --Z 1+0i").exit_code == 2);           // Im Z not PD
        CHECK(run_cli("nondegeneracy --lambda 1.0").exit_code == 2);
        CHECK(run_cli("count hurwitz --g 1").exit_code == 2);
        CHECK(run_cli("height --curve A=0,B=-2 --P 3,4").exit_code == 2);
        CHECK(run_cli("siu --Fd 100 --MF 10 --d 2 --N 1 --c1 4/0").exit_code == 2);
        CHECK(run_cli("betti --Z notanumber").exit_code == 2);
    }
    SECTION("3 on numeric failure") {
        // kernel direction: the scaling ratio is undefined
        CHECK(run_cli("betti --Z i --w 0.5i --xi-w 0.5 --xi-Z 1 --scaling --N 2").exit_code == 3);
    }
    SECTION("4 on budget exhaustion") {
        CHECK(run_cli("height --curve A=0,B=-2 --P 3,5 --tol 1e-9 --digit-budget 2000")
                  .exit_code == 4);
        CHECK(run_cli("alon --system " + data_file("system_conic.json") + " --sigma " +
                      data_file("sigma_conic.csv") + " --M 2 --budget 3")
                  .exit_code == 4);
    }
    SECTION("machine-readable error object accompanies failures") {
        const RunResult r = run_cli("count hurwitz --g 1");
        CHECK(r.out.find("\"code\": \"GenusTooSmall\"") != std::string::npos);
        CHECK(r.out.find("\"category\": \"validation\"") != std::string::npos);
    }
}

TEST_CASE("csv and text formats") {
    const RunResult csv = run_cli("--format csv count bound --c 7 --rho 2");
    CHECK(csv.exit_code == 0);
    CHECK(csv.out.find("key,value") != std::string::npos);
    CHECK(csv.out.find("assembled_bound,343") != std::string::npos);
    const RunResult txt = run_cli("--format text count hurwitz --g 2");
    CHECK(txt.out.find("bound = 84") != std::string::npos);
}

TEST_CASE("config file mirrors flags") {
    const std::string cfg_path = "/tmp/bettilab_cli_test.cfg";
    {
        std::ofstream cfg(cfg_path);
        cfg << "format=json\n";
    }
    const RunResult a = run_cli("--config " + cfg_path + " count hurwitz --g 2");
    CHECK(a.exit_code == 0);
    CHECK(a.out.find("\"bound\": 84") != std::string::npos);
    std::remove(cfg_path.c_str());
}
