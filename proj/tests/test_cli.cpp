#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "permot/io.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("permot_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    std::string cmd = std::string(PERMOT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("lattice subcommand emits the expected rows") {
    TempDir tmp;
    write(tmp.file("body.json"), R"({"dim":1,"vertices":[[-1],[1]]})");
    int code = run("--out-dir " + tmp.path.string() + " lattice --body " + tmp.file("body.json") +
                   " --k 2");
    CHECK(code == 0);
    auto csv = permot::io::read_csv(tmp.file("lattice.csv"));
    REQUIRE(csv.rows.size() == 5);
    CHECK(csv.header[0] == "index");
    CHECK(csv.rows[0][1] == -2.0);
    CHECK(csv.rows[4][1] == 2.0);
    CHECK(fs::exists(tmp.file("manifest.json")));
}

TEST_CASE("assign subcommand prints the worked optimum") {
    TempDir tmp;
    write(tmp.file("cost.csv"), "c1,c2\n0,2\n3,1\n");
    std::string cmd = std::string(PERMOT_CLI_PATH) + " assign --cost " + tmp.file("cost.csv") +
                      " > " + tmp.file("out.txt") + " 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    auto text = slurp(tmp.file("out.txt"));
    CHECK(text.find("C(sigma) = 0.5") != std::string::npos);
}

TEST_CASE("unknown flags exit with configuration code 2 and no outputs") {
    TempDir tmp;
    int code = run("--out-dir " + tmp.path.string() + " lattice --nonsense 3");
    CHECK(code == 2);
    CHECK(!fs::exists(tmp.file("lattice.csv")));
}

TEST_CASE("missing files exit with configuration code 2") {
    TempDir tmp;
    CHECK(run("lattice --body /nonexistent.json --k 2") == 2);
    CHECK(run("w1 --a /nonexistent.csv --b /nonexistent.csv") == 2);
}

TEST_CASE("permanent subcommand") {
    TempDir tmp;
    write(tmp.file("kernel.csv"), "a1,a2\n0,0.6931471805599453\n1.0986122886681098,1.3862943611198906\n");
    std::string cmd = std::string(PERMOT_CLI_PATH) + " --out-dir " + tmp.path.string() +
                      " permanent --kernel " + tmp.file("kernel.csv") + " > " +
                      tmp.file("out.txt") + " 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    auto text = slurp(tmp.file("out.txt"));
    CHECK(text.find("log_permanent = 2.30258") != std::string::npos);  // log 10
    auto m = permot::io::read_csv(tmp.file("marginal.csv"));
    CHECK(m.rows[0][0] == doctest::Approx(0.4));
}

TEST_CASE("solve-ma and reproducible manifests") {
    TempDir tmp;
    write(tmp.file("body.json"), R"({"dim":1,"vertices":[[0],[1]]})");
    std::string args = "--out-dir " + tmp.path.string() + " solve-ma --beta 0 --density 1" +
                       " --weight 0 --body " + tmp.file("body.json") + " --window 0:1:401";
    REQUIRE(run(args) == 0);
    auto first = slurp(tmp.file("phi.csv"));
    auto manifest_first = slurp(tmp.file("manifest.json"));
    REQUIRE(run(args) == 0);
    CHECK(slurp(tmp.file("phi.csv")) == first);  // identical manifest, identical bytes
    CHECK(slurp(tmp.file("manifest.json")) == manifest_first);
    CHECK(manifest_first.find("output_digests") != std::string::npos);
}

TEST_CASE("sample and transport-map run from a spec file") {
    TempDir tmp;
    write(tmp.file("spec.json"), R"({
        "body": {"dim":1, "vertices":[[0],[1]]},
        "k": 4,
        "beta_rule": "equal_k",
        "weight": "0",
        "density": "1",
        "support": [0.0, 1.0]
    })");
    REQUIRE(run("--out-dir " + tmp.path.string() + " --seed 5 sample --spec " +
                tmp.file("spec.json") + " --steps 4000") == 0);
    auto samples = permot::io::read_csv(tmp.file("samples.csv"));
    CHECK(samples.header.size() == 5);  // N = 5 particles
    CHECK(samples.rows.size() > 100);

    REQUIRE(run("--out-dir " + tmp.path.string() + " --seed 5 transport-map --spec " +
                tmp.file("spec.json") + " --queries 0.5 --samples 40") == 0);
    auto map = permot::io::read_csv(tmp.file("transport_map.csv"));
    CHECK(map.header[1] == "T_N");
    CHECK(map.rows[0][1] == doctest::Approx(0.5).epsilon(0.25));
    CHECK(fs::exists(tmp.file("transport_map.svg")));
    CHECK(fs::exists(tmp.file("transport_map.dat")));
}

TEST_CASE("verify subcommand runs a named suite subset") {
    CHECK(run("verify --suite birkhoff") == 0);
    CHECK(run("verify --suite no_such_criterion") == 2);
}

TEST_CASE("balanced subcommand") {
    TempDir tmp;
    write(tmp.file("body.json"), R"({"dim":1,"vertices":[[-0.2],[1.0]]})");
    write(tmp.file("space.json"),
          R"({"points":[0.0,0.333,0.667,1.0],"mu0":[0.25,0.25,0.25,0.25],"phi0":[0,0,0,0]})");
    std::string cmd = std::string(PERMOT_CLI_PATH) + " --out-dir " + tmp.path.string() +
                      " balanced --space " + tmp.file("space.json") + " --body " +
                      tmp.file("body.json") + " --k 1 --betaN 2 > " + tmp.file("out.txt") +
                      " 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(slurp(tmp.file("out.txt")).find("balanced: residual") != std::string::npos);
    auto csv = permot::io::read_csv(tmp.file("balanced.csv"));
    CHECK(csv.header[1] == "u_N");
    REQUIRE(csv.rows.size() == 4);
    CHECK(csv.rows[0][1] == 0.0);  // anchored at the first support point
}
