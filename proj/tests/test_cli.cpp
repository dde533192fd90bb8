#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct cli_result {
    int exit_code = -1;
    std::string out;
};

cli_result run_cli(const std::string& args, const std::string& env = "") {
    std::string cmd = env.empty() ? "" : env + " ";
    cmd += std::string(CRFORGE_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    cli_result r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int status = pclose(p);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string strip_timestamp(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        if (line.find("\"timestamp\"") == std::string::npos)
            out += line + "\n";
    return out;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("list shows the full catalog") {
    auto r = run_cli("list");
    REQUIRE(r.exit_code == 0);
    for (const char* name :
         {"heisenberg3", "heisenberg5", "cr_sphere_s3", "euclidean_c1",
          "poincare_disc", "twisted_c2", "heisenberg3_warped"})
        CHECK(contains(r.out, name));
    CHECK(contains(r.out, "h3_to_c1  (ph_to_hermitian"));
    CHECK(contains(r.out, "id_s3  (transversal"));
    CHECK(contains(r.out, "bundle_hm_s3  (base cr_sphere_s3, rank 1)"));

    auto j = run_cli("list --json");
    REQUIRE(j.exit_code == 0);
    CHECK(contains(j.out, "\"schema_version\": 1"));
    CHECK(contains(j.out, "\"manifolds\""));
    CHECK(contains(j.out, "\"category\": \"almost-cr\""));
}

TEST_CASE("version flag") {
    auto r = run_cli("--version");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.out, "crforge 0.1.0"));
}

TEST_CASE("model run passes and reports") {
    auto r = run_cli("run --model heisenberg3 --points 3 --order 4");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.out, "PASS geometry.integrability"));
    CHECK(contains(r.out, "PASS frames.curvature_identity"));
    CHECK(contains(r.out, "PASS lifts.transfer"));
    CHECK(contains(r.out, "torsion-free"));
    CHECK(contains(r.out, "18 checks, 18 passed, 0 failed"));

    auto w = run_cli("run --model heisenberg3_warped --points 2 --order 4");
    REQUIRE(w.exit_code == 0);
    CHECK(contains(w.out, "[torsion,"));
}

TEST_CASE("map run passes and reports") {
    auto r = run_cli("run --map h3_to_c1_quad --points 3 --order 4");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.out, "map h3_to_c1_quad (ph_to_hermitian"));
    CHECK(contains(r.out, "PASS bochner.two_path"));
    CHECK(contains(r.out, "PASS bochner.remainder_nonneg"));
    CHECK(contains(r.out, "7 checks, 7 passed, 0 failed"));
}

TEST_CASE("non-integrable model fails by design") {
    auto r = run_cli("run --model twisted_c2 --points 2 --order 4");
    REQUIRE(r.exit_code == 1);
    CHECK(contains(r.out, "FAIL geometry.integrability"));
    CHECK(contains(r.out, "FAIL lifts.tangent_integrability"));
    CHECK(contains(r.out, "PASS lifts.transfer"));
}

TEST_CASE("tolerance overrides are honored") {
    auto r = run_cli(
        "run --model twisted_c2 --suite lifts --points 2 --order 4 "
        "--tol lifts.tangent_integrability=10");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.out, "PASS lifts.tangent_integrability"));
    CHECK(contains(r.out, "(tol 1.000e+01"));
}

TEST_CASE("json output is deterministic across runs") {
    const std::string args =
        "run --model cr_sphere_s3 --points 2 --order 4 --seed 7 --json";
    auto a = run_cli(args);
    auto b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    CHECK(contains(a.out, "\"timestamp\""));
    CHECK(strip_timestamp(a.out) == strip_timestamp(b.out));

    auto c = run_cli("run --map id_s3 --points 2 --order 4 --json");
    auto d = run_cli("run --map id_s3 --points 2 --order 4 --json");
    REQUIRE(c.exit_code == 0);
    CHECK(strip_timestamp(c.out) == strip_timestamp(d.out));
    CHECK(contains(c.out, "\"summary\""));
    CHECK(contains(c.out, "\"passed\": 7"));
}

TEST_CASE("configuration errors exit 2") {
    CHECK(run_cli("run --model nosuch").exit_code == 2);
    CHECK(run_cli("run --map nosuch").exit_code == 2);
    CHECK(run_cli("run").exit_code == 2);
    CHECK(run_cli("run --model heisenberg3 --suite nope").exit_code == 2);
    CHECK(run_cli("run --model heisenberg3 --suite bochner").exit_code == 2);
    CHECK(run_cli("run --map id_s3 --suite frames").exit_code == 2);
    CHECK(run_cli("run --model heisenberg3 --order 11").exit_code == 2);
    CHECK(run_cli("run --model heisenberg3 --points 0").exit_code == 2);
    CHECK(run_cli("run --model heisenberg3 --tol frames.gamma=abc")
              .exit_code == 2);
    CHECK(run_cli("run --model heisenberg3 --tol nope=1e-5").exit_code == 2);
    CHECK(run_cli("nosuchcommand").exit_code == 2);
    auto r = run_cli("explain nosuch.check");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.out, "known ids"));
}

TEST_CASE("explain describes a check") {
    auto r = run_cli("explain bochner.two_path");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.out, "bochner.two_path"));
    CHECK(contains(r.out, "default tolerance: 1.000e-07"));
    CHECK(contains(r.out, "independent"));
}

namespace {

// Golden comparison keeps the structural fields and drops everything that
// may legitimately vary between toolchains (residuals, timestamp).
std::string structural_lines(const std::string& text) {
    static const char* keep[] = {
        "\"schema_version\"", "\"name\"",   "\"version\"", "\"model\"",
        "\"map\"",            "\"suite\"",  "\"points\"",  "\"seed\"",
        "\"order\"",          "\"category\"", "\"m\"",     "\"m0\"",
        "\"d\"",              "\"kind\"",   "\"source\"",  "\"target\"",
        "\"id\"",             "\"tol\"",    "\"pass\"",    "\"total\"",
        "\"passed\"",         "\"failed\"", "\"torsion_free\""};
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line))
        for (const char* k : keep)
            if (line.find(k) != std::string::npos) {
                out += line + "\n";
                break;
            }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("reports match the pinned golden structure") {
    const std::string dir = CRFORGE_GOLDEN_DIR;
    auto a = run_cli("run --model heisenberg3 --points 5 --order 4 --seed 2 "
                     "--json");
    REQUIRE(a.exit_code == 0);
    CHECK(structural_lines(a.out) ==
          structural_lines(read_file(dir + "/run_heisenberg3.json")));

    auto b = run_cli("run --map h3_to_c1_quad --points 5 --order 4 --seed 2 "
                     "--json");
    REQUIRE(b.exit_code == 0);
    CHECK(structural_lines(b.out) ==
          structural_lines(read_file(dir + "/run_h3_to_c1_quad.json")));

    auto c = run_cli("list --json");
    REQUIRE(c.exit_code == 0);
    CHECK(c.out == read_file(dir + "/list.json"));
}

TEST_CASE("model search path is honored") {
    auto r = run_cli("list", "CRFORGE_MODEL_PATH=" CRFORGE_MODELS_DIR);
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.out, "heisenberg3"));
    CHECK(contains(r.out, "h3_to_c1_quad"));

    auto missing = run_cli("list", "CRFORGE_MODEL_PATH=/nonexistent_dir");
    CHECK(missing.exit_code == 0);

    std::string dir = "/tmp/crforge_cli_bad_models";
    REQUIRE(std::system(("mkdir -p " + dir).c_str()) == 0);
    FILE* f = fopen((dir + "/broken.crm").c_str(), "w");
    REQUIRE(f != nullptr);
    fputs("manifold broken {\n  coords = [x, y]\n", f);
    fclose(f);
    auto bad = run_cli("list", "CRFORGE_MODEL_PATH=" + dir);
    CHECK(bad.exit_code == 2);
    CHECK(contains(bad.out, "configuration error"));
}