#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crforge/builtin.hpp"
#include "crforge/model.hpp"

using namespace crforge;

static std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST_CASE("model file value grammar") {
    model_registry r;
    r.load_text(R"(# top comment
[manifold]
name = "demo"  # trailing comment
coordinates = ["x", "y"]
basepoint = [0.25, -0.5]
box = [
  [-1, 1],
  [-1, 1],
]

[frame]
vectors = [["1", "-i"]]
)",
                "inline");
    const auto& M = r.manifold("demo");
    CHECK(M.coords == std::vector<std::string>{"x", "y"});
    CHECK(M.basepoint[0] == 0.25);
    CHECK(M.basepoint[1] == -0.5);
    CHECK(M.box[1][1] == 1.0);
    CHECK(M.m0() == 1);
    CHECK(M.d() == 0);
    CHECK(M.category() == model_category::almost_cr);
}

TEST_CASE("model file errors carry position and field names") {
    model_registry r;

    SECTION("missing field is named") {
        try {
            r.load_text("[manifold]\nname = \"m\"\ncoordinates = [\"x\", "
                        "\"y\"]\nbox = [[-1, 1], [-1, 1]]\n\n[frame]\nvectors "
                        "= [[\"1\", \"-i\"]]\n",
                        "inline");
            FAIL("expected schema_error");
        } catch (const schema_error& e) {
            CHECK(std::string(e.what()).find("basepoint") !=
                  std::string::npos);
        }
    }

    SECTION("missing frame section is named") {
        try {
            r.load_text("[manifold]\nname = \"m\"\ncoordinates = "
                        "[\"x\"]\nbasepoint = [0]\nbox = [[-1, 1]]\n",
                        "inline");
            FAIL("expected schema_error");
        } catch (const schema_error& e) {
            CHECK(std::string(e.what()).find("frame") != std::string::npos);
        }
    }

    SECTION("unterminated string") {
        CHECK_THROWS_AS(r.load_text("[manifold]\nname = \"m\n", "inline"),
                        parse_error);
    }

    SECTION("malformed number") {
        CHECK_THROWS_AS(
            r.load_text("[manifold]\nname = \"m\"\nbasepoint = [1..2]\n",
                        "inline"),
            parse_error);
    }

    SECTION("key outside any section") {
        CHECK_THROWS_AS(r.load_text("name = \"m\"\n", "inline"), parse_error);
    }

    SECTION("unknown section") {
        CHECK_THROWS_AS(r.load_text("[nonsense]\nkey = 1\n", "inline"),
                        schema_error);
    }
}

TEST_CASE("manifold validation") {
    model_registry r;

    SECTION("dimension bookkeeping must close up") {
        // 2*m0 + d = 2 but the chart has 3 coordinates.
        CHECK_THROWS_AS(
            r.load_text("[manifold]\nname = \"m\"\ncoordinates = [\"x\", "
                        "\"y\", \"t\"]\nbasepoint = [0, 0, 0]\nbox = [[-1, "
                        "1], [-1, 1], [-1, 1]]\n\n[frame]\nvectors = "
                        "[[\"1\", \"-i\", \"0\"]]\n",
                        "inline"),
            schema_error);
    }

    SECTION("basepoint must sit inside the box") {
        CHECK_THROWS_AS(
            r.load_text("[manifold]\nname = \"m\"\ncoordinates = [\"x\", "
                        "\"y\"]\nbasepoint = [2, 0]\nbox = [[-1, 1], [-1, "
                        "1]]\n\n[frame]\nvectors = [[\"1\", \"-i\"]]\n",
                        "inline"),
            schema_error);
    }

    SECTION("degenerate frame is rejected") {
        // Complement equals the frame field, so the block matrix is singular.
        CHECK_THROWS_AS(
            r.load_text("[manifold]\nname = \"m\"\ncoordinates = [\"x\", "
                        "\"y\", \"t\"]\nbasepoint = [0, 0, 0]\nbox = [[-1, "
                        "1], [-1, 1], [-1, 1]]\n\n[frame]\nvectors = "
                        "[[\"1\", \"-i\", \"0\"]]\n\n[complement]\nvectors = "
                        "[[\"1\", \"-i\", \"0\"]]\n",
                        "inline"),
            validation_error);
    }

    SECTION("theta must annihilate the frame") {
        CHECK_THROWS_AS(
            r.load_text("[manifold]\nname = \"m\"\ncoordinates = [\"x\", "
                        "\"y\", \"t\"]\nbasepoint = [0.1, -0.15, "
                        "0.2]\nbox = [[-1, 1], [-1, 1], [-1, "
                        "1]]\n\n[frame]\nvectors = [[\"1\", \"-i\", \"y + "
                        "i*x\"]]\n\n[complement]\nvectors = [[\"0\", \"0\", "
                        "\"1\"]]\n\n[theta]\ncomponents = [\"0\", \"x\", "
                        "\"1\"]\n",
                        "inline"),
            validation_error);
    }
}

TEST_CASE("builtin heisenberg model") {
    const auto& M = builtin_registry().manifold("heisenberg3");
    CHECK(M.coords == std::vector<std::string>{"x", "y", "t"});
    CHECK(M.m() == 3);
    CHECK(M.m0() == 1);
    CHECK(M.d() == 1);
    CHECK(M.category() == model_category::pseudo_hermitian);

    // theta = dt + x dy - y dx at a sample point.
    std::vector<double> p = {0.3, -0.4, 0.7};
    CHECK(std::abs(eval_value(M.theta[0], M.coords, p) - cplx(0.4)) < 1e-15);
    CHECK(std::abs(eval_value(M.theta[1], M.coords, p) - cplx(0.3)) < 1e-15);
    CHECK(std::abs(eval_value(M.theta[2], M.coords, p) - cplx(1.0)) < 1e-15);

    // Frame field Z = @x - i @y + (y + i x) @t.
    CHECK(std::abs(eval_value(M.frame[0][1], M.coords, p) - cplx(0, -1)) <
          1e-15);
    CHECK(std::abs(eval_value(M.frame[0][2], M.coords, p) -
                   cplx(-0.4, 0.3)) < 1e-15);
}

TEST_CASE("heisenberg generator scales to five dimensions") {
    model_registry r;
    r.load_text(make_heisenberg_text(2), "generated");
    const auto& M = r.manifold("heisenberg5");
    CHECK(M.m() == 5);
    CHECK(M.m0() == 2);
    CHECK(M.d() == 1);
    CHECK(M.coords ==
          std::vector<std::string>{"x1", "y1", "x2", "y2", "t"});
    // theta(Z_2) = 0 pointwise.
    std::vector<double> p = {0.1, 0.2, -0.3, 0.4, 0.5};
    cplx pair = 0.0;
    for (int a = 0; a < 5; ++a)
        pair += eval_value(M.theta[size_t(a)], M.coords, p) *
                eval_value(M.frame[1][size_t(a)], M.coords, p);
    CHECK(std::abs(pair) < 1e-15);
    CHECK_THROWS_AS(make_heisenberg_text(3), schema_error);
}

TEST_CASE("builtin hermitian models") {
    const auto& reg = builtin_registry();
    const auto& E1 = reg.manifold("euclidean_c1");
    CHECK(E1.m() == 2);
    CHECK(E1.m0() == 1);
    CHECK(E1.d() == 0);
    CHECK(E1.category() == model_category::hermitian);
    CHECK(std::abs(eval_value(E1.metric[0][0], E1.coords, E1.basepoint) -
                   cplx(1.0)) < 1e-15);

    const auto& P = reg.manifold("poincare_disc");
    // 1/(1 - r^2)^2 at the origin-free basepoint.
    std::vector<double> q = {0.2, -0.1};
    double lam = 1.0 / std::pow(1.0 - 0.04 - 0.01, 2);
    CHECK(std::abs(eval_value(P.metric[0][0], P.coords, q) - cplx(lam)) <
          1e-14);

    const auto& T = reg.manifold("twisted_c2");
    CHECK(T.category() == model_category::almost_cr);
    CHECK(T.m0() == 2);
}

TEST_CASE("builtin maps and bundles resolve") {
    const auto& reg = builtin_registry();
    const auto& f = reg.map("h3_to_c1");
    CHECK(f.source == "heisenberg3");
    CHECK(f.target == "euclidean_c1");
    CHECK(f.kind == "ph_to_hermitian");
    CHECK(f.components.size() == 2);

    const auto& b = reg.bundle("bundle_hm_s3");
    CHECK(b.base == "cr_sphere_s3");
    CHECK(b.rank == 1);
    CHECK(b.omega[0].size() == 1);
    CHECK(b.omega[0][0].size() == 3);

    CHECK_THROWS_AS(reg.manifold("no_such_model"), schema_error);
}

TEST_CASE("map cross-validation happens at finalize") {
    model_registry r;
    r.load_text(make_heisenberg_text(1), "generated");

    SECTION("unknown target") {
        r.load_text("[map]\nname = \"f\"\nsource = \"heisenberg3\"\ntarget = "
                    "\"nowhere\"\ncomponents = [\"x\"]\n",
                    "inline");
        CHECK_THROWS_AS(r.finalize(), schema_error);
    }

    SECTION("component count must match target dimension") {
        r.load_text("[map]\nname = \"f\"\nsource = \"heisenberg3\"\ntarget = "
                    "\"heisenberg3\"\ncomponents = [\"x\", \"y\"]\n",
                    "inline");
        CHECK_THROWS_AS(r.finalize(), schema_error);
    }

    SECTION("components must use source coordinates") {
        r.load_text("[map]\nname = \"f\"\nsource = \"heisenberg3\"\ntarget = "
                    "\"heisenberg3\"\ncomponents = [\"x\", \"q\", \"t\"]\n",
                    "inline");
        CHECK_THROWS_AS(r.finalize(), parse_error);
    }
}

TEST_CASE("shipped model files match the builtin registry") {
    std::filesystem::path dir(CRFORGE_MODELS_DIR);
    for (const auto& [stem, text] : builtin_model_texts()) {
        INFO("model file " << stem << ".crm");
        CHECK(read_file(dir / (stem + ".crm")) == text);
    }
    // Nothing extra lying around either.
    size_t count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.path().extension() == ".crm") ++count;
    CHECK(count == builtin_model_texts().size());
}

TEST_CASE("model search path extends the registry") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "crforge_models_test";
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "flat.crm");
        out << "[manifold]\nname = \"flat_line\"\ncoordinates = [\"x\", "
               "\"y\"]\nbasepoint = [0, 0]\nbox = [[-1, 1], [-1, "
               "1]]\n\n[frame]\nvectors = [[\"1\", \"-i\"]]\n\n[metric]\nh = "
               "[[\"1\"]]\n";
    }
    setenv("CRFORGE_MODEL_PATH", dir.string().c_str(), 1);
    model_registry r = registry_with_env();
    unsetenv("CRFORGE_MODEL_PATH");
    CHECK(r.manifolds.count("flat_line") == 1);
    CHECK(r.manifolds.count("heisenberg3") == 1);
    fs::remove_all(dir);
}
