#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <utility>

#include "crforge/model.hpp"

namespace crforge {

// Heisenberg group H^{2n+1} in its standard chart: frame fields
// Z_j = @x_j - i @y_j + (y_j + i x_j) @t annihilated by
// theta = dt + sum (x_j dy_j - y_j dx_j), Reeb field @t.
inline std::string make_heisenberg_text(int n) {
    if (n < 1 || n > 2)
        throw schema_error("heisenberg generator supports n = 1, 2");
    static const double cycle[4] = {0.1, -0.15, 0.2, 0.05};
    auto fmt = [](double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    };
    auto coord = [&](const char* base, int j) {
        return n == 1 ? std::string(base) : std::string(base) + fmt(j + 1);
    };
    std::ostringstream os;
    os << "[manifold]\n";
    os << "name = \"heisenberg" << (2 * n + 1) << "\"\n";
    os << "coordinates = [";
    for (int j = 0; j < n; ++j)
        os << "\"" << coord("x", j) << "\", \"" << coord("y", j) << "\", ";
    os << "\"t\"]\n";
    os << "basepoint = [";
    for (int j = 0; j < 2 * n; ++j) os << fmt(cycle[j % 4]) << ", ";
    os << fmt(cycle[(2 * n) % 4]) << "]\n";
    os << "box = [";
    for (int j = 0; j < 2 * n + 1; ++j)
        os << (j ? ", " : "") << "[-0.6, 0.6]";
    os << "]\n\n";
    os << "[frame]\nvectors = [\n";
    for (int j = 0; j < n; ++j) {
        os << "  [";
        for (int k = 0; k < n; ++k) {
            if (k) os << ", ";
            os << (k == j ? "\"1\", \"-i\"" : "\"0\", \"0\"");
        }
        os << ", \"" << coord("y", j) << " + i*" << coord("x", j) << "\"],\n";
    }
    os << "]\n\n";
    os << "[complement]\nvectors = [\n  [";
    for (int j = 0; j < 2 * n; ++j) os << "\"0\", ";
    os << "\"1\"],\n]\n\n";
    os << "[theta]\ncomponents = [";
    for (int j = 0; j < n; ++j)
        os << "\"-" << coord("y", j) << "\", \"" << coord("x", j) << "\", ";
    os << "\"1\"]\n";
    return os.str();
}

inline const std::vector<std::pair<std::string, std::string>>&
builtin_model_texts() {
    static const std::vector<std::pair<std::string, std::string>> texts = [] {
        std::vector<std::pair<std::string, std::string>> v;
        v.emplace_back("heisenberg3", make_heisenberg_text(1));
        v.emplace_back("heisenberg5", make_heisenberg_text(2));

        // Unit sphere in C^2 with its inherited CR structure, in the torus
        // chart z1 = cos(eta) e^{i ph1}, z2 = sin(eta) e^{i ph2}; theta is
        // the restriction of sum (x dy - y dx).  Box stays clear of the
        // chart poles eta = 0, pi/2.
        v.emplace_back("cr_sphere_s3", std::string(R"MODEL([manifold]
name = "cr_sphere_s3"
coordinates = ["eta", "ph1", "ph2"]
basepoint = [0.7, 0.4, -0.3]
box = [[0.35, 1.1], [-0.8, 0.8], [-0.8, 0.8]]

[frame]
vectors = [
  ["1", "i*sin(eta)/cos(eta)", "-i*cos(eta)/sin(eta)"],
]

[complement]
vectors = [
  ["0", "1", "1"],
]

[theta]
components = ["0", "cos(eta)^2", "sin(eta)^2"]
)MODEL"));

        v.emplace_back("euclidean_c1", std::string(R"MODEL([manifold]
name = "euclidean_c1"
coordinates = ["x", "y"]
basepoint = [0.3, -0.2]
box = [[-1, 1], [-1, 1]]

[frame]
vectors = [
  ["1", "-i"],
]

[metric]
h = [
  ["1"],
]
)MODEL"));

        v.emplace_back("euclidean_c2", std::string(R"MODEL([manifold]
name = "euclidean_c2"
coordinates = ["x1", "y1", "x2", "y2"]
basepoint = [0.2, -0.1, 0.15, 0.25]
box = [[-1, 1], [-1, 1], [-1, 1], [-1, 1]]

[frame]
vectors = [
  ["1", "-i", "0", "0"],
  ["0", "0", "1", "-i"],
]

[metric]
h = [
  ["1", "0"],
  ["0", "1"],
]
)MODEL"));

        v.emplace_back("poincare_disc", std::string(R"MODEL([manifold]
name = "poincare_disc"
coordinates = ["x", "y"]
basepoint = [0.2, -0.1]
box = [[-0.55, 0.55], [-0.55, 0.55]]

[frame]
vectors = [
  ["1", "-i"],
]

[metric]
h = [
  ["1/(1 - x^2 - y^2)^2"],
]
)MODEL"));

        // Almost complex structure on R^4 whose (1,0) frame is sheared by
        // 0.4*x2 in the first factor; the shear makes [Z1, Z2] pick up a
        // (0,1) part, so the structure is not integrable.
        v.emplace_back("twisted_c2", std::string(R"MODEL([manifold]
name = "twisted_c2"
coordinates = ["x1", "y1", "x2", "y2"]
basepoint = [0.1, 0.05, -0.2, 0.15]
box = [[-0.5, 0.5], [-0.5, 0.5], [-0.5, 0.5], [-0.5, 0.5]]

[frame]
vectors = [
  ["1 + 0.4*x2", "i*(0.4*x2 - 1)", "0", "0"],
  ["0", "0", "1", "-i"],
]
)MODEL"));

        // Heisenberg frame with the rescaled contact form (1 + 0.3 x) theta.
        // The rescaling keeps the CR structure and positivity on the box but
        // the new structure carries nonzero torsion.
        v.emplace_back("heisenberg3_warped", std::string(R"MODEL([manifold]
name = "heisenberg3_warped"
coordinates = ["x", "y", "t"]
basepoint = [0.1, -0.15, 0.2]
box = [[-0.6, 0.6], [-0.6, 0.6], [-0.6, 0.6]]

[frame]
vectors = [
  ["1", "-i", "y + i*x"],
]

[complement]
vectors = [
  ["0", "0", "1"],
]

[theta]
components = ["-y*(1 + 0.3*x)", "x*(1 + 0.3*x)", "1 + 0.3*x"]
)MODEL"));

        v.emplace_back("maps", std::string(R"MODEL([map]
name = "h3_to_c1"
source = "heisenberg3"
target = "euclidean_c1"
kind = "ph_to_hermitian"
components = ["x", "y"]

[map]
name = "h3_to_c1_quad"
source = "heisenberg3"
target = "euclidean_c1"
kind = "ph_to_hermitian"
components = ["x^2 - y^2", "2*x*y"]

[map]
name = "c1_to_h3"
source = "euclidean_c1"
target = "heisenberg3"
kind = "hermitian_to_ph"
components = ["x", "y", "0"]

[map]
name = "id_h3"
source = "heisenberg3"
target = "heisenberg3"
kind = "transversal"
components = ["x", "y", "t"]

[map]
name = "id_s3"
source = "cr_sphere_s3"
target = "cr_sphere_s3"
kind = "transversal"
components = ["eta", "ph1", "ph2"]
)MODEL"));

        // bundle_hm_s3 is the CR-tangent line bundle of the sphere model
        // with its canonical connection; omega was computed from the frame
        // bracket [Z, conj Z] = 2 cot(2 eta) (Z - conj Z) - 4i Reeb.
        v.emplace_back("bundles", std::string(R"MODEL([bundle]
name = "bundle_trivial_h3"
base = "heisenberg3"
rank = 1
structure = [
  ["i"],
]
omega = [
  [["0", "0", "0"]],
]

[bundle]
name = "bundle_hm_s3"
base = "cr_sphere_s3"
rank = 1
structure = [
  ["i"],
]
omega = [
  [["0", "-i*cos(2*eta)", "i*cos(2*eta)"]],
]
)MODEL"));
        return v;
    }();
    return texts;
}

inline const model_registry& builtin_registry() {
    static const model_registry reg = [] {
        model_registry r;
        for (const auto& [origin, text] : builtin_model_texts())
            r.load_text(text, origin);
        r.finalize();
        return r;
    }();
    return reg;
}

// Builtins plus any *.crm files found under the ':'-separated directory list
// in CRFORGE_MODEL_PATH.  User files may shadow builtin names.
inline model_registry registry_with_env() {
    model_registry r = builtin_registry();
    const char* path = std::getenv("CRFORGE_MODEL_PATH");
    if (path && *path) {
        std::string list(path);
        size_t start = 0;
        while (start <= list.size()) {
            size_t colon = list.find(':', start);
            std::string dir = list.substr(
                start, colon == std::string::npos ? std::string::npos
                                                  : colon - start);
            if (!dir.empty() && std::filesystem::is_directory(dir)) {
                std::vector<std::filesystem::path> files;
                for (const auto& entry :
                     std::filesystem::directory_iterator(dir))
                    if (entry.path().extension() == ".crm")
                        files.push_back(entry.path());
                std::sort(files.begin(), files.end());
                for (const auto& p : files) {
                    std::ifstream in(p);
                    std::stringstream ss;
                    ss << in.rdbuf();
                    r.load_text(ss.str(), p.filename().string());
                }
            }
            if (colon == std::string::npos) break;
            start = colon + 1;
        }
    }
    r.finalize();
    return r;
}

}  // namespace crforge
