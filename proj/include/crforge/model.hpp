#pragma once

#include <array>
#include <cctype>
#include <complex>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crforge/errors.hpp"
#include "crforge/expr.hpp"
#include "crforge/jet.hpp"

namespace crforge {

// Declarative model files: sections [manifold] [frame] [complement] [theta]
// [metric] [map] [bundle], keys of the form `key = value` where value is a
// quoted string, a number, or a (possibly nested, multi-line) array.
// '#' starts a comment. One manifold per file; any number of maps/bundles.

namespace modelfile {

struct value {
    enum kind_t { str, num, arr } kind = num;
    std::string s;
    double d = 0.0;
    std::vector<value> items;
    int line = 1;

    const std::string& as_str(const std::string& what) const {
        if (kind != str)
            throw schema_error(what + ": expected a string (line " +
                               std::to_string(line) + ")");
        return s;
    }
    double as_num(const std::string& what) const {
        if (kind != num)
            throw schema_error(what + ": expected a number (line " +
                               std::to_string(line) + ")");
        return d;
    }
    const std::vector<value>& as_arr(const std::string& what) const {
        if (kind != arr)
            throw schema_error(what + ": expected an array (line " +
                               std::to_string(line) + ")");
        return items;
    }
};

struct section {
    std::string name;
    int line = 1;
    std::map<std::string, value> entries;

    bool has(const std::string& key) const { return entries.count(key) > 0; }
    const value& get(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end())
            throw schema_error("[" + name + "] section (line " +
                               std::to_string(line) + ") is missing the '" +
                               key + "' field");
        return it->second;
    }
};

inline value parse_value(const std::string& text, size_t& i, int& line) {
    auto skip = [&] {
        while (i < text.size()) {
            char c = text[i];
            if (c == '#') {
                while (i < text.size() && text[i] != '\n') ++i;
            } else if (c == '\n') {
                ++line;
                ++i;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++i;
            } else {
                break;
            }
        }
    };
    skip();
    if (i >= text.size())
        throw parse_error("model file: unexpected end of value", line, 1);
    value v;
    v.line = line;
    char c = text[i];
    if (c == '"') {
        ++i;
        v.kind = value::str;
        while (i < text.size() && text[i] != '"') {
            if (text[i] == '\n') ++line;
            v.s += text[i++];
        }
        if (i >= text.size())
            throw parse_error("model file: unterminated string", v.line, 1);
        ++i;
        return v;
    }
    if (c == '[') {
        ++i;
        v.kind = value::arr;
        skip();
        if (i < text.size() && text[i] == ']') {
            ++i;
            return v;
        }
        while (true) {
            v.items.push_back(parse_value(text, i, line));
            skip();
            if (i >= text.size())
                throw parse_error("model file: unterminated array", v.line, 1);
            if (text[i] == ',') {
                ++i;
                skip();
                if (i < text.size() && text[i] == ']') {
                    ++i;
                    return v;
                }
                continue;
            }
            if (text[i] == ']') {
                ++i;
                return v;
            }
            throw parse_error("model file: expected ',' or ']' in array",
                              line, 1);
        }
    }
    // number
    {
        size_t j = i;
        while (j < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[j])) ||
                text[j] == '+' || text[j] == '-' || text[j] == '.' ||
                text[j] == 'e' || text[j] == 'E'))
            ++j;
        if (j == i)
            throw parse_error("model file: expected a value", line, 1);
        v.kind = value::num;
        std::string num = text.substr(i, j - i);
        char* end = nullptr;
        v.d = std::strtod(num.c_str(), &end);
        if (end == num.c_str() || *end != '\0')
            throw parse_error("model file: malformed number '" + num + "'",
                              line, 1);
        i = j;
        return v;
    }
}

inline std::vector<section> parse_sections(const std::string& text) {
    std::vector<section> out;
    size_t i = 0;
    int line = 1;
    auto skip_ws = [&] {
        while (i < text.size()) {
            char c = text[i];
            if (c == '#') {
                while (i < text.size() && text[i] != '\n') ++i;
            } else if (c == '\n') {
                ++line;
                ++i;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++i;
            } else {
                break;
            }
        }
    };
    while (true) {
        skip_ws();
        if (i >= text.size()) break;
        if (text[i] == '[') {
            size_t j = text.find(']', i);
            if (j == std::string::npos)
                throw parse_error("model file: unterminated section header",
                                  line, 1);
            section s;
            s.name = text.substr(i + 1, j - i - 1);
            s.line = line;
            out.push_back(std::move(s));
            i = j + 1;
            continue;
        }
        if (out.empty())
            throw parse_error("model file: key outside of any section", line,
                              1);
        // key = value
        size_t j = i;
        while (j < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[j])) ||
                text[j] == '_'))
            ++j;
        if (j == i)
            throw parse_error("model file: expected a key or section", line,
                              1);
        std::string key = text.substr(i, j - i);
        i = j;
        skip_ws();
        if (i >= text.size() || text[i] != '=')
            throw parse_error("model file: expected '=' after key '" + key +
                                  "'",
                              line, 1);
        ++i;
        out.back().entries[key] = parse_value(text, i, line);
    }
    return out;
}

}  // namespace modelfile

enum class model_category { pseudo_hermitian, hermitian, almost_cr };

inline std::string to_string(model_category c) {
    switch (c) {
        case model_category::pseudo_hermitian: return "pseudo-hermitian";
        case model_category::hermitian: return "hermitian";
        case model_category::almost_cr: return "almost-cr";
    }
    return "?";
}

struct manifold_spec {
    std::string name;
    std::vector<std::string> coords;
    std::vector<double> basepoint;
    std::vector<std::array<double, 2>> box;
    std::vector<std::vector<expr_ptr>> frame;       // m0 x m, (1,0) fields
    std::vector<std::vector<expr_ptr>> complement;  // d x m
    std::vector<expr_ptr> theta;                    // optional contact form
    std::vector<std::vector<expr_ptr>> metric;      // optional, m0 x m0

    int m() const { return int(coords.size()); }
    int m0() const { return int(frame.size()); }
    int d() const { return int(complement.size()); }

    model_category category() const {
        if (!theta.empty() && d() == 1) return model_category::pseudo_hermitian;
        if (d() == 0 && !metric.empty()) return model_category::hermitian;
        return model_category::almost_cr;
    }
};

struct map_spec {
    std::string name;
    std::string source;
    std::string target;
    std::string kind;  // ph_to_hermitian | hermitian_to_ph | transversal
    std::vector<expr_ptr> components;
};

struct bundle_spec {
    std::string name;
    std::string base;
    int rank = 0;
    std::vector<std::vector<expr_ptr>> structure;  // k x k, I matrix
    // omega[j][p] is the connection 1-form component list (length m):
    // nabla s_j = omega_j^p s_p against the coordinate coframe.
    std::vector<std::vector<std::vector<expr_ptr>>> omega;
};

namespace detail {

inline std::vector<expr_ptr> parse_expr_list(
    const modelfile::value& v, const std::vector<std::string>& coords,
    const std::string& what, int expect = -1) {
    const auto& items = v.as_arr(what);
    if (expect >= 0 && int(items.size()) != expect)
        throw schema_error(what + ": expected " + std::to_string(expect) +
                           " entries, found " + std::to_string(items.size()));
    std::vector<expr_ptr> out;
    for (const auto& it : items)
        out.push_back(parse_expr(it.as_str(what), coords));
    return out;
}

}  // namespace detail

// Degree-0 invertibility of the block frame [e | conj e | complement] at the
// basepoint, and theta-annihilation when both frame and theta are present.
inline void validate_manifold(const manifold_spec& M) {
    if (M.m0() < 1) throw schema_error(M.name + ": empty frame");
    if (2 * M.m0() + M.d() != M.m())
        throw schema_error(
            M.name + ": dimension mismatch, 2*m0 + d = " +
            std::to_string(2 * M.m0() + M.d()) + " but chart has " +
            std::to_string(M.m()) + " coordinates");
    if (int(M.basepoint.size()) != M.m())
        throw schema_error(M.name + ": basepoint arity mismatch");
    if (int(M.box.size()) != M.m())
        throw schema_error(M.name + ": box arity mismatch");
    for (int a = 0; a < M.m(); ++a) {
        if (!(M.box[size_t(a)][0] < M.box[size_t(a)][1]))
            throw schema_error(M.name + ": empty box interval");
        if (M.basepoint[size_t(a)] < M.box[size_t(a)][0] ||
            M.basepoint[size_t(a)] > M.box[size_t(a)][1])
            throw schema_error(M.name + ": basepoint outside box");
    }
    if (!M.theta.empty() && int(M.theta.size()) != M.m())
        throw schema_error(M.name + ": theta arity mismatch");
    if (!M.metric.empty()) {
        if (int(M.metric.size()) != M.m0())
            throw schema_error(M.name + ": metric must be m0 x m0");
        for (const auto& row : M.metric)
            if (int(row.size()) != M.m0())
                throw schema_error(M.name + ": metric must be m0 x m0");
    }

    // Block frame at the basepoint, degree 0.
    int m = M.m(), m0 = M.m0();
    jmat B(m, m);
    auto put = [&](int col, const std::vector<expr_ptr>& comps, bool conj_it) {
        for (int a = 0; a < m; ++a) {
            cplx v = eval_value(comps[size_t(a)], M.coords, M.basepoint);
            B.at(a, col) = jet::constant(1, 0, conj_it ? std::conj(v) : v);
        }
    };
    for (int i = 0; i < m0; ++i) put(i, M.frame[size_t(i)], false);
    for (int i = 0; i < m0; ++i) put(m0 + i, M.frame[size_t(i)], true);
    for (int i = 0; i < M.d(); ++i)
        put(2 * m0 + i, M.complement[size_t(i)], false);
    try {
        jvec rhs(size_t(m), jet::constant(1, 0, 1.0));
        jet_solve_linear(B, rhs);
    } catch (const singular_error&) {
        throw validation_error(
            M.name +
            ": frame, conjugate frame, and complement are dependent at the "
            "basepoint");
    }

    if (!M.theta.empty()) {
        for (int i = 0; i < m0; ++i) {
            cplx pair = 0.0;
            for (int a = 0; a < m; ++a)
                pair += eval_value(M.theta[size_t(a)], M.coords, M.basepoint) *
                        eval_value(M.frame[size_t(i)][size_t(a)], M.coords,
                                   M.basepoint);
            if (std::abs(pair) > 1e-9)
                throw validation_error(
                    M.name + ": theta does not annihilate frame field " +
                    std::to_string(i + 1) + " at the basepoint");
        }
    }
}

struct model_registry {
    std::map<std::string, manifold_spec> manifolds;
    std::map<std::string, map_spec> maps;
    std::map<std::string, bundle_spec> bundles;

    void load_text(const std::string& text, const std::string& origin) {
        auto sections = modelfile::parse_sections(text);
        manifold_spec M;
        bool have_manifold = false;
        auto flush_manifold = [&] {
            if (!have_manifold) return;
            if (M.frame.empty())
                throw schema_error(origin +
                                   ": manifold is missing the [frame] section "
                                   "('vectors' field)");
            validate_manifold(M);
            manifolds[M.name] = M;
            M = manifold_spec{};
            have_manifold = false;
        };
        for (const auto& sec : sections) {
            if (sec.name == "manifold") {
                flush_manifold();
                have_manifold = true;
                M.name = sec.get("name").as_str("name");
                for (const auto& c : sec.get("coordinates").as_arr("coordinates"))
                    M.coords.push_back(c.as_str("coordinates"));
                for (const auto& c : sec.get("basepoint").as_arr("basepoint"))
                    M.basepoint.push_back(c.as_num("basepoint"));
                for (const auto& c : sec.get("box").as_arr("box")) {
                    const auto& pair = c.as_arr("box");
                    if (pair.size() != 2)
                        throw schema_error("box entries must be [lo, hi]");
                    M.box.push_back({pair[0].as_num("box"), pair[1].as_num("box")});
                }
            } else if (sec.name == "frame") {
                require_manifold(have_manifold, sec.name, origin);
                for (const auto& row : sec.get("vectors").as_arr("vectors"))
                    M.frame.push_back(detail::parse_expr_list(
                        row, M.coords, "frame vector", M.m()));
            } else if (sec.name == "complement") {
                require_manifold(have_manifold, sec.name, origin);
                for (const auto& row : sec.get("vectors").as_arr("vectors"))
                    M.complement.push_back(detail::parse_expr_list(
                        row, M.coords, "complement vector", M.m()));
            } else if (sec.name == "theta") {
                require_manifold(have_manifold, sec.name, origin);
                M.theta = detail::parse_expr_list(sec.get("components"),
                                                  M.coords, "theta", M.m());
            } else if (sec.name == "metric") {
                require_manifold(have_manifold, sec.name, origin);
                for (const auto& row : sec.get("h").as_arr("h"))
                    M.metric.push_back(detail::parse_expr_list(
                        row, M.coords, "metric row"));
            } else if (sec.name == "map") {
                map_spec f;
                f.name = sec.get("name").as_str("name");
                f.source = sec.get("source").as_str("source");
                f.target = sec.get("target").as_str("target");
                f.kind = sec.has("kind") ? sec.get("kind").as_str("kind") : "";
                for (const auto& c : sec.get("components").as_arr("components"))
                    f.components.push_back(parse_expr(c.as_str("components")));
                maps[f.name] = std::move(f);
            } else if (sec.name == "bundle") {
                bundle_spec b;
                b.name = sec.get("name").as_str("name");
                b.base = sec.get("base").as_str("base");
                b.rank = int(sec.get("rank").as_num("rank"));
                for (const auto& row : sec.get("structure").as_arr("structure")) {
                    std::vector<expr_ptr> r;
                    for (const auto& c : row.as_arr("structure"))
                        r.push_back(parse_expr(c.as_str("structure")));
                    b.structure.push_back(std::move(r));
                }
                for (const auto& row : sec.get("omega").as_arr("omega")) {
                    std::vector<std::vector<expr_ptr>> r;
                    for (const auto& form : row.as_arr("omega")) {
                        std::vector<expr_ptr> comps;
                        for (const auto& c : form.as_arr("omega"))
                            comps.push_back(parse_expr(c.as_str("omega")));
                        r.push_back(std::move(comps));
                    }
                    b.omega.push_back(std::move(r));
                }
                if (int(b.structure.size()) != b.rank ||
                    int(b.omega.size()) != b.rank)
                    throw schema_error(b.name +
                                       ": structure and omega must be rank x "
                                       "rank");
                bundles[b.name] = std::move(b);
            } else {
                throw schema_error(origin + ": unknown section [" + sec.name +
                                   "]");
            }
        }
        flush_manifold();
    }

    // Cross-references and arities once everything is loaded.
    void finalize() const {
        for (const auto& [name, f] : maps) {
            const manifold_spec& S = manifold(f.source);
            const manifold_spec& T = manifold(f.target);
            if (int(f.components.size()) != T.m())
                throw schema_error(name + ": component count " +
                                   std::to_string(f.components.size()) +
                                   " does not match target dimension " +
                                   std::to_string(T.m()));
            for (const auto& c : f.components)
                expr_validate_vars(c, S.coords);
        }
        for (const auto& [name, b] : bundles) {
            const manifold_spec& B = manifold(b.base);
            for (const auto& row : b.omega)
                for (const auto& form : row)
                    if (int(form.size()) != B.m())
                        throw schema_error(
                            name + ": omega 1-forms must have " +
                            std::to_string(B.m()) + " components");
            for (const auto& row : b.structure)
                for (const auto& c : row)
                    expr_validate_vars(c, B.coords);
            for (const auto& row : b.omega)
                for (const auto& form : row)
                    for (const auto& c : form)
                        expr_validate_vars(c, B.coords);
        }
    }

    const manifold_spec& manifold(const std::string& name) const {
        auto it = manifolds.find(name);
        if (it == manifolds.end())
            throw schema_error("unknown manifold model '" + name + "'");
        return it->second;
    }
    const map_spec& map(const std::string& name) const {
        auto it = maps.find(name);
        if (it == maps.end())
            throw schema_error("unknown map model '" + name + "'");
        return it->second;
    }
    const bundle_spec& bundle(const std::string& name) const {
        auto it = bundles.find(name);
        if (it == bundles.end())
            throw schema_error("unknown bundle model '" + name + "'");
        return it->second;
    }

  private:
    static void require_manifold(bool have, const std::string& sec,
                                 const std::string& origin) {
        if (!have)
            throw schema_error(origin + ": [" + sec +
                               "] section before any [manifold]");
    }
};

}  // namespace crforge
