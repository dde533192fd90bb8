#pragma once

#include <algorithm>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "crforge/builtin.hpp"
#include "crforge/frames.hpp"
#include "crforge/lifts.hpp"
#include "crforge/maps.hpp"
#include "crforge/sampling.hpp"

namespace crforge {

inline const char* engine_version() { return "0.1.0"; }

// ---------- check catalog ----------

struct check_info {
    const char* id;
    const char* statement;  // one-line summary of the verified identity
    double tol;
    const char* detail;     // longer text shown by `explain`
};

inline const std::vector<check_info>& check_catalog() {
    static const std::vector<check_info> cat = {
        {"geometry.integrability", "frame brackets stay in the (1,0) bundle",
         1e-9,
         "For every frame pair the bracket [Z_i, Z_j] is split against the "
         "full frame and the components outside the (1,0) block are "
         "measured at the sample point.  Zero certifies the structure is a "
         "CR structure, not just an almost CR structure.  Tolerance covers "
         "the conditioning of the frame solve."},
        {"connection.axioms",
         "canonical connection parallelism and torsion normalization", 1e-9,
         "Residuals of nabla g = 0, nabla J = 0, vanishing torsion on (1,0) "
         "pairs, T(Z, conj W) = 2 dtheta(Z, conj W) xi on mixed pairs, and "
         "symmetry of the torsion coefficient matrix A_jk.  These five "
         "properties pin the connection uniquely, so their joint residual "
         "is the certificate that the assembled connection is the right "
         "one."},
        {"connection.structure_eq",
         "first structure equation for the coframe", 1e-9,
         "d theta^i = theta^j wedge omega_j^i + (1/2) theta^i(T(., .)) "
         "checked componentwise on frame pairs in the alternation "
         "convention d omega(X, Y) = (X omega(Y) - Y omega(X) - "
         "omega([X, Y])) / 2."},
        {"calculus.exterior", "d squared vanishes and d is a derivation",
         1e-9,
         "On random polynomial scalars and 1-forms: d(df) = 0, d(d omega) "
         "= 0, and d(fg) = f dg + g df.  Exact in the truncated jet ring, "
         "so the tolerance only absorbs rounding."},
        {"calculus.hessian_conjugation",
         "conjugation defect of the complex Hessian is the transversal "
         "bracket term",
         1e-9,
         "For real u the pairing D = V(conj V u) - [V, conj V]_(0,1) u "
         "satisfies D - conj D = [V, conj V]_T u, where _T is the "
         "transversal frame component.  On a Levi-flat or metric model the "
         "right side is zero and the Hessian is hermitian on the nose."},
        {"calculus.pullback_commute",
         "exterior derivative commutes with pullback", 1e-9,
         "For the bundle projection of the slit chart and random scalars "
         "u: d(pullback u) = pullback(du), compared coefficientwise as "
         "jets."},
        {"calculus.max_principle",
         "interior maximum forces du = 0 and Re del dbar u <= 0", 1e-9,
         "A scalar with a constructed strict maximum at the sample point "
         "must have |du| = 0 there and Re del dbar u(V, conj V) <= 0 for "
         "every (1,0) direction V.  The reported residual is |du| plus "
         "any positive part of the Hessian."},
        {"frames.unitary", "constructed frame is unitary at the point",
         1e-10,
         "After the pointwise Gram-Schmidt step the Levi metric in the "
         "constructed frame equals the identity at the expansion point."},
        {"frames.gamma", "Christoffel symbols vanish at the point", 1e-8,
         "All connection coefficients of the canonical connection in the "
         "corrected frame, including the transversal direction, vanish at "
         "the expansion point."},
        {"frames.dgamma",
         "horizontal derivatives of the mixed Christoffels vanish", 1e-8,
         "First derivatives along e_k and conj e_k of the Gamma^j_(conj k "
         "i) coefficients vanish at the point; this is the second-order "
         "frame normalization."},
        {"frames.curvature_identity",
         "curvature equals the pure second metric derivative", 1e-7,
         "In the corrected frame, R_(i conj j k conj l) at the point "
         "equals -conj e_j e_i g_(k conj l).  The identity needs both "
         "normalization orders, so it certifies the whole construction."},
        {"lifts.identities",
         "tensor and bracket identities of the two tangent lifts", 1e-10,
         "A^C Z^C = (AZ)^C, A^C Z^V = (AZ)^V, (A^2)^C = (A^C)^2, "
         "[Z^V, W^V] = 0, [Z^V, W^C] = [Z, W]^V, [Z^C, W^C] = [Z, W]^C "
         "on random polynomial fields and tensors."},
        {"lifts.jc_squared",
         "lifted structure map squares to minus the identity", 1e-9,
         "(J^C)^2 = -id on the lifted Levi generators, vertical and "
         "complete."},
        {"lifts.first_condition",
         "first integrability condition of the lifted structure", 1e-9,
         "[J^C X, Y] + [X, J^C Y] stays inside the lifted Levi "
         "distribution; membership is a linear solve against the full "
         "lifted frame at the point."},
        {"lifts.transfer", "torsion of the lift equals the lifted torsion",
         1e-8,
         "N(Z^V, W^V) = 0, N(Z^C, W^C) = (N(Z, W))^C, N(Z^C, W^V) = "
         "(N(Z, W))^V for the lifted structure map.  These hold whether or "
         "not the base is integrable."},
        {"lifts.tangent_integrability",
         "lifted structure is integrable when the base is", 1e-9,
         "Torsion of the lifted structure map over all lifted generator "
         "pairs.  Fails by design on a non-integrable base, where the "
         "defect transfers at full strength."},
        {"lifts.complement_independence",
         "lifted structure ignores the complement choice", 1e-10,
         "Rebuilding the zero-extension over a different complement of the "
         "Levi distribution leaves J^C unchanged on the lifted "
         "generators."},
        {"lifts.bundle",
         "connection-induced structure makes the projection almost CR",
         1e-9,
         "For each bundle over the selected base: horizontal-vertical "
         "splitting invertibility, (J_E)^2 = -id on the Levi generators, "
         "dp composed with J_E equals J composed with dp, and dp mapping "
         "into the base Levi distribution."},
        {"maps.classification", "differential commutes with the structure "
         "maps after splitting",
         1e-9,
         "The conjugate-block coefficients of the split differential "
         "vanish for a structure-preserving map, together with the "
         "kind-specific condition on the image of the transversal "
         "direction."},
        {"maps.structure_eq",
         "differential coefficients satisfy their derivative identities",
         1e-8,
         "Pullback of the target coframe reproduces the coefficient "
         "matrix, the antiholomorphic derivative of f^alpha_i matches the "
         "two-sided Christoffel contraction, and the transversal "
         "derivative vanishes for the applicable kinds."},
        {"maps.energy", "energy density is real, nonnegative, homogeneous",
         1e-10,
         "Y = h(df W, conj df W) / g(W, conj W) on nonzero fiber vectors: "
         "imaginary part, negative part, and the change under complex "
         "scaling of W are all residuals."},
        {"slit.structure", "fiber coordinates are holomorphic on the slit "
         "chart",
         1e-10,
         "dbar W^i = 0, del conj W^i = 0, del dbar conj W^i = 0, dbar del "
         "W^i = 0 for the product structure on the punctured (1,0) "
         "bundle."},
        {"slit.projection", "bundle projection respects the splitting",
         1e-10,
         "Antiholomorphic base derivatives pass through the projection, "
         "fiber directions of the lifted frame project to zero, and "
         "vertical fields annihilate the base coordinates."},
        {"bochner.two_path", "Hessian of the energy density decomposes "
         "through curvature",
         1e-7,
         "del dbar Y(V, conj V) minus the source curvature term plus the "
         "target curvature term is compared against the positive "
         "first-derivative square term, computed along an independent "
         "path."},
        {"bochner.remainder_nonneg", "curvature-free remainder is "
         "nonnegative",
         1e-9,
         "Re(lhs - curvature source + curvature target) >= 0 at every "
         "sample; the residual is the worst negative excursion."},
    };
    return cat;
}

inline const check_info* find_check(const std::string& id) {
    for (const auto& c : check_catalog())
        if (id == c.id) return &c;
    return nullptr;
}

// ---------- configuration and report ----------

struct suite_config {
    std::string model;
    std::string map;
    std::string suite = "all";
    int points = 10;
    unsigned seed = 0;
    int order = 5;
    bool json = false;
    std::vector<std::pair<std::string, double>> tol;
};

struct check_record {
    std::string id;
    std::string statement;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = false;
    int points = 0;
};

struct model_note {
    std::string name;
    std::string category;
    int m = 0;
    int m0 = 0;
    bool has_torsion_info = false;
    bool sasakian = false;
    double tau_norm = 0.0;
};

struct suite_report {
    suite_config cfg;
    std::vector<model_note> models;
    std::string map_name, map_kind, map_source, map_target;
    std::vector<check_record> checks;

    int passed() const {
        int n = 0;
        for (const auto& c : checks) n += c.pass ? 1 : 0;
        return n;
    }
    int failed() const { return int(checks.size()) - passed(); }
};

namespace detail {

inline double tol_for(const suite_config& cfg, const check_info& info) {
    double t = info.tol;
    for (const auto& [key, val] : cfg.tol)
        if (key == info.id) t = val;
    return t;
}

inline void record(suite_report& out, const suite_config& cfg,
                   const char* id, double residual, int points) {
    const check_info* info = find_check(id);
    if (!info) throw structural_error(std::string("unknown check id ") + id);
    check_record r;
    r.id = info->id;
    r.statement = info->statement;
    r.residual = residual;
    r.tol = tol_for(cfg, *info);
    r.pass = residual <= r.tol;
    r.points = points;
    out.checks.push_back(std::move(r));
}

inline bool want(const suite_config& cfg, const char* suite) {
    return cfg.suite == "all" || cfg.suite == suite;
}

inline model_note note_for(const manifold_spec& M, int order) {
    model_note n;
    n.name = M.name;
    n.category = to_string(M.category());
    n.m = M.m();
    n.m0 = M.m0();
    if (M.category() == model_category::pseudo_hermitian) {
        auto G = make_geometry(M, std::min(order, 3));
        auto W = make_connection(G);
        auto s = is_sasakian(W);
        n.has_torsion_info = true;
        n.sasakian = s.sasakian;
        n.tau_norm = s.tau_norm;
    }
    return n;
}

}  // namespace detail

// ---------- model-level runners ----------

inline void run_frames_suite(const manifold_spec& M, const suite_config& cfg,
                             suite_report& out) {
    box_sampler S(M, cfg.seed);
    bool with_metric = M.category() != model_category::almost_cr;
    std::mt19937 rng(cfg.seed * 7919u + 17u);

    double r_int = 0, r_ax = 0, r_se = 0, r_ext = 0, r_conj = 0, r_pull = 0,
           r_max = 0;
    double r_unitary = 0, r_gamma = 0, r_dgamma = 0, r_curv = 0;

    for (int i = 0; i < cfg.points; ++i) {
        auto p = S.point(i);
        auto G = make_geometry(M, p, cfg.order);
        r_int = std::max(r_int, check_cr_integrability(G.F));

        // exterior calculus on random polynomial data
        jet f = detail::random_poly(G.ch, 3, rng);
        jet g = detail::random_poly(G.ch, 2, rng);
        jvec omega;
        for (int a = 0; a < M.m(); ++a)
            omega.push_back(detail::random_poly(G.ch, 2, rng));
        {
            two_form ddf = d_one_form(d_scalar(f));
            for (int a = 0; a < M.m(); ++a)
                for (int b = 0; b < M.m(); ++b)
                    r_ext = std::max(r_ext, ddf.at(a, b).max_abs());
            three_form ddw = d_two_form(d_one_form(omega));
            for (int a = 0; a < M.m(); ++a)
                for (int b = 0; b < M.m(); ++b)
                    for (int c = 0; c < M.m(); ++c)
                        r_ext = std::max(r_ext, ddw.at(a, b, c).max_abs());
            jvec leib = d_scalar(f * g) - (f * d_scalar(g) + g * d_scalar(f));
            for (const auto& comp : leib)
                r_ext = std::max(r_ext, comp.max_abs());
        }

        // conjugation defect of the complex Hessian against the
        // transversal bracket term, for a real scalar
        {
            jet u = detail::random_poly(G.ch, 3, rng);
            auto Vc = direction_point(M.m0(), i, cfg.seed);
            jvec V = Vc[0] * G.F.e[0];
            for (int a = 1; a < M.m0(); ++a)
                V = V + Vc[size_t(a)] * G.F.e[size_t(a)];
            jet D = del_dbar(G.F, u, V);
            jvec Tb = G.F.projT(lie_bracket(V, conj(V)));
            jet res = D - conj(D) - apply_field(Tb, u);
            r_conj = std::max(r_conj, res.max_abs());
        }

        // d commutes with the slit-chart projection pullback
        {
            auto SB = make_slit_bundle(G, fiber_point(M.m0(), i, cfg.seed));
            jvec pi;
            for (int b = 0; b < SB.mb; ++b)
                pi.push_back(jet::variable(SB.m, SB.order, b,
                                           G.ch.p[size_t(b)]));
            jet u = detail::random_poly(G.ch, 3, rng);
            jvec lhs = d_scalar(pullback_scalar(u, pi));
            jvec rhs = pullback_one_form(d_scalar(u), pi);
            for (size_t a = 0; a < lhs.size(); ++a)
                r_pull = std::max(r_pull, (lhs[a] - rhs[a]).max_abs());
        }

        // constructed interior maximum
        {
            std::uniform_real_distribution<double> U(0.5, 2.0);
            jet u = G.ch.constant(0.0);
            for (int a = 0; a < M.m(); ++a) {
                jet xa = jet::variable(M.m(), cfg.order, a, p[size_t(a)]) -
                         p[size_t(a)];
                u = u - U(rng) * xa * xa;
            }
            jvec du = d_scalar(u);
            for (const auto& comp : du)
                r_max = std::max(r_max, std::abs(comp.value()));
            auto Vc = direction_point(M.m0(), i + 31, cfg.seed);
            jvec V = Vc[0] * G.F.e[0];
            for (int a = 1; a < M.m0(); ++a)
                V = V + Vc[size_t(a)] * G.F.e[size_t(a)];
            double re = del_dbar(G.F, u, V).value().real();
            r_max = std::max(r_max, std::max(0.0, re));
        }

        if (with_metric) {
            auto W = make_connection(G);
            r_ax = std::max(r_ax, verify_connection_axioms(W).worst());
            r_se = std::max(r_se, check_first_structure_equation(W));
            auto R = make_normal_frame(M, p, cfg.order,
                                       cfg.seed + unsigned(101 * i));
            auto rep = verify_normal_frame(R);
            r_unitary = std::max(r_unitary, rep.unitary);
            r_gamma = std::max(r_gamma, rep.gamma);
            r_dgamma = std::max(r_dgamma, rep.dgamma_mixed);
            r_curv = std::max(r_curv, rep.curvature_identity);
        }
    }

    detail::record(out, cfg, "geometry.integrability", r_int, cfg.points);
    detail::record(out, cfg, "calculus.exterior", r_ext, cfg.points);
    detail::record(out, cfg, "calculus.hessian_conjugation", r_conj,
                   cfg.points);
    detail::record(out, cfg, "calculus.pullback_commute", r_pull, cfg.points);
    detail::record(out, cfg, "calculus.max_principle", r_max, cfg.points);
    if (with_metric) {
        detail::record(out, cfg, "connection.axioms", r_ax, cfg.points);
        detail::record(out, cfg, "connection.structure_eq", r_se, cfg.points);
        detail::record(out, cfg, "frames.unitary", r_unitary, cfg.points);
        detail::record(out, cfg, "frames.gamma", r_gamma, cfg.points);
        detail::record(out, cfg, "frames.dgamma", r_dgamma, cfg.points);
        detail::record(out, cfg, "frames.curvature_identity", r_curv,
                       cfg.points);
    }
}

inline void run_lifts_suite(const model_registry& reg,
                            const manifold_spec& M, const suite_config& cfg,
                            suite_report& out) {
    box_sampler S(M, cfg.seed + 5u);
    std::mt19937 rng(cfg.seed * 104729u + 3u);
    std::uniform_real_distribution<double> U(-1.0, 1.0);

    double r_id = 0, r_sq = 0, r_first = 0, r_transfer = 0, r_nij = 0,
           r_indep = 0, r_bundle = 0;
    bool has_complement = M.d() > 0;
    std::vector<std::string> bundle_names;
    for (const auto& [name, B] : reg.bundles)
        if (B.base == M.name) bundle_names.push_back(name);

    int lift_order = std::min(cfg.order, 4);
    for (int i = 0; i < cfg.points; ++i) {
        auto p = S.point(i);
        chart ch(M, p, lift_order);
        std::vector<double> y;
        for (int a = 0; a < M.m(); ++a) y.push_back(U(rng));
        tangent_lift L = make_tangent_lift(M.m(), lift_order - 1, y);
        jvec Z, W;
        for (int a = 0; a < M.m(); ++a) {
            Z.push_back(detail::random_poly(ch, 3, rng));
            W.push_back(detail::random_poly(ch, 3, rng));
        }
        jmat A(M.m(), M.m());
        for (int a = 0; a < M.m(); ++a)
            for (int b = 0; b < M.m(); ++b)
                A.at(a, b) = detail::random_poly(ch, 2, rng);
        r_id = std::max(r_id, lift_identities_check(Z, W, A, L).worst());

        auto G = make_geometry(M, p, lift_order);
        auto rep = tangent_cr_check(G, y, cfg.seed + unsigned(13 * i + 1));
        r_sq = std::max(r_sq, rep.jc_squared);
        r_first = std::max(r_first, rep.first_condition);
        r_transfer = std::max({r_transfer, rep.nij_vertical,
                               rep.nij_cc_transfer, rep.nij_cv_transfer});
        r_nij = std::max(r_nij, rep.nij_distribution);
        r_indep = std::max(r_indep, rep.complement_independence);

        for (const auto& bn : bundle_names) {
            const auto& B = reg.bundle(bn);
            auto BL = make_bundle_lift(
                B, M, p, fiber_point(B.rank, i, cfg.seed + 9u), lift_order);
            r_bundle = std::max(r_bundle, bundle_cr_check(BL).worst());
        }
    }

    detail::record(out, cfg, "lifts.identities", r_id, cfg.points);
    detail::record(out, cfg, "lifts.jc_squared", r_sq, cfg.points);
    detail::record(out, cfg, "lifts.first_condition", r_first, cfg.points);
    detail::record(out, cfg, "lifts.transfer", r_transfer, cfg.points);
    detail::record(out, cfg, "lifts.tangent_integrability", r_nij,
                   cfg.points);
    if (has_complement)
        detail::record(out, cfg, "lifts.complement_independence", r_indep,
                       cfg.points);
    if (!bundle_names.empty())
        detail::record(out, cfg, "lifts.bundle", r_bundle, cfg.points);
}

// ---------- map-level runner ----------

inline void run_bochner_suite(const model_registry& reg, const map_spec& f,
                              const suite_config& cfg, suite_report& out) {
    const auto& MS = reg.manifold(f.source);
    const auto& MT = reg.manifold(f.target);
    box_sampler S(MS, cfg.seed + 11u);

    double r_cls = 0, r_se = 0, r_en = 0, r_slit = 0, r_proj = 0;
    double r_two = 0, r_nonneg = 0;

    for (int i = 0; i < cfg.points; ++i) {
        auto p = S.point(i);
        auto P = make_map_package(f, MS, MT, p, cfg.order);
        r_cls = std::max(r_cls, classify_map(P).worst());
        r_se = std::max(r_se, structure_eq_residuals(P).worst());

        auto Wf = fiber_point(MS.m0(), i, cfg.seed + 21u);
        auto en = energy_density(P, Wf);
        double e = std::abs(en.Y.imag()) + std::max(0.0, -en.Y.real());
        cplx lambda(0.37, -1.21);
        std::vector<cplx> W2;
        for (const auto& z : Wf) W2.push_back(lambda * z);
        e = std::max(e, std::abs(energy_density(P, W2).Y - en.Y));
        r_en = std::max(r_en, e);

        auto SB = make_slit_bundle(*P.S, Wf);
        r_slit = std::max(r_slit, verify_slit_structure(SB).worst());
        {
            jvec pi;
            for (int b = 0; b < SB.mb; ++b)
                pi.push_back(jet::variable(SB.m, SB.order, b,
                                           P.S->ch.p[size_t(b)]));
            std::mt19937 rng(cfg.seed * 31u + unsigned(i));
            jet u = detail::random_poly(P.S->ch, 3, rng);
            jet u_slit = pullback_scalar(u, pi);
            for (int a = 0; a < 2 * SB.m0b; ++a) {
                cplx lhs = apply_field(SB.F.ebar(a), u_slit).value();
                cplx rhs = (a < SB.m0b)
                               ? apply_field(P.S->F.ebar(a), u).value()
                               : cplx(0.0);
                r_proj = std::max(r_proj, std::abs(lhs - rhs));
            }
            for (int b = 0; b < SB.mb; ++b)
                r_proj = std::max(
                    r_proj,
                    apply_field(SB.F.e[size_t(SB.m0b)], pi[size_t(b)])
                        .max_abs());
        }

        auto Vc = direction_point(MS.m0(), i, cfg.seed + 41u);
        auto rep = bochner_terms(f, MS, MT, p, Wf, Vc, cfg.order,
                                 cfg.seed + unsigned(2 * i),
                                 cfg.seed + unsigned(2 * i + 1));
        r_two = std::max(r_two, std::abs(rep.remainder - rep.dropped));
        r_nonneg = std::max(r_nonneg,
                            std::max(0.0, -rep.remainder.real()));
    }

    detail::record(out, cfg, "maps.classification", r_cls, cfg.points);
    detail::record(out, cfg, "maps.structure_eq", r_se, cfg.points);
    detail::record(out, cfg, "maps.energy", r_en, cfg.points);
    detail::record(out, cfg, "slit.structure", r_slit, cfg.points);
    detail::record(out, cfg, "slit.projection", r_proj, cfg.points);
    detail::record(out, cfg, "bochner.two_path", r_two, cfg.points);
    detail::record(out, cfg, "bochner.remainder_nonneg", r_nonneg,
                   cfg.points);
}

// ---------- top-level suite ----------

inline suite_report run_suite(const model_registry& reg,
                              const suite_config& cfg) {
    suite_report out;
    out.cfg = cfg;

    if (!cfg.map.empty()) {
        const auto& f = reg.map(cfg.map);
        out.map_name = f.name;
        out.map_kind = f.kind;
        out.map_source = f.source;
        out.map_target = f.target;
        out.models.push_back(
            detail::note_for(reg.manifold(f.source), cfg.order));
        if (f.target != f.source)
            out.models.push_back(
                detail::note_for(reg.manifold(f.target), cfg.order));
        if (detail::want(cfg, "bochner")) run_bochner_suite(reg, f, cfg, out);
    }
    if (!cfg.model.empty()) {
        const auto& M = reg.manifold(cfg.model);
        out.models.push_back(detail::note_for(M, cfg.order));
        if (detail::want(cfg, "frames")) run_frames_suite(M, cfg, out);
        if (detail::want(cfg, "lifts")) run_lifts_suite(reg, M, cfg, out);
    }

    std::stable_sort(out.checks.begin(), out.checks.end(),
                     [](const check_record& a, const check_record& b) {
                         return a.id < b.id;
                     });
    return out;
}

// ---------- text emission ----------

inline std::string format_residual(double r) {
    std::ostringstream ss;
    ss << std::scientific << std::setprecision(3) << r;
    return ss.str();
}

inline void emit_text(const suite_report& rep, std::ostream& os) {
    os << "crforge " << engine_version() << "\n";
    for (const auto& n : rep.models) {
        os << "model " << n.name << " (" << n.category << ", m = " << n.m
           << ", m0 = " << n.m0 << ")";
        if (n.has_torsion_info) {
            os << "  [" << (n.sasakian ? "torsion-free" : "torsion")
               << ", |A| = " << format_residual(n.tau_norm) << "]";
        }
        os << "\n";
    }
    if (!rep.map_name.empty())
        os << "map " << rep.map_name << " (" << rep.map_kind << ", "
           << rep.map_source << " -> " << rep.map_target << ")\n";
    os << "suite " << rep.cfg.suite << "  points " << rep.cfg.points
       << "  seed " << rep.cfg.seed << "  order " << rep.cfg.order << "\n\n";
    for (const auto& c : rep.checks) {
        os << (c.pass ? "PASS " : "FAIL ") << std::left << std::setw(32)
           << c.id << std::right << "  " << format_residual(c.residual)
           << "  (tol " << format_residual(c.tol) << ", " << c.points
           << " points)  " << c.statement << "\n";
    }
    os << "\n"
       << rep.checks.size() << " checks, " << rep.passed() << " passed, "
       << rep.failed() << " failed\n";
}

}  // namespace crforge
