// Acceptance gate: one criterion per function, fixed tolerances, measured
// runtime, one PASS/FAIL line each.  Exit is nonzero when anything fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <crforge/checks.hpp>

using namespace crforge;

namespace {

int g_failures = 0;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

void report(int idx, const char* name, bool pass, double worst, double secs) {
    std::printf("%s  %d  %-34s  worst %.3e  %6.2f s\n",
                pass ? "PASS" : "FAIL", idx, name, worst, secs);
    if (!pass) ++g_failures;
}

// ---- 1: connection axioms on the two core models, 100 points each ----

void criterion_axioms(const model_registry& reg) {
    double t0 = now_seconds();
    double worst = 0.0;
    for (const char* name : {"heisenberg3", "cr_sphere_s3"}) {
        const auto& M = reg.manifold(name);
        box_sampler S(M, 12u);
        for (int i = 0; i < 100; ++i) {
            auto G = make_geometry(M, S.point(i), 4);
            auto W = make_connection(G);
            worst = std::max(worst, verify_connection_axioms(W).worst());
        }
    }
    double secs = now_seconds() - t0;
    report(1, "connection axiom suite", worst < 1e-9 && secs < 10.0, worst,
           secs);
}

// ---- 2: flat torsion-free h3, torsion-free positively curved s3 ----

void criterion_models(const model_registry& reg) {
    double t0 = now_seconds();
    double worst = 0.0;
    bool pass = true;
    {
        const auto& M = reg.manifold("heisenberg3");
        box_sampler S(M, 23u);
        for (int i = 0; i < 20; ++i) {
            auto G = make_geometry(M, S.point(i), 4);
            auto W = make_connection(G);
            worst = std::max(worst, is_sasakian(W).tau_norm);
            const jvec* dirs[] = {&G.F.e[0], nullptr, &G.reeb};
            jvec eb = G.F.ebar(0);
            dirs[1] = &eb;
            for (int a = 0; a < 3; ++a)
                for (int b = a + 1; b < 3; ++b)
                    for (int c = 0; c < 3; ++c)
                        worst = std::max(
                            worst, max_abs_value(W.curv(*dirs[a], *dirs[b],
                                                        *dirs[c])));
        }
    }
    {
        const auto& M = reg.manifold("cr_sphere_s3");
        box_sampler S(M, 29u);
        double min_sec = 1e300;
        for (int i = 0; i < 50; ++i) {
            auto G = make_geometry(M, S.point(i), 4);
            auto W = make_connection(G);
            worst = std::max(worst, is_sasakian(W).tau_norm);
            cplx k = sectional_holo(W, direction_point(M.m0(), i, 31u));
            worst = std::max(worst, std::abs(k.imag()));
            min_sec = std::min(min_sec, k.real());
        }
        pass = pass && min_sec > 0.0;
    }
    double secs = now_seconds() - t0;
    pass = pass && worst < 1e-9 && secs < 10.0;
    report(2, "flatness, torsion, positivity", pass, worst, secs);
}

// ---- 3: normal frames on s3 and the hermitian analogue ----

void criterion_frames(const model_registry& reg) {
    double t0 = now_seconds();
    double worst_g = 0.0, worst_c = 0.0;
    for (const char* name : {"cr_sphere_s3", "poincare_disc"}) {
        const auto& M = reg.manifold(name);
        box_sampler S(M, 37u);
        for (int i = 0; i < 10; ++i) {
            auto R = make_normal_frame(M, S.point(i), 5, 41u + unsigned(i));
            auto rep = verify_normal_frame(R);
            worst_g = std::max({worst_g, rep.gamma, rep.dgamma_mixed});
            worst_c = std::max(worst_c, rep.curvature_identity);
        }
    }
    double secs = now_seconds() - t0;
    report(3, "normal frame construction",
           worst_g < 1e-8 && worst_c < 1e-7 && secs < 30.0,
           std::max(worst_g, worst_c), secs);
}

// ---- 4: derivative calculus and the maximum principle ----

void criterion_calculus(const model_registry& reg) {
    double t0 = now_seconds();
    double worst = 0.0, worst_max = 0.0;
    const char* names[] = {"heisenberg3", "cr_sphere_s3", "poincare_disc",
                           "euclidean_c2", "twisted_c2"};
    std::mt19937 rng(47u);
    for (const char* name : names) {
        const auto& M = reg.manifold(name);
        box_sampler S(M, 53u);
        for (int i = 0; i < 10; ++i) {
            auto p = S.point(i);
            auto G = make_geometry(M, p, 5);
            jet f = detail::random_poly(G.ch, 3, rng);
            jet g = detail::random_poly(G.ch, 2, rng);
            jvec omega;
            for (int a = 0; a < M.m(); ++a)
                omega.push_back(detail::random_poly(G.ch, 2, rng));

            two_form ddf = d_one_form(d_scalar(f));
            for (int a = 0; a < M.m(); ++a)
                for (int b = 0; b < M.m(); ++b)
                    worst = std::max(worst, ddf.at(a, b).max_abs());
            three_form ddw = d_two_form(d_one_form(omega));
            for (int a = 0; a < M.m(); ++a)
                for (int b = 0; b < M.m(); ++b)
                    for (int c = 0; c < M.m(); ++c)
                        worst = std::max(worst, ddw.at(a, b, c).max_abs());
            jvec leib =
                d_scalar(f * g) - (f * d_scalar(g) + g * d_scalar(f));
            for (const auto& comp : leib)
                worst = std::max(worst, comp.max_abs());

            // conjugation: d commutes with conj, and the hessian
            // conjugation defect is the transversal bracket term
            jet h = f + cplx(0.0, 1.0) * g;
            jvec dc = conj(d_scalar(h)) - d_scalar(conj(h));
            for (const auto& comp : dc)
                worst = std::max(worst, comp.max_abs());
            jet u = detail::random_poly(G.ch, 3, rng);
            auto Vc = direction_point(M.m0(), i, 59u);
            jvec V = Vc[0] * G.F.e[0];
            for (int a = 1; a < M.m0(); ++a)
                V = V + Vc[size_t(a)] * G.F.e[size_t(a)];
            jet D = del_dbar(G.F, u, V);
            jet res = D - conj(D) -
                      apply_field(G.F.projT(lie_bracket(V, conj(V))), u);
            worst = std::max(worst, res.max_abs());

            // pullback commutation through the bundle projection
            auto SB = make_slit_bundle(G, fiber_point(M.m0(), i, 61u));
            jvec pi;
            for (int b = 0; b < SB.mb; ++b)
                pi.push_back(
                    jet::variable(SB.m, SB.order, b, G.ch.p[size_t(b)]));
            jvec lhs = d_scalar(pullback_scalar(u, pi));
            jvec rhs = pullback_one_form(d_scalar(u), pi);
            for (size_t a = 0; a < lhs.size(); ++a)
                worst = std::max(worst, (lhs[a] - rhs[a]).max_abs());

            // constructed interior maximum
            std::uniform_real_distribution<double> U(0.5, 2.0);
            jet um = G.ch.constant(0.0);
            for (int a = 0; a < M.m(); ++a) {
                jet xa = jet::variable(M.m(), 5, a, p[size_t(a)]) -
                         p[size_t(a)];
                um = um - U(rng) * xa * xa;
            }
            for (const auto& comp : d_scalar(um))
                worst_max = std::max(worst_max, std::abs(comp.value()));
            double re = del_dbar(G.F, um, V).value().real();
            worst_max = std::max(worst_max, std::max(0.0, re));
        }
    }
    double secs = now_seconds() - t0;
    report(4, "derivative calculus, max principle",
           worst < 1e-9 && worst_max < 1e-10, std::max(worst, worst_max),
           secs);
}

// ---- 5: slit bundle structure ----

void criterion_slit(const model_registry& reg) {
    double t0 = now_seconds();
    double worst = 0.0, worst_pull = 0.0;
    std::mt19937 rng(67u);
    struct sel { const char* name; int points; };
    for (const auto& s : {sel{"heisenberg3", 8}, sel{"cr_sphere_s3", 6},
                          sel{"poincare_disc", 6}}) {
        const auto& M = reg.manifold(s.name);
        box_sampler S(M, 71u);
        for (int i = 0; i < s.points; ++i) {
            auto G = make_geometry(M, S.point(i), 4);
            auto SB = make_slit_bundle(G, fiber_point(M.m0(), i, 73u));
            worst = std::max(worst, verify_slit_structure(SB).worst());
            jvec pi;
            for (int b = 0; b < SB.mb; ++b)
                pi.push_back(
                    jet::variable(SB.m, SB.order, b, G.ch.p[size_t(b)]));
            jet u = detail::random_poly(G.ch, 3, rng);
            jvec lhs = d_scalar(pullback_scalar(u, pi));
            jvec rhs = pullback_one_form(d_scalar(u), pi);
            for (size_t a = 0; a < lhs.size(); ++a)
                worst_pull =
                    std::max(worst_pull, (lhs[a] - rhs[a]).max_abs());
        }
    }
    double secs = now_seconds() - t0;
    report(5, "slit bundle identities",
           worst < 1e-10 && worst_pull < 1e-9, std::max(worst, worst_pull),
           secs);
}

// ---- 6: the energy decomposition on every shipped map ----

void criterion_bochner(const model_registry& reg) {
    double t0 = now_seconds();
    double worst_two = 0.0, worst_neg = 0.0, worst_flat = 0.0;
    for (const auto& [name, f] : reg.maps) {
        const auto& MS = reg.manifold(f.source);
        const auto& MT = reg.manifold(f.target);
        box_sampler S(MS, 79u);
        bool flat_pair = name == std::string("h3_to_c1");
        for (int i = 0; i < 50; ++i) {
            auto rep = bochner_terms(f, MS, MT, S.point(i),
                                     fiber_point(MS.m0(), i, 83u),
                                     direction_point(MS.m0(), i, 89u), 4,
                                     unsigned(2 * i), unsigned(2 * i + 1));
            cplx sum = rep.curv_source - rep.curv_target + rep.remainder;
            worst_two = std::max(worst_two, std::abs(rep.lhs - sum));
            worst_two =
                std::max(worst_two, std::abs(rep.remainder - rep.dropped));
            worst_neg = std::max(
                worst_neg, std::max(0.0, -rep.remainder.real()));
            if (flat_pair)
                worst_flat = std::max(worst_flat,
                                      std::max(std::abs(rep.curv_source),
                                               std::abs(rep.curv_target)));
        }
    }
    double secs = now_seconds() - t0;
    report(6, "energy decomposition",
           worst_two < 1e-7 && worst_neg < 1e-9 && worst_flat < 1e-10 &&
               secs < 60.0,
           std::max({worst_two, worst_neg, worst_flat}), secs);
}

// ---- 7: tangent and bundle lifts ----

void criterion_lifts(const model_registry& reg) {
    double t0 = now_seconds();
    double worst_id = 0.0, worst_nij = 0.0, worst_tr = 0.0,
           worst_bundle = 0.0;
    std::mt19937 rng(97u);
    std::uniform_real_distribution<double> U(-1.0, 1.0);

    for (const char* name :
         {"heisenberg3", "cr_sphere_s3", "poincare_disc", "twisted_c2"}) {
        const auto& M = reg.manifold(name);
        box_sampler S(M, 101u);
        for (int i = 0; i < 3; ++i) {
            chart ch(M, S.point(i), 4);
            std::vector<double> y;
            for (int a = 0; a < M.m(); ++a) y.push_back(U(rng));
            tangent_lift L = make_tangent_lift(M.m(), 3, y);
            jvec Z, W;
            for (int a = 0; a < M.m(); ++a) {
                Z.push_back(detail::random_poly(ch, 3, rng));
                W.push_back(detail::random_poly(ch, 3, rng));
            }
            jmat A(M.m(), M.m());
            for (int a = 0; a < M.m(); ++a)
                for (int b = 0; b < M.m(); ++b)
                    A.at(a, b) = detail::random_poly(ch, 2, rng);
            worst_id =
                std::max(worst_id, lift_identities_check(Z, W, A, L).worst());
        }
    }
    for (const char* name : {"heisenberg3", "cr_sphere_s3", "poincare_disc",
                             "heisenberg3_warped"}) {
        const auto& M = reg.manifold(name);
        box_sampler S(M, 103u);
        for (int i = 0; i < 2; ++i) {
            auto G = make_geometry(M, S.point(i), 4);
            std::vector<double> y;
            for (int a = 0; a < M.m(); ++a) y.push_back(U(rng));
            auto rep = tangent_cr_check(G, y, 107u + unsigned(i));
            worst_nij = std::max({worst_nij, rep.nij_distribution,
                                  rep.jc_squared});
        }
    }
    {
        const auto& M = reg.manifold("twisted_c2");
        box_sampler S(M, 109u);
        for (int i = 0; i < 3; ++i) {
            auto G = make_geometry(M, S.point(i), 4);
            std::vector<double> y;
            for (int a = 0; a < M.m(); ++a) y.push_back(U(rng));
            auto rep = tangent_cr_check(G, y, 113u + unsigned(i));
            worst_tr = std::max({worst_tr, rep.nij_vertical,
                                 rep.nij_cc_transfer, rep.nij_cv_transfer});
        }
    }
    for (const auto& [name, B] : reg.bundles) {
        const auto& M = reg.manifold(B.base);
        box_sampler S(M, 127u);
        for (int i = 0; i < 3; ++i) {
            auto BL = make_bundle_lift(B, M, S.point(i),
                                       fiber_point(B.rank, i, 131u), 4);
            worst_bundle = std::max(worst_bundle, bundle_cr_check(BL).worst());
        }
    }
    double secs = now_seconds() - t0;
    report(7, "tangent and bundle lifts",
           worst_id < 1e-10 && worst_nij < 1e-9 && worst_tr < 1e-8 &&
               worst_bundle < 1e-10,
           std::max({worst_id, worst_nij, worst_tr, worst_bundle}), secs);
}

// ---- 8: jet coefficients against central differences, ring axioms ----

cplx eval_expr_at(const manifold_spec& M, const expr_ptr& e,
                  const std::vector<double>& p) {
    chart ch(M, p, 1);
    return ch.scalar(e).value();
}

void criterion_jets(const model_registry& reg) {
    double t0 = now_seconds();
    const double h = 1e-5;
    double worst_fd = 0.0;
    int checked = 0;

    auto check_expr = [&](const manifold_spec& M, const expr_ptr& e) {
        chart ch(M, M.basepoint, 2);
        jet J = ch.scalar(e);
        for (int a = 0; a < M.m(); ++a) {
            auto pp = M.basepoint, pm = M.basepoint;
            pp[size_t(a)] += h;
            pm[size_t(a)] -= h;
            cplx fd =
                (eval_expr_at(M, e, pp) - eval_expr_at(M, e, pm)) / (2 * h);
            cplx jc = J.deriv(a).value();
            worst_fd = std::max(worst_fd, std::abs(jc - fd) /
                                              std::max(1.0, std::abs(fd)));
        }
        ++checked;
    };

    for (const auto& [name, M] : reg.manifolds) {
        for (const auto& row : M.frame)
            for (const auto& e : row) check_expr(M, e);
        for (const auto& row : M.complement)
            for (const auto& e : row) check_expr(M, e);
        for (const auto& e : M.theta) check_expr(M, e);
        for (const auto& row : M.metric)
            for (const auto& e : row) check_expr(M, e);
    }
    for (const auto& [name, f] : reg.maps) {
        const auto& M = reg.manifold(f.source);
        for (const auto& e : f.components) check_expr(M, e);
    }
    for (const auto& [name, B] : reg.bundles) {
        const auto& M = reg.manifold(B.base);
        for (const auto& row : B.structure)
            for (const auto& e : row) check_expr(M, e);
        for (const auto& block : B.omega)
            for (const auto& row : block)
                for (const auto& e : row) check_expr(M, e);
    }

    // ring axioms on random truncated polynomials
    double worst_ring = 0.0;
    std::mt19937 rng(137u);
    std::normal_distribution<double> N(0.0, 1.0);
    auto random_jet = [&](int nvars, int order) {
        jet x = jet::variable(nvars, order, 0, 0.0);
        jet y = jet::variable(nvars, order, 1, 0.0);
        jet out = jet::constant(nvars, order, cplx(N(rng), N(rng)));
        for (int i = 0; i <= order; ++i)
            for (int j = 0; i + j <= order; ++j) {
                if (i == 0 && j == 0) continue;
                jet term = jet::constant(nvars, order, cplx(N(rng), N(rng)));
                for (int k = 0; k < i; ++k) term = term * x;
                for (int k = 0; k < j; ++k) term = term * y;
                out = out + term;
            }
        return out;
    };
    for (int trial = 0; trial < 100; ++trial) {
        jet a = random_jet(2, 3), b = random_jet(2, 3), c = random_jet(2, 3);
        jet one = jet::constant(2, 3, 1.0);
        auto upd = [&](const jet& r) {
            worst_ring = std::max(worst_ring, r.max_abs());
        };
        upd((a + b) - (b + a));
        upd(((a + b) + c) - (a + (b + c)));
        upd(a * b - b * a);
        upd((a * b) * c - a * (b * c));
        upd(a * (b + c) - (a * b + a * c));
        upd(one * a - a);
        upd(a - a);
        upd(2.0 * (a * b) - (2.0 * a) * b);
        upd(conj(a * b) - conj(a) * conj(b));
        upd(conj(a + b) - (conj(a) + conj(b)));
        upd((a * b).deriv(0) - (a.deriv(0) * b + a * b.deriv(0)));
        upd((a * b).deriv(1) - (a.deriv(1) * b + a * b.deriv(1)));
    }

    double secs = now_seconds() - t0;
    bool pass = worst_fd < 1e-6 && worst_ring < 1e-13 && checked >= 90;
    report(8, "jet engine against differences", pass,
           std::max(worst_fd, worst_ring), secs);
}

// ---- 9: CLI determinism and exit codes ----

struct cli_result {
    int exit_code = -1;
    std::string out;
};

cli_result run_cli(const std::string& args) {
    std::string cmd = std::string(CRFORGE_CLI_PATH) + " " + args + " 2>&1";
    cli_result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    int status = pclose(p);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string strip_timestamp(const std::string& text) {
    std::string out;
    size_t start = 0;
    while (start < text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        if (line.find("\"timestamp\"") == std::string::npos)
            out += line + "\n";
        start = end + 1;
    }
    return out;
}

void criterion_cli() {
    double t0 = now_seconds();
    bool pass = true;
    const std::string args =
        "run --model cr_sphere_s3 --points 2 --order 4 --seed 5 --json";
    auto a = run_cli(args);
    auto b = run_cli(args);
    pass = pass && a.exit_code == 0 && b.exit_code == 0;
    pass = pass && a.out.find("\"timestamp\"") != std::string::npos;
    pass = pass && strip_timestamp(a.out) == strip_timestamp(b.out);

    pass = pass &&
           run_cli("run --model heisenberg3 --points 2 --order 4")
                   .exit_code == 0;
    pass = pass &&
           run_cli("run --model twisted_c2 --points 2 --order 4")
                   .exit_code == 1;
    pass = pass && run_cli("run --model nosuch").exit_code == 2;
    pass = pass && run_cli("run --model heisenberg3 --suite nope")
                           .exit_code == 2;

    double secs = now_seconds() - t0;
    report(9, "command line contract", pass, pass ? 0.0 : 1.0, secs);
}

}  // namespace

int main() {
    auto reg = builtin_registry();
    criterion_axioms(reg);
    criterion_models(reg);
    criterion_frames(reg);
    criterion_calculus(reg);
    criterion_slit(reg);
    criterion_bochner(reg);
    criterion_lifts(reg);
    criterion_jets(reg);
    criterion_cli();
    double total = now_seconds();
    std::printf("%d of 9 criteria passed, total %.2f s\n", 9 - g_failures,
                total);
    return g_failures == 0 ? 0 : 1;
}
