#pragma once

#include <algorithm>

#include "crforge/cr.hpp"
#include "crforge/geometry.hpp"

namespace crforge {

// Canonical metric connection of a cr_geometry: the Tanaka-Webster connection
// when the model is pseudo-hermitian, the Chern connection when d = 0.
// Closed forms used to build it:
//   nabla_{conj Z_i} Z_j = [conj Z_i, Z_j]_{1,0}
//   sum_l Gamma^l_{ij} g_{l kbar} = Z_i(g_{j kbar}) - g(Z_j, [Z_i, conj Z_k]_{0,1})
//   nabla xi = 0,  nabla_xi Z_j = [xi, Z_j]_{1,0},  tau(Z_j) = -[xi, Z_j]_{0,1}
// and conjugation for the (0,1) block.
struct tw_connection {
    const cr_geometry* G = nullptr;
    std::vector<std::vector<jvec>> nab_e;       // [i][j] = nabla_{Z_i} Z_j
    std::vector<std::vector<jvec>> nab_ebar_e;  // [i][j] = nabla_{conj Z_i} Z_j
    std::vector<jvec> nab_xi_e;                 // [j], pseudo-hermitian only
    std::vector<jvec> tau;                      // [j], pseudo-hermitian only

    bool has_reeb() const {
        return G->cat == model_category::pseudo_hermitian;
    }

    // nabla_X Y for arbitrary complexified fields, assembled tensorially in X
    // and by the Leibniz rule on the frame coefficients of Y.
    jvec cov(const jvec& X, const jvec& Y) const {
        const frame_blocks& F = G->F;
        int m0 = F.m0;
        jvec yc = F.split(Y), xc = F.split(X);
        jvec out(size_t(F.m), X[0] - X[0]);
        auto add = [&](const jvec& field, const jet& coeff) {
            for (int a = 0; a < F.m; ++a)
                out[size_t(a)] = out[size_t(a)] + coeff * field[size_t(a)];
        };
        for (int j = 0; j < m0; ++j) {
            add(F.e[size_t(j)], apply_field(X, yc[size_t(j)]));
            add(F.ebar(j), apply_field(X, yc[size_t(m0 + j)]));
            // nabla_X Z_j weighted by the (1,0) coefficient of Y
            jvec nxe(size_t(F.m), X[0] - X[0]);
            jvec nxe_bar(size_t(F.m), X[0] - X[0]);
            for (int i = 0; i < m0; ++i) {
                for (int a = 0; a < F.m; ++a) {
                    nxe[size_t(a)] =
                        nxe[size_t(a)] +
                        xc[size_t(i)] * nab_e[size_t(i)][size_t(j)][size_t(a)] +
                        xc[size_t(m0 + i)] *
                            nab_ebar_e[size_t(i)][size_t(j)][size_t(a)];
                    // conj X coefficients: (1,0) block conj(xc[m0+i]), (0,1)
                    // block conj(xc[i]); conjugate afterwards.
                    nxe_bar[size_t(a)] =
                        nxe_bar[size_t(a)] +
                        conj(xc[size_t(m0 + i)]) *
                            nab_e[size_t(i)][size_t(j)][size_t(a)] +
                        conj(xc[size_t(i)]) *
                            nab_ebar_e[size_t(i)][size_t(j)][size_t(a)];
                }
            }
            if (has_reeb()) {
                const jet& r = xc[size_t(2 * m0)];
                for (int a = 0; a < F.m; ++a) {
                    nxe[size_t(a)] = nxe[size_t(a)] +
                                     r * nab_xi_e[size_t(j)][size_t(a)];
                    nxe_bar[size_t(a)] =
                        nxe_bar[size_t(a)] +
                        conj(r) * nab_xi_e[size_t(j)][size_t(a)];
                }
            }
            add(nxe, yc[size_t(j)]);
            add(conj(nxe_bar), yc[size_t(m0 + j)]);
        }
        if (has_reeb())
            add(F.f[0], apply_field(X, yc[size_t(2 * m0)]));  // nabla xi = 0
        return out;
    }

    jvec torsion(const jvec& X, const jvec& Y) const {
        return cov(X, Y) - cov(Y, X) - lie_bracket(X, Y);
    }

    jvec curv(const jvec& X, const jvec& Y, const jvec& Z) const {
        jvec a = cov(X, cov(Y, Z));
        jvec b = cov(Y, cov(X, Z));
        jvec c = cov(lie_bracket(X, Y), Z);
        return a - b - c;
    }

    // R_{i jbar k lbar} = g(R(Z_i, conj Z_j) Z_k, conj Z_l).
    jet curv_comp(int i, int j, int k, int l) const {
        const frame_blocks& F = G->F;
        jvec R = curv(F.e[size_t(i)], F.ebar(j), F.e[size_t(k)]);
        jvec c = F.split(R);
        jet acc = c[0] - c[0];
        for (int s = 0; s < F.m0; ++s)
            acc = acc + c[size_t(s)] * G->g.at(s, l);
        return acc;
    }
};

// Full metric pairing on split coefficients: g(Z_i, conj Z_j) = g_{i jbar},
// conjugate block by symmetry, transversal direction of unit length, mixed
// blocks zero.
inline jet metric_pair(const cr_geometry& G, const jvec& Y, const jvec& Z) {
    const frame_blocks& F = G.F;
    int m0 = F.m0;
    jvec yc = F.split(Y), zc = F.split(Z);
    jet acc = Y[0] - Y[0];
    for (int i = 0; i < m0; ++i)
        for (int j = 0; j < m0; ++j) {
            acc = acc + yc[size_t(i)] * zc[size_t(m0 + j)] * G.g.at(i, j);
            acc = acc + yc[size_t(m0 + i)] * zc[size_t(j)] * G.g.at(j, i);
        }
    if (G.cat == model_category::pseudo_hermitian)
        acc = acc + yc[size_t(2 * m0)] * zc[size_t(2 * m0)];
    return acc;
}

inline tw_connection make_connection(const cr_geometry& G) {
    if (G.cat == model_category::almost_cr)
        throw hypothesis_error(
            "canonical connection needs a metric (pseudo-hermitian or "
            "hermitian model)");
    const frame_blocks& F = G.F;
    int m0 = F.m0;
    tw_connection W;
    W.G = &G;
    W.nab_e.assign(size_t(m0), std::vector<jvec>(size_t(m0)));
    W.nab_ebar_e.assign(size_t(m0), std::vector<jvec>(size_t(m0)));

    for (int i = 0; i < m0; ++i)
        for (int j = 0; j < m0; ++j)
            W.nab_ebar_e[size_t(i)][size_t(j)] =
                F.proj10(lie_bracket(F.ebar(i), F.e[size_t(j)]));

    // Gamma^l_{ij} from the metric: one m0 x m0 solve per direction i, with
    // the right-hand sides for all j batched.
    for (int i = 0; i < m0; ++i) {
        jmat A(m0, m0);
        for (int k = 0; k < m0; ++k)
            for (int l = 0; l < m0; ++l) A.at(k, l) = G.g.at(l, k);
        std::vector<jvec> rhs;
        rhs.reserve(size_t(m0));
        for (int j = 0; j < m0; ++j) {
            jvec R(size_t(m0), F.e[0][0] - F.e[0][0]);
            for (int k = 0; k < m0; ++k) {
                jet val = apply_field(F.e[size_t(i)], G.g.at(j, k));
                jvec br = lie_bracket(F.e[size_t(i)], F.ebar(k));
                jvec c = F.split(br);
                for (int l = 0; l < m0; ++l)
                    val = val - G.g.at(j, l) * c[size_t(m0 + l)];
                R[size_t(k)] = val;
            }
            rhs.push_back(std::move(R));
        }
        auto cols = jet_solve_linear(A, rhs);
        for (int j = 0; j < m0; ++j) {
            jvec field(size_t(F.m), F.e[0][0] - F.e[0][0]);
            for (int l = 0; l < m0; ++l)
                for (int a = 0; a < F.m; ++a)
                    field[size_t(a)] = field[size_t(a)] +
                                       cols[size_t(j)][size_t(l)] *
                                           F.e[size_t(l)][size_t(a)];
            W.nab_e[size_t(i)][size_t(j)] = std::move(field);
        }
    }

    if (G.cat == model_category::pseudo_hermitian) {
        W.nab_xi_e.resize(size_t(m0));
        W.tau.resize(size_t(m0));
        for (int j = 0; j < m0; ++j) {
            jvec br = lie_bracket(G.reeb, F.e[size_t(j)]);
            W.nab_xi_e[size_t(j)] = F.proj10(br);
            W.tau[size_t(j)] = cplx(-1.0) * F.proj01(br);
        }
    }
    return W;
}

struct connection_axiom_report {
    double metric = 0.0;        // nabla g
    double complex_str = 0.0;   // nabla J
    double torsion_pure = 0.0;  // T on (1,0) pairs
    double torsion_levi = 0.0;  // T(Z, conj W) - 2 dtheta(Z, conj W) xi
    double tau_symmetric = 0.0; // A_{jk} = A_{kj}
    double worst() const {
        return std::max({metric, complex_str, torsion_pure, torsion_levi,
                         tau_symmetric});
    }
};

inline connection_axiom_report verify_connection_axioms(
    const tw_connection& W) {
    const cr_geometry& G = *W.G;
    const frame_blocks& F = G.F;
    int m0 = F.m0;
    connection_axiom_report rep;

    std::vector<jvec> dirs;
    for (int i = 0; i < m0; ++i) dirs.push_back(F.e[size_t(i)]);
    for (int i = 0; i < m0; ++i) dirs.push_back(F.ebar(i));
    if (G.cat == model_category::pseudo_hermitian) dirs.push_back(G.reeb);

    for (const auto& X : dirs) {
        for (const auto& Y : dirs)
            for (const auto& Z : dirs) {
                jet lhs = apply_field(X, metric_pair(G, Y, Z));
                jet rhs = metric_pair(G, W.cov(X, Y), Z) +
                          metric_pair(G, Y, W.cov(X, Z));
                rep.metric =
                    std::max(rep.metric, std::abs((lhs - rhs).value()));
            }
        for (const auto& Y : dirs) {
            jvec lhs = W.cov(X, F.japply(Y));
            jvec rhs = F.japply(W.cov(X, Y));
            rep.complex_str =
                std::max(rep.complex_str, max_abs_value(lhs - rhs));
        }
    }

    for (int i = 0; i < m0; ++i)
        for (int j = 0; j < m0; ++j) {
            jvec Tp = W.torsion(F.e[size_t(i)], F.e[size_t(j)]);
            rep.torsion_pure = std::max(rep.torsion_pure, max_abs_value(Tp));
            jvec Tm = W.torsion(F.e[size_t(i)], F.ebar(j));
            if (G.cat == model_category::pseudo_hermitian) {
                jet coeff = 2.0 * eval_two_form(G.dtheta, F.e[size_t(i)],
                                                F.ebar(j));
                Tm = Tm - coeff * G.reeb;
            }
            rep.torsion_levi = std::max(rep.torsion_levi, max_abs_value(Tm));
        }

    if (G.cat == model_category::pseudo_hermitian) {
        // A_{jk} = g(tau(Z_j), Z_k) must be symmetric.
        for (int j = 0; j < m0; ++j)
            for (int k = 0; k < m0; ++k) {
                jet ajk = metric_pair(G, W.tau[size_t(j)], F.e[size_t(k)]);
                jet akj = metric_pair(G, W.tau[size_t(k)], F.e[size_t(j)]);
                rep.tau_symmetric = std::max(
                    rep.tau_symmetric, std::abs((ajk - akj).value()));
            }
    }
    return rep;
}

struct sasakian_report {
    bool sasakian = false;
    double tau_norm = 0.0;
};

inline sasakian_report is_sasakian(const tw_connection& W, double tol = 1e-9) {
    sasakian_report rep;
    if (!W.has_reeb()) return rep;
    for (const auto& t : W.tau)
        rep.tau_norm = std::max(rep.tau_norm, max_abs_value(t));
    rep.sasakian = rep.tau_norm < tol;
    return rep;
}

// Holomorphic sectional curvature in the direction W = sum W^i Z_i.
inline cplx sectional_holo(const tw_connection& C,
                           const std::vector<cplx>& Wdir) {
    const cr_geometry& G = *C.G;
    int m0 = G.m0();
    cplx num = 0.0;
    for (int i = 0; i < m0; ++i)
        for (int j = 0; j < m0; ++j)
            for (int k = 0; k < m0; ++k)
                for (int l = 0; l < m0; ++l)
                    num += Wdir[size_t(i)] * std::conj(Wdir[size_t(j)]) *
                           Wdir[size_t(k)] * std::conj(Wdir[size_t(l)]) *
                           C.curv_comp(i, j, k, l).value();
    cplx den = 0.0;
    for (int i = 0; i < m0; ++i)
        for (int j = 0; j < m0; ++j)
            den += Wdir[size_t(i)] * std::conj(Wdir[size_t(j)]) *
                   G.g.at(i, j).value();
    return num / (den * den);
}

// Cartan first structure equation in the alternation convention of this
// library: d theta^i (X, Y) = (theta^j ^ omega_j^i)(X, Y)
//                             + theta^i(T(X, Y)) / 2.
// Returns the worst residual over frame pairs.
inline double check_first_structure_equation(const tw_connection& W) {
    const cr_geometry& G = *W.G;
    const frame_blocks& F = G.F;
    int m = F.m, m0 = F.m0;

    // Coframe rows and connection 1-forms in coordinate components.
    std::vector<jvec> coframe;
    coframe.resize(size_t(m));
    for (int i = 0; i < m; ++i) {
        jvec row;
        row.reserve(size_t(m));
        for (int a = 0; a < m; ++a) row.push_back(F.C.at(i, a));
        coframe[size_t(i)] = std::move(row);
    }
    chart ch = G.ch;
    std::vector<std::vector<jvec>> omega;
    omega.assign(size_t(m0), std::vector<jvec>(size_t(m0)));
    for (int j = 0; j < m0; ++j)
        for (int i = 0; i < m0; ++i) {
            jvec comp;
            comp.reserve(size_t(m));
            for (int a = 0; a < m; ++a) {
                jvec cva = W.cov(ch.coordinate_field(a), F.e[size_t(j)]);
                comp.push_back(F.split(cva)[size_t(i)]);
            }
            omega[size_t(j)][size_t(i)] = std::move(comp);
        }

    std::vector<jvec> dirs;
    for (int i = 0; i < m0; ++i) dirs.push_back(F.e[size_t(i)]);
    for (int i = 0; i < m0; ++i) dirs.push_back(F.ebar(i));
    if (G.cat == model_category::pseudo_hermitian) dirs.push_back(G.reeb);

    double worst = 0.0;
    for (int i = 0; i < m0; ++i) {
        two_form dth = d_one_form(coframe[size_t(i)]);
        for (const auto& X : dirs)
            for (const auto& Y : dirs) {
                jet lhs = eval_two_form(dth, X, Y);
                jet rhs = 0.5 * pair_form(coframe[size_t(i)],
                                          W.torsion(X, Y));
                for (int j = 0; j < m0; ++j) {
                    two_form wj =
                        wedge11(coframe[size_t(j)], omega[size_t(j)][size_t(i)]);
                    rhs = rhs + eval_two_form(wj, X, Y);
                }
                worst = std::max(worst, std::abs((lhs - rhs).value()));
            }
    }
    return worst;
}

}  // namespace crforge
