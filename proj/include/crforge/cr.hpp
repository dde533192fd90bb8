#pragma once

#include "crforge/geometry.hpp"
#include "crforge/model.hpp"

namespace crforge {

// Canonical per-point geometry package.  For a pseudo-hermitian model the
// splitting is rebuilt over the solved Reeb field and the metric is the Levi
// form g_{i jbar} = -i dtheta(e_i, conj e_j); for a hermitian model (d = 0)
// the declared metric matrix is used as g(e_i, conj e_j).
struct cr_geometry {
    chart ch;
    model_category cat;
    frame_blocks F;
    jvec theta;      // empty unless pseudo-hermitian
    two_form dtheta;
    jvec reeb;
    jmat g;          // m0 x m0

    int m() const { return F.m; }
    int m0() const { return F.m0; }
};

// theta(xi) = 1 and dtheta(xi, .) = 0 as an overdetermined linear system,
// solved through its normal equations; the system has full column rank
// whenever theta is a contact form.
inline jvec solve_reeb(const chart& ch, const jvec& theta,
                       const two_form& dtheta) {
    int m = ch.m();
    int rows = m + 1;
    std::vector<jvec> A;
    A.resize(size_t(rows));
    A[0] = theta;
    for (int b = 0; b < m; ++b) {
        jvec row;
        row.reserve(size_t(m));
        for (int a = 0; a < m; ++a) row.push_back(dtheta.at(a, b));
        A[size_t(b) + 1] = std::move(row);
    }
    jmat N(m, m);
    jvec rhs(size_t(m), ch.constant(0.0));
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
            jet acc = ch.constant(0.0);
            for (int r = 0; r < rows; ++r)
                acc = acc + conj(A[size_t(r)][size_t(a)]) *
                                A[size_t(r)][size_t(b)];
            N.at(a, b) = acc;
        }
        rhs[size_t(a)] = conj(A[0][size_t(a)]);  // A^H applied to (1, 0, ...)
    }
    return jet_solve_linear(N, rhs);
}

inline cr_geometry make_geometry(const manifold_spec& M,
                                 const std::vector<double>& p, int order) {
    chart ch(M, p, order);
    frame_blocks F0 = frame_blocks_from_spec(ch);
    cr_geometry G{ch, M.category(), F0, {}, {}, {}, {}};

    if (G.cat == model_category::pseudo_hermitian) {
        G.theta = ch.components(M.theta);
        G.dtheta = d_one_form(G.theta);
        G.reeb = solve_reeb(ch, G.theta, G.dtheta);
        G.F = frame_blocks(F0.e, {G.reeb});
        int m0 = G.F.m0;
        G.g = jmat(m0, m0);
        for (int i = 0; i < m0; ++i)
            for (int j = 0; j < m0; ++j)
                G.g.at(i, j) = cplx(0, -1) * eval_two_form(G.dtheta,
                                                           G.F.e[size_t(i)],
                                                           G.F.ebar(j));
    } else if (G.cat == model_category::hermitian) {
        int m0 = G.F.m0;
        G.g = jmat(m0, m0);
        for (int i = 0; i < m0; ++i)
            for (int j = 0; j < m0; ++j)
                G.g.at(i, j) = ch.scalar(M.metric[size_t(i)][size_t(j)]);
    } else {
        return G;  // bare almost CR structure, no metric package
    }

    // Positivity of the metric at the point (leading principal minors).
    int m0 = G.F.m0;
    std::vector<std::vector<cplx>> gv;
    gv.assign(size_t(m0), std::vector<cplx>(size_t(m0)));
    for (int i = 0; i < m0; ++i)
        for (int j = 0; j < m0; ++j) gv[size_t(i)][size_t(j)] = G.g.at(i, j).value();
    for (int i = 0; i < m0; ++i)
        for (int j = 0; j < m0; ++j)
            if (std::abs(gv[size_t(i)][size_t(j)] -
                         std::conj(gv[size_t(j)][size_t(i)])) > 1e-9)
                throw hypothesis_error(M.name +
                                       ": metric is not hermitian at the "
                                       "sample point");
    double det1 = gv[0][0].real();
    if (det1 <= 0.0)
        throw hypothesis_error(M.name + ": metric is not positive definite");
    if (m0 >= 2) {
        cplx det2 = gv[0][0] * gv[1][1] - gv[0][1] * gv[1][0];
        if (det2.real() <= 0.0)
            throw hypothesis_error(M.name +
                                   ": metric is not positive definite");
    }
    return G;
}

inline cr_geometry make_geometry(const manifold_spec& M, int order) {
    return make_geometry(M, M.basepoint, order);
}

// Nijenhuis tensor of the induced J, N(X, Y) =
// [JX, JY] - J[JX, Y] - J[X, JY] + J(J[X, Y]).
inline jvec nijenhuis(const frame_blocks& F, const jvec& X, const jvec& Y) {
    jvec JX = F.japply(X), JY = F.japply(Y);
    jvec term = lie_bracket(JX, JY);
    term = term - F.japply(lie_bracket(JX, Y));
    term = term - F.japply(lie_bracket(X, JY));
    term = term + F.japply(F.japply(lie_bracket(X, Y)));
    return term;
}

// Largest component of [Z_i, Z_j] outside the (1,0) bundle over frame pairs,
// evaluated at the chart point.  Zero iff the structure is integrable there.
inline double check_cr_integrability(const frame_blocks& F) {
    double worst = 0.0;
    for (int i = 0; i < F.m0; ++i)
        for (int j = i + 1; j < F.m0; ++j) {
            jvec br = lie_bracket(F.e[size_t(i)], F.e[size_t(j)]);
            jvec bad = br - F.proj10(br);
            worst = std::max(worst, max_abs_value(bad));
        }
    return worst;
}

}  // namespace crforge
