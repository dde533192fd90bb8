#pragma once

#include <algorithm>
#include <memory>
#include <random>
#include <vector>

#include "crforge/cr.hpp"
#include "crforge/frames.hpp"
#include "crforge/model.hpp"

namespace crforge {

// Yano-Ishihara lifts to the tangent bundle, the lifted CR structure on TM,
// and the connection-induced almost CR structure on a complex vector bundle.
//
// Everything lives on an enlarged chart: (x^1..x^m, y^1..y^m) for TM, or
// (x^1..x^m, Re b^1..Re b^k, Im b^1..Im b^k) for a rank-k bundle.  Base jets
// embed by an identity variable map; fiber coordinates are fresh variables.
// Coefficients that pass through a base derivative carry one order less, and
// mixed-order arithmetic truncates to the shorter operand, which is exact on
// the polynomial data these identities are checked with.

inline jvec tensor_apply(const jmat& A, const jvec& X) {
    if (A.cols != int(X.size()))
        throw structural_error("tensor_apply: arity mismatch");
    jvec out;
    out.reserve(size_t(A.rows));
    for (int i = 0; i < A.rows; ++i) {
        jet acc = A.at(i, 0) * X[0];
        for (int j = 1; j < A.cols; ++j) acc = acc + A.at(i, j) * X[size_t(j)];
        out.push_back(acc);
    }
    return out;
}

inline jmat tensor_mul(const jmat& A, const jmat& B) {
    if (A.cols != B.rows) throw structural_error("tensor_mul: shape mismatch");
    jmat out(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < B.cols; ++j) {
            jet acc = A.at(i, 0) * B.at(0, j);
            for (int k = 1; k < A.cols; ++k)
                acc = acc + A.at(i, k) * B.at(k, j);
            out.at(i, j) = acc;
        }
    return out;
}

inline double field_gap(const jvec& X, const jvec& Y) {
    if (X.size() != Y.size())
        throw structural_error("field_gap: arity mismatch");
    double r = 0.0;
    for (size_t a = 0; a < X.size(); ++a)
        r = std::max(r, (X[a] - Y[a]).max_abs());
    return r;
}

inline double tensor_gap(const jmat& A, const jmat& B) {
    if (A.rows != B.rows || A.cols != B.cols)
        throw structural_error("tensor_gap: shape mismatch");
    double r = 0.0;
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j)
            r = std::max(r, (A.at(i, j) - B.at(i, j)).max_abs());
    return r;
}

// N_A(X, Y) = [AX, AY] - A[AX, Y] - A[X, AY] - [X, Y].  On arguments where
// A^2 = -id this is the Nijenhuis torsion; the bracket-only last term is the
// variant whose lift transfer is exact for the zero-extended structure map.
inline jvec nijenhuis_defect(const jmat& A, const jvec& X, const jvec& Y) {
    jvec AX = tensor_apply(A, X);
    jvec AY = tensor_apply(A, Y);
    jvec out = lie_bracket(AX, AY);
    out = out - tensor_apply(A, lie_bracket(AX, Y));
    out = out - tensor_apply(A, lie_bracket(X, AY));
    return out - lie_bracket(X, Y);
}

struct tangent_lift {
    int m = 0;
    int order = 0;  // order of freshly lifted scalars on the doubled chart
    std::vector<double> y;

    jet scalar(const jet& u) const {
        std::vector<int> vmap(size_t(m), 0);
        for (int v = 0; v < m; ++v) vmap[size_t(v)] = v;
        return u.truncated(std::min(order, u.order()))
            .extended(2 * m, vmap);
    }

    jet zero() const { return jet::constant(2 * m, order, 0.0); }

    jet yvar(int j) const {
        return jet::variable(2 * m, order, m + j, y[size_t(j)]);
    }

    // Z^V = z^i d/dY^i
    jvec vertical(const jvec& Z) const {
        jvec out(size_t(2 * m), zero());
        for (int i = 0; i < m; ++i) out[size_t(m + i)] = scalar(Z[size_t(i)]);
        return out;
    }

    // Z^C = z^i d/dX^i + y^j (dz^i/dx^j) d/dY^i
    jvec complete(const jvec& Z) const {
        jvec out(size_t(2 * m), zero());
        for (int i = 0; i < m; ++i) {
            out[size_t(i)] = scalar(Z[size_t(i)]);
            jet acc = zero();
            for (int j = 0; j < m; ++j)
                acc = acc + yvar(j) * scalar(Z[size_t(i)].deriv(j));
            out[size_t(m + i)] = acc;
        }
        return out;
    }

    // A^C: the base block on both diagonals plus the derivative block
    // y^k (dA^j_i/dx^k) in the lower left.
    jmat tensor(const jmat& A) const {
        if (A.rows != m || A.cols != m)
            throw structural_error("tangent_lift: tensor must be m x m");
        jmat out(2 * m, 2 * m);
        for (int i = 0; i < 2 * m; ++i)
            for (int j = 0; j < 2 * m; ++j) out.at(i, j) = zero();
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                jet base = scalar(A.at(i, j));
                out.at(i, j) = base;
                out.at(m + i, m + j) = base;
                jet acc = zero();
                for (int k = 0; k < m; ++k)
                    acc = acc + yvar(k) * scalar(A.at(i, j).deriv(k));
                out.at(m + i, j) = acc;
            }
        return out;
    }
};

inline tangent_lift make_tangent_lift(int m, int order,
                                      std::vector<double> y) {
    if (int(y.size()) != m)
        throw structural_error("tangent_lift: fiber point arity mismatch");
    return tangent_lift{m, order, std::move(y)};
}

struct lift_identity_report {
    double tensor_complete = 0;  // A^C Z^C = (AZ)^C
    double tensor_vertical = 0;  // A^C Z^V = (AZ)^V
    double tensor_square = 0;    // (A^2)^C = (A^C)^2
    double bracket_vv = 0;       // [Z^V, W^V] = 0
    double bracket_vc = 0;       // [Z^V, W^C] = [Z, W]^V
    double bracket_cc = 0;       // [Z^C, W^C] = [Z, W]^C
    double worst() const {
        return std::max({tensor_complete, tensor_vertical, tensor_square,
                         bracket_vv, bracket_vc, bracket_cc});
    }
};

inline lift_identity_report lift_identities_check(const jvec& Z,
                                                  const jvec& W,
                                                  const jmat& A,
                                                  const tangent_lift& L) {
    jvec Zc = L.complete(Z), Zv = L.vertical(Z);
    jvec Wc = L.complete(W), Wv = L.vertical(W);
    jmat Ac = L.tensor(A);
    jvec AZ = tensor_apply(A, Z);

    lift_identity_report r;
    r.tensor_complete = field_gap(tensor_apply(Ac, Zc), L.complete(AZ));
    r.tensor_vertical = field_gap(tensor_apply(Ac, Zv), L.vertical(AZ));
    r.tensor_square = tensor_gap(L.tensor(tensor_mul(A, A)),
                                 tensor_mul(Ac, Ac));
    jvec zero2m(size_t(2 * L.m), L.zero());
    r.bracket_vv = field_gap(lie_bracket(Zv, Wv), zero2m);
    jvec ZW = lie_bracket(Z, W);
    r.bracket_vc = field_gap(lie_bracket(Zv, Wc), L.vertical(ZW));
    r.bracket_cc = field_gap(lie_bracket(Zc, Wc), L.complete(ZW));
    return r;
}

namespace detail {

// Random real polynomial of the given degree as a function jet at the chart
// point.
inline jet random_poly(const chart& ch, int degree, std::mt19937& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    int m = ch.m();
    jvec x;
    for (int v = 0; v < m; ++v)
        x.push_back(jet::variable(m, ch.order, v, ch.p[size_t(v)]));
    jet acc = ch.constant(N(rng));
    for (int v = 0; v < m; ++v) acc = acc + N(rng) * x[size_t(v)];
    if (degree >= 2)
        for (int v = 0; v < m; ++v)
            for (int w = v; w < m; ++w)
                acc = acc + (0.5 * N(rng)) * x[size_t(v)] * x[size_t(w)];
    if (degree >= 3)
        for (int v = 0; v < m; ++v)
            acc = acc + (0.25 * N(rng)) * x[size_t(v)] * x[size_t(v)] *
                            x[size_t((v + 1) % m)];
    return acc;
}

// Random real section of the Levi distribution: polynomial combinations of
// the real frame pairs {e_a + conj e_a, i(e_a - conj e_a)}.
inline jvec random_levi_section(const cr_geometry& G, int degree,
                                std::mt19937& rng) {
    jvec Z(size_t(G.m()), G.ch.constant(0.0));
    for (int a = 0; a < G.m0(); ++a) {
        const jvec& e = G.F.e[size_t(a)];
        jvec u = e + conj(e);
        jvec w = cplx(0, 1) * (e - conj(e));
        jet phi = random_poly(G.ch, degree, rng);
        jet psi = random_poly(G.ch, degree, rng);
        Z = Z + phi * u + psi * w;
    }
    return Z;
}

}  // namespace detail

struct tangent_cr_report {
    double jc_squared = 0;        // (J^C)^2 + id on the lifted generators
    double first_condition = 0;   // complement component of [JX, Y] + [X, JY]
    double nij_vertical = 0;      // N(Z^V, W^V)
    double nij_cc_transfer = 0;   // N(Z^C, W^C) - (N_base(Z, W))^C
    double nij_cv_transfer = 0;   // N(Z^C, W^V) - (N_base(Z, W))^V
    double nij_distribution = 0;  // N over the lifted generator pairs
    double base_nijenhuis = 0;    // |N_base(Z, W)| at the point, for context
    double complement_independence = 0;  // J^C under a different complement
};

// Lifted generators of (HM)^V + (HM)^C: vertical and complete lifts of the
// real frame pairs.
inline std::vector<jvec> lifted_levi_generators(const cr_geometry& G,
                                                const tangent_lift& L) {
    std::vector<jvec> gen;
    for (int a = 0; a < G.m0(); ++a) {
        const jvec& e = G.F.e[size_t(a)];
        jvec u = e + conj(e);
        jvec w = cplx(0, 1) * (e - conj(e));
        gen.push_back(L.vertical(u));
        gen.push_back(L.vertical(w));
        gen.push_back(L.complete(u));
        gen.push_back(L.complete(w));
    }
    return gen;
}

inline tangent_cr_report tangent_cr_check(const cr_geometry& G,
                                          const std::vector<double>& y,
                                          unsigned seed) {
    int m = G.m(), m0 = G.m0(), d = G.F.d;
    tangent_lift L = make_tangent_lift(m, G.ch.order - 1, y);
    jmat J = G.F.jmatrix();
    jmat Jc = L.tensor(J);

    std::mt19937 rng(seed);
    jvec Z = detail::random_levi_section(G, 2, rng);
    jvec W = detail::random_levi_section(G, 2, rng);

    tangent_cr_report r;
    jvec NJ = nijenhuis_defect(J, Z, W);
    r.base_nijenhuis = max_abs_value(NJ);

    jvec Zc = L.complete(Z), Zv = L.vertical(Z);
    jvec Wc = L.complete(W), Wv = L.vertical(W);
    jvec zero2m(size_t(2 * m), L.zero());
    r.nij_vertical = field_gap(nijenhuis_defect(Jc, Zv, Wv), zero2m);
    r.nij_cc_transfer =
        field_gap(nijenhuis_defect(Jc, Zc, Wc), L.complete(NJ));
    r.nij_cv_transfer =
        field_gap(nijenhuis_defect(Jc, Zc, Wv), L.vertical(NJ));

    auto gen = lifted_levi_generators(G, L);
    for (size_t i = 0; i < gen.size(); ++i) {
        r.jc_squared = std::max(
            r.jc_squared,
            field_gap(tensor_apply(Jc, tensor_apply(Jc, gen[i])),
                      cplx(-1.0) * gen[i]));
        for (size_t j = i + 1; j < gen.size(); ++j)
            r.nij_distribution = std::max(
                r.nij_distribution,
                field_gap(nijenhuis_defect(Jc, gen[i], gen[j]), zero2m));
    }

    // First integrability condition: [JX, Y] + [X, JY] stays inside the
    // span of the generators and the lifted complement.  Membership is a
    // linear solve against the full lifted frame at the point.
    detail::cmat M;
    M.assign(size_t(2 * m), std::vector<cplx>(size_t(2 * m), cplx(0.0)));
    std::vector<jvec> full = gen;
    for (int rr = 0; rr < d; ++rr) {
        full.push_back(L.vertical(G.F.f[size_t(rr)]));
        full.push_back(L.complete(G.F.f[size_t(rr)]));
    }
    for (size_t c = 0; c < full.size(); ++c)
        for (int a = 0; a < 2 * m; ++a)
            M[size_t(a)][c] = full[c][size_t(a)].value();
    auto complement_coeff = [&](const jvec& X) {
        std::vector<cplx> rhs;
        for (int a = 0; a < 2 * m; ++a) rhs.push_back(X[size_t(a)].value());
        auto coef = detail::solve_cplx(M, rhs);
        double worst = 0.0;
        for (size_t c = size_t(4 * m0); c < coef.size(); ++c)
            worst = std::max(worst, std::abs(coef[c]));
        return worst;
    };
    std::vector<std::pair<jvec, jvec>> pairs = {
        {Zc, Wc}, {Zv, Wv}, {Zc, Wv}};
    for (const auto& [X, Y] : pairs) {
        jvec comb = lie_bracket(tensor_apply(Jc, X), Y) +
                    lie_bracket(X, tensor_apply(Jc, Y));
        r.first_condition = std::max(r.first_condition,
                                     complement_coeff(comb));
    }

    // The restriction of J^C to the lifted Levi distribution must not see a
    // change of complement in the base extension.
    if (d > 0) {
        std::vector<jvec> alt;
        for (int rr = 0; rr < d; ++rr) {
            jvec u0 = G.F.e[0] + conj(G.F.e[0]);
            alt.push_back(G.F.f[size_t(rr)] + u0);
        }
        frame_blocks F2(G.F.e, alt);
        jmat J2c = L.tensor(F2.jmatrix());
        for (const auto& g : gen)
            r.complement_independence = std::max(
                r.complement_independence,
                field_gap(tensor_apply(Jc, g), tensor_apply(J2c, g)));
    }
    return r;
}

// ---------- almost CR structure on a complex vector bundle ----------

struct bundle_lift {
    std::shared_ptr<cr_geometry> Gp;
    int k = 0;      // complex rank
    int n = 0;      // total chart variables: m + 2k
    int order = 0;
    std::vector<cplx> b;  // fiber point
    jmat I;               // k x k structure map on the base chart
    // omega[j][p]: coordinate components of the form sending s_j to s_p.
    std::vector<std::vector<jvec>> omega;

    const cr_geometry& G() const { return *Gp; }

    jet lift(const jet& u) const {
        std::vector<int> vmap(size_t(G().m()), 0);
        for (int v = 0; v < G().m(); ++v) vmap[size_t(v)] = v;
        return u.extended(n, vmap);
    }
    jet zero() const { return jet::constant(n, order, 0.0); }

    // Complex fiber coordinate b^j as a jet.
    jet fiber(int j) const {
        return jet::variable(n, order, G().m() + j, b[size_t(j)].real()) +
               cplx(0, 1) * jet::variable(n, order, G().m() + k + j,
                                          b[size_t(j)].imag());
    }

    // Real vertical field for a complex fiber vector field c^p d/db^p.
    jvec vertical(const jvec& c) const {
        jvec out(size_t(n), zero());
        for (int p = 0; p < k; ++p) {
            out[size_t(G().m() + p)] = 0.5 * (c[size_t(p)] + conj(c[size_t(p)]));
            out[size_t(G().m() + k + p)] =
                cplx(0, -0.5) * (c[size_t(p)] - conj(c[size_t(p)]));
        }
        return out;
    }

    // Complex components of the vertical part of a total-space field.
    jvec vertical_part(const jvec& X) const {
        // strip the horizontal lift of the base projection
        jvec base(X.begin(), X.begin() + G().m());
        jvec vert = X - hlift_coeff(base);
        jvec c;
        for (int p = 0; p < k; ++p)
            c.push_back(vert[size_t(G().m() + p)] +
                        cplx(0, 1) * vert[size_t(G().m() + k + p)]);
        return c;
    }

    // Horizontal lift of the i-th base coordinate field:
    //   d/dx^i - b^j omega_j^p(d/dx^i) d/db^p.
    jvec horizontal(int i) const {
        jvec c(size_t(k), zero());
        for (int p = 0; p < k; ++p)
            for (int j = 0; j < k; ++j)
                c[size_t(p)] =
                    c[size_t(p)] -
                    fiber(j) * lift(omega[size_t(j)][size_t(p)][size_t(i)]);
        jvec out = vertical(c);
        out[size_t(i)] = out[size_t(i)] + 1.0;
        return out;
    }

    // Horizontal lift of a base field whose coefficients are already jets on
    // the total chart.
    jvec hlift_coeff(const jvec& Xc) const {
        jvec out(size_t(n), zero());
        for (int i = 0; i < G().m(); ++i)
            out = out + Xc[size_t(i)] * horizontal(i);
        return out;
    }

    jvec hlift(const jvec& X) const {
        jvec Xc;
        for (const auto& comp : X) Xc.push_back(lift(comp));
        return hlift_coeff(Xc);
    }

    // The structure map: J on the horizontal image of the Levi distribution,
    // I on the vertical bundle, zero on the lifted complement.
    jvec je_apply(const jvec& X, const jmat& I_use) const {
        jvec base(X.begin(), X.begin() + G().m());
        jmat Jl(G().m(), G().m());
        jmat Jb = G().F.jmatrix();
        for (int i = 0; i < G().m(); ++i)
            for (int j = 0; j < G().m(); ++j) Jl.at(i, j) = lift(Jb.at(i, j));
        jvec c = vertical_part(X);
        jvec Ic(size_t(k), zero());
        for (int p = 0; p < k; ++p)
            for (int q = 0; q < k; ++q)
                Ic[size_t(p)] =
                    Ic[size_t(p)] + lift(I_use.at(p, q)) * c[size_t(q)];
        return hlift_coeff(tensor_apply(Jl, base)) + vertical(Ic);
    }
    jvec je_apply(const jvec& X) const { return je_apply(X, I); }
};

inline bundle_lift make_bundle_lift(const bundle_spec& B,
                                    const manifold_spec& M,
                                    const std::vector<double>& p,
                                    const std::vector<cplx>& b, int order) {
    if (M.name != B.base)
        throw structural_error("bundle " + B.name + " has base " + B.base +
                               ", not " + M.name);
    if (int(b.size()) != B.rank)
        throw structural_error("bundle " + B.name + ": fiber point must have " +
                               std::to_string(B.rank) + " components");
    bundle_lift BL;
    BL.Gp = std::make_shared<cr_geometry>(make_geometry(M, p, order));
    BL.k = B.rank;
    BL.n = M.m() + 2 * B.rank;
    BL.order = order;
    BL.b = b;
    const chart& ch = BL.Gp->ch;
    BL.I = jmat(B.rank, B.rank);
    for (int i = 0; i < B.rank; ++i)
        for (int j = 0; j < B.rank; ++j)
            BL.I.at(i, j) = ch.scalar(B.structure[size_t(i)][size_t(j)]);
    jmat I2 = tensor_mul(BL.I, BL.I);
    double worst = 0.0;
    for (int i = 0; i < B.rank; ++i)
        for (int j = 0; j < B.rank; ++j)
            worst = std::max(worst,
                             (I2.at(i, j) + cplx(i == j ? 1.0 : 0.0, 0.0))
                                 .max_abs());
    if (worst > 1e-9)
        throw schema_error("bundle " + B.name +
                           ": structure map does not square to -id");
    for (const auto& row : B.omega) {
        std::vector<jvec> r;
        for (const auto& form : row) r.push_back(ch.components(form));
        BL.omega.push_back(std::move(r));
    }
    return BL;
}

struct bundle_cr_report {
    double frame_split = 0;     // invertibility of horizontal + vertical
    double je_squared = 0;      // (J_E)^2 + id on the Levi generators
    double projection_push = 0; // dp o J_E = J o dp, as jets
    double projection_range = 0;  // complement coefficient of dp on HE
    double nijenhuis_sample = 0;  // reported, not asserted
    double worst() const {
        return std::max({frame_split, je_squared, projection_push,
                         projection_range});
    }
};

inline bundle_cr_report bundle_cr_check(const bundle_lift& BL,
                                        cplx vertical_perturbation = 0.0) {
    const cr_geometry& G = BL.G();
    int m = G.m(), m0 = G.m0(), k = BL.k, n = BL.n;
    jmat I_use = BL.I;
    I_use.at(0, 0) = I_use.at(0, 0) + vertical_perturbation;

    bundle_cr_report r;

    // TE = (horizontal span) + (vertical span): the combined value matrix
    // must invert cleanly.
    detail::cmat M;
    M.assign(size_t(n), std::vector<cplx>(size_t(n), cplx(0.0)));
    for (int i = 0; i < m; ++i) {
        jvec h = BL.horizontal(i);
        for (int a = 0; a < n; ++a) M[size_t(a)][size_t(i)] = h[size_t(a)].value();
    }
    for (int j = 0; j < 2 * k; ++j) M[size_t(m + j)][size_t(m + j)] = 1.0;
    auto Minv = detail::invert_cplx(M);
    for (int a = 0; a < n; ++a)
        for (int bb = 0; bb < n; ++bb) {
            cplx acc(0.0);
            for (int c = 0; c < n; ++c) acc += M[size_t(a)][size_t(c)] * Minv[size_t(c)][size_t(bb)];
            r.frame_split = std::max(r.frame_split,
                                     std::abs(acc - cplx(a == bb ? 1.0 : 0.0)));
        }

    // Levi generators of HE: horizontal lifts of the base real frame pairs
    // plus the real and imaginary vertical directions.
    std::vector<jvec> gen;
    for (int a = 0; a < m0; ++a) {
        const jvec& e = G.F.e[size_t(a)];
        gen.push_back(BL.hlift(e + conj(e)));
        gen.push_back(BL.hlift(cplx(0, 1) * (e - conj(e))));
    }
    for (int j = 0; j < 2 * k; ++j) {
        jvec v(size_t(n), BL.zero());
        v[size_t(m + j)] = v[size_t(m + j)] + 1.0;
        gen.push_back(v);
    }

    jmat Jb = G.F.jmatrix();
    for (const auto& g : gen) {
        r.je_squared = std::max(
            r.je_squared,
            field_gap(BL.je_apply(BL.je_apply(g, I_use), I_use),
                      cplx(-1.0) * g));
        jvec Jg = BL.je_apply(g, I_use);
        // dp o J_E versus J o dp, componentwise in the base directions
        jvec push(Jg.begin(), Jg.begin() + m);
        jvec baseg(g.begin(), g.begin() + m);
        jmat Jl(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) Jl.at(i, j) = BL.lift(Jb.at(i, j));
        r.projection_push = std::max(
            r.projection_push, field_gap(push, tensor_apply(Jl, baseg)));
        // dp(HE) must stay inside the base Levi distribution
        std::vector<cplx> val;
        for (int i = 0; i < m; ++i) val.push_back(baseg[size_t(i)].value());
        detail::cmat Bv;
        Bv.assign(size_t(m), std::vector<cplx>(size_t(m), cplx(0.0)));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                Bv[size_t(i)][size_t(j)] = G.F.B.at(i, j).value();
        auto coef = detail::solve_cplx(Bv, val);
        for (int c = 2 * m0; c < m; ++c)
            r.projection_range = std::max(r.projection_range,
                                          std::abs(coef[size_t(c)]));
    }

    // Integrability is not claimed for this structure; the torsion of the
    // lifted map on a generator pair is reported as a plain number.
    if (gen.size() >= 2) {
        jmat JE(n, n);
        for (int c = 0; c < n; ++c) {
            jvec col(size_t(n), BL.zero());
            col[size_t(c)] = col[size_t(c)] + 1.0;
            jvec img = BL.je_apply(col, I_use);
            for (int a = 0; a < n; ++a) JE.at(a, c) = img[size_t(a)];
        }
        r.nijenhuis_sample =
            max_abs_value(nijenhuis_defect(JE, gen[0], gen[2 * m0 > 1 ? 2 : 1]));
    }
    return r;
}

}  // namespace crforge
