#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "crforge/errors.hpp"
#include "crforge/expr.hpp"
#include "crforge/jet.hpp"
#include "crforge/model.hpp"

namespace crforge {

// Chart-level calculus.  Every geometric object near a point p is carried as
// truncated Taylor data in the real chart coordinates: a scalar is a jet, a
// vector field or 1-form is its component list, a 2-form its component
// matrix.  Exterior derivatives use the 1/(k+1) alternation convention,
//   (d omega)(X, Y) = (X omega(Y) - Y omega(X) - omega([X, Y])) / 2,
// so on components (d omega)_{ab} = (@_a omega_b - @_b omega_a) / 2 and
// (alpha ^ beta)(X, Y) = (alpha(X) beta(Y) - alpha(Y) beta(X)) / 2.

struct chart {
    const manifold_spec* spec;
    std::vector<double> p;
    int order;

    chart(const manifold_spec& M, std::vector<double> point, int ord)
        : spec(&M), p(std::move(point)), order(ord) {
        if (int(p.size()) != M.m())
            throw structural_error("chart: point arity mismatch");
    }
    chart(const manifold_spec& M, int ord) : chart(M, M.basepoint, ord) {}

    int m() const { return spec->m(); }

    jet scalar(const expr_ptr& e) const {
        return eval_jet(e, spec->coords, p, order);
    }
    jvec components(const std::vector<expr_ptr>& comps) const {
        jvec out;
        out.reserve(comps.size());
        for (const auto& c : comps) out.push_back(scalar(c));
        return out;
    }
    jet constant(cplx z) const { return jet::constant(m(), order, z); }
    jvec coordinate_field(int a) const {
        jvec out(size_t(m()), constant(0.0));
        out[size_t(a)] = constant(1.0);
        return out;
    }
};

inline jvec conj(const jvec& X) {
    jvec out;
    out.reserve(X.size());
    for (const auto& c : X) out.push_back(conj(c));
    return out;
}

inline jvec operator+(const jvec& X, const jvec& Y) {
    if (X.size() != Y.size())
        throw structural_error("field arity mismatch");
    jvec out;
    out.reserve(X.size());
    for (size_t a = 0; a < X.size(); ++a) out.push_back(X[a] + Y[a]);
    return out;
}

inline jvec operator-(const jvec& X, const jvec& Y) {
    if (X.size() != Y.size())
        throw structural_error("field arity mismatch");
    jvec out;
    out.reserve(X.size());
    for (size_t a = 0; a < X.size(); ++a) out.push_back(X[a] - Y[a]);
    return out;
}

inline jvec operator*(const jet& s, const jvec& X) {
    jvec out;
    out.reserve(X.size());
    for (const auto& c : X) out.push_back(s * c);
    return out;
}

inline jvec operator*(cplx s, const jvec& X) {
    jvec out;
    out.reserve(X.size());
    for (const auto& c : X) out.push_back(s * c);
    return out;
}

inline double max_abs_value(const jvec& X) {
    double r = 0.0;
    for (const auto& c : X) r = std::max(r, std::abs(c.value()));
    return r;
}

// X(u) = sum_a X^a @_a u.  Costs one jet order.
inline jet apply_field(const jvec& X, const jet& u) {
    jet acc = X.at(0) * u.deriv(0);
    for (size_t a = 1; a < X.size(); ++a) acc = acc + X[a] * u.deriv(int(a));
    return acc;
}

inline jvec lie_bracket(const jvec& X, const jvec& Y) {
    if (X.size() != Y.size())
        throw structural_error("lie_bracket: field arity mismatch");
    jvec out;
    out.reserve(X.size());
    for (size_t a = 0; a < X.size(); ++a)
        out.push_back(apply_field(X, Y[a]) - apply_field(Y, X[a]));
    return out;
}

inline jet pair_form(const jvec& omega, const jvec& X) {
    if (omega.size() != X.size())
        throw structural_error("pair_form: arity mismatch");
    jet acc = omega[0] * X[0];
    for (size_t a = 1; a < omega.size(); ++a) acc = acc + omega[a] * X[a];
    return acc;
}

inline jvec d_scalar(const jet& u) {
    jvec out;
    out.reserve(size_t(u.num_vars()));
    for (int a = 0; a < u.num_vars(); ++a) out.push_back(u.deriv(a));
    return out;
}

struct two_form {
    int m = 0;
    std::vector<jet> a;  // row-major m x m, antisymmetric
    two_form() = default;
    explicit two_form(int mm) : m(mm), a(size_t(mm) * size_t(mm)) {}
    jet& at(int i, int j) { return a[size_t(i) * size_t(m) + size_t(j)]; }
    const jet& at(int i, int j) const {
        return a[size_t(i) * size_t(m) + size_t(j)];
    }
};

inline two_form d_one_form(const jvec& omega) {
    int m = int(omega.size());
    two_form out(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            out.at(i, j) = 0.5 * (omega[size_t(j)].deriv(i) -
                                  omega[size_t(i)].deriv(j));
    return out;
}

inline two_form wedge11(const jvec& alpha, const jvec& beta) {
    if (alpha.size() != beta.size())
        throw structural_error("wedge11: arity mismatch");
    int m = int(alpha.size());
    two_form out(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            out.at(i, j) = 0.5 * (alpha[size_t(i)] * beta[size_t(j)] -
                                  alpha[size_t(j)] * beta[size_t(i)]);
    return out;
}

inline jet eval_two_form(const two_form& w, const jvec& X, const jvec& Y) {
    if (int(X.size()) != w.m || int(Y.size()) != w.m)
        throw structural_error("eval_two_form: arity mismatch");
    jet acc = w.at(0, 0) * X[0] * Y[0];
    for (int i = 0; i < w.m; ++i)
        for (int j = 0; j < w.m; ++j) {
            if (i == 0 && j == 0) continue;
            acc = acc + w.at(i, j) * X[size_t(i)] * Y[size_t(j)];
        }
    return acc;
}

struct three_form {
    int m = 0;
    std::vector<jet> a;  // row-major m x m x m, antisymmetric
    three_form() = default;
    explicit three_form(int mm)
        : m(mm), a(size_t(mm) * size_t(mm) * size_t(mm)) {}
    jet& at(int i, int j, int k) {
        return a[(size_t(i) * size_t(m) + size_t(j)) * size_t(m) + size_t(k)];
    }
    const jet& at(int i, int j, int k) const {
        return a[(size_t(i) * size_t(m) + size_t(j)) * size_t(m) + size_t(k)];
    }
};

inline three_form d_two_form(const two_form& w) {
    int m = w.m;
    three_form out(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                out.at(i, j, k) =
                    (1.0 / 3.0) * (w.at(j, k).deriv(i) + w.at(k, i).deriv(j) +
                                   w.at(i, j).deriv(k));
    return out;
}

inline jet eval_three_form(const three_form& w, const jvec& X, const jvec& Y,
                           const jvec& Z) {
    jet acc = w.at(0, 0, 0) * X[0] * Y[0] * Z[0];
    for (int i = 0; i < w.m; ++i)
        for (int j = 0; j < w.m; ++j)
            for (int k = 0; k < w.m; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                acc = acc +
                      w.at(i, j, k) * X[size_t(i)] * Y[size_t(j)] * Z[size_t(k)];
            }
    return acc;
}

// Frame splitting.  Columns of B are the (1,0) frame, its conjugate, and the
// chosen transversal fields; C = B^{-1} turns coordinate components into
// frame coefficients.
struct frame_blocks {
    int m = 0, m0 = 0, d = 0;
    std::vector<jvec> e;  // m0 holomorphic frame fields
    std::vector<jvec> f;  // d transversal fields
    jmat B;
    jmat C;

    frame_blocks() = default;
    frame_blocks(std::vector<jvec> frame, std::vector<jvec> transversal)
        : m0(int(frame.size())),
          d(int(transversal.size())),
          e(std::move(frame)),
          f(std::move(transversal)) {
        m = 2 * m0 + d;
        if (e.empty() || int(e[0].size()) != m)
            throw structural_error(
                "frame_blocks: frame arity does not match 2*m0 + d");
        B = jmat(m, m);
        for (int i = 0; i < m0; ++i)
            for (int a = 0; a < m; ++a) {
                B.at(a, i) = e[size_t(i)][size_t(a)];
                B.at(a, m0 + i) = conj(e[size_t(i)][size_t(a)]);
            }
        for (int r = 0; r < d; ++r)
            for (int a = 0; a < m; ++a)
                B.at(a, 2 * m0 + r) = f[size_t(r)][size_t(a)];
        std::vector<jvec> rhs;
        rhs.reserve(size_t(m));
        const jet zero = B.at(0, 0) - B.at(0, 0);
        const jet one = zero + 1.0;
        for (int a = 0; a < m; ++a) {
            jvec col(size_t(m), zero);
            col[size_t(a)] = one;
            rhs.push_back(col);
        }
        auto cols = jet_solve_linear(B, rhs);
        C = jmat(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) C.at(b, a) = cols[size_t(a)][size_t(b)];
    }

    jvec ebar(int i) const { return crforge::conj(e[size_t(i)]); }

    // Frame coefficients of X: first m0 against e, next m0 against conj e,
    // last d against the transversal block.
    jvec split(const jvec& X) const {
        if (int(X.size()) != m)
            throw structural_error("split: arity mismatch");
        jvec out;
        out.reserve(size_t(m));
        for (int i = 0; i < m; ++i) {
            jet acc = C.at(i, 0) * X[0];
            for (int a = 1; a < m; ++a) acc = acc + C.at(i, a) * X[size_t(a)];
            out.push_back(acc);
        }
        return out;
    }

    jvec assemble(const jvec& coeff, int lo, int hi) const {
        jvec out(size_t(m), coeff[0] - coeff[0]);
        for (int i = lo; i < hi; ++i) {
            const jvec col = column(i);
            for (int a = 0; a < m; ++a)
                out[size_t(a)] = out[size_t(a)] + coeff[size_t(i)] * col[size_t(a)];
        }
        return out;
    }

    jvec column(int i) const {
        jvec out;
        out.reserve(size_t(m));
        for (int a = 0; a < m; ++a) out.push_back(B.at(a, i));
        return out;
    }

    jvec proj10(const jvec& X) const { return assemble(split(X), 0, m0); }
    jvec proj01(const jvec& X) const { return assemble(split(X), m0, 2 * m0); }
    jvec projT(const jvec& X) const {
        return assemble(split(X), 2 * m0, m);
    }

    // J = i on the (1,0) block, -i on the (0,1) block, 0 transversally.
    jvec japply(const jvec& X) const {
        jvec c = split(X);
        for (int i = 0; i < m0; ++i) {
            c[size_t(i)] = cplx(0, 1) * c[size_t(i)];
            c[size_t(m0 + i)] = cplx(0, -1) * c[size_t(m0 + i)];
        }
        for (int r = 0; r < d; ++r)
            c[size_t(2 * m0 + r)] = 0.0 * c[size_t(2 * m0 + r)];
        jvec out(size_t(m), c[0] - c[0]);
        for (int i = 0; i < m; ++i) {
            const jvec col = column(i);
            for (int a = 0; a < m; ++a)
                out[size_t(a)] = out[size_t(a)] + c[size_t(i)] * col[size_t(a)];
        }
        return out;
    }

    // J as a matrix of jets acting on coordinate components.
    jmat jmatrix() const {
        jmat out(m, m);
        for (int a = 0; a < m; ++a) {
            jvec col(size_t(m), B.at(0, 0) - B.at(0, 0));
            col[size_t(a)] = col[size_t(a)] + 1.0;
            jvec img = japply(col);
            for (int b = 0; b < m; ++b) out.at(b, a) = img[size_t(b)];
        }
        return out;
    }
};

inline frame_blocks frame_blocks_from_spec(const chart& ch) {
    std::vector<jvec> e, f;
    for (const auto& row : ch.spec->frame) e.push_back(ch.components(row));
    for (const auto& row : ch.spec->complement)
        f.push_back(ch.components(row));
    return frame_blocks(std::move(e), std::move(f));
}

// Scalar complex Hessian pairing used throughout:
//   (del dbar u)(V, conj V) = V(conj V (u)) - [V, conj V]_{0,1}(u).
// Note no 1/2 here; this is twice the (1,1)-form pairing of the alternation
// convention above, and it is the normalization in which the curvature
// decompositions below are exact.
inline jet del_dbar(const frame_blocks& F, const jet& u, const jvec& V) {
    jvec Vb = conj(V);
    jet first = apply_field(V, apply_field(Vb, u));
    jvec br01 = F.proj01(lie_bracket(V, Vb));
    return first - apply_field(br01, u);
}

// Polarized version, (del dbar u)(V, conj W).
inline jet del_dbar2(const frame_blocks& F, const jet& u, const jvec& V,
                     const jvec& W) {
    jvec Wb = conj(W);
    jet first = apply_field(V, apply_field(Wb, u));
    jvec br01 = F.proj01(lie_bracket(V, Wb));
    return first - apply_field(br01, u);
}

// Pullbacks along a map given by the jets of its target coordinates.
inline jet pullback_scalar(const jet& u_target, const jvec& phi) {
    return jet_compose(u_target, phi);
}

inline jvec pullback_one_form(const jvec& omega_target, const jvec& phi) {
    int m_src = phi[0].num_vars();
    int m_tgt = int(omega_target.size());
    if (int(phi.size()) != m_tgt)
        throw structural_error("pullback_one_form: arity mismatch");
    jvec out;
    for (int a = 0; a < m_src; ++a) {
        jet acc = jet::constant(m_src, phi[0].order() - 1, 0.0);
        for (int b = 0; b < m_tgt; ++b)
            acc = acc + jet_compose(omega_target[size_t(b)], phi) *
                            phi[size_t(b)].deriv(a);
        out.push_back(acc);
    }
    return out;
}

inline two_form pullback_two_form(const two_form& w_target, const jvec& phi) {
    int m_src = phi[0].num_vars();
    int m_tgt = w_target.m;
    two_form out(m_src);
    for (int a = 0; a < m_src; ++a)
        for (int b = 0; b < m_src; ++b) {
            jet acc = jet::constant(m_src, phi[0].order() - 1, 0.0);
            for (int c = 0; c < m_tgt; ++c)
                for (int e = 0; e < m_tgt; ++e)
                    acc = acc + jet_compose(w_target.at(c, e), phi) *
                                    phi[size_t(c)].deriv(a) *
                                    phi[size_t(e)].deriv(b);
            out.at(a, b) = acc;
        }
    return out;
}

struct max_principle_report {
    double grad_norm = 0.0;    // max |@_a u| at the point
    double max_re_pairing = 0.0;  // max over frame fields of Re del_dbar
    std::vector<cplx> pairings;
};

// First-derivative test plus the complex-Hessian pairing against every
// frame field; at an interior maximum of a real u the gradient vanishes and
// each Re pairing is <= 0.
inline max_principle_report check_max_principle(const frame_blocks& F,
                                                const jet& u) {
    max_principle_report rep;
    for (int a = 0; a < u.num_vars(); ++a)
        rep.grad_norm = std::max(rep.grad_norm, std::abs(u.deriv(a).value()));
    rep.max_re_pairing = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < F.m0; ++i) {
        cplx v = del_dbar(F, u, F.e[size_t(i)]).value();
        rep.pairings.push_back(v);
        rep.max_re_pairing = std::max(rep.max_re_pairing, v.real());
    }
    return rep;
}

}  // namespace crforge
