#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "crforge/errors.hpp"

namespace crforge {

using cplx = std::complex<double>;

// Monomial tables for a fixed (num_vars, order) jet space: the graded-lex
// list of exponent tuples of total degree <= order, a reverse index, and the
// product pairs used by multiplication. Layouts are built once and shared.
//
// Positions are graded lex, degree first; the positions of the order-(K-1)
// space are a prefix of the order-K space, so truncation is a resize.
class jet_layout {
  public:
    static constexpr int max_vars = 12;
    static constexpr int max_order = 16;

    const int nvars;
    const int order;

    static const jet_layout* get(int nvars, int order) {
        if (nvars < 1 || nvars > max_vars)
            throw structural_error("jet num_vars out of range: " +
                                   std::to_string(nvars));
        if (order < 0 || order > max_order)
            throw structural_error("jet order out of range: " +
                                   std::to_string(order));
        static std::mutex mu;
        static std::map<std::pair<int, int>, std::unique_ptr<jet_layout>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_pair(nvars, order);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, std::unique_ptr<jet_layout>(
                                        new jet_layout(nvars, order)))
                     .first;
        return it->second.get();
    }

    int size() const { return int(mono_.size()); }
    const std::vector<int>& mono(int i) const { return mono_[i]; }
    int degree(int i) const { return deg_[i]; }

    // Position of an exponent tuple, -1 if its degree exceeds order.
    int position(const std::vector<int>& alpha) const {
        int d = 0;
        for (int e : alpha) d += e;
        if (d > order) return -1;
        auto it = pos_.find(encode(alpha));
        return it == pos_.end() ? -1 : it->second;
    }

    struct prod_entry {
        int a, b, dst;
    };
    const std::vector<prod_entry>& products() const { return prod_; }

  private:
    jet_layout(int nvars, int order) : nvars(nvars), order(order) {
        std::vector<int> alpha(nvars, 0);
        for (int d = 0; d <= order; ++d) emit(alpha, 0, d);
        for (int i = 0; i < size(); ++i) pos_[encode(mono_[i])] = i;
        for (int i = 0; i < size(); ++i)
            for (int j = 0; j < size(); ++j) {
                if (deg_[i] + deg_[j] > order) continue;
                std::vector<int> sum(nvars);
                for (int v = 0; v < nvars; ++v)
                    sum[v] = mono_[i][v] + mono_[j][v];
                prod_.push_back({i, j, pos_.at(encode(sum))});
            }
    }

    void emit(std::vector<int>& alpha, int var, int rest) {
        if (var == nvars - 1) {
            alpha[var] = rest;
            mono_.push_back(alpha);
            int d = 0;
            for (int e : alpha) d += e;
            deg_.push_back(d);
            return;
        }
        for (int e = rest; e >= 0; --e) {
            alpha[var] = e;
            emit(alpha, var + 1, rest - e);
        }
        alpha[var] = 0;
    }

    static std::uint64_t encode(const std::vector<int>& alpha) {
        std::uint64_t key = 0;
        for (int e : alpha) key = key * 32 + std::uint64_t(e);
        return key;
    }

    std::vector<std::vector<int>> mono_;
    std::vector<int> deg_;
    std::unordered_map<std::uint64_t, int> pos_;
    std::vector<prod_entry> prod_;
};

// Truncated multivariate Taylor expansion at a chart point: complex
// coefficients indexed by the layout's monomials. Chart variables are real;
// conjugation therefore acts on coefficients alone. Values are immutable in
// spirit: every operation returns a fresh jet.
class jet {
  public:
    jet() : lay_(nullptr) {}
    jet(const jet_layout* lay, std::vector<cplx> c)
        : lay_(lay), c_(std::move(c)) {}

    static jet constant(int nvars, int order, cplx value) {
        const jet_layout* lay = jet_layout::get(nvars, order);
        std::vector<cplx> c(lay->size(), cplx(0.0));
        c[0] = value;
        return jet(lay, std::move(c));
    }

    // The coordinate function x_var, expanded at base value: value + dx_var.
    static jet variable(int nvars, int order, int var, double value) {
        jet j = constant(nvars, order, value);
        if (order >= 1) {
            std::vector<int> alpha(nvars, 0);
            alpha[var] = 1;
            j.c_[j.lay_->position(alpha)] = 1.0;
        }
        return j;
    }

    bool empty() const { return lay_ == nullptr; }
    int num_vars() const { return lay_->nvars; }
    int order() const { return lay_->order; }
    const jet_layout* layout() const { return lay_; }
    const std::vector<cplx>& coeffs() const { return c_; }

    cplx value() const { return c_[0]; }

    cplx coeff(const std::vector<int>& alpha) const {
        int p = lay_->position(alpha);
        return p < 0 ? cplx(0.0) : c_[p];
    }

    // Mixed partial value: alpha! * coeff(alpha).
    cplx partial(const std::vector<int>& alpha) const {
        if (int(alpha.size()) != num_vars())
            throw structural_error("partial: index arity mismatch");
        int d = 0;
        double fact = 1.0;
        for (int e : alpha) {
            d += e;
            for (int k = 2; k <= e; ++k) fact *= double(k);
        }
        if (d > order())
            throw truncation_error("partial of degree " + std::to_string(d) +
                                   " exceeds jet order " +
                                   std::to_string(order()));
        return fact * coeff(alpha);
    }

    double max_abs() const {
        double m = 0.0;
        for (const cplx& z : c_) m = std::max(m, std::abs(z));
        return m;
    }

    jet truncated(int new_order) const {
        if (new_order >= order()) return *this;
        if (new_order < 0) throw truncation_error("jet order exhausted");
        const jet_layout* lay = jet_layout::get(num_vars(), new_order);
        return jet(lay, std::vector<cplx>(c_.begin(), c_.begin() + lay->size()));
    }

    // d/dx_var as a jet of one order lower.
    jet deriv(int var) const {
        if (order() == 0) throw truncation_error("jet order exhausted");
        const jet_layout* lay = jet_layout::get(num_vars(), order() - 1);
        std::vector<cplx> c(lay->size());
        for (int t = 0; t < lay->size(); ++t) {
            std::vector<int> alpha = lay->mono(t);
            alpha[var] += 1;
            c[t] = double(alpha[var]) * c_[lay_->position(alpha)];
        }
        return jet(lay, std::move(c));
    }

    // Re-embed into a jet space with more variables: old variable v becomes
    // variable var_map[v]. Coefficients are carried over unchanged.
    jet extended(int new_nvars, const std::vector<int>& var_map) const {
        const jet_layout* lay = jet_layout::get(new_nvars, order());
        std::vector<cplx> c(lay->size(), cplx(0.0));
        for (int i = 0; i < lay_->size(); ++i) {
            std::vector<int> alpha(new_nvars, 0);
            for (int v = 0; v < num_vars(); ++v)
                alpha[var_map[v]] = lay_->mono(i)[v];
            c[lay->position(alpha)] = c_[i];
        }
        return jet(lay, std::move(c));
    }

    friend jet operator+(const jet& a, const jet& b) {
        auto [x, y] = aligned(a, b);
        for (int i = 0; i < int(x.c_.size()); ++i) x.c_[i] += y.c_[i];
        return x;
    }
    friend jet operator-(const jet& a, const jet& b) {
        auto [x, y] = aligned(a, b);
        for (int i = 0; i < int(x.c_.size()); ++i) x.c_[i] -= y.c_[i];
        return x;
    }
    friend jet operator-(const jet& a) { return a * cplx(-1.0); }

    friend jet operator*(const jet& a, const jet& b) {
        auto [x, y] = aligned(a, b);
        std::vector<cplx> c(x.lay_->size(), cplx(0.0));
        for (const auto& e : x.lay_->products()) c[e.dst] += x.c_[e.a] * y.c_[e.b];
        return jet(x.lay_, std::move(c));
    }

    friend jet operator*(const jet& a, cplx s) {
        jet r = a;
        for (cplx& z : r.c_) z *= s;
        return r;
    }
    friend jet operator*(cplx s, const jet& a) { return a * s; }
    friend jet operator*(const jet& a, double s) { return a * cplx(s); }
    friend jet operator*(double s, const jet& a) { return a * cplx(s); }
    friend jet operator+(const jet& a, cplx s) {
        jet r = a;
        r.c_[0] += s;
        return r;
    }
    friend jet operator+(cplx s, const jet& a) { return a + s; }
    friend jet operator-(const jet& a, cplx s) { return a + (-s); }
    friend jet operator-(cplx s, const jet& a) { return (-a) + s; }

  private:
    // Common (nvars, order): nvars must agree, orders truncate to the min.
    static std::pair<jet, jet> aligned(const jet& a, const jet& b) {
        if (a.empty() || b.empty())
            throw structural_error("operation on an empty jet");
        if (a.num_vars() != b.num_vars())
            throw structural_error("jet num_vars mismatch: " +
                                   std::to_string(a.num_vars()) + " vs " +
                                   std::to_string(b.num_vars()));
        int k = std::min(a.order(), b.order());
        return {a.truncated(k), b.truncated(k)};
    }

    const jet_layout* lay_;
    std::vector<cplx> c_;
};

// Evaluates sum_n d[n] * h^n where h = f - f(0); d[n] must hold the outer
// function's Taylor coefficients g^(n)(f(0))/n! for n = 0..order. Exact in
// the truncated ring because h^(order+1) vanishes.
inline jet apply_series(const jet& f, std::span<const cplx> d) {
    jet h = f - f.value();
    jet acc = jet::constant(f.num_vars(), f.order(), d[0]);
    jet hp = jet::constant(f.num_vars(), f.order(), 1.0);
    for (int n = 1; n <= f.order(); ++n) {
        hp = hp * h;
        acc = acc + d[size_t(n)] * hp;
    }
    return acc;
}

inline jet exp(const jet& f) {
    std::vector<cplx> d(size_t(f.order()) + 1);
    cplx e = std::exp(f.value());
    double fact = 1.0;
    for (int n = 0; n <= f.order(); ++n) {
        if (n > 0) fact *= double(n);
        d[size_t(n)] = e / fact;
    }
    return apply_series(f, d);
}

inline jet log(const jet& f) {
    cplx z0 = f.value();
    if (std::abs(z0) == 0.0) throw domain_error("log of zero constant term");
    std::vector<cplx> d(size_t(f.order()) + 1);
    d[0] = std::log(z0);
    cplx zp = 1.0;  // z0^n
    for (int n = 1; n <= f.order(); ++n) {
        zp *= z0;
        d[size_t(n)] = (n % 2 == 1 ? 1.0 : -1.0) / (double(n) * zp);
    }
    return apply_series(f, d);
}

namespace detail {
// Outer Taylor coefficients for a 4-cycle of derivatives d0,d1,-d0,-d1,...
inline jet cycle_series(const jet& f, cplx d0, cplx d1) {
    std::vector<cplx> d(size_t(f.order()) + 1);
    const cplx cyc[4] = {d0, d1, -d0, -d1};
    double fact = 1.0;
    for (int n = 0; n <= f.order(); ++n) {
        if (n > 0) fact *= double(n);
        d[size_t(n)] = cyc[n % 4] / fact;
    }
    return apply_series(f, d);
}
}  // namespace detail

inline jet sin(const jet& f) {
    return detail::cycle_series(f, std::sin(f.value()), std::cos(f.value()));
}
inline jet cos(const jet& f) {
    return detail::cycle_series(f, std::cos(f.value()), -std::sin(f.value()));
}

inline jet sinh(const jet& f) {
    std::vector<cplx> d(size_t(f.order()) + 1);
    cplx s = std::sinh(f.value()), c = std::cosh(f.value());
    double fact = 1.0;
    for (int n = 0; n <= f.order(); ++n) {
        if (n > 0) fact *= double(n);
        d[size_t(n)] = (n % 2 == 0 ? s : c) / fact;
    }
    return apply_series(f, d);
}
inline jet cosh(const jet& f) {
    std::vector<cplx> d(size_t(f.order()) + 1);
    cplx s = std::sinh(f.value()), c = std::cosh(f.value());
    double fact = 1.0;
    for (int n = 0; n <= f.order(); ++n) {
        if (n > 0) fact *= double(n);
        d[size_t(n)] = (n % 2 == 0 ? c : s) / fact;
    }
    return apply_series(f, d);
}

inline jet sqrt(const jet& f) {
    cplx z0 = f.value();
    if (std::abs(z0) == 0.0) throw domain_error("sqrt of zero constant term");
    std::vector<cplx> d(size_t(f.order()) + 1);
    cplx r = std::sqrt(z0);
    // d[n] = binom(1/2, n) * z0^(1/2 - n)
    cplx coef = r;
    d[0] = coef;
    for (int n = 1; n <= f.order(); ++n) {
        coef *= (0.5 - double(n - 1)) / (double(n) * z0);
        d[size_t(n)] = coef;
    }
    return apply_series(f, d);
}

inline jet jet_invert(const jet& f) {
    cplx z0 = f.value();
    if (std::abs(z0) == 0.0)
        throw singular_error("jet_invert: zero constant term");
    std::vector<cplx> d(size_t(f.order()) + 1);
    cplx coef = 1.0 / z0;
    d[0] = coef;
    for (int n = 1; n <= f.order(); ++n) {
        coef /= -z0;
        d[size_t(n)] = coef;
    }
    return apply_series(f, d);
}

inline jet operator/(const jet& a, const jet& b) { return a * jet_invert(b); }
inline jet operator/(const jet& a, cplx s) { return a * (1.0 / s); }
inline jet operator/(cplx s, const jet& a) { return s * jet_invert(a); }
inline jet operator/(const jet& a, double s) { return a * (1.0 / s); }
inline jet operator/(double s, const jet& a) { return cplx(s) / a; }

// Integer powers only; negative exponents invert first.
inline jet pow(const jet& f, int e) {
    if (e < 0) return pow(jet_invert(f), -e);
    jet acc = jet::constant(f.num_vars(), f.order(), 1.0);
    jet base = f;
    for (int k = e; k > 0; k >>= 1) {
        if (k & 1) acc = acc * base;
        base = base * base;
    }
    return acc;
}

// Valid because chart variables are real: the conjugate expansion has
// conjugated coefficients.
inline jet conj(const jet& f) {
    std::vector<cplx> c(f.coeffs());
    for (cplx& z : c) z = std::conj(z);
    return jet(f.layout(), std::move(c));
}
inline jet real(const jet& f) { return (f + conj(f)) * 0.5; }
inline jet imag(const jet& f) { return (f - conj(f)) * cplx(0.0, -0.5); }

// Substitutes inner jets into an outer expansion. The outer jet must be
// expanded at the point whose coordinates are the inner values; each inner
// shares one (nvars, order).
inline jet jet_compose(const jet& outer, const std::vector<jet>& inner) {
    if (int(inner.size()) != outer.num_vars())
        throw structural_error("jet_compose: arity mismatch");
    int nv = inner[0].num_vars();
    int ord = inner[0].order();
    std::vector<jet> h;
    h.reserve(inner.size());
    for (const jet& g : inner) h.push_back(g - g.value());
    // Powers h[b]^e for e <= outer order.
    std::vector<std::vector<jet>> hp(inner.size());
    for (size_t b = 0; b < inner.size(); ++b) {
        hp[b].push_back(jet::constant(nv, ord, 1.0));
        for (int e = 1; e <= outer.order(); ++e)
            hp[b].push_back(hp[b].back() * h[b]);
    }
    jet acc = jet::constant(nv, ord, 0.0);
    const jet_layout* lay = outer.layout();
    for (int i = 0; i < lay->size(); ++i) {
        cplx coef = outer.coeffs()[i];
        if (coef == cplx(0.0)) continue;
        jet term = jet::constant(nv, ord, coef);
        for (int v = 0; v < outer.num_vars(); ++v) {
            int e = lay->mono(i)[v];
            if (e > 0) term = term * hp[size_t(v)][size_t(e)];
        }
        acc = acc + term;
    }
    return acc;
}

using jvec = std::vector<jet>;

struct jmat {
    int rows = 0, cols = 0;
    std::vector<jet> a;

    jmat() = default;
    jmat(int r, int c) : rows(r), cols(c), a(size_t(r) * size_t(c)) {}
    jet& at(int i, int j) { return a[size_t(i) * size_t(cols) + size_t(j)]; }
    const jet& at(int i, int j) const {
        return a[size_t(i) * size_t(cols) + size_t(j)];
    }
};

// Gaussian elimination over the jet ring. Pivoting on the modulus of the
// degree-0 entries only: invertibility over the ring is exactly
// invertibility of the constant term.
inline std::vector<jvec> jet_solve_linear(const jmat& A,
                                          const std::vector<jvec>& rhs) {
    if (A.rows != A.cols) throw structural_error("jet_solve_linear: not square");
    int n = A.rows;
    jmat U = A;
    std::vector<jvec> B = rhs;
    for (jvec& b : B)
        if (int(b.size()) != n)
            throw structural_error("jet_solve_linear: rhs size mismatch");

    double scale = 0.0;
    for (const jet& e : U.a) scale = std::max(scale, std::abs(e.value()));
    double min_pivot = scale;

    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(U.at(k, k).value());
        for (int i = k + 1; i < n; ++i) {
            double m = std::abs(U.at(i, k).value());
            if (m > best) {
                best = m;
                piv = i;
            }
        }
        if (best <= scale * 1e-14)
            throw singular_error(
                "jet_solve_linear: degree-0 matrix singular; condition "
                "estimate " +
                    std::to_string(best > 0.0 ? scale / best : 0.0),
                best > 0.0 ? scale / best : 0.0);
        min_pivot = std::min(min_pivot, best);
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(U.at(k, j), U.at(piv, j));
            for (jvec& b : B) std::swap(b[size_t(k)], b[size_t(piv)]);
        }
        jet inv_piv = jet_invert(U.at(k, k));
        for (int i = k + 1; i < n; ++i) {
            jet m = U.at(i, k) * inv_piv;
            if (m.max_abs() == 0.0) continue;
            for (int j = k; j < n; ++j)
                U.at(i, j) = U.at(i, j) - m * U.at(k, j);
            for (jvec& b : B)
                b[size_t(i)] = b[size_t(i)] - m * b[size_t(k)];
        }
    }
    for (jvec& b : B)
        for (int k = n - 1; k >= 0; --k) {
            jet s = b[size_t(k)];
            for (int j = k + 1; j < n; ++j)
                s = s - U.at(k, j) * b[size_t(j)];
            b[size_t(k)] = s * jet_invert(U.at(k, k));
        }
    return B;
}

inline jvec jet_solve_linear(const jmat& A, const jvec& b) {
    return jet_solve_linear(A, std::vector<jvec>{b})[0];
}

}  // namespace crforge
