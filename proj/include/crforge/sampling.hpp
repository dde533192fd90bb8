#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "crforge/model.hpp"

namespace crforge {

// Deterministic chart sampling: Halton points under a seeded rotation, so a
// (seed, index) pair always names the same point and coverage stays even.

inline double halton(unsigned long long index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= double(base);
        r += f * double(index % (unsigned long long)(base));
        index /= (unsigned long long)(base);
    }
    return r;
}

inline int small_prime(int n) {
    static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                 23, 29, 31, 37, 41, 43, 47, 53};
    return primes[n & 15];
}

struct box_sampler {
    const manifold_spec* M;
    std::vector<double> shift;

    box_sampler(const manifold_spec& spec, unsigned seed) : M(&spec) {
        std::mt19937 rng(seed * 2654435761u + 12345u);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        for (int a = 0; a < spec.m(); ++a) shift.push_back(U(rng));
    }

    std::vector<double> point(int i) const {
        std::vector<double> p;
        for (int a = 0; a < M->m(); ++a) {
            double t = halton((unsigned long long)(i) + 1, small_prime(a)) +
                       shift[size_t(a)];
            t -= std::floor(t);
            const auto& b = M->box[size_t(a)];
            // keep a margin from the box edge, where model charts may
            // degenerate
            p.push_back(b[0] + (0.05 + 0.9 * t) * (b[1] - b[0]));
        }
        return p;
    }
};

// Nonzero fiber vector with |W| in [0.3, 1].
inline std::vector<cplx> fiber_point(int m0, int index, unsigned seed) {
    std::mt19937 rng(seed * 48271u + unsigned(index) * 2246822519u + 99u);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<cplx> W;
    double n2 = 0.0;
    for (int i = 0; i < m0; ++i) {
        cplx z(U(rng), U(rng));
        W.push_back(z);
        n2 += std::norm(z);
    }
    double s = (0.3 + 0.35 * (U(rng) + 1.0)) / std::sqrt(std::max(n2, 1e-12));
    for (auto& z : W) z *= s;
    return W;
}

// Generic complex direction with components of order one, never zero.
inline std::vector<cplx> direction_point(int m0, int index, unsigned seed) {
    std::mt19937 rng(seed * 69621u + unsigned(index) * 2654435761u + 7u);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<cplx> V;
    for (int i = 0; i < m0; ++i) {
        cplx z(U(rng), U(rng));
        if (std::abs(z) < 0.2) z += cplx(0.5, -0.4);
        V.push_back(z);
    }
    return V;
}

}  // namespace crforge
