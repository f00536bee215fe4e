#pragma once

#include <stdexcept>
#include <vector>

namespace gridkr {

/// Uniform grid on the d-torus: x_p has coordinates 2 pi p_i / N - pi for
/// p in [N]^d, indexed row-major by flat index.
struct Grid {
    int N = 0;
    int d = 0;
    long long n = 0;  // N^d

    static Grid make(int N, int d) {
        if (N < 1 || d < 1) throw std::invalid_argument("Grid: N and d must be >= 1");
        Grid g;
        g.N = N;
        g.d = d;
        g.n = 1;
        for (int a = 0; a < d; ++a) g.n *= N;
        return g;
    }

    /// Multi-index of a flat point index.
    std::vector<int> unflatten(long long flat) const {
        std::vector<int> p(d);
        for (int a = d - 1; a >= 0; --a) {
            p[a] = static_cast<int>(flat % N);
            flat /= N;
        }
        return p;
    }

    /// Coordinates of grid point p (flat index).
    std::vector<double> point(long long flat) const {
        std::vector<double> x(d);
        for (int a = d - 1; a >= 0; --a) {
            int pa = static_cast<int>(flat % N);
            flat /= N;
            x[a] = 2.0 * M_PI * pa / N - M_PI;
        }
        return x;
    }
};

}  // namespace gridkr
