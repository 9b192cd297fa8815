#pragma once

/**
 * @file cheb.hpp
 * @brief Chebyshev-Lobatto interpolation utilities on [-1, 1].
 *
 * Panels of the endpoint mesh carry their samples at Chebyshev-Lobatto
 * nodes, ordered so that tau_j = -cos(j pi / G) increases from -1 to +1.
 * This file supplies the classic spectral operations on such samples:
 * values -> Chebyshev coefficients (DCT-I), antiderivative and derivative
 * coefficient recurrences, and Clenshaw evaluation.  All of it is dense
 * O(G^2) linear algebra, which is exactly right for the small fixed panel
 * orders used here (G ~ 16).
 */

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace slreg {

class ChebBasis {
public:
    explicit ChebBasis(int order) : G(order) {
        if (G < 2) throw std::invalid_argument("ChebBasis: order must be >= 2");
        nodes_.resize(G + 1);
        for (int j = 0; j <= G; ++j) nodes_[j] = -std::cos(j * M_PI / G);
        // Analysis matrix A: coeffs c_k = sum_j A[k][j] v_j (DCT-I with the
        // end samples halved and the end coefficients halved).
        A_.assign((G + 1) * (G + 1), 0.0);
        for (int k = 0; k <= G; ++k) {
            const double ek = (k == 0 || k == G) ? 2.0 : 1.0;
            for (int j = 0; j <= G; ++j) {
                const double wj = (j == 0 || j == G) ? 0.5 : 1.0;
                // T_k(tau_j) with tau_j = cos((G-j) pi / G)
                const double tk = std::cos(k * (G - j) * M_PI / G);
                A_[k * (G + 1) + j] = (2.0 / (G * ek)) * wj * tk;
            }
        }
    }

    int order() const { return G; }
    const std::vector<double>& nodes() const { return nodes_; }

    std::vector<double> coefficients(const std::vector<double>& values) const {
        if (static_cast<int>(values.size()) != G + 1)
            throw std::invalid_argument("ChebBasis: value count mismatch");
        std::vector<double> c(G + 1, 0.0);
        for (int k = 0; k <= G; ++k) {
            double s = 0.0;
            for (int j = 0; j <= G; ++j) s += A_[k * (G + 1) + j] * values[j];
            c[k] = s;
        }
        return c;
    }

    /// Coefficients of an antiderivative in tau (constant term set to zero).
    static std::vector<double> antiderivative(const std::vector<double>& c) {
        const int n = static_cast<int>(c.size()); // degrees 0..n-1
        std::vector<double> b(n + 1, 0.0);
        auto cc = [&](int k) { return k < n ? c[k] : 0.0; };
        for (int k = 1; k <= n; ++k) {
            const double prev = (k == 1) ? 2.0 * cc(0) : cc(k - 1); // T_0 integrates as 2*T_1/2
            b[k] = (prev - cc(k + 1)) / (2.0 * k);
        }
        return b;
    }

    /// Coefficients of the tau-derivative.
    static std::vector<double> derivative(const std::vector<double>& c) {
        const int n = static_cast<int>(c.size());
        std::vector<double> d(n, 0.0);
        if (n < 2) return d;
        // d_{k-1} = d_{k+1} + 2 k c_k, downward; halve d_0 at the end.
        for (int k = n - 1; k >= 1; --k) {
            const double dkp1 = (k + 1 <= n - 1) ? d[k + 1] : 0.0;
            d[k - 1] = dkp1 + 2.0 * k * c[k];
        }
        d[0] *= 0.5;
        return d;
    }

    static double clenshaw(const std::vector<double>& c, double t) {
        double b1 = 0.0, b2 = 0.0;
        for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
            const double b0 = 2.0 * t * b1 - b2 + c[k];
            b2 = b1;
            b1 = b0;
        }
        return t * b1 - b2 + c[0];
    }

    /// Shared basis cache (panel order is uniform across a mesh).
    static const ChebBasis& get(int order) {
        static std::map<int, ChebBasis> cache;
        auto it = cache.find(order);
        if (it == cache.end()) it = cache.emplace(order, ChebBasis(order)).first;
        return it->second;
    }

private:
    int G;
    std::vector<double> nodes_;
    std::vector<double> A_;
};

} // namespace slreg
