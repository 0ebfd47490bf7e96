#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace pragbandit {

/// log(sum(exp(x))) with max-subtraction; -inf for empty or all -inf input.
inline double log_sum_exp(std::span<const double> x) {
    if (x.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(x.begin(), x.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

/// softmax(beta * x), stabilized. beta = +inf puts uniform mass on the maxima.
inline std::vector<double> softmax(std::span<const double> x, double beta) {
    std::vector<double> p(x.size(), 0.0);
    if (x.empty()) return p;
    const double m = *std::max_element(x.begin(), x.end());
    if (std::isinf(beta)) {
        double n = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (x[i] == m) p[i] = 1.0, n += 1.0;
        for (auto& v : p) v /= n;
        return p;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        p[i] = std::exp(beta * (x[i] - m));
        s += p[i];
    }
    for (auto& v : p) v /= s;
    return p;
}

/// Index of the first maximal element.
inline std::size_t argmax(std::span<const double> x) {
    return static_cast<std::size_t>(std::max_element(x.begin(), x.end()) - x.begin());
}

/// Index of the first element within `rel_tol` (relative) of the maximum,
/// so rounding-level differences count as ties.
inline std::size_t argmax_tied(std::span<const double> x, double rel_tol = 1e-12) {
    const double best = x[argmax(x)];
    const double tol = rel_tol * std::max(1.0, std::abs(best));
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] >= best - tol) return i;
    return 0;
}

}  // namespace pragbandit
