#ifndef ONEBIT_DETAIL_VEC_HPP
#define ONEBIT_DETAIL_VEC_HPP

#include <algorithm>
#include <cmath>
#include <span>

namespace onebit::detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm1(std::span<const double> a) {
    double acc = 0.0;
    for (double v : a) acc += std::abs(v);
    return acc;
}

inline double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace onebit::detail

#endif  // ONEBIT_DETAIL_VEC_HPP
