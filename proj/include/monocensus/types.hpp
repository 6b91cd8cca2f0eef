#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>

#include <Eigen/Dense>

namespace monocensus {

using Complex = std::complex<double>;

/// A point in C^N (solutions) or C^P (parameters).
using PointVec = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

inline double inf_norm(const PointVec& v) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

inline bool all_finite(const PointVec& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag())) return false;
    return true;
}

}  // namespace monocensus
