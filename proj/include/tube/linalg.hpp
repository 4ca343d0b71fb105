#pragma once

#include <Eigen/Dense>

namespace tube {

// All geometric state lives in small dense vectors/matrices. Scenes have
// n <= 3, so ambient chart dimension is at most 6 and every linear system
// is at most 6x6; fixed maximum sizes keep everything on the stack.
constexpr int kMaxDim = 8;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline Vec zero_vec(int n) { return Vec::Zero(n); }

// Gram-Schmidt with respect to an inner product matrix g. Columns of the
// result are g-orthonormal; throws on rank loss handled by caller (returns
// the achieved rank through *rank when non-null).
Mat gram_schmidt(const Mat& columns, const Mat& g, int* rank = nullptr);

// Stable cumulative integral of sampled data on a uniform grid: returns
// I[k] = integral of the cubic interpolant from t[0] to t[k]. Fourth-order
// accurate away from machine noise; used by the Picard iteration.
void cumulative_integral(double h, const std::vector<Vec>& f, std::vector<Vec>& out);

}  // namespace tube
