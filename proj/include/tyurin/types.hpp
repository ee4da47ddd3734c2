#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <vector>

namespace tyurin {

using cplx = std::complex<double>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatC = Mat<cplx>;
using VecC = Vec<cplx>;
using MatR = Mat<double>;
using VecR = Vec<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};
inline constexpr cplx two_pi_i{0.0, 2.0 * std::numbers::pi};

// Branch with arg in (-pi, pi]; the only square root used on the x-plane.
inline cplx sqrt_principal(cplx z) { return std::sqrt(z); }

inline double max_abs(const MatC& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace tyurin
