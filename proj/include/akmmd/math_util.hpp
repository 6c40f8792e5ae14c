#pragma once

#include <array>

namespace akmmd {

/// Parameters of the 2-D Gaussian kernel in normalized [0,1]^2 coordinates.
struct KernelParams {
    double h = 0.015;  // bandwidth, > 0
};

/// Principal branch W0 of the Lambert W function, w * exp(w) = z.
///
/// Domain z >= -1/e. Initial guess by series (near the branch point and near
/// zero) or log iteration (large z), refined by Halley steps in extended
/// precision. Residual |w e^w - z| <= 1e-12 * max(1, |z|).
/// Throws std::domain_error for z < -1/e.
double lambert_w0(double z);

/// Standard normal CDF, evaluated as 0.5 * erfc(-x / sqrt(2)).
double normal_cdf(double x);

/// Standard normal quantile (inverse CDF) for p in (0, 1).
///
/// Wichura's AS241 rational approximation plus one Halley refinement against
/// normal_cdf; absolute CDF error below 1e-14.
/// Throws std::domain_error for p outside (0, 1).
double normal_quantile(double p);

/// Isotropic 2-D Gaussian kernel (1 / (2 pi h^2)) exp(-||r - r'||^2 / (2 h^2)).
double gaussian_kernel_2d(const std::array<double, 2>& r,
                          const std::array<double, 2>& rp,
                          const KernelParams& params);

/// Squared-distance form of the same kernel.
double gaussian_kernel_2d_d2(double d2, double h);

/// 1-D Gaussian factor (1 / (sqrt(2 pi) h)) exp(-t^2 / (2 h^2)).
/// The product of two factors over the coordinates equals the 2-D kernel.
double gaussian_factor_1d(double t, double h);

}  // namespace akmmd
