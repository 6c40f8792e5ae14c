#include "akmmd/math_util.hpp"

#include <cmath>
#include <stdexcept>

namespace akmmd {

namespace {
constexpr double kInvE = 0.36787944117144232;  // 1/e
constexpr double kTwoPi = 6.2831853071795864769;
}  // namespace

double lambert_w0(double z) {
    if (!(z >= -kInvE)) throw std::domain_error("lambert_w0: z < -1/e");
    if (z == 0.0) return 0.0;

    long double w;
    const long double zl = z;
    if (z < -0.3) {
        // Branch-point series in p = sqrt(2 (e z + 1)).
        const long double p = std::sqrt(2.0L * (2.7182818284590452354L * zl + 1.0L));
        w = -1.0L + p - p * p / 3.0L + 11.0L / 72.0L * p * p * p;
    } else if (z < 2.0) {
        // Series around 0: W = z - z^2 + 1.5 z^3 - ...
        w = zl * (1.0L - zl + 1.5L * zl * zl);
    } else {
        const long double lz = std::log(zl);
        w = lz - std::log(lz);
    }

    for (int it = 0; it < 50; ++it) {
        const long double ew = std::exp(w);
        const long double f = w * ew - zl;
        const long double wp1 = w + 1.0L;
        const long double denom = ew * wp1 - (w + 2.0L) * f / (2.0L * wp1);
        if (denom == 0.0L) break;
        const long double step = f / denom;
        w -= step;
        if (std::abs(f) <= 1e-14L * std::max<long double>(1.0L, std::abs(zl)) &&
            std::abs(step) <= 1e-14L * std::max<long double>(1.0L, std::abs(w)))
            break;
    }
    if (w < -1.0L) w = -1.0L;  // clip branch-point rounding
    return double(w);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

namespace {
// AS241 PPND16 (Wichura 1988).
double ppnd16(double p) {
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        x = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -x : x;
}
}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("normal_quantile: p must lie in (0,1)");
    double x = ppnd16(p);
    // One Halley step against the erfc-based CDF.
    const double f = normal_cdf(x) - p;
    const double pdf = std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
    if (pdf > 0.0) {
        const double u = f / pdf;
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double gaussian_kernel_2d_d2(double d2, double h) {
    return std::exp(-d2 / (2.0 * h * h)) / (kTwoPi * h * h);
}

double gaussian_kernel_2d(const std::array<double, 2>& r,
                          const std::array<double, 2>& rp,
                          const KernelParams& params) {
    const double dx = r[0] - rp[0];
    const double dy = r[1] - rp[1];
    return gaussian_kernel_2d_d2(dx * dx + dy * dy, params.h);
}

double gaussian_factor_1d(double t, double h) {
    return std::exp(-t * t / (2.0 * h * h)) / (std::sqrt(kTwoPi) * h);
}

}  // namespace akmmd
