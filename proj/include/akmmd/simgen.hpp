#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "akmmd/grid.hpp"

namespace akmmd {

/// Synthetic ground-truth field: smooth mean + sparse clustered anomalies +
/// i.i.d. Gaussian noise, on an m x m pixel grid.
struct Phantom {
    GridSpec grid;
    Field M;  // mean
    Field A;  // anomaly
    Field E;  // noise
    Field Y;  // M + A + E
    BinaryMap true_region;
    uint64_t seed = 0;
    double delta = 0.3;
    double sigma = 0.05;
    double eps_a = 0.075;  // truth threshold on A
};

struct PhantomParams {
    int m = 200;
    int n_clusters = 7;
    double delta = 0.3;
    double sigma = 0.05;
    uint64_t seed = 0;
    /// Truth threshold as a fraction of delta: true_region = (A > eps_frac * delta).
    double eps_frac = 0.28;
};

/// Cubic B-spline basis matrix, m x n_basis, clamped uniform knots on [0,1],
/// evaluated at x_i = i / (m + 1), i = 1..m. Rows sum to 1.
std::vector<double> bspline_basis(int m, int n_basis);

/// Mean exp(-(x^2 + y^2)/4), anomalies A = B_s A_s B_s^T with n_clusters
/// seeded-uniform distinct entries of delta in the 13 x 13 coefficient matrix,
/// noise N(0, sigma^2).
Phantom generate_phantom(const PhantomParams& params);

/// Single-disk variant used by the sensitivity study: one circular anomaly of
/// the given radius at a seeded-uniform center in [0.25, 0.75]^2.
Phantom generate_disk_phantom(int m, double radius, double delta, double sigma,
                              uint64_t seed);

/// 16-bit binary PGM, min-max normalized; the header comment records the
/// affine map back to field units.
void write_pgm16(const std::string& path, const Field& field, const GridSpec& grid);

}  // namespace akmmd
