#include "akmmd/simgen.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "akmmd/rng.hpp"

namespace akmmd {

namespace {

// Cox-de Boor value of basis function j (order 4) at x for the given knots.
double bspline_value(const std::vector<double>& knots, int j, int order, double x) {
    const int nk = (int)knots.size();
    std::vector<double> b(order, 0.0);
    // order-1 (degree 0) seeds over spans [knots[j+r], knots[j+r+1])
    for (int r = 0; r < order; ++r) {
        const int i = j + r;
        if (i + 1 >= nk) continue;
        b[r] = (x >= knots[i] && x < knots[i + 1]) ? 1.0 : 0.0;
    }
    for (int d = 1; d < order; ++d) {
        for (int r = 0; r + d < order; ++r) {
            const int i = j + r;
            double left = 0.0, right = 0.0;
            const double dl = knots[i + d] - knots[i];
            if (dl > 0) left = (x - knots[i]) / dl * b[r];
            const double dr = knots[i + d + 1] - knots[i + 1];
            if (dr > 0) right = (knots[i + d + 1] - x) / dr * b[r + 1];
            b[r] = left + right;
        }
    }
    return b[0];
}

}  // namespace

std::vector<double> bspline_basis(int m, int n_basis) {
    if (n_basis < 4) throw std::invalid_argument("bspline_basis: need >= 4 basis");
    const int order = 4;
    const int n_breaks = n_basis - 2;  // clamped cubic: #basis = #breaks + 2
    std::vector<double> knots;
    knots.reserve(n_basis + order);
    for (int r = 0; r < 3; ++r) knots.push_back(0.0);
    for (int b = 0; b < n_breaks; ++b)
        knots.push_back(double(b) / (n_breaks - 1));
    for (int r = 0; r < 3; ++r) knots.push_back(1.0);

    std::vector<double> B(size_t(m) * n_basis, 0.0);
    for (int i = 0; i < m; ++i) {
        const double x = double(i + 1) / (m + 1);
        for (int j = 0; j < n_basis; ++j)
            B[size_t(i) * n_basis + j] = bspline_value(knots, j, order, x);
    }
    return B;
}

Phantom generate_phantom(const PhantomParams& p) {
    if (p.m < 50) throw std::invalid_argument("generate_phantom: m must be >= 50");
    const int nb = 13;
    if (p.n_clusters < 0 || p.n_clusters > nb * nb)
        throw std::invalid_argument("generate_phantom: n_clusters exceeds 13x13");

    Phantom ph;
    ph.grid = GridSpec(p.m);
    ph.seed = p.seed;
    ph.delta = p.delta;
    ph.sigma = p.sigma;
    ph.eps_a = p.eps_frac * p.delta;
    const int m = p.m;

    ph.M.resize(ph.grid.cells());
    for (int i = 0; i < m; ++i) {
        const double x = double(i + 1) / (m + 1);
        for (int j = 0; j < m; ++j) {
            const double y = double(j + 1) / (m + 1);
            ph.M[ph.grid.flat(i, j)] = std::exp(-(x * x + y * y) / 4.0);
        }
    }

    Rng rng(mix_seed(p.seed, 0x70686100));  // phantom stream
    // n_clusters distinct coefficient cells by partial Fisher-Yates.
    std::vector<int> cells(nb * nb);
    for (int i = 0; i < nb * nb; ++i) cells[i] = i;
    for (int k = 0; k < p.n_clusters; ++k) {
        const int r = k + (int)rng.below(nb * nb - k);
        std::swap(cells[k], cells[r]);
    }

    const std::vector<double> B = bspline_basis(m, nb);
    ph.A.assign(ph.grid.cells(), 0.0);
    for (int k = 0; k < p.n_clusters; ++k) {
        const int bi = cells[k] / nb, bj = cells[k] % nb;
        for (int i = 0; i < m; ++i) {
            const double wx = p.delta * B[size_t(i) * nb + bi];
            if (wx == 0.0) continue;
            double* row = ph.A.data() + size_t(i) * m;
            for (int j = 0; j < m; ++j) row[j] += wx * B[size_t(j) * nb + bj];
        }
    }

    ph.E.resize(ph.grid.cells());
    for (int k = 0; k < ph.grid.cells(); ++k) ph.E[k] = p.sigma * rng.normal();

    ph.Y.resize(ph.grid.cells());
    ph.true_region.resize(ph.grid.cells());
    for (int k = 0; k < ph.grid.cells(); ++k) {
        ph.Y[k] = ph.M[k] + ph.A[k] + ph.E[k];
        ph.true_region[k] = ph.A[k] > ph.eps_a ? 1 : 0;
    }
    return ph;
}

Phantom generate_disk_phantom(int m, double radius, double delta, double sigma,
                              uint64_t seed) {
    if (m < 50) throw std::invalid_argument("generate_disk_phantom: m >= 50");
    Phantom ph;
    ph.grid = GridSpec(m);
    ph.seed = seed;
    ph.delta = delta;
    ph.sigma = sigma;
    ph.eps_a = 0.0;

    Rng rng(mix_seed(seed, 0x64697331));  // disk stream
    const double cx = 0.25 + 0.5 * rng.u01();
    const double cy = 0.25 + 0.5 * rng.u01();

    ph.M.resize(ph.grid.cells());
    ph.A.assign(ph.grid.cells(), 0.0);
    for (int i = 0; i < m; ++i) {
        const double x = double(i + 1) / (m + 1);
        for (int j = 0; j < m; ++j) {
            const double y = double(j + 1) / (m + 1);
            const int k = ph.grid.flat(i, j);
            ph.M[k] = std::exp(-(x * x + y * y) / 4.0);
            const double dx = x - cx, dy = y - cy;
            if (dx * dx + dy * dy <= radius * radius) ph.A[k] = delta;
        }
    }
    ph.E.resize(ph.grid.cells());
    for (int k = 0; k < ph.grid.cells(); ++k) ph.E[k] = sigma * rng.normal();
    ph.Y.resize(ph.grid.cells());
    ph.true_region.resize(ph.grid.cells());
    for (int k = 0; k < ph.grid.cells(); ++k) {
        ph.Y[k] = ph.M[k] + ph.A[k] + ph.E[k];
        ph.true_region[k] = ph.A[k] > 0.0 ? 1 : 0;
    }
    return ph;
}

void write_pgm16(const std::string& path, const Field& field, const GridSpec& grid) {
    if ((int)field.size() != grid.cells())
        throw std::invalid_argument("write_pgm16: field size mismatch");
    double lo = field[0], hi = field[0];
    for (double v : field) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm16: cannot open " + path);
    out << "P5\n# value = " << lo << " + pixel * " << span / 65535.0 << "\n"
        << grid.m << " " << grid.m << "\n65535\n";
    for (double v : field) {
        const unsigned q = (unsigned)std::lround((v - lo) / span * 65535.0);
        out.put(char((q >> 8) & 0xff));
        out.put(char(q & 0xff));
    }
}

}  // namespace akmmd
