#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nlch {

enum class Boundary { zero_flux, periodic };

const char* to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

/// Uniform cell-centered discretization of a rectangular domain.
/// Cell (ix, iy) is centered at ((ix+0.5)hx, (iy+0.5)hy); 1D grids have
/// ny = 1 and a unit extent in y so that cell_volume() stays 1D-consistent.
struct Grid {
    int dim = 1;
    int nx = 0;
    int ny = 1;
    double extent_x = 1.0;
    double extent_y = 1.0;
    double hx = 0.0;
    double hy = 1.0;
    Boundary boundary = Boundary::zero_flux;

    static Grid make_1d(int nx, double extent = 1.0,
                        Boundary b = Boundary::zero_flux);
    static Grid make_2d(int nx, int ny, double extent_x = 1.0,
                        double extent_y = 1.0, Boundary b = Boundary::zero_flux);

    int cells() const { return nx * ny; }
    double cell_volume() const { return dim == 1 ? hx : hx * hy; }
    /// Quadrature measure of the domain: cells() * cell_volume().
    double omega() const { return cells() * cell_volume(); }
    double x(int ix) const { return (ix + 0.5) * hx; }
    double y(int iy) const { return (iy + 0.5) * hy; }
    int index(int ix, int iy) const { return iy * nx + ix; }

    bool operator==(const Grid&) const = default;
};

/// One scalar value per grid cell, row-major (x fastest).
class Field {
public:
    Field() = default;
    explicit Field(const Grid& grid, double fill = 0.0)
        : grid_(grid), values_(static_cast<std::size_t>(grid.cells()), fill) {}

    const Grid& grid() const { return grid_; }
    int size() const { return static_cast<int>(values_.size()); }

    double& operator[](int i) { return values_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    double& at(int ix, int iy) { return values_[static_cast<std::size_t>(grid_.index(ix, iy))]; }
    double at(int ix, int iy) const { return values_[static_cast<std::size_t>(grid_.index(ix, iy))]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    /// Throws std::runtime_error naming `what` if any value is NaN or infinite.
    void require_finite(const char* what) const;

private:
    Grid grid_;
    std::vector<double> values_;
};

struct FieldStats {
    double mean = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double linf = 0.0;
};

/// Mean and L^p norms by cell quadrature (compensated summation, serial,
/// so results do not depend on the thread configuration).
FieldStats mean_and_norms(const Field& f);

/// Sum of values * cell_volume with compensated summation.
double integrate(const Field& f);

/// Discrete inner product <a, b> = sum a_i b_i * cell_volume.
double inner(const Field& a, const Field& b);

/// Second-order Laplacian stencil. zero_flux mirrors the boundary cell
/// (homogeneous Neumann), periodic wraps.
Field laplacian(const Field& f);

/// Conservative divergence of m * grad(w) with arithmetic-mean face mobility.
/// Boundary faces carry zero flux for zero_flux grids; periodic wraps.
/// The face fluxes telescope, so the integral of the result vanishes.
Field flux_divergence(const Field& m, const Field& w);

/// Solves u - coefficient * laplacian(u) = rhs by transform diagonalization
/// (DCT-II for zero_flux, FFT for periodic). Throws if the relative residual
/// of the returned solution exceeds 1e-10.
Field helmholtz_solve(const Field& rhs, double coefficient);

/// Field snapshot I/O. Line 1: "NLCH1 <dim> <nx> [ny] <hx> [hy] <time>",
/// then one value per line, row-major, 17 significant digits.
void write_snapshot(const Field& f, double time, const std::filesystem::path& path);
std::pair<Field, double> read_snapshot(const std::filesystem::path& path,
                                       Boundary boundary = Boundary::zero_flux);

/// Band-limited random field: a fixed set of trigonometric modes with seeded
/// normal coefficients. Samples the same continuum field at every resolution,
/// which keeps empirical operator-norm estimates stable under refinement.
Field bandlimited_field(const Grid& grid, std::uint64_t seed, int modes = 6);

}  // namespace nlch
