#include "nlch/kernel.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <vector>

#include "nlch/rng.hpp"

namespace nlch {

const char* to_string(KernelKind k) {
    switch (k) {
        case KernelKind::gaussian: return "gaussian";
        case KernelKind::mollifier: return "mollifier";
        case KernelKind::newton: return "newton";
    }
    return "?";
}

KernelKind kernel_kind_from_string(const std::string& s) {
    if (s == "gaussian") return KernelKind::gaussian;
    if (s == "mollifier") return KernelKind::mollifier;
    if (s == "newton") return KernelKind::newton;
    throw std::invalid_argument("unknown kernel kind: " + s);
}

namespace {

// Mean of ln|x| over the rectangle [-a,a] x [-b,b].
double log_cell_mean(double a, double b) {
    const double s = a * b * std::log(a * a + b * b) - 3.0 * a * b +
                     b * b * std::atan(a / b) + a * a * std::atan(b / a);
    return s / (2.0 * a * b);
}

double kernel_value(const KernelSpec& spec, double r) {
    switch (spec.kind) {
        case KernelKind::gaussian:
            return spec.amplitude * std::exp(-r * r / spec.scale);
        case KernelKind::mollifier: {
            const double h = spec.scale;
            if (r >= h) return 0.0;
            return spec.amplitude * std::exp(-h * h / (h * h - r * r));
        }
        case KernelKind::newton:
            if (spec.dimension == 2) return -spec.amplitude * std::log(r);
            return spec.amplitude * r;  // 1D analogue, not a source family
    }
    return 0.0;
}

}  // namespace

struct DiscreteKernel::Impl {
    KernelSpec spec;
    Grid grid;
    // Tabulated kernel on offsets dx in [-(nx-1), nx-1], dy likewise,
    // stored on the zero-padded (doubled) index range used by the transform.
    std::vector<double> tab;  // (2*ny-1) x (2*nx-1), offset-indexed
    double singularity_rule = 0.0;
    double sym_defect = 0.0;

    int pad_nx = 0, pad_ny = 0;
    std::vector<double> khat_re, khat_im;  // transform cache of padded kernel
    Field kvec;                            // boundary weight K*1

    mutable std::mutex mutex;
    double* pad_in = nullptr;
    fftw_complex* pad_freq = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    ~Impl() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        if (pad_in) fftw_free(pad_in);
        if (pad_freq) fftw_free(pad_freq);
    }

    int tab_index(int dx, int dy) const {
        return (dy + grid.ny - 1) * (2 * grid.nx - 1) + (dx + grid.nx - 1);
    }

    Field convolve_impl(const Field& rho) const;
};

const Grid& DiscreteKernel::grid() const { return impl_->grid; }
const KernelSpec& DiscreteKernel::spec() const { return impl_->spec; }
double DiscreteKernel::tabulated(int dx, int dy) const {
    return impl_->tab[static_cast<std::size_t>(impl_->tab_index(dx, dy))];
}
double DiscreteKernel::singularity_rule_value() const { return impl_->singularity_rule; }
double DiscreteKernel::symmetry_defect() const { return impl_->sym_defect; }
Field DiscreteKernel::boundary_weight() const { return impl_->kvec; }

Field DiscreteKernel::Impl::convolve_impl(const Field& rho) const {
    if (!(rho.grid() == grid)) {
        throw std::invalid_argument("convolve: field lives on a different grid");
    }
    const int nx = grid.nx, ny = grid.ny;
    const int nfx = pad_nx / 2 + 1;
    Field out(grid);

    std::lock_guard lock(mutex);
    std::fill(pad_in, pad_in + static_cast<std::size_t>(pad_nx) * pad_ny, 0.0);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            pad_in[iy * pad_nx + ix] = rho.at(ix, iy);
        }
    }
    fftw_execute(fwd);
    const double norm = grid.cell_volume() / (static_cast<double>(pad_nx) * pad_ny);
    for (int i = 0; i < pad_ny * nfx; ++i) {
        const double re = pad_freq[i][0], im = pad_freq[i][1];
        pad_freq[i][0] = (re * khat_re[i] - im * khat_im[i]) * norm;
        pad_freq[i][1] = (re * khat_im[i] + im * khat_re[i]) * norm;
    }
    fftw_execute(bwd);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            out.at(ix, iy) = pad_in[iy * pad_nx + ix];
        }
    }
    return out;
}

Field DiscreteKernel::convolve(const Field& rho) const { return impl_->convolve_impl(rho); }

Field convolve(const DiscreteKernel& kernel, const Field& rho) {
    return kernel.convolve(rho);
}

DiscreteKernel build_kernel(const KernelSpec& spec, const Grid& grid) {
    if (spec.amplitude < 0.0) {
        throw std::invalid_argument("build_kernel: amplitude must be nonnegative");
    }
    if (spec.dimension != grid.dim) {
        throw std::invalid_argument("build_kernel: spec dimension does not match grid");
    }
    const bool zero_kernel = spec.amplitude == 0.0;
    const double max_h = std::max(grid.hx, grid.dim == 2 ? grid.hy : 0.0);
    if (!zero_kernel) {
        if (spec.kind != KernelKind::newton && !(spec.scale > 0.0)) {
            throw std::invalid_argument("build_kernel: scale must be positive");
        }
        const double feature = spec.kind == KernelKind::gaussian ? std::sqrt(spec.scale)
                             : spec.kind == KernelKind::mollifier ? spec.scale
                             : 2.0 * max_h;  // newton has no scale to resolve
        if (feature < 2.0 * max_h) {
            throw std::invalid_argument("build_kernel: kernel under-resolved (scale < 2 spacings)");
        }
    }

    auto impl = std::make_shared<DiscreteKernel::Impl>();
    impl->spec = spec;
    impl->grid = grid;

    const int nx = grid.nx, ny = grid.ny;
    impl->tab.assign(static_cast<std::size_t>(2 * ny - 1) * (2 * nx - 1), 0.0);
    for (int dy = -(ny - 1); dy <= ny - 1; ++dy) {
        for (int dx = -(nx - 1); dx <= nx - 1; ++dx) {
            const double r = grid.dim == 1
                                 ? std::abs(dx) * grid.hx
                                 : std::hypot(dx * grid.hx, dy * grid.hy);
            double v;
            if (zero_kernel) {
                v = 0.0;
            } else if (dx == 0 && dy == 0 && spec.kind == KernelKind::newton) {
                // Exact integral of the kernel over the r = 0 cell, averaged.
                v = grid.dim == 1 ? spec.amplitude * grid.hx / 4.0
                                  : -spec.amplitude * log_cell_mean(grid.hx / 2.0, grid.hy / 2.0);
            } else if (dx == 0 && dy == 0) {
                v = kernel_value(spec, 0.0);
            } else {
                v = kernel_value(spec, r);
            }
            impl->tab[static_cast<std::size_t>(impl->tab_index(dx, dy))] = v;
        }
    }
    impl->singularity_rule = impl->tab[static_cast<std::size_t>(impl->tab_index(0, 0))];

    double defect = 0.0;
    for (int dy = 0; dy <= ny - 1; ++dy) {
        for (int dx = -(nx - 1); dx <= nx - 1; ++dx) {
            const double d = std::abs(impl->tab[impl->tab_index(dx, dy)] -
                                      impl->tab[impl->tab_index(-dx, -dy)]);
            defect = std::max(defect, d);
        }
    }
    impl->sym_defect = defect;

    // Zero-padded transform setup: doubling each axis covers every offset of
    // the bounded-domain sum without wraparound.
    impl->pad_nx = 2 * nx;
    impl->pad_ny = grid.dim == 2 ? 2 * ny : 1;
    const int pad_cells = impl->pad_nx * impl->pad_ny;
    const int nfreq = impl->pad_ny * (impl->pad_nx / 2 + 1);
    impl->pad_in = fftw_alloc_real(pad_cells);
    impl->pad_freq = fftw_alloc_complex(nfreq);
    if (grid.dim == 1) {
        impl->fwd = fftw_plan_dft_r2c_1d(impl->pad_nx, impl->pad_in, impl->pad_freq, FFTW_ESTIMATE);
        impl->bwd = fftw_plan_dft_c2r_1d(impl->pad_nx, impl->pad_freq, impl->pad_in, FFTW_ESTIMATE);
    } else {
        impl->fwd = fftw_plan_dft_r2c_2d(impl->pad_ny, impl->pad_nx, impl->pad_in,
                                         impl->pad_freq, FFTW_ESTIMATE);
        impl->bwd = fftw_plan_dft_c2r_2d(impl->pad_ny, impl->pad_nx, impl->pad_freq,
                                         impl->pad_in, FFTW_ESTIMATE);
    }

    std::fill(impl->pad_in, impl->pad_in + pad_cells, 0.0);
    for (int dy = -(ny - 1); dy <= ny - 1; ++dy) {
        for (int dx = -(nx - 1); dx <= nx - 1; ++dx) {
            const int py = (dy + impl->pad_ny) % impl->pad_ny;
            const int px = (dx + impl->pad_nx) % impl->pad_nx;
            impl->pad_in[py * impl->pad_nx + px] = impl->tab[impl->tab_index(dx, dy)];
        }
    }
    fftw_execute(impl->fwd);
    impl->khat_re.resize(nfreq);
    impl->khat_im.resize(nfreq);
    for (int i = 0; i < nfreq; ++i) {
        impl->khat_re[i] = impl->pad_freq[i][0];
        impl->khat_im[i] = impl->pad_freq[i][1];
    }

    DiscreteKernel k;
    k.impl_ = impl;
    impl->kvec = impl->convolve_impl(Field(grid, 1.0));
    return k;
}

namespace {

// Centered first difference in the interior, one-sided at the boundary.
Field diff_axis(const Field& f, int axis) {
    const Grid& g = f.grid();
    Field out(g);
    const int nx = g.nx, ny = g.ny;
    const double h = axis == 0 ? g.hx : g.hy;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const int i = axis == 0 ? ix : iy;
            const int n = axis == 0 ? nx : ny;
            double d;
            auto value = [&](int j) { return axis == 0 ? f.at(j, iy) : f.at(ix, j); };
            if (i == 0) {
                d = (value(1) - value(0)) / h;
            } else if (i == n - 1) {
                d = (value(n - 1) - value(n - 2)) / h;
            } else {
                d = (value(i + 1) - value(i - 1)) / (2.0 * h);
            }
            out.at(ix, iy) = d;
        }
    }
    return out;
}

struct LpNorms {
    double l1 = 0.0, l2 = 0.0, linf = 0.0;
};

LpNorms lp_norms(const Field& f) {
    const FieldStats s = mean_and_norms(f);
    return {s.l1, s.l2, s.linf};
}

}  // namespace

KernelPropertyReport kernel_property_report(const KernelSpec& spec, const Grid& grid,
                                            int samples) {
    const DiscreteKernel kernel = build_kernel(spec, grid);
    KernelPropertyReport rep;
    rep.spec = spec;
    rep.grid_nx = grid.nx;
    rep.grid_ny = grid.dim == 2 ? grid.ny : 1;
    rep.samples = samples;
    rep.symmetry_defect = kernel.symmetry_defect();
    rep.non_paper_form = spec.kind == KernelKind::newton && spec.dimension == 1;

    // (K2): sup over grid x of sum_y |K(x-y)| * cellvol.
    const int nx = grid.nx, ny = grid.ny;
    const double vol = grid.cell_volume();
    double k2 = 0.0;
#pragma omp parallel for schedule(static) reduction(max : k2)
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            double acc = 0.0;
            for (int jy = 0; jy < ny; ++jy) {
                for (int jx = 0; jx < nx; ++jx) {
                    acc += std::abs(kernel.tabulated(ix - jx, iy - jy));
                }
            }
            k2 = std::max(k2, acc * vol);
        }
    }
    rep.k2_sup_integral = k2;

    double r1 = 0.0, r2 = 0.0, rinf = 0.0, k4 = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Field rho = bandlimited_field(grid, 0x9e3779b9u + 977u * s);
        const LpNorms nr = lp_norms(rho);
        const Field v = kernel.convolve(rho);
        const Field vx = diff_axis(v, 0);
        LpNorms nv = lp_norms(v);
        LpNorms nvx = lp_norms(vx);
        double w1_1 = nv.l1 + nvx.l1;
        double w1_2 = nv.l2 * nv.l2 + nvx.l2 * nvx.l2;
        double w1_inf = std::max(nv.linf, nvx.linf);
        double w2_2 = w1_2;
        {
            const Field vxx = diff_axis(vx, 0);
            const LpNorms n2 = lp_norms(vxx);
            w2_2 += n2.l2 * n2.l2;
        }
        double rho_w12 = nr.l2 * nr.l2;
        {
            const Field rx = diff_axis(rho, 0);
            const LpNorms n = lp_norms(rx);
            rho_w12 += n.l2 * n.l2;
        }
        if (grid.dim == 2) {
            const Field vy = diff_axis(v, 1);
            const LpNorms nvy = lp_norms(vy);
            w1_1 += nvy.l1;
            w1_2 += nvy.l2 * nvy.l2;
            w1_inf = std::max(w1_inf, nvy.linf);
            w2_2 += nvy.l2 * nvy.l2;
            const Field vyy = diff_axis(vy, 1);
            const Field vxy = diff_axis(vx, 1);
            const LpNorms nyy = lp_norms(vyy);
            const LpNorms nxy = lp_norms(vxy);
            w2_2 += nyy.l2 * nyy.l2 + nxy.l2 * nxy.l2;
            const Field ry = diff_axis(rho, 1);
            const LpNorms n = lp_norms(ry);
            rho_w12 += n.l2 * n.l2;
        }
        r1 = std::max(r1, w1_1 / nr.l1);
        r2 = std::max(r2, std::sqrt(w1_2) / nr.l2);
        rinf = std::max(rinf, w1_inf / nr.linf);
        k4 = std::max(k4, std::sqrt(w2_2) / std::sqrt(rho_w12));
    }
    rep.r1 = r1;
    rep.r2 = r2;
    rep.r_inf = rinf;
    rep.k4_constant = k4;
    return rep;
}

std::string KernelPropertyReport::to_text() const {
    std::ostringstream os;
    os << "kernel property report\n";
    os << "  kernel    : " << to_string(spec.kind) << " d=" << spec.dimension
       << " amplitude=" << spec.amplitude << " scale=" << spec.scale;
    if (non_paper_form) os << "  [1D newton analogue, non-paper form]";
    os << "\n";
    os << "  grid      : " << grid_nx;
    if (grid_ny > 1) os << " x " << grid_ny;
    os << "  samples=" << samples << "\n";
    char line[160];
    std::snprintf(line, sizeof line,
                  "  K2 sup-integral : %.6e\n  r1  : %.6e\n  r2  : %.6e\n"
                  "  rinf: %.6e\n  K4  : %.6e\n  symmetry defect : %.3e\n",
                  k2_sup_integral, r1, r2, r_inf, k4_constant, symmetry_defect);
    os << line;
    return os.str();
}

}  // namespace nlch
