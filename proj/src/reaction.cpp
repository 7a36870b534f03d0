#include "nlch/reaction.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlch {

const char* to_string(ReactionKind k) {
    switch (k) {
        case ReactionKind::none: return "none";
        case ReactionKind::logistic: return "logistic";
        case ReactionKind::inpainting: return "inpainting";
        case ReactionKind::polymer: return "polymer";
        case ReactionKind::cubic: return "cubic";
        case ReactionKind::user_table: return "user_table";
    }
    return "?";
}

ReactionKind reaction_kind_from_string(const std::string& s) {
    if (s == "none") return ReactionKind::none;
    if (s == "logistic") return ReactionKind::logistic;
    if (s == "inpainting") return ReactionKind::inpainting;
    if (s == "polymer") return ReactionKind::polymer;
    if (s == "cubic") return ReactionKind::cubic;
    if (s == "user_table") return ReactionKind::user_table;
    throw std::invalid_argument("unknown reaction kind: " + s);
}

double Coefficient::max_abs(const Grid& grid) const {
    if (!table) return std::abs(scalar);
    double m = 0.0;
    for (int i = 0; i < grid.cells(); ++i) m = std::max(m, std::abs((*table)[i]));
    return m;
}

double Coefficient::min_value(const Grid& grid) const {
    if (!table) return scalar;
    double m = (*table)[0];
    for (int i = 1; i < grid.cells(); ++i) m = std::min(m, (*table)[i]);
    return m;
}

double Coefficient::max_value(const Grid& grid) const {
    if (!table) return scalar;
    double m = (*table)[0];
    for (int i = 1; i < grid.cells(); ++i) m = std::max(m, (*table)[i]);
    return m;
}

bool Coefficient::finite_on(const Grid& grid) const {
    if (!table) return std::isfinite(scalar);
    for (int i = 0; i < grid.cells(); ++i) {
        if (!std::isfinite((*table)[i])) return false;
    }
    return true;
}

double TimeModulation::factor(double t) const {
    return 1.0 + amplitude * std::sin(omega * t);
}

namespace {

double table_interp(const std::vector<double>& table, double s) {
    const int n = static_cast<int>(table.size());
    const double pos = s * (n - 1);
    const int i = std::clamp(static_cast<int>(pos), 0, n - 2);
    const double w = pos - i;
    return table[i] * (1.0 - w) + table[i + 1] * w;
}

double eval_on_unit(const ReactionSpec& spec, int cell, double m, double s) {
    switch (spec.kind) {
        case ReactionKind::none:
            return 0.0;
        case ReactionKind::logistic:
            return spec.alpha.at(cell) * m * s * (1.0 - s);
        case ReactionKind::inpainting:
            return spec.lambda_coeff.at(cell) * m * (spec.h_target.at(cell) - s);
        case ReactionKind::polymer:
            return -spec.sigma.at(cell) * m * s;
        case ReactionKind::cubic:
            return spec.cubic_sign * (s * s * s - s);
        case ReactionKind::user_table:
            return table_interp(spec.table, s);
    }
    return 0.0;
}

}  // namespace

double eval_reaction(const ReactionSpec& spec, const Grid& grid, int cell, double t,
                     double s, bool clamped) {
    (void)grid;
    if (t < 0.0) throw std::domain_error("eval_reaction: t must be nonnegative");
    if (!clamped && (s < 0.0 || s > 1.0)) {
        throw std::domain_error("eval_reaction: s outside [0,1] requires the clamped extension");
    }
    if (spec.kind == ReactionKind::user_table && spec.table.size() < 2) {
        throw std::invalid_argument("eval_reaction: user_table needs >= 2 entries");
    }
    const double m = spec.modulation.factor(t);
    return eval_on_unit(spec, cell, m, std::clamp(s, 0.0, 1.0));
}

double eval_reaction_at(const ReactionSpec& spec, const Grid& grid, double px,
                        double py, double t, double s, bool clamped) {
    int ix = std::clamp(static_cast<int>(px / grid.hx), 0, grid.nx - 1);
    int iy = grid.dim == 2 ? std::clamp(static_cast<int>(py / grid.hy), 0, grid.ny - 1) : 0;
    return eval_reaction(spec, grid, grid.index(ix, iy), t, s, clamped);
}

Field reaction_field(const ReactionSpec& spec, const Grid& grid, double t,
                     const Field& u) {
    Field out(grid);
    if (spec.kind == ReactionKind::none) return out;
    const double m = spec.modulation.factor(t);
    const int n = grid.cells();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        out[i] = eval_on_unit(spec, i, m, std::clamp(u[i], 0.0, 1.0));
    }
    return out;
}

namespace {

constexpr double kSLatticeSpacing = 1e-3;
constexpr int kTimeSamples = 17;

// Cells worth sampling: all of them for tabulated coefficients, one otherwise.
std::vector<int> sample_cells(const ReactionSpec& spec, const Grid& grid) {
    const bool tabulated = spec.alpha.table || spec.lambda_coeff.table ||
                           spec.h_target.table || spec.sigma.table;
    if (!tabulated) return {0};
    std::vector<int> cells(static_cast<std::size_t>(grid.cells()));
    for (int i = 0; i < grid.cells(); ++i) cells[static_cast<std::size_t>(i)] = i;
    return cells;
}

std::vector<double> sample_times(const ReactionSpec& spec, double t0, double t1) {
    if (spec.modulation.amplitude == 0.0 || t1 <= t0) return {std::max(t0, 0.0)};
    std::vector<double> ts(kTimeSamples);
    for (int i = 0; i < kTimeSamples; ++i) {
        ts[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / (kTimeSamples - 1);
    }
    return ts;
}

}  // namespace

double lipschitz_estimate(const ReactionSpec& spec, const Grid& grid, double t_begin,
                          double t_end) {
    double L = 0.0;
    if (spec.kind != ReactionKind::none) {
        const auto cells = sample_cells(spec, grid);
        const auto times = sample_times(spec, t_begin, t_end);
        const int nlat = static_cast<int>(std::lround(1.0 / kSLatticeSpacing));
        for (double t : times) {
            const double m = spec.modulation.factor(t);
            for (int cell : cells) {
                double prev = eval_on_unit(spec, cell, m, 0.0);
                for (int j = 1; j <= nlat; ++j) {
                    const double s = j * kSLatticeSpacing;
                    const double cur = eval_on_unit(spec, cell, m, s);
                    L = std::max(L, std::abs(cur - prev) / kSLatticeSpacing);
                    prev = cur;
                }
            }
        }
    }
    if (spec.declared_lipschitz) L = std::max(L, *spec.declared_lipschitz);
    return L;
}

ReactionValidation validate_reaction(const ReactionSpec& spec, const Grid& grid,
                                     double t_begin, double t_end) {
    ReactionValidation v;
    if (spec.kind == ReactionKind::user_table && spec.table.size() < 2) {
        v.g1_finite = false;
        v.failures.push_back("G1: user_table needs >= 2 entries");
        return v;
    }
    for (const Coefficient* c : {&spec.alpha, &spec.lambda_coeff, &spec.h_target, &spec.sigma}) {
        if (!c->finite_on(grid)) {
            v.g1_finite = false;
            v.failures.push_back("G1: non-finite coefficient field");
            break;
        }
    }
    if (!v.g1_finite) return v;

    const auto cells = sample_cells(spec, grid);
    const auto times = sample_times(spec, t_begin, t_end);

    // (G3): g(x,t,0) >= 0 >= g(x,t,1) at every sampled (x,t).
    for (double t : times) {
        const double m = spec.modulation.factor(t);
        for (int cell : cells) {
            const double g0 = eval_on_unit(spec, cell, m, 0.0);
            const double g1 = eval_on_unit(spec, cell, m, 1.0);
            if (!(g0 >= 0.0) || !(g1 <= 0.0)) {
                v.g3_sign = false;
                std::ostringstream os;
                os << "G3: sign condition fails at cell " << cell << " t=" << t
                   << " (g(0)=" << g0 << ", g(1)=" << g1 << ")";
                v.failures.push_back(os.str());
                break;
            }
        }
        if (!v.g3_sign) break;
    }

    v.lipschitz_s = lipschitz_estimate(spec, grid, t_begin, t_end);

    // (G4): slope in t at fixed s, sampled.
    double Lt = 0.0;
    double bound = 0.0;
    const int ns = 101;
    const double dt_lattice = (t_end > t_begin) ? (t_end - t_begin) / (kTimeSamples - 1) : 0.0;
    for (int cell : cells) {
        for (int j = 0; j <= ns; ++j) {
            const double s = static_cast<double>(j) / ns;
            double prev = 0.0;
            bool have_prev = false;
            for (double t : times) {
                const double g = eval_on_unit(spec, cell, spec.modulation.factor(t), s);
                bound = std::max(bound, std::abs(g));
                if (have_prev && dt_lattice > 0.0) {
                    Lt = std::max(Lt, std::abs(g - prev) / dt_lattice);
                }
                prev = g;
                have_prev = true;
            }
        }
    }
    v.lipschitz_t = Lt;
    v.bound = bound;
    return v;
}

std::string ReactionValidation::to_text() const {
    std::ostringstream os;
    os << "reaction validation\n";
    os << "  G1 (finite coefficients) : " << (g1_finite ? "PASS" : "FAIL") << "\n";
    os << "  G2 (Lipschitz in s)      : L = " << lipschitz_s << "\n";
    os << "  G3 (sign at endpoints)   : " << (g3_sign ? "PASS" : "FAIL") << "\n";
    os << "  G4 (Lipschitz in t)      : L_t = " << lipschitz_t << "\n";
    os << "  bound |g| <= " << bound << "\n";
    for (const auto& f : failures) os << "  ! " << f << "\n";
    return os.str();
}

}  // namespace nlch
