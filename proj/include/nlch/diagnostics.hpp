#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nlch/grid.hpp"
#include "nlch/kernel.hpp"
#include "nlch/potential.hpp"

namespace nlch {

/// Per-time-sample invariant measurements. M1/M2/Minf are the L^r norms of
/// ln(u) on the field floored to [1e-14, 1-1e-14]; level_set_measure is the
/// measure of {u >= b0}.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
    double overshoot = 0.0;
    double energy = 0.0;
    double energy_eps = 0.0;
    double mass_residual = 0.0;
    double M1 = 0.0;
    double M2 = 0.0;
    double Minf = 0.0;
    double level_set_measure = 0.0;
};

/// Floor applied before evaluating logarithms in diagnostics.
inline constexpr double kLogFloor = 1e-14;

/// Free energy E = 1/2 iint K(x-y)(u(x)-u(y))^2 + int f(u) + k(x) u(1-u),
/// evaluated through the expansion int k u^2 - <u, K*u>; u is floored to
/// [kLogFloor, 1-kLogFloor] inside f only.
double energy(const Field& u, const DiscreteKernel& kernel);

/// Lyapunov value int f_eps(u) + int (K*(1-u)) u of the regularized flow.
/// At eps = 0 the potential falls back to the floored logarithmic f.
double energy_regularized(const Field& u, const EpsilonFamily& family,
                          const DiscreteKernel& kernel);

struct SeparationMetrics {
    double min_u = 0.0;
    double max_u = 0.0;
    double M1 = 0.0;
    double M2 = 0.0;
    double Minf = 0.0;
    double level_set_measure = 0.0;
};

SeparationMetrics separation_metrics(const Field& u, double b0);

struct BalanceReport {
    double max_mass_residual = 0.0;
    int energy_increase_count = 0;     // increases above 1e-12, reaction-free
    double max_energy_increase = 0.0;  // largest positive jump of energy_eps
    std::string to_text() const;
};

/// Residual summary over a record series. Energy trend entries are only
/// meaningful for reaction-free runs; pass reaction_free accordingly.
BalanceReport balance_residuals(std::span<const DiagnosticsRecord> records,
                                bool reaction_free);

struct MeanBoundCheck {
    bool passed = true;
    double min_margin = 0.0;  // min over records of mass - bound(t)
};

/// Checks mass(t) >= mass(0) * exp(-L_eff t) * (1 - 1e-6) at every record,
/// where L_eff = -ln(1 - L_hat dt)/dt is the decay rate the forward-Euler
/// reaction quadrature realizes (identical to L_hat as dt -> 0). The margin
/// is measured against the slackened bound.
MeanBoundCheck mean_lower_bound_check(std::span<const DiagnosticsRecord> records,
                                      double L_hat, double dt);

/// CSV serialization: fixed header, decimal, 17 significant digits.
void write_csv(std::ostream& os, std::span<const DiagnosticsRecord> records);
void write_csv(const std::filesystem::path& path,
               std::span<const DiagnosticsRecord> records);
std::vector<DiagnosticsRecord> read_csv(const std::filesystem::path& path);

}  // namespace nlch
