#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlch/grid.hpp"

namespace nlch {

enum class ReactionKind { none, logistic, inpainting, polymer, cubic, user_table };

const char* to_string(ReactionKind k);
ReactionKind reaction_kind_from_string(const std::string& s);

/// Spatial coefficient: a scalar or a grid-sampled table.
struct Coefficient {
    double scalar = 1.0;
    std::optional<Field> table;

    double at(int cell) const {
        return table ? (*table)[cell] : scalar;
    }
    double max_abs(const Grid& grid) const;
    double min_value(const Grid& grid) const;
    double max_value(const Grid& grid) const;
    bool finite_on(const Grid& grid) const;
};

/// Time dependence is restricted to a scalar multiplier sampled per step:
/// m(t) = 1 + amplitude * sin(omega * t).
struct TimeModulation {
    double amplitude = 0.0;
    double omega = 0.0;
    double factor(double t) const;
};

/// Reaction law g(x, t, s). Built-in kinds:
///   logistic:   alpha(x) m(t) s (1 - s)
///   inpainting: lambda(x) m(t) (h(x) - s)
///   polymer:    -sigma(x) m(t) s
///   cubic:      sign (s^3 - s)
///   user_table: linear interpolation of `table` sampled uniformly on [0,1]
struct ReactionSpec {
    ReactionKind kind = ReactionKind::none;
    Coefficient alpha;            // logistic
    Coefficient lambda_coeff;     // inpainting
    Coefficient h_target;         // inpainting
    Coefficient sigma;            // polymer
    int cubic_sign = +1;          // cubic: +1 or -1
    std::vector<double> table;    // user_table, >= 2 entries
    TimeModulation modulation;
    std::optional<double> declared_lipschitz;
};

/// Evaluates g (clamped = false, requires s in [0,1]) or its plateau
/// extension g1 (clamped = true, any s). Throws std::domain_error when
/// clamped = false and s is outside [0,1], or when t < 0.
double eval_reaction(const ReactionSpec& spec, const Grid& grid, int cell,
                     double t, double s, bool clamped);

/// Point-addressed variant: maps (px, py) to the nearest cell.
double eval_reaction_at(const ReactionSpec& spec, const Grid& grid, double px,
                        double py, double t, double s, bool clamped);

/// g1 applied cellwise to a state field.
Field reaction_field(const ReactionSpec& spec, const Grid& grid, double t,
                     const Field& u);

/// Empirical Lipschitz constant in s: max over sampled (x, t) of the slopes
/// on a 1e-3-spaced s-lattice over [0,1], floored by declared_lipschitz.
double lipschitz_estimate(const ReactionSpec& spec, const Grid& grid,
                          double t_begin, double t_end);

struct ReactionValidation {
    bool g1_finite = true;       // coefficients finite on the grid
    bool g3_sign = true;         // g(x,t,0) >= 0 >= g(x,t,1)
    double lipschitz_s = 0.0;    // (G2)
    double lipschitz_t = 0.0;    // (G4)
    double bound = 0.0;          // max |g| over samples
    std::vector<std::string> failures;

    bool passed() const { return failures.empty(); }
    std::string to_text() const;
};

/// Checks the reaction hypotheses on the grid. Failures are report entries,
/// never exceptions; only a sign-condition failure should stop a run.
ReactionValidation validate_reaction(const ReactionSpec& spec, const Grid& grid,
                                     double t_begin, double t_end);

}  // namespace nlch
