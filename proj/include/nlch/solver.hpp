#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlch/diagnostics.hpp"
#include "nlch/grid.hpp"
#include "nlch/kernel.hpp"
#include "nlch/potential.hpp"
#include "nlch/reaction.hpp"

namespace nlch {

enum class InitialKind { constant, noise, tanh_interface, checkerboard, snapshot };

const char* to_string(InitialKind k);
InitialKind initial_kind_from_string(const std::string& s);

struct InitialSpec {
    InitialKind kind = InitialKind::constant;
    double value = 0.5;                  // constant
    double lo = 0.4, hi = 0.6;           // noise / checkerboard
    double center = 0.5, width = 0.05;   // tanh interface (along x)
    double floor = 0.01, ceiling = 0.99; // tanh clamps
    std::string path;                    // snapshot
};

struct SolverConfig {
    double epsilon = 1e-3;
    double dt = 1e-4;
    double t_end = 1.0;
    KernelSpec kernel;
    ReactionSpec reaction;
    Grid grid = Grid::make_1d(256);
    InitialSpec initial;
    int diagnostics_every = 100;
    std::uint64_t seed = 1;
    double b0 = -1.0;  // level-set threshold; < 0 means half the initial mean
};

/// Simulation state. The long-double accumulators carry the solver's own
/// reaction quadrature (sum of dt * mean g1), the bookkeeping behind the
/// discrete mass identity.
struct SimState {
    double t = 0.0;
    int step_index = 0;
    Field u;
    Field w;  // nonlocal term of the last completed step
    long double reaction_integral = 0.0L;
    long double expected_mean = 0.0L;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int step_index)
        : std::runtime_error(what), step_index_(step_index) {}
    int step_index() const { return step_index_; }

private:
    int step_index_ = -1;
};

/// Builds the initial field from the spec and enforces the admissibility of
/// the data: values in [0, 1] and mean strictly inside (0, 1). Violations
/// throw std::invalid_argument naming the violated hypothesis.
Field make_initial(const InitialSpec& spec, const Grid& grid, std::uint64_t seed);

/// One prepared simulation: validated config, tabulated kernel, regularized
/// family. step() is a pure transition; distinct runs share nothing mutable.
class Solver {
public:
    explicit Solver(SolverConfig config);

    const SolverConfig& config() const { return config_; }
    const DiscreteKernel& kernel() const { return kernel_; }
    const EpsilonFamily& family() const { return family_; }
    double initial_mean() const { return u0_mean_; }
    double b0() const { return b0_; }

    SimState initial_state() const;

    /// One IMEX step: w = K*(1-2u); explicit drift and reaction; implicit
    /// constant-coefficient diffusion (I - dt(1+2a) Lap) u = r. Throws
    /// SolverError on blow-up (||u||_inf > 10) or solve failure.
    SimState step(const SimState& state) const;

    DiagnosticsRecord diagnose(const SimState& state) const;

private:
    SolverConfig config_;
    EpsilonFamily family_;
    DiscreteKernel kernel_;
    Field u0_;
    double u0_mean_ = 0.0;
    double b0_ = 0.0;
};

struct RunSinks {
    std::function<void(const DiagnosticsRecord&, const SimState&)> on_record;
};

struct RunResult {
    SimState final_state;
    std::vector<DiagnosticsRecord> records;
};

/// Steps until t >= t_end. Records are emitted at t = 0, after every
/// diagnostics_every-th step, and after the final step (the final record is
/// always appended; the initial one doubles as the step-0 cadence record).
/// Deterministic for a fixed config and seed.
RunResult run(const SolverConfig& config, const RunSinks& sinks = {});

struct EpsilonStudyRow {
    double epsilon = 0.0;
    /// ||u_eps(t_end) - u_eps_next(t_end)||_L2; unset for the last row.
    std::optional<double> l2_diff_to_next;
    double max_overshoot = 0.0;
};

/// Reruns the base config over a strictly decreasing epsilon list (>= 2
/// entries, identical grid/dt/seed) and tabulates successive final-state
/// differences and per-run overshoot maxima.
std::vector<EpsilonStudyRow> epsilon_study(const SolverConfig& base,
                                           const std::vector<double>& epsilons);
std::string to_text(const std::vector<EpsilonStudyRow>& table);

struct DependenceProbeResult {
    std::vector<double> chat_per_direction;
    double chat = 0.0;              // max over directions
    double direction_spread = 0.0;  // (max - min)/max, 0 when all zero
    std::vector<double> times;
    std::vector<std::vector<double>> growth;  // growth[k][i] = D_k(times[i])
    std::string to_text() const;
};

/// Runs pairs (u0, u0 + delta * perturbation) for seeded band-limited
/// perturbation directions and fits the smallest exponential-envelope rate
/// Chat = max over records of max(0, ln(D(t)/D(0)))/t per direction, so that
/// D(t) <= D(0) exp(Chat t) holds at every record by construction.
DependenceProbeResult dependence_probe(const SolverConfig& config, double delta,
                                       int directions);

}  // namespace nlch
