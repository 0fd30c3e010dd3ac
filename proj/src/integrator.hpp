#ifndef DISP_INTEGRATOR_HPP
#define DISP_INTEGRATOR_HPP

#include "analysis.hpp"
#include "delayline.hpp"
#include "discretization.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "state.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace disp {

/// Verification hook: source term f(x, t) on the right-hand side. Defaults
/// to zero; only manufactured-solution studies set it.
using Forcing = std::function<double(double x, double t)>;

struct RunConfig {
    ModelParams params;
    DampingProfile profile = DampingProfile::constant(0.0);
    HistorySpec history = HistorySpec::constant_profile(SpaceProfile::zero());
    int n = 199;
    double dt = 1e-3;
    double T_end = 10.0;
    int bdf_order = 2;
    int snapshot_every = 100;  // 0: first and last snapshot only

    void validate() const;  // throws ConfigError
};

struct RunStatus {
    enum class State { healthy, diverged, steady };
    State state = State::healthy;
    double t_event = 0.0;   // blow-up time / settle time
    double residual = 0.0;  // ||u|| of the settled profile
    double blowup_threshold = 0.0;
    double steady_tol = 0.0;
};

const char* state_name(RunStatus::State s);

struct PicardStats {
    long total_iterations = 0;
    int max_iterations = 0;
    int fallbacks = 0;  // steps where iteration stalled and the lagged coefficient was used
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> values;
};

/// Grid, operators and damping samples shared by every step of a run.
/// Immutable after build; safe to share across concurrent runs.
struct Workspace {
    SpatialGrid grid;
    Quadrature quad;
    BandedOperator d1, d2, d4;
    std::vector<double> a;

    static Workspace build(const ModelParams& params, const DampingProfile& profile, int n);
};

/// One implicit step matrix: mass/dt + mu D4 - nu D2 + diag(a) + diag(c) D1,
/// where c is the delayed coefficient. The factorization is reused while c
/// is unchanged.
class StepOperator {
public:
    StepOperator(const Workspace& ws, const ModelParams& params, double mass_coef);

    void prepare(std::span<const double> c);
    void solve(std::span<double> rhs) const { lu_.solve(rhs); }
    /// Assembled matrix of the last prepare(); the dense cross-check
    /// densifies exactly this.
    const BandedOperator& matrix() const { return mat_; }

private:
    const Workspace* ws_;
    BandedOperator base_;   // mass + spatial terms, width 5
    BandedOperator mat_;    // base + delayed coupling (scratch)
    std::vector<double> last_c_;
    bool factored_ = false;
    BandedLU lu_;
};

// Integration thresholds (recorded in run metadata).
inline constexpr double kBlowupThreshold = 1e6;   // on max |u|
inline constexpr double kSteadyTol = 1e-8;        // on ||du||/dt
inline constexpr double kSteadyWindow = 1.0;      // trailing time units
inline constexpr double kPicardTol = 1e-10;       // max-norm of iterate delta
inline constexpr int kPicardMaxIter = 25;

/// Backward-Euler step to t_n + dt. For tau >= dt the delayed coefficient is
/// known data and the step is one banded solve; for tau = 0 the coefficient
/// is the unknown itself and is resolved by Picard iteration (freeze, solve,
/// refresh), falling back to a single lagged-coefficient step when stalled.
StateVector step_bdf1(const StateVector& state_n, const HistoryBuffer& buf, const Workspace& ws,
                      const ModelParams& params, StepOperator& op, const Forcing* forcing,
                      PicardStats* stats);

/// Two-step BDF: (3 u^{n+1} - 4 u^n + u^{n-1}) / (2 dt) + spatial terms = f.
StateVector step_bdf2(const StateVector& state_n, const StateVector& state_nm1,
                      const HistoryBuffer& buf, const Workspace& ws, const ModelParams& params,
                      StepOperator& op, const Forcing* forcing, PicardStats* stats);

struct RunOutput {
    NormSeries norms;
    std::vector<Snapshot> snapshots;
    RunStatus status;
    PicardStats picard;
    double tau_effective = 0.0;  // delay after lattice snapping
    bool tau_snapped = false;
    long steps = 0;
};

/// Advances the model from t = 0 to T_end on the exact step lattice,
/// recording norms every step and full snapshots at the configured cadence.
/// Divergence stops the run (partial trajectory retained); steady detection
/// records the event and keeps stepping.
RunOutput run(const RunConfig& config, const Forcing* forcing = nullptr);

} // namespace disp

#endif
