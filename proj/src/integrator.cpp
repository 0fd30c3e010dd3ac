#include "integrator.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace disp {

void RunConfig::validate() const {
    params.validate();
    if (n < 5) throw ConfigError("run config: n must be >= 5");
    if (!(dt > 0.0)) throw ConfigError("run config: dt must be positive");
    if (!(T_end >= 0.0)) throw ConfigError("run config: T_end must be non-negative");
    if (bdf_order != 1 && bdf_order != 2) throw ConfigError("run config: bdf_order must be 1 or 2");
    if (snapshot_every < 0) throw ConfigError("run config: snapshot_every must be >= 0");
    if (params.tau > 0.0 && dt > params.tau)
        throw ConfigError("run config: dt must not exceed tau when tau > 0");
}

const char* state_name(RunStatus::State s) {
    switch (s) {
        case RunStatus::State::healthy: return "healthy";
        case RunStatus::State::diverged: return "diverged";
        case RunStatus::State::steady: return "steady";
    }
    return "?";
}

Workspace Workspace::build(const ModelParams& params, const DampingProfile& profile, int n) {
    Workspace ws;
    ws.grid = build_grid(params, n);
    ws.quad = build_quadrature(ws.grid);
    ws.d1 = assemble_d1(ws.grid);
    ws.d2 = assemble_d2(ws.grid);
    ws.d4 = assemble_d4(ws.grid);
    ws.a = sample_profile(profile, ws.grid);
    return ws;
}

StepOperator::StepOperator(const Workspace& ws, const ModelParams& params, double mass_coef)
    : ws_(&ws) {
    const int n = ws.grid.n;
    base_ = BandedOperator::zeros(n, 2, 2);
    for (int i = 0; i < n; ++i) {
        for (int d = -2; d <= 2; ++d) {
            if (i + d < 0 || i + d >= n) continue;
            double v = params.mu * ws.d4.at(i, d);
            if (d >= -1 && d <= 1) v -= params.nu * ws.d2.at(i, d);
            if (d == 0) v += mass_coef + ws.a[static_cast<size_t>(i)];
            base_.at(i, d) = v;
        }
    }
    mat_ = base_;
}

void StepOperator::prepare(std::span<const double> c) {
    const int n = ws_->grid.n;
    if (factored_ && last_c_.size() == c.size() &&
        std::memcmp(last_c_.data(), c.data(), c.size() * sizeof(double)) == 0)
        return;
    mat_.bands = base_.bands;
    for (int i = 0; i < n; ++i) {
        const double ci = c[static_cast<size_t>(i)];
        if (ci == 0.0) continue;
        for (int d = -1; d <= 1; ++d) {
            if (i + d < 0 || i + d >= n) continue;
            mat_.at(i, d) += ci * ws_->d1.at(i, d);
        }
    }
    lu_.factor(mat_);
    last_c_.assign(c.begin(), c.end());
    factored_ = true;
}

namespace {

void fill_rhs_bdf1(const StateVector& un, double dt, const SpatialGrid& grid, double t_next,
                   const Forcing* forcing, std::vector<double>& rhs) {
    const size_t n = un.values.size();
    rhs.resize(n);
    for (size_t i = 0; i < n; ++i) rhs[i] = un.values[i] / dt;
    if (forcing && *forcing)
        for (size_t i = 0; i < n; ++i)
            rhs[i] += (*forcing)(grid.node(static_cast<int>(i)), t_next);
}

void fill_rhs_bdf2(const StateVector& un, const StateVector& unm1, double dt,
                   const SpatialGrid& grid, double t_next, const Forcing* forcing,
                   std::vector<double>& rhs) {
    const size_t n = un.values.size();
    rhs.resize(n);
    const double c = 1.0 / (2.0 * dt);
    for (size_t i = 0; i < n; ++i) rhs[i] = (4.0 * un.values[i] - unm1.values[i]) * c;
    if (forcing && *forcing)
        for (size_t i = 0; i < n; ++i)
            rhs[i] += (*forcing)(grid.node(static_cast<int>(i)), t_next);
}

// Shared implicit solve: delayed coefficient from the buffer when tau >= dt,
// Picard iteration on the coefficient when tau = 0.
StateVector solve_step(const std::vector<double>& rhs, const StateVector& un,
                       const HistoryBuffer& buf, StepOperator& op, double t_next,
                       PicardStats* stats) {
    StateVector out;
    out.t = t_next;
    if (buf.tau() > 0.0) {
        const StateVector delayed = buf.delayed_state(t_next);
        op.prepare(delayed.values);
        out.values = rhs;
        op.solve(out.values);
        return out;
    }

    // tau = 0: coefficient equals the unknown state
    std::vector<double> c = un.values;
    std::vector<double> sol;
    int it = 0;
    for (; it < kPicardMaxIter; ++it) {
        op.prepare(c);
        sol = rhs;
        op.solve(sol);
        double delta = 0.0;
        for (size_t i = 0; i < sol.size(); ++i)
            delta = std::max(delta, std::abs(sol[i] - c[i]));
        c = sol;
        if (stats) {
            ++stats->total_iterations;
            stats->max_iterations = std::max(stats->max_iterations, it + 1);
        }
        if (delta <= kPicardTol) {
            out.values = std::move(sol);
            return out;
        }
        if (!std::isfinite(delta)) break;
    }
    // stalled: single lagged-coefficient step c = u^n
    if (stats) ++stats->fallbacks;
    op.prepare(un.values);
    out.values = rhs;
    op.solve(out.values);
    return out;
}

} // namespace

StateVector step_bdf1(const StateVector& state_n, const HistoryBuffer& buf, const Workspace& ws,
                      const ModelParams& params, StepOperator& op, const Forcing* forcing,
                      PicardStats* stats) {
    (void)params;
    const double dt = buf.dt();
    const double t_next = state_n.t + dt;
    std::vector<double> rhs;
    fill_rhs_bdf1(state_n, dt, ws.grid, t_next, forcing, rhs);
    return solve_step(rhs, state_n, buf, op, t_next, stats);
}

StateVector step_bdf2(const StateVector& state_n, const StateVector& state_nm1,
                      const HistoryBuffer& buf, const Workspace& ws, const ModelParams& params,
                      StepOperator& op, const Forcing* forcing, PicardStats* stats) {
    (void)params;
    const double dt = buf.dt();
    const double t_next = state_n.t + dt;
    std::vector<double> rhs;
    fill_rhs_bdf2(state_n, state_nm1, dt, ws.grid, t_next, forcing, rhs);
    return solve_step(rhs, state_n, buf, op, t_next, stats);
}

RunOutput run(const RunConfig& config, const Forcing* forcing) {
    config.validate();

    // snap tau to the step lattice when it is within half a step of one
    ModelParams params = config.params;
    RunOutput out;
    out.tau_effective = params.tau;
    if (params.tau > 0.0) {
        const double k = std::round(params.tau / config.dt);
        const double snapped = k * config.dt;
        if (std::abs(params.tau - snapped) < config.dt / 2.0 && snapped != params.tau) {
            out.tau_snapped = true;
            out.tau_effective = snapped;
            params.tau = snapped;
        }
    }

    Workspace ws = Workspace::build(params, config.profile, config.n);
    HistoryBuffer buf = HistoryBuffer::init_from_history(config.history, ws.grid, params, config.dt);

    const long n_steps = std::llround(config.T_end / config.dt);
    out.steps = n_steps;
    out.status.blowup_threshold = kBlowupThreshold;
    out.status.steady_tol = kSteadyTol;

    StateVector u = buf.slot(buf.size() - 1);  // v(., 0)
    u.t = 0.0;
    StateVector u_prev;  // state one step back, for BDF2

    out.norms.push(norms_of(u, ws.d1, ws.d2, ws.quad, ws.a));
    auto want_snapshot = [&](long k) {
        if (k == 0 || k == n_steps) return true;
        return config.snapshot_every > 0 && k % config.snapshot_every == 0;
    };
    if (want_snapshot(0)) out.snapshots.push_back({0.0, u.values});

    StepOperator op1(ws, params, 1.0 / config.dt);
    std::optional<StepOperator> op2;
    if (config.bdf_order == 2) op2.emplace(ws, params, 1.5 / config.dt);

    const long steady_window = std::llround(kSteadyWindow / config.dt);
    long steady_run = 0;
    bool steady_seen = false;

    for (long k = 1; k <= n_steps; ++k) {
        StateVector u_next;
        if (config.bdf_order == 2 && k >= 2)
            u_next = step_bdf2(u, u_prev, buf, ws, params, *op2, forcing, &out.picard);
        else
            u_next = step_bdf1(u, buf, ws, params, op1, forcing, &out.picard);
        u_next.t = static_cast<double>(k) * config.dt;

        double maxabs = 0.0;
        bool finite = true;
        for (double v : u_next.values) {
            if (!std::isfinite(v)) {
                finite = false;
                break;
            }
            maxabs = std::max(maxabs, std::abs(v));
        }
        if (!finite) {
            out.status.state = RunStatus::State::diverged;
            out.status.t_event = u_next.t;
            out.steps = k - 1;
            return out;
        }

        buf.push(u_next);
        out.norms.push(norms_of(u_next, ws.d1, ws.d2, ws.quad, ws.a));
        if (want_snapshot(k)) out.snapshots.push_back({u_next.t, u_next.values});

        if (maxabs > kBlowupThreshold) {
            out.status.state = RunStatus::State::diverged;
            out.status.t_event = u_next.t;
            out.steps = k;
            return out;
        }

        if (!steady_seen) {
            std::vector<double> diff(u_next.values.size());
            for (size_t i = 0; i < diff.size(); ++i) diff[i] = u_next.values[i] - u.values[i];
            const double rate = ws.quad.norm(diff) / config.dt;
            steady_run = rate < kSteadyTol ? steady_run + 1 : 0;
            if (steady_run >= steady_window) {
                steady_seen = true;
                out.status.state = RunStatus::State::steady;
                out.status.t_event = u_next.t;
                out.status.residual = out.norms.l2_u.back();
            }
        }

        u_prev = std::move(u);
        u = std::move(u_next);
    }
    return out;
}

} // namespace disp
