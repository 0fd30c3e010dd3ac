#include "delayline.hpp"

#include "errors.hpp"

#include <cmath>
#include <string>

namespace disp {

namespace {
// ceil(tau/dt) with lattice-aligned ratios snapped to the exact integer
long delay_steps(double tau, double dt) {
    const double r = tau / dt;
    const double rounded = std::round(r);
    if (std::abs(r - rounded) < 1e-9 * std::max(1.0, std::abs(r)))
        return static_cast<long>(rounded);
    return static_cast<long>(std::ceil(r));
}
} // namespace

HistoryBuffer HistoryBuffer::init_from_history(const HistorySpec& spec, const SpatialGrid& grid,
                                               const ModelParams& params, double dt) {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    if (params.tau > 0.0 && dt > params.tau)
        throw ConfigError("dt = " + std::to_string(dt) + " exceeds tau = " +
                          std::to_string(params.tau) +
                          "; the delayed value must predate the unknown step");

    HistoryBuffer buf;
    buf.dt_ = dt;
    buf.tau_ = params.tau;
    buf.newest_idx_ = 0;

    const long m = delay_steps(params.tau, dt);
    buf.capacity_ = static_cast<std::size_t>(m) + 2;
    const double lattice_gap = std::abs(params.tau - static_cast<double>(m) * dt);
    buf.interpolating_ = params.tau > 0.0 && lattice_gap > 1e-9 * std::max(1.0, params.tau);

    for (long k = m; k >= 0; --k) {
        const double s = std::max(-params.tau, -static_cast<double>(k) * dt);
        StateVector sv = sample_history(spec, grid, params, s);
        sv.t = -static_cast<double>(k) * dt;  // slot lives on the step lattice
        buf.ring_.push_back(std::move(sv));
    }
    return buf;
}

void HistoryBuffer::push(StateVector state) {
    const double expected = static_cast<double>(newest_idx_ + 1) * dt_;
    if (std::abs(state.t - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
        throw SequenceError("push: expected stamp " + std::to_string(expected) + ", got " +
                            std::to_string(state.t));
    ++newest_idx_;
    state.t = expected;
    ring_.push_back(std::move(state));
    const long m = delay_steps(tau_, dt_);
    const long oldest_keep = newest_idx_ - (m + 1);
    while (!ring_.empty() &&
           std::llround(ring_.front().t / dt_) < oldest_keep)
        ring_.pop_front();
}

StateVector HistoryBuffer::delayed_state(double t) const {
    const double s = t - tau_;
    const double oldest = oldest_time();
    const double newest = newest_time();
    const double slack = 1e-9 * std::max(1.0, std::abs(s));
    if (s < oldest - slack)
        throw RangeError("delayed_state: t - tau = " + std::to_string(s) +
                         " predates the oldest stored slot " + std::to_string(oldest));
    if (s > newest + slack)
        throw RangeError("delayed_state: t - tau = " + std::to_string(s) +
                         " is ahead of the newest stored slot " + std::to_string(newest));

    const double r = s / dt_;
    const double rounded = std::round(r);
    const long oldest_idx = newest_idx_ - static_cast<long>(ring_.size()) + 1;
    if (std::abs(r - rounded) < 1e-9 * std::max(1.0, std::abs(r))) {
        const long k = static_cast<long>(rounded);
        const long j = std::min(std::max(k - oldest_idx, 0L),
                                static_cast<long>(ring_.size()) - 1);
        return ring_[static_cast<std::size_t>(j)];
    }

    const long k = static_cast<long>(std::floor(r));
    const long j0 = std::min(std::max(k - oldest_idx, 0L), static_cast<long>(ring_.size()) - 2);
    const auto& lo = ring_[static_cast<std::size_t>(j0)];
    const auto& hi = ring_[static_cast<std::size_t>(j0 + 1)];
    const double w = (s - lo.t) / (hi.t - lo.t);
    StateVector out;
    out.t = s;
    out.values.resize(lo.values.size());
    for (std::size_t i = 0; i < lo.values.size(); ++i)
        out.values[i] = (1.0 - w) * lo.values[i] + w * hi.values[i];
    return out;
}

} // namespace disp
