#ifndef DISP_DELAYLINE_HPP
#define DISP_DELAYLINE_HPP

#include "discretization.hpp"
#include "model.hpp"
#include "state.hpp"

#include <deque>

namespace disp {

/// Ring of time-stamped states covering the most recent delay window
/// [newest - tau, newest]. Stamps advance by exactly dt; the buffer evicts
/// slots as they age out, so it never holds more than ceil(tau/dt) + 2
/// states. Single writer; reads between pushes only.
class HistoryBuffer {
public:
    /// Pre-fills slots with samples of v at s = -k dt, k = 0..ceil(tau/dt).
    /// Throws ConfigError when 0 < tau < dt (the integrator needs the
    /// delayed value to predate the unknown step).
    static HistoryBuffer init_from_history(const HistorySpec& spec, const SpatialGrid& grid,
                                           const ModelParams& params, double dt);

    /// Appends a state stamped newest + dt. Throws SequenceError otherwise.
    void push(StateVector state);

    /// State at time t - tau: the stored slot when the query hits the step
    /// lattice, linear interpolation between bracketing slots otherwise.
    /// Throws RangeError when t - tau predates the oldest slot.
    StateVector delayed_state(double t) const;

    double dt() const { return dt_; }
    double tau() const { return tau_; }
    std::size_t size() const { return ring_.size(); }
    std::size_t capacity() const { return capacity_; }
    double newest_time() const { return static_cast<double>(newest_idx_) * dt_; }
    double oldest_time() const {
        return static_cast<double>(newest_idx_ - static_cast<long>(ring_.size()) + 1) * dt_;
    }
    /// True when tau is not a lattice multiple of dt, so lookups interpolate.
    bool interpolating() const { return interpolating_; }

    const StateVector& slot(std::size_t j) const { return ring_[j]; }  // oldest first

private:
    HistoryBuffer() = default;

    double dt_ = 0.0, tau_ = 0.0;
    long newest_idx_ = 0;          // newest stamp = newest_idx_ * dt
    std::size_t capacity_ = 0;
    bool interpolating_ = false;
    std::deque<StateVector> ring_;
};

} // namespace disp

#endif
