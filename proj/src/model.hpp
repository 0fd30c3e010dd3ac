#ifndef DISP_MODEL_HPP
#define DISP_MODEL_HPP

#include "state.hpp"

#include <functional>
#include <string>
#include <vector>

namespace disp {

struct SpatialGrid;

/// Physical constants of the delayed dispersive model:
///   u_t - nu u_xx + mu u_xxxx + u(x, t - tau) u_x + a(x) u = 0
/// on (0, ell), clamped at both ends.
struct ModelParams {
    double nu = 0.01;   // diffusion coefficient
    double mu = 0.001;  // dispersion coefficient
    double tau = 0.0;   // time delay; tau = 0 selects the undelayed regime
    double ell = 1.0;   // domain length

    void validate() const;  // throws ConfigError
};

enum class ProfileFamily { constant, affine, sinusoidal, combined, tabulated };

const char* family_name(ProfileFamily f);
ProfileFamily family_from_name(const std::string& s);

/// Damping coefficient a(x) on [0, ell]. Analytic families carry closed-form
/// derivatives; the extrema a0 = min a and sup_norm = max |a| are recomputed
/// from the closed form at construction, never taken from the caller.
class DampingProfile {
public:
    static DampingProfile constant(double c0);
    static DampingProfile affine(double b0, double c1, double ell);
    static DampingProfile sinusoidal(double b0, double c2, int k, double ell);
    static DampingProfile combined(double b0, double c1, double c2, int k, double ell);
    /// Uniform samples over [0, ell] including both endpoints (>= 5 samples
    /// required by validate_damping; evaluation interpolates linearly).
    static DampingProfile tabulated(std::vector<double> samples, double ell);

    double value(double x) const;
    double second_derivative(double x) const;   // analytic families only
    double fourth_derivative(double x) const;   // analytic families only
    bool analytic() const { return family_ != ProfileFamily::tabulated; }

    double a0() const { return a0_; }
    double sup_norm() const { return sup_norm_; }
    double ell() const { return ell_; }

    ProfileFamily family() const { return family_; }
    double b0() const { return b0_; }
    double c0() const { return b0_; }
    double c1() const { return c1_; }
    double c2() const { return c2_; }
    int k() const { return k_; }
    const std::vector<double>& samples() const { return table_; }

private:
    DampingProfile() = default;
    void recompute_extrema();

    ProfileFamily family_ = ProfileFamily::constant;
    double b0_ = 0.0, c1_ = 0.0, c2_ = 0.0;
    int k_ = 1;
    double ell_ = 1.0;
    std::vector<double> table_;
    double a0_ = 0.0, sup_norm_ = 0.0;
};

/// Sign checks behind the exponential-stability theorem: a bounded below by
/// a positive constant, concave second derivative, nonnegative fourth
/// derivative. Failures are recorded, not fatal; the solver simulates any
/// bounded profile.
struct HypothesisReport {
    bool positive_above_a0 = false;
    bool concave_second_derivative = false;
    bool nonneg_fourth_derivative = false;
    double a0 = 0.0;
    double sup_norm = 0.0;

    bool all() const {
        return positive_above_a0 && concave_second_derivative && nonneg_fourth_derivative;
    }
};

HypothesisReport validate_damping(const DampingProfile& profile, const SpatialGrid& grid);

std::vector<double> sample_profile(const DampingProfile& profile, const SpatialGrid& grid);

/// Space profile phi(x) with a name so configs can round-trip. The clamped
/// consistency of phi at the endpoints is recorded, not enforced: the
/// canonical sin(pi x) initial data has phi'(0) != 0 and is simulated as is.
struct SpaceProfile {
    std::string name;      // "sin_pi", "clamped_poly", "zero", "custom"
    double amplitude = 1.0;
    std::function<double(double)> fn;

    static SpaceProfile sin_pi(double amplitude, double ell);
    static SpaceProfile clamped_poly(double amplitude, double ell);  // A x^2 (ell-x)^2
    static SpaceProfile zero();
    static SpaceProfile custom(std::function<double(double)> fn);

    double operator()(double x) const { return fn(x); }
};

struct TimeProfile {
    std::string name;      // "one", "exp", "custom"
    double rate = 0.0;
    std::function<double(double)> fn;

    static TimeProfile one();
    static TimeProfile exp_rate(double rate);  // psi(s) = exp(rate * s)
    static TimeProfile custom(std::function<double(double)> fn);

    double operator()(double s) const { return fn(s); }
};

/// Initial history v(x, s) on [-tau, 0].
class HistorySpec {
public:
    enum class Kind { constant_in_s, separable, tabulated };

    /// v(x, s) = phi(x) for all s.
    static HistorySpec constant_profile(SpaceProfile phi);
    /// v(x, s) = phi(x) psi(s).
    static HistorySpec separable(SpaceProfile phi, TimeProfile psi);
    /// Slots (s_j, values at interior nodes), s_j increasing up to 0.
    static HistorySpec tabulated(std::vector<double> stamps,
                                 std::vector<std::vector<double>> slots);

    Kind kind() const { return kind_; }
    const SpaceProfile& phi() const { return phi_; }
    const TimeProfile& psi() const { return psi_; }
    const std::vector<double>& stamps() const { return stamps_; }
    const std::vector<std::vector<double>>& slots() const { return slots_; }

    double value(double x, double s) const;   // analytic kinds only

private:
    Kind kind_ = Kind::constant_in_s;
    SpaceProfile phi_;
    TimeProfile psi_;
    std::vector<double> stamps_;
    std::vector<std::vector<double>> slots_;
};

/// Samples v(., s) at the interior nodes. Throws RangeError unless
/// -tau <= s <= 0.
StateVector sample_history(const HistorySpec& spec, const SpatialGrid& grid,
                           const ModelParams& params, double s);

} // namespace disp

#endif
