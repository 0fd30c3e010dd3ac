#ifndef DISP_ANALYSIS_HPP
#define DISP_ANALYSIS_HPP

#include "discretization.hpp"
#include "model.hpp"
#include "state.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace disp {

struct NormRow {
    double t = 0.0;
    double l2_u = 0.0;     // ||u||
    double h1_u = 0.0;     // ||u_x||
    double h2_u = 0.0;     // ||u_xx||
    double weighted = 0.0; // ||sqrt(a) u||; signed sqrt when the form is negative
};

struct NormSeries {
    std::vector<double> t, l2_u, h1_u, h2_u, weighted;

    std::size_t size() const { return t.size(); }
    void push(const NormRow& r);
    NormRow row(std::size_t i) const;
};

NormRow norms_of(const StateVector& state, const BandedOperator& d1, const BandedOperator& d2,
                 const Quadrature& quad, std::span<const double> a_samples);

/// Discrete Wirtinger ratios r1 = ||u||^2 pi^2 / (ell^2 ||u_x||^2) and
/// r2 = ||u_x||^2 pi^2 / (ell^2 ||u_xx||^2); zero denominators report 0.
struct WirtingerRatios {
    double r1 = 0.0, r2 = 0.0;
};
WirtingerRatios wirtinger_check(const NormRow& row, double ell);

/// gamma = 4 p pi^2 sqrt(a0) / (ell (4 p mu sqrt(a0) - nu^2)).
/// Throws HypothesisError unless nu^2 < 4 p mu sqrt(a0) with a0 > 0.
double compute_gamma(double p, double a0, double mu, double nu, double ell);

/// History norms feeding the stability constants; all quantities are
/// discrete (grid operators + trapezoid over the slot lattice).
struct HistoryNorms {
    double v0_sq = 0.0;    // ||v(0)||^2
    double vxx0_sq = 0.0;  // ||v_xx(0)||^2
    double sup_vx = 0.0;   // sup over s in [-tau, 0] of ||v_x(s)||
    double vx_sq_tau = 0.0;  // integral over [-tau, 0] of ||v_x(s)||^2
    /// s |-> ||v_x(s)||^2 for s <= 0, used by the sigma scan; histories given
    /// on a finite window are extended by their boundary value.
    std::function<double(double)> vx_sq_at;
};

HistoryNorms history_norms(const HistorySpec& spec, const SpatialGrid& grid,
                           const ModelParams& params, const BandedOperator& d1,
                           const BandedOperator& d2, const Quadrature& quad, double dt);

/// M = sup ||v_x|| + 4 sqrt[(||v(0)||^2 + ||v_xx(0)||^2) exp(E)] with
/// E = gamma ||v_x||^2_tau + (gamma ell^2 / pi^2) ||v(0)||^2. The bracket is
/// evaluated in log space; when it overflows double range, value is +inf and
/// the logarithm carries the information.
struct MValue {
    double value = 0.0;
    double log_value = 0.0;      // ln M (finite even when value overflows)
    double log_sqrt_term = 0.0;  // 0.5 (ln P + E), the bracket's log
    bool overflow = false;
};

MValue compute_M(const HistoryNorms& hn, double gamma, double ell);

/// Roots of the closed-form quadratic delimiting the admissible delay:
/// tau1 < 0 < tau2 when nu > 0; tau2 = 0 when nu = 0.
/// Throws HypothesisError for M = 0 (degenerate: zero history).
struct TauInterval {
    double tau1 = 0.0, tau2 = 0.0;
};
TauInterval compute_tau_interval(double M, double nu, double mu, double ell, double sup_a);

/// omega = nu - sqrt(tau ell [ (3 ell^3 tau / pi^2) M^4
///         + (mu + 3 nu^2 tau + 3 sup_a^2 ell^4 tau / pi^4) M^2 ])
/// and omega_tilde = min{ omega (pi/ell)^2, mu }.
/// Throws HypothesisError when tau exceeds tau2 (omega would be negative).
struct OmegaPair {
    double omega = 0.0, omega_tilde = 0.0;
};
OmegaPair compute_omega(double tau, double M, double nu, double mu, double ell, double sup_a);

/// sigma = largest kappa such that
///   (||v(0)||^2 + ||v_xx(0)||^2)
///     exp[gamma e^{wt tau} (||v_x||^2_tau + ell^2 (pi^2 wt)^-1 ||v(0)||^2)]
///   <= M^2 / 4   for all tau in [0, kappa],
/// found by a 10^4-point prefix scan over [0, tau2] plus bisection
/// refinement of the boundary. tau_hat = min{sigma, tau2}.
struct SigmaResult {
    double sigma = 0.0;
    double tau_hat = 0.0;
    bool holds_at_zero = false;
};
SigmaResult compute_sigma_tau_hat(const HistoryNorms& hn, double gamma, const MValue& M,
                                  double nu, double mu, double ell, double sup_a);

/// Every Theorem constant for one run, plus the hypothesis flags. Fields are
/// NaN when the corresponding hypothesis fails upstream.
struct StabilityReport {
    double p = 1.0;
    double gamma = 0.0;
    double M = 0.0;
    double omega = 0.0;
    double omega_tilde = 0.0;
    double tau1 = 0.0;
    double tau2 = 0.0;
    double sigma = 0.0;
    double tau_hat = 0.0;
    double delta1 = 1.0 / 6.0;
    double delta2 = 1.0 / 6.0;
    double delta3 = 0.0;  // 1 / (6 ||a||_inf)

    bool flag_a_positive = false;
    bool flag_a_concave = false;
    bool flag_a_fourth = false;
    bool flag_nu_small = false;   // nu^2 < 4 p mu sqrt(a0)
    bool flag_tau_admissible = false;  // tau < tau_hat

    double M_log = 0.0;
    bool M_overflow = false;

    bool hypotheses() const {
        return flag_a_positive && flag_a_concave && flag_a_fourth && flag_nu_small;
    }
    bool applicable() const { return hypotheses() && flag_tau_admissible; }
};

StabilityReport build_stability_report(const ModelParams& params, const HypothesisReport& hyp,
                                       const HistoryNorms& hn, double p);

/// Counts steps violating ||u_xx(t)||^2 <= (M^2/4) e^{-wt t} (1 + 1e-6).
/// Returns nullopt (not applicable) when the hypotheses fail or
/// tau >= tau_hat.
std::optional<long> theorem_bound_check(const NormSeries& series, const StabilityReport& report,
                                        double tau);

/// Fraction of steps where the discrete derivative of ||u||^2 exceeds
/// -2 omega ||u_x||^2 - 2 mu ||u_xx||^2 + tol with tol = 10 dt.
/// A diagnostic, not a pass/fail gate.
double dissipation_check(const NormSeries& series, double omega, double mu, double dt);

/// Least-squares line through (t, ln y) over [t_a, t_b].
struct DecayFit {
    double t_a = 0.0, t_b = 0.0;
    double slope = 0.0, intercept = 0.0, r_squared = 0.0;
};

/// Throws RangeError naming the offending time when a value in the window
/// is not strictly positive. Constant series report slope 0, r^2 = 1.
DecayFit fit_decay(std::span<const double> t, std::span<const double> y, double t_a, double t_b);

} // namespace disp

#endif
