#include "analysis.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace disp {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;
const double kInf = std::numeric_limits<double>::infinity();
const double kNaN = std::numeric_limits<double>::quiet_NaN();
} // namespace

void NormSeries::push(const NormRow& r) {
    t.push_back(r.t);
    l2_u.push_back(r.l2_u);
    h1_u.push_back(r.h1_u);
    h2_u.push_back(r.h2_u);
    weighted.push_back(r.weighted);
}

NormRow NormSeries::row(std::size_t i) const {
    return {t[i], l2_u[i], h1_u[i], h2_u[i], weighted[i]};
}

NormRow norms_of(const StateVector& state, const BandedOperator& d1, const BandedOperator& d2,
                 const Quadrature& quad, std::span<const double> a_samples) {
    NormRow r;
    r.t = state.t;
    r.l2_u = quad.norm(state.values);
    std::vector<double> work(state.values.size());
    d1.apply(state.values, work);
    r.h1_u = quad.norm(work);
    d2.apply(state.values, work);
    r.h2_u = quad.norm(work);
    double q = 0.0;
    for (std::size_t i = 0; i < state.values.size(); ++i)
        q += quad.weights[i] * a_samples[i] * state.values[i] * state.values[i];
    r.weighted = std::copysign(std::sqrt(std::abs(q)), q);
    return r;
}

WirtingerRatios wirtinger_check(const NormRow& row, double ell) {
    WirtingerRatios w;
    if (row.h1_u > 0.0) w.r1 = row.l2_u * row.l2_u * kPi2 / (ell * ell * row.h1_u * row.h1_u);
    if (row.h2_u > 0.0) w.r2 = row.h1_u * row.h1_u * kPi2 / (ell * ell * row.h2_u * row.h2_u);
    return w;
}

double compute_gamma(double p, double a0, double mu, double nu, double ell) {
    if (!(p > 0.0 && p <= 1.0)) throw HypothesisError("gamma requires p in (0, 1]");
    if (!(a0 > 0.0)) throw HypothesisError("gamma requires a0 > 0");
    const double root = std::sqrt(a0);
    const double denom = 4.0 * p * mu * root - nu * nu;
    if (!(denom > 0.0))
        throw HypothesisError("hypothesis nu^2 < 4 p mu sqrt(a0) fails: " +
                              std::to_string(nu * nu) + " >= " + std::to_string(4.0 * p * mu * root));
    return 4.0 * p * kPi2 * root / (ell * denom);
}

HistoryNorms history_norms(const HistorySpec& spec, const SpatialGrid& grid,
                           const ModelParams& params, const BandedOperator& d1,
                           const BandedOperator& d2, const Quadrature& quad, double dt) {
    HistoryNorms hn;
    std::vector<double> work(static_cast<size_t>(grid.n));

    const StateVector v0 = sample_history(spec, grid, params, 0.0);
    hn.v0_sq = quad.inner(v0.values, v0.values);
    d2.apply(v0.values, work);
    hn.vxx0_sq = quad.inner(work, work);

    if (spec.kind() == HistorySpec::Kind::tabulated) {
        const auto& stamps = spec.stamps();
        std::vector<double> vx_sq(stamps.size());
        for (std::size_t j = 0; j < stamps.size(); ++j) {
            d1.apply(spec.slots()[j], work);
            vx_sq[j] = quad.inner(work, work);
        }
        hn.sup_vx = std::sqrt(*std::max_element(vx_sq.begin(), vx_sq.end()));
        double acc = 0.0;
        for (std::size_t j = 1; j < stamps.size(); ++j)
            acc += 0.5 * (vx_sq[j - 1] + vx_sq[j]) * (stamps[j] - stamps[j - 1]);
        hn.vx_sq_tau = acc;
        const double s_front = stamps.front();
        auto front_val = vx_sq.front();
        hn.vx_sq_at = [stamps, vx_sq, s_front, front_val](double s) {
            if (s <= s_front) return front_val;
            if (s >= stamps.back()) return vx_sq.back();
            std::size_t j = 0;
            while (j + 1 < stamps.size() && stamps[j + 1] < s) ++j;
            const double w = (s - stamps[j]) / (stamps[j + 1] - stamps[j]);
            return (1.0 - w) * vx_sq[j] + w * vx_sq[j + 1];
        };
        return hn;
    }

    // separable / constant-in-s: ||v_x(s)||^2 = psi(s)^2 ||phi_x||^2
    std::vector<double> phi_samples(static_cast<size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) phi_samples[static_cast<size_t>(i)] = spec.phi()(grid.node(i));
    d1.apply(phi_samples, work);
    const double phix_sq = quad.inner(work, work);

    const bool constant = spec.kind() == HistorySpec::Kind::constant_in_s;
    auto psi = spec.psi();
    hn.vx_sq_at = [constant, psi, phix_sq](double s) {
        if (constant) return phix_sq;
        const double v = psi(s);
        return v * v * phix_sq;
    };

    if (constant) {
        hn.sup_vx = std::sqrt(phix_sq);
        hn.vx_sq_tau = params.tau * phix_sq;
        return hn;
    }

    // trapezoid over the slot lattice s = -k dt down to -tau
    double sup_sq = 0.0, acc = 0.0, prev = hn.vx_sq_at(0.0);
    sup_sq = prev;
    double s_prev = 0.0;
    for (long k = 1;; ++k) {
        double s = -static_cast<double>(k) * dt;
        bool last = false;
        if (s <= -params.tau) {
            s = -params.tau;
            last = true;
        }
        const double cur = hn.vx_sq_at(s);
        sup_sq = std::max(sup_sq, cur);
        acc += 0.5 * (prev + cur) * (s_prev - s);
        prev = cur;
        s_prev = s;
        if (last || params.tau == 0.0) break;
    }
    hn.sup_vx = std::sqrt(sup_sq);
    hn.vx_sq_tau = acc;
    return hn;
}

MValue compute_M(const HistoryNorms& hn, double gamma, double ell) {
    MValue m;
    const double P = hn.v0_sq + hn.vxx0_sq;
    const double S = hn.sup_vx;
    if (P <= 0.0) {
        m.value = S;
        m.log_value = S > 0.0 ? std::log(S) : -kInf;
        m.log_sqrt_term = -kInf;
        return m;
    }
    const double E = gamma * hn.vx_sq_tau + gamma * ell * ell / kPi2 * hn.v0_sq;
    m.log_sqrt_term = 0.5 * (std::log(P) + E);
    const double log4term = std::log(4.0) + m.log_sqrt_term;
    if (log4term > 700.0) {
        m.overflow = true;
        m.value = kInf;
        m.log_value = log4term;  // the sup term is negligible against e^700
        return m;
    }
    m.value = S + 4.0 * std::exp(m.log_sqrt_term);
    m.log_value = std::log(m.value);
    return m;
}

TauInterval compute_tau_interval(double M, double nu, double mu, double ell, double sup_a) {
    if (!(M > 0.0))
        throw HypothesisError("tau interval is degenerate for M = 0 (zero history needs no bound)");

    TauInterval ti;
    if (std::isinf(M) || M > 1e60) {
        // asymptotics for enormous M: both roots collapse onto 0
        if (std::isinf(M)) {
            ti.tau1 = -0.0;
            ti.tau2 = 0.0;
            return ti;
        }
        const double R = std::sqrt(mu * mu * ell * ell + 12.0 * nu * nu * ell * ell * ell * ell / kPi2);
        ti.tau2 = 2.0 * nu * nu / (M * M * (mu * ell + R));
        ti.tau1 = -(mu * ell + R) * kPi2 / (6.0 * ell * ell * ell * ell * M * M);
        return ti;
    }

    const double M2 = M * M, M4 = M2 * M2;
    const double ell4 = ell * ell * ell * ell;
    const double A = 3.0 * (ell4 * M4 / kPi2 + (nu * nu * ell + sup_a * sup_a * ell4 * ell / (kPi2 * kPi2)) * M2);
    const double B = mu * ell * M2;
    const double rad = std::sqrt(B * B + 4.0 * A * nu * nu);
    ti.tau2 = 2.0 * nu * nu / (B + rad);  // cancellation-free form of (-B + rad) / (2A)
    ti.tau1 = -(B + rad) / (2.0 * A);
    return ti;
}

OmegaPair compute_omega(double tau, double M, double nu, double mu, double ell, double sup_a) {
    if (!(tau >= 0.0)) throw HypothesisError("omega requires tau >= 0");
    const double M2 = M * M, M4 = M2 * M2;
    const double ell4 = ell * ell * ell * ell;
    const double radicand =
        tau * ell *
        ((3.0 * ell * ell * ell * tau / kPi2) * M4 +
         (mu + 3.0 * nu * nu * tau + 3.0 * sup_a * sup_a * ell4 * tau / (kPi2 * kPi2)) * M2);
    OmegaPair op;
    op.omega = nu - std::sqrt(radicand);
    const double guard = 1e-12 * std::max(1.0, nu);
    if (op.omega < -guard)
        throw HypothesisError("tau = " + std::to_string(tau) +
                              " exceeds tau2: omega is negative");
    op.omega_tilde = std::min(op.omega * kPi2 / (ell * ell), mu);
    return op;
}

namespace {

struct SigmaCondition {
    const HistoryNorms* hn;
    double gamma, M, nu, mu, ell, sup_a, ln_rhs, lnP;

    // ln of the left-hand side at delay tau with the running integral I(tau);
    // +inf encodes an automatic failure (omega_tilde <= 0 with v(0) != 0)
    double lhs_ln(double tau, double integral) const {
        const double M2 = M * M, M4 = M2 * M2;
        const double ell4 = ell * ell * ell * ell;
        const double radicand =
            tau * ell *
            ((3.0 * ell * ell * ell * tau / kPi2) * M4 +
             (mu + 3.0 * nu * nu * tau + 3.0 * sup_a * sup_a * ell4 * tau / (kPi2 * kPi2)) * M2);
        const double omega = nu - std::sqrt(radicand);
        const double wt = std::min(omega * kPi2 / (ell * ell), mu);
        double inv_term;
        if (hn->v0_sq <= 0.0)
            inv_term = 0.0;
        else if (wt <= 0.0)
            return kInf;
        else
            inv_term = ell * ell * hn->v0_sq / (kPi2 * wt);
        return lnP + gamma * std::exp(wt * tau) * (integral + inv_term);
    }

    bool holds(double tau, double integral) const { return lhs_ln(tau, integral) <= ln_rhs; }
};

} // namespace

SigmaResult compute_sigma_tau_hat(const HistoryNorms& hn, double gamma, const MValue& M,
                                  double nu, double mu, double ell, double sup_a) {
    const double P = hn.v0_sq + hn.vxx0_sq;
    if (!(P > 0.0))
        throw HypothesisError("sigma scan needs a nonzero history");
    const TauInterval ti = compute_tau_interval(M.value, nu, mu, ell, sup_a);

    SigmaResult out;
    out.tau_hat = 0.0;
    if (!(ti.tau2 > 0.0)) return out;

    SigmaCondition cond{&hn, gamma, M.value, nu, mu, ell, sup_a,
                        2.0 * M.log_value - std::log(4.0), std::log(P)};

    constexpr int kLattice = 10000;
    const double step = ti.tau2 / kLattice;
    auto f = [&](double tau) { return hn.vx_sq_at(-tau); };

    double integral = 0.0;
    double tau_prev = 0.0, f_prev = f(0.0), integral_prev = 0.0;
    if (!cond.holds(0.0, 0.0)) {
        out.holds_at_zero = false;
        out.sigma = 0.0;
        out.tau_hat = 0.0;
        return out;
    }
    out.holds_at_zero = true;

    double sigma = ti.tau2;
    bool found_failure = false;
    for (int k = 1; k <= kLattice; ++k) {
        const double tau = step * k;
        const double fk = f(tau);
        integral += 0.5 * (f_prev + fk) * step;
        if (!cond.holds(tau, integral)) {
            // bisection refinement of the prefix boundary in (tau_prev, tau]
            double lo = tau_prev, hi = tau;
            double integral_lo = integral_prev;
            for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, ti.tau2); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double seg = integral_lo + 0.5 * (f(lo) + f(mid)) * (mid - lo);
                if (cond.holds(mid, seg)) {
                    integral_lo = seg;
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            sigma = lo;
            found_failure = true;
            break;
        }
        tau_prev = tau;
        f_prev = fk;
        integral_prev = integral;
    }
    (void)found_failure;
    out.sigma = sigma;
    out.tau_hat = std::min(sigma, ti.tau2);
    return out;
}

StabilityReport build_stability_report(const ModelParams& params, const HypothesisReport& hyp,
                                       const HistoryNorms& hn, double p) {
    StabilityReport rep;
    rep.p = p;
    rep.flag_a_positive = hyp.positive_above_a0;
    rep.flag_a_concave = hyp.concave_second_derivative;
    rep.flag_a_fourth = hyp.nonneg_fourth_derivative;
    rep.delta3 = hyp.sup_norm > 0.0 ? 1.0 / (6.0 * hyp.sup_norm) : kNaN;
    rep.gamma = rep.M = rep.omega = rep.omega_tilde = kNaN;
    rep.tau1 = rep.tau2 = rep.sigma = rep.tau_hat = kNaN;
    rep.M_log = kNaN;

    try {
        rep.gamma = compute_gamma(p, hyp.a0, params.mu, params.nu, params.ell);
        rep.flag_nu_small = true;
    } catch (const HypothesisError&) {
        rep.flag_nu_small = false;
        return rep;
    }

    const MValue m = compute_M(hn, rep.gamma, params.ell);
    rep.M = m.value;
    rep.M_log = m.log_value;
    rep.M_overflow = m.overflow;
    if (!(m.value > 0.0)) return rep;  // zero history: nothing to bound

    try {
        const TauInterval ti =
            compute_tau_interval(m.value, params.nu, params.mu, params.ell, hyp.sup_norm);
        rep.tau1 = ti.tau1;
        rep.tau2 = ti.tau2;
    } catch (const HypothesisError&) {
        return rep;
    }

    try {
        const OmegaPair op =
            compute_omega(params.tau, m.value, params.nu, params.mu, params.ell, hyp.sup_norm);
        rep.omega = op.omega;
        rep.omega_tilde = op.omega_tilde;
    } catch (const HypothesisError&) {
        // tau beyond tau2; constants stay NaN, flags record the failure
    }

    try {
        const SigmaResult sr =
            compute_sigma_tau_hat(hn, rep.gamma, m, params.nu, params.mu, params.ell, hyp.sup_norm);
        rep.sigma = sr.sigma;
        rep.tau_hat = sr.tau_hat;
    } catch (const HypothesisError&) {
    }

    rep.flag_tau_admissible = std::isfinite(rep.tau_hat) && params.tau < rep.tau_hat;
    return rep;
}

std::optional<long> theorem_bound_check(const NormSeries& series, const StabilityReport& report,
                                        double tau) {
    if (!report.hypotheses() || !(tau < report.tau_hat) || !std::isfinite(report.omega_tilde))
        return std::nullopt;
    constexpr double kTol = 1e-6;
    const double m2_quarter = report.M * report.M / 4.0;
    long violations = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double bound = m2_quarter * std::exp(-report.omega_tilde * series.t[i]);
        const double h2sq = series.h2_u[i] * series.h2_u[i];
        if (h2sq > bound * (1.0 + kTol)) ++violations;
    }
    return violations;
}

double dissipation_check(const NormSeries& series, double omega, double mu, double dt) {
    if (series.size() < 2) return 0.0;
    const double tol = 10.0 * dt;
    long violations = 0;
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        const double lhs =
            (series.l2_u[i + 1] * series.l2_u[i + 1] - series.l2_u[i] * series.l2_u[i]) / dt;
        const double rhs = -2.0 * omega * series.h1_u[i] * series.h1_u[i] -
                           2.0 * mu * series.h2_u[i] * series.h2_u[i] + tol;
        if (lhs > rhs) ++violations;
    }
    return static_cast<double>(violations) / static_cast<double>(series.size() - 1);
}

DecayFit fit_decay(std::span<const double> t, std::span<const double> y, double t_a, double t_b) {
    if (t.size() != y.size()) throw ConfigError("fit_decay: length mismatch");
    const double slack = 1e-12 * std::max(1.0, std::abs(t_b));
    std::vector<double> ts, zs;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_a - slack || t[i] > t_b + slack) continue;
        if (!(y[i] > 0.0))
            throw RangeError("fit_decay: nonpositive value at t = " + std::to_string(t[i]) +
                             "; shrink the window");
        ts.push_back(t[i]);
        zs.push_back(std::log(y[i]));
    }
    if (ts.size() < 2) throw RangeError("fit_decay: window holds fewer than 2 samples");

    const double n = static_cast<double>(ts.size());
    double tm = 0.0, zm = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        tm += ts[i];
        zm += zs[i];
    }
    tm /= n;
    zm /= n;
    double stt = 0.0, stz = 0.0, szz = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double dt_ = ts[i] - tm, dz = zs[i] - zm;
        stt += dt_ * dt_;
        stz += dt_ * dz;
        szz += dz * dz;
    }
    DecayFit fit;
    fit.t_a = t_a;
    fit.t_b = t_b;
    fit.slope = stt > 0.0 ? stz / stt : 0.0;
    fit.intercept = zm - fit.slope * tm;
    if (szz <= 0.0) {
        fit.r_squared = 1.0;  // zero-variance convention: constant series
    } else {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const double r = zs[i] - (fit.intercept + fit.slope * ts[i]);
            ss_res += r * r;
        }
        fit.r_squared = 1.0 - ss_res / szz;
    }
    return fit;
}

} // namespace disp
