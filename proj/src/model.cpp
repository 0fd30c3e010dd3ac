#include "model.hpp"

#include "discretization.hpp"
#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace disp {

namespace {
constexpr double kPi = std::numbers::pi;

double lerp_table(const std::vector<double>& y, double ell, double x) {
    const size_t m = y.size();
    const double dx = ell / static_cast<double>(m - 1);
    double u = std::clamp(x / dx, 0.0, static_cast<double>(m - 1));
    const size_t j = std::min(static_cast<size_t>(u), m - 2);
    const double w = u - static_cast<double>(j);
    return (1.0 - w) * y[j] + w * y[j + 1];
}
} // namespace

void ModelParams::validate() const {
    if (!(nu > 0.0)) throw ConfigError("nu must be positive");
    if (!(mu > 0.0)) throw ConfigError("mu must be positive");
    if (!(ell > 0.0)) throw ConfigError("ell must be positive");
    if (!(tau >= 0.0)) throw ConfigError("tau must be non-negative");
}

const char* family_name(ProfileFamily f) {
    switch (f) {
        case ProfileFamily::constant: return "constant";
        case ProfileFamily::affine: return "affine";
        case ProfileFamily::sinusoidal: return "sinusoidal";
        case ProfileFamily::combined: return "combined";
        case ProfileFamily::tabulated: return "tabulated";
    }
    return "?";
}

ProfileFamily family_from_name(const std::string& s) {
    if (s == "constant") return ProfileFamily::constant;
    if (s == "affine") return ProfileFamily::affine;
    if (s == "sinusoidal") return ProfileFamily::sinusoidal;
    if (s == "combined") return ProfileFamily::combined;
    if (s == "tabulated") return ProfileFamily::tabulated;
    throw ConfigError("unknown damping family '" + s + "'");
}

DampingProfile DampingProfile::constant(double c0) {
    DampingProfile p;
    p.family_ = ProfileFamily::constant;
    p.b0_ = c0;
    p.ell_ = 1.0;
    p.recompute_extrema();
    return p;
}

DampingProfile DampingProfile::affine(double b0, double c1, double ell) {
    if (!(ell > 0.0)) throw ConfigError("profile ell must be positive");
    DampingProfile p;
    p.family_ = ProfileFamily::affine;
    p.b0_ = b0;
    p.c1_ = c1;
    p.ell_ = ell;
    p.recompute_extrema();
    return p;
}

DampingProfile DampingProfile::sinusoidal(double b0, double c2, int k, double ell) {
    if (!(ell > 0.0)) throw ConfigError("profile ell must be positive");
    if (k < 1) throw ConfigError("sinusoidal wavenumber k must be >= 1");
    DampingProfile p;
    p.family_ = ProfileFamily::sinusoidal;
    p.b0_ = b0;
    p.c2_ = c2;
    p.k_ = k;
    p.ell_ = ell;
    p.recompute_extrema();
    return p;
}

DampingProfile DampingProfile::combined(double b0, double c1, double c2, int k, double ell) {
    if (!(ell > 0.0)) throw ConfigError("profile ell must be positive");
    if (k < 1) throw ConfigError("combined wavenumber k must be >= 1");
    DampingProfile p;
    p.family_ = ProfileFamily::combined;
    p.b0_ = b0;
    p.c1_ = c1;
    p.c2_ = c2;
    p.k_ = k;
    p.ell_ = ell;
    p.recompute_extrema();
    return p;
}

DampingProfile DampingProfile::tabulated(std::vector<double> samples, double ell) {
    if (!(ell > 0.0)) throw ConfigError("profile ell must be positive");
    if (samples.size() < 2) throw ConfigError("tabulated profile needs at least 2 samples");
    DampingProfile p;
    p.family_ = ProfileFamily::tabulated;
    p.table_ = std::move(samples);
    p.ell_ = ell;
    p.recompute_extrema();
    return p;
}

double DampingProfile::value(double x) const {
    switch (family_) {
        case ProfileFamily::constant: return b0_;
        case ProfileFamily::affine: return b0_ + c1_ * x;
        case ProfileFamily::sinusoidal: return b0_ + c2_ * std::sin(k_ * kPi * x / ell_);
        case ProfileFamily::combined:
            return b0_ + c1_ * x + c2_ * std::sin(k_ * kPi * x / ell_);
        case ProfileFamily::tabulated: return lerp_table(table_, ell_, x);
    }
    return 0.0;
}

double DampingProfile::second_derivative(double x) const {
    if (!analytic()) throw RangeError("second_derivative: tabulated profile has no closed form");
    if (family_ == ProfileFamily::constant || family_ == ProfileFamily::affine) return 0.0;
    const double w = k_ * kPi / ell_;
    return -c2_ * w * w * std::sin(w * x);
}

double DampingProfile::fourth_derivative(double x) const {
    if (!analytic()) throw RangeError("fourth_derivative: tabulated profile has no closed form");
    if (family_ == ProfileFamily::constant || family_ == ProfileFamily::affine) return 0.0;
    const double w = k_ * kPi / ell_;
    return c2_ * w * w * w * w * std::sin(w * x);
}

void DampingProfile::recompute_extrema() {
    if (family_ == ProfileFamily::tabulated) {
        auto [mn, mx] = std::minmax_element(table_.begin(), table_.end());
        a0_ = *mn;
        sup_norm_ = std::max(std::abs(*mn), std::abs(*mx));
        return;
    }
    // candidate points: endpoints plus stationary points of a' (closed form)
    std::vector<double> xs{0.0, ell_};
    if ((family_ == ProfileFamily::sinusoidal || family_ == ProfileFamily::combined) && c2_ != 0.0) {
        const double w = k_ * kPi / ell_;
        const double q = -c1_ / (c2_ * w);  // cos(w x) = q at stationary points
        if (std::abs(q) <= 1.0) {
            const double theta = std::acos(q);
            for (int m = 0; m <= k_ + 1; ++m) {
                for (double th : {theta + 2.0 * kPi * m, -theta + 2.0 * kPi * m}) {
                    const double x = th / w;
                    if (x >= 0.0 && x <= ell_) xs.push_back(x);
                }
            }
        }
    }
    double lo = value(xs[0]), hi = lo;
    for (double x : xs) {
        const double v = value(x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    a0_ = lo;
    sup_norm_ = std::max(std::abs(lo), std::abs(hi));
}

namespace {

// Extremum of c * sin(w x) over [0, L] plus endpoints, exact candidates.
std::pair<double, double> sin_term_range(double c, double w, double L) {
    if (c == 0.0 || w == 0.0) return {0.0, 0.0};
    std::vector<double> xs{0.0, L};
    const int cycles = static_cast<int>(std::ceil(w * L / kPi)) + 1;
    for (int m = 0; m <= cycles; ++m) {
        const double x = (kPi / 2.0 + kPi * m) / w;
        if (x >= 0.0 && x <= L) xs.push_back(x);
    }
    double lo = c * std::sin(w * xs[0]), hi = lo;
    for (double x : xs) {
        const double v = c * std::sin(w * x);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {lo, hi};
}

} // namespace

HypothesisReport validate_damping(const DampingProfile& profile, const SpatialGrid& grid) {
    if (std::abs(profile.ell() - grid.ell) > 1e-12 * std::max(1.0, grid.ell) &&
        profile.family() != ProfileFamily::constant)
        throw ConfigError("damping profile and grid disagree on the domain length");

    HypothesisReport rep;
    rep.a0 = profile.a0();
    rep.sup_norm = profile.sup_norm();
    rep.positive_above_a0 = rep.a0 > 0.0;

    if (profile.analytic()) {
        const double w = profile.k() * kPi / profile.ell();
        // a'' = -c2 w^2 sin(w x); a'''' = c2 w^4 sin(w x)
        const double c2 = (profile.family() == ProfileFamily::sinusoidal ||
                           profile.family() == ProfileFamily::combined)
                              ? profile.c2()
                              : 0.0;
        auto [d2lo, d2hi] = sin_term_range(-c2 * w * w, w, profile.ell());
        auto [d4lo, d4hi] = sin_term_range(c2 * w * w * w * w, w, profile.ell());
        (void)d2lo;
        (void)d4hi;
        const double tol2 = 1e-12 * (1.0 + std::abs(c2) * w * w);
        const double tol4 = 1e-12 * (1.0 + std::abs(c2) * w * w * w * w);
        rep.concave_second_derivative = d2hi <= tol2;
        rep.nonneg_fourth_derivative = d4lo >= -tol4;
        return rep;
    }

    const auto& y = profile.samples();
    if (y.size() < 5)
        throw ConfigError("tabulated profile too short for hypothesis checks (need >= 5 samples)");
    const double dx = profile.ell() / static_cast<double>(y.size() - 1);
    double scale = std::max(1.0, profile.sup_norm());
    const double tol2 = 1e-9 * scale / (dx * dx);
    const double tol4 = 1e-9 * scale / (dx * dx * dx * dx);
    rep.concave_second_derivative = true;
    rep.nonneg_fourth_derivative = true;
    for (size_t j = 1; j + 1 < y.size(); ++j) {
        const double d2 = (y[j - 1] - 2.0 * y[j] + y[j + 1]) / (dx * dx);
        if (d2 > tol2) rep.concave_second_derivative = false;
    }
    for (size_t j = 2; j + 2 < y.size(); ++j) {
        const double d4 =
            (y[j - 2] - 4.0 * y[j - 1] + 6.0 * y[j] - 4.0 * y[j + 1] + y[j + 2]) /
            (dx * dx * dx * dx);
        if (d4 < -tol4) rep.nonneg_fourth_derivative = false;
    }
    return rep;
}

std::vector<double> sample_profile(const DampingProfile& profile, const SpatialGrid& grid) {
    std::vector<double> a(static_cast<size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i)
        a[static_cast<size_t>(i)] = profile.value(grid.node(i));
    return a;
}

SpaceProfile SpaceProfile::sin_pi(double amplitude, double ell) {
    SpaceProfile p;
    p.name = "sin_pi";
    p.amplitude = amplitude;
    p.fn = [amplitude, ell](double x) { return amplitude * std::sin(kPi * x / ell); };
    return p;
}

SpaceProfile SpaceProfile::clamped_poly(double amplitude, double ell) {
    SpaceProfile p;
    p.name = "clamped_poly";
    p.amplitude = amplitude;
    p.fn = [amplitude, ell](double x) {
        const double d = ell - x;
        return amplitude * x * x * d * d;
    };
    return p;
}

SpaceProfile SpaceProfile::zero() {
    SpaceProfile p;
    p.name = "zero";
    p.amplitude = 0.0;
    p.fn = [](double) { return 0.0; };
    return p;
}

SpaceProfile SpaceProfile::custom(std::function<double(double)> fn) {
    SpaceProfile p;
    p.name = "custom";
    p.fn = std::move(fn);
    return p;
}

TimeProfile TimeProfile::one() {
    TimeProfile t;
    t.name = "one";
    t.fn = [](double) { return 1.0; };
    return t;
}

TimeProfile TimeProfile::exp_rate(double rate) {
    TimeProfile t;
    t.name = "exp";
    t.rate = rate;
    t.fn = [rate](double s) { return std::exp(rate * s); };
    return t;
}

TimeProfile TimeProfile::custom(std::function<double(double)> fn) {
    TimeProfile t;
    t.name = "custom";
    t.fn = std::move(fn);
    return t;
}

HistorySpec HistorySpec::constant_profile(SpaceProfile phi) {
    HistorySpec h;
    h.kind_ = Kind::constant_in_s;
    h.phi_ = std::move(phi);
    h.psi_ = TimeProfile::one();
    return h;
}

HistorySpec HistorySpec::separable(SpaceProfile phi, TimeProfile psi) {
    HistorySpec h;
    h.kind_ = Kind::separable;
    h.phi_ = std::move(phi);
    h.psi_ = std::move(psi);
    return h;
}

HistorySpec HistorySpec::tabulated(std::vector<double> stamps,
                                   std::vector<std::vector<double>> slots) {
    if (stamps.size() != slots.size() || stamps.empty())
        throw ConfigError("tabulated history: stamps and slots must match and be nonempty");
    for (size_t j = 1; j < stamps.size(); ++j)
        if (!(stamps[j] > stamps[j - 1]))
            throw ConfigError("tabulated history: stamps must be strictly increasing");
    if (std::abs(stamps.back()) > 1e-12)
        throw ConfigError("tabulated history: last stamp must be s = 0");
    HistorySpec h;
    h.kind_ = Kind::tabulated;
    h.stamps_ = std::move(stamps);
    h.slots_ = std::move(slots);
    return h;
}

double HistorySpec::value(double x, double s) const {
    switch (kind_) {
        case Kind::constant_in_s: return phi_(x);
        case Kind::separable: return phi_(x) * psi_(s);
        case Kind::tabulated:
            throw RangeError("tabulated history has no pointwise closed form");
    }
    return 0.0;
}

StateVector sample_history(const HistorySpec& spec, const SpatialGrid& grid,
                           const ModelParams& params, double s) {
    const double slack = 1e-12 * std::max(1.0, params.tau);
    if (s < -params.tau - slack || s > slack)
        throw RangeError("history sample time s = " + std::to_string(s) +
                         " outside [-tau, 0]");
    StateVector out;
    out.t = s;
    out.values.resize(static_cast<size_t>(grid.n));

    if (spec.kind() == HistorySpec::Kind::tabulated) {
        const auto& stamps = spec.stamps();
        const auto& slots = spec.slots();
        if (slots.front().size() != static_cast<size_t>(grid.n))
            throw ConfigError("tabulated history slot size does not match the grid");
        // clamp then interpolate linearly between bracketing slots
        if (s <= stamps.front()) {
            out.values = slots.front();
            return out;
        }
        if (s >= stamps.back()) {
            out.values = slots.back();
            return out;
        }
        size_t j = 0;
        while (j + 1 < stamps.size() && stamps[j + 1] < s) ++j;
        const double w = (s - stamps[j]) / (stamps[j + 1] - stamps[j]);
        for (int i = 0; i < grid.n; ++i)
            out.values[static_cast<size_t>(i)] =
                (1.0 - w) * slots[j][static_cast<size_t>(i)] + w * slots[j + 1][static_cast<size_t>(i)];
        return out;
    }

    for (int i = 0; i < grid.n; ++i)
        out.values[static_cast<size_t>(i)] = spec.value(grid.node(i), s);
    return out;
}

} // namespace disp
