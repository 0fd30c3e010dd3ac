#include "verify.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace disp::verify {

namespace {
constexpr double kPi = std::numbers::pi;

std::uint64_t xorshift64(std::uint64_t& s) {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return s;
}

double uniform_pm1(std::uint64_t& s) {
    return 2.0 * (static_cast<double>(xorshift64(s) >> 11) * 0x1.0p-53) - 1.0;
}

// Dense LU with partial pivoting kept for repeated solves.
class DenseLU {
public:
    explicit DenseLU(DenseMatrix m) : n_(m.n), a_(std::move(m.a)), piv_(static_cast<size_t>(n_)) {
        for (int j = 0; j < n_; ++j) {
            int p = j;
            double best = std::abs(at(j, j));
            for (int i = j + 1; i < n_; ++i) {
                const double v = std::abs(at(i, j));
                if (v > best) { best = v; p = i; }
            }
            piv_[static_cast<size_t>(j)] = p;
            if (best == 0.0) throw NumericError("dense LU: singular pivot");
            if (p != j)
                for (int c = 0; c < n_; ++c) std::swap(at(j, c), at(p, c));
            const double d = at(j, j);
            for (int i = j + 1; i < n_; ++i) {
                const double m_ = at(i, j) / d;
                at(i, j) = m_;
                if (m_ != 0.0)
                    for (int c = j + 1; c < n_; ++c) at(i, c) -= m_ * at(j, c);
            }
        }
    }

    void solve(std::vector<double>& b) const {
        for (int j = 0; j < n_; ++j) {
            const int p = piv_[static_cast<size_t>(j)];
            if (p != j) std::swap(b[static_cast<size_t>(j)], b[static_cast<size_t>(p)]);
            for (int i = j + 1; i < n_; ++i) b[static_cast<size_t>(i)] -= at(i, j) * b[static_cast<size_t>(j)];
        }
        for (int j = n_ - 1; j >= 0; --j) {
            b[static_cast<size_t>(j)] /= at(j, j);
            for (int i = 0; i < j; ++i) b[static_cast<size_t>(i)] -= at(i, j) * b[static_cast<size_t>(j)];
        }
    }

private:
    int n_;
    std::vector<double> a_;
    std::vector<int> piv_;

    double& at(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    double at(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }
};

} // namespace

DenseMatrix DenseMatrix::zeros(int n) {
    DenseMatrix m;
    m.n = n;
    m.a.assign(static_cast<size_t>(n) * n, 0.0);
    return m;
}

DenseMatrix DenseMatrix::from_banded(const BandedOperator& op) {
    DenseMatrix m = zeros(op.n);
    for (int i = 0; i < op.n; ++i) {
        const int d0 = std::max(-op.lower, -i);
        const int d1 = std::min(op.upper, op.n - 1 - i);
        for (int d = d0; d <= d1; ++d) m.at(i, i + d) = op.at(i, d);
    }
    return m;
}

std::vector<double> dense_solve(DenseMatrix m, std::vector<double> rhs) {
    DenseLU lu(std::move(m));
    lu.solve(rhs);
    return rhs;
}

bool dense_positive_definite(const DenseMatrix& m) {
    const int n = m.n;
    std::vector<double> l(static_cast<size_t>(n) * n, 0.0);
    auto L = [&](int i, int j) -> double& { return l[static_cast<size_t>(i) * n + j]; };
    for (int j = 0; j < n; ++j) {
        double d = m.at(j, j);
        for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        if (!(d > 0.0)) return false;
        L(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double v = m.at(i, j);
            for (int k = 0; k < j; ++k) v -= L(i, k) * L(j, k);
            L(i, j) = v / L(j, j);
        }
    }
    return true;
}

double smallest_eigenvalue(const DenseMatrix& m, double tol, int max_iter) {
    const int n = m.n;
    DenseLU lu{DenseMatrix{m}};
    std::vector<double> v(static_cast<size_t>(n));
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    for (auto& x : v) x = 1.0 + 0.01 * uniform_pm1(seed);

    double lambda = 0.0, lambda_prev = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> w = v;
        lu.solve(w);
        double nw = 0.0;
        for (double x : w) nw += x * x;
        nw = std::sqrt(nw);
        for (auto& x : w) x /= nw;
        // Rayleigh quotient lambda = w' A w
        double num = 0.0;
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += m.at(i, j) * w[static_cast<size_t>(j)];
            num += w[static_cast<size_t>(i)] * acc;
        }
        lambda = num;
        v = std::move(w);
        if (it > 2 && std::abs(lambda - lambda_prev) <= tol * std::abs(lambda)) break;
        lambda_prev = lambda;
    }
    return lambda;
}

double clamped_beam_beta1() {
    auto f = [](double b) { return std::cos(b) * std::cosh(b) - 1.0; };
    double lo = 4.5, hi = 5.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(lo) * f(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double ManufacturedCase::u(double x, double t) const {
    const double d = params.ell - x;
    return std::exp(-t) * x * x * d * d;
}

double ManufacturedCase::u_x(double x, double t) const {
    const double ell = params.ell;
    return std::exp(-t) * 2.0 * x * (ell - x) * (ell - 2.0 * x);
}

double ManufacturedCase::forcing(double x, double t) const {
    const double ell = params.ell;
    const double d = ell - x;
    const double g = x * x * d * d;
    const double gp = 2.0 * x * (ell - x) * (ell - 2.0 * x);
    const double gpp = 2.0 * ell * ell - 12.0 * ell * x + 12.0 * x * x;
    const double et = std::exp(-t);
    // f = u_t - nu u_xx + mu u_xxxx + u(t - tau) u_x + a u
    return et * (-g - params.nu * gpp + 24.0 * params.mu + profile.value(x) * g) +
           std::exp(params.tau - 2.0 * t) * g * gp;
}

RunConfig ManufacturedCase::config(int n, double dt, double T) const {
    RunConfig cfg;
    cfg.params = params;
    cfg.profile = profile;
    cfg.history = HistorySpec::separable(SpaceProfile::clamped_poly(1.0, params.ell),
                                         TimeProfile::exp_rate(-1.0));
    cfg.n = n;
    cfg.dt = dt;
    cfg.T_end = T;
    cfg.bdf_order = 2;
    cfg.snapshot_every = 0;
    return cfg;
}

Forcing ManufacturedCase::forcing_fn() const {
    ManufacturedCase c = *this;
    return [c](double x, double t) { return c.forcing(x, t); };
}

ManufacturedCase make_manufactured_case(const ModelParams& params, const DampingProfile& profile) {
    ManufacturedCase c;
    c.params = params;
    c.profile = profile;
    return c;
}

namespace {

double mms_error(const ManufacturedCase& c, int n, double dt, double T, int bdf_order) {
    RunConfig cfg = c.config(n, dt, T);
    cfg.bdf_order = bdf_order;
    Forcing f = c.forcing_fn();
    RunOutput out = run(cfg, &f);
    if (out.status.state == RunStatus::State::diverged)
        throw NumericError("manufactured run diverged");
    const Snapshot& last = out.snapshots.back();
    SpatialGrid grid = build_grid(cfg.params, n);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
        err = std::max(err, std::abs(last.values[static_cast<size_t>(i)] - c.u(grid.node(i), last.t)));
    return err;
}

} // namespace

ConvergenceStudy mms_spatial(const ManufacturedCase& c, std::span<const int> ns, double dt,
                             double T, int bdf_order) {
    ConvergenceStudy st;
    for (int n : ns) {
        st.params.push_back(c.params.ell / (n + 1));
        st.errors.push_back(mms_error(c, n, dt, T, bdf_order));
    }
    st.monotone = true;
    for (size_t i = 0; i + 1 < st.errors.size(); ++i)
        if (!(st.errors[i] > st.errors[i + 1])) st.monotone = false;
    double acc = 0.0;
    int cnt = 0;
    for (size_t i = 0; i + 1 < st.errors.size(); ++i) {
        acc += std::log2(st.errors[i] / st.errors[i + 1]);
        ++cnt;
    }
    st.observed_order = cnt ? acc / cnt : 0.0;
    return st;
}

ConvergenceStudy mms_temporal(const ManufacturedCase& c, int n, std::span<const double> dts,
                              int bdf_order, double T) {
    ConvergenceStudy st;
    for (double dt : dts) {
        st.params.push_back(dt);
        st.errors.push_back(mms_error(c, n, dt, T, bdf_order));
    }
    st.monotone = true;
    for (size_t i = 0; i + 1 < st.errors.size(); ++i)
        if (!(st.errors[i] > st.errors[i + 1])) st.monotone = false;
    // difference the errors first: the fixed-grid spatial floor cancels
    std::vector<double> diffs;
    for (size_t i = 0; i + 1 < st.errors.size(); ++i)
        diffs.push_back(st.errors[i] - st.errors[i + 1]);
    double acc = 0.0;
    int cnt = 0;
    for (size_t i = 0; i + 1 < diffs.size(); ++i) {
        if (diffs[i] > 0.0 && diffs[i + 1] > 0.0) {
            acc += std::log2(diffs[i] / diffs[i + 1]);
            ++cnt;
        }
    }
    st.observed_order = cnt ? acc / cnt : 0.0;
    return st;
}

double dense_cross_check(int n, double dt, std::uint64_t seed) {
    ModelParams params{0.01, 0.001, 1.0, 1.0};
    DampingProfile profile = DampingProfile::affine(1.0, 1.0, 1.0);
    Workspace ws = Workspace::build(params, profile, n);
    StepOperator op(ws, params, 1.0 / dt);

    std::vector<double> c(static_cast<size_t>(n)), rhs(static_cast<size_t>(n));
    for (auto& v : c) v = uniform_pm1(seed);
    for (auto& v : rhs) v = uniform_pm1(seed);

    op.prepare(c);
    std::vector<double> banded = rhs;
    op.solve(banded);

    DenseMatrix dm = DenseMatrix::from_banded(op.matrix());
    std::vector<double> dense = dense_solve(std::move(dm), rhs);

    double disc = 0.0;
    for (int i = 0; i < n; ++i)
        disc = std::max(disc, std::abs(banded[static_cast<size_t>(i)] - dense[static_cast<size_t>(i)]));
    return disc;
}

std::vector<EigenRefRow> clamped_eigen_reference(std::span<const int> ns, double ell) {
    const double beta1 = clamped_beam_beta1() / ell;
    const double ref = beta1 * beta1 * beta1 * beta1;
    std::vector<EigenRefRow> rows;
    ModelParams params{0.01, 0.001, 0.0, ell};
    for (int n : ns) {
        SpatialGrid grid = build_grid(params, n);
        DenseMatrix dm = DenseMatrix::from_banded(assemble_d4(grid));
        EigenRefRow row;
        row.n = n;
        row.eigenvalue = smallest_eigenvalue(dm);
        row.reference = ref;
        row.error = std::abs(row.eigenvalue - ref);
        rows.push_back(row);
    }
    return rows;
}

double dirichlet_d2_eigen_discrepancy(int n, double ell) {
    ModelParams params{0.01, 0.001, 0.0, ell};
    SpatialGrid grid = build_grid(params, n);
    BandedOperator d2 = assemble_d2(grid);
    for (auto& v : d2.bands) v = -v;  // -D2 is positive definite
    const double lam = smallest_eigenvalue(DenseMatrix::from_banded(d2));
    const double exact = 2.0 / (grid.h * grid.h) * (1.0 - std::cos(kPi * grid.h / ell));
    return std::abs(lam - exact);
}

std::string VerifySummary::table() const {
    std::string out;
    for (const auto& l : lines) {
        out += l.pass ? "[PASS] " : "[FAIL] ";
        out += l.name;
        if (!l.detail.empty()) {
            out += ": ";
            out += l.detail;
        }
        out += '\n';
    }
    return out;
}

VerifySummary run_verification(bool quick) {
    VerifySummary sum;
    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        sum.lines.push_back({name, pass, detail});
        if (!pass) sum.all_pass = false;
    };
    char buf[256];

    ModelParams params{0.01, 0.001, 0.2, 1.0};
    DampingProfile profile = DampingProfile::affine(1.0, 1.0, 1.0);
    ManufacturedCase mc = make_manufactured_case(params, profile);

    {
        std::vector<int> ns = quick ? std::vector<int>{24, 49, 99} : std::vector<int>{24, 49, 99, 199};
        ConvergenceStudy st = mms_spatial(mc, ns, 1e-3, 0.5, 2);
        std::snprintf(buf, sizeof buf, "observed order %.3f (want 2.0 +/- 0.3), monotone %s",
                      st.observed_order, st.monotone ? "yes" : "no");
        add("mms spatial order", st.monotone && std::abs(st.observed_order - 2.0) <= 0.3, buf);
    }
    {
        std::vector<double> dts = quick ? std::vector<double>{0.04, 0.02, 0.01}
                                        : std::vector<double>{0.04, 0.02, 0.01, 0.005};
        ConvergenceStudy st = mms_temporal(mc, 249, dts, 1, 1.0);
        std::snprintf(buf, sizeof buf, "observed order %.3f (want 1.0 +/- 0.3), monotone %s",
                      st.observed_order, st.monotone ? "yes" : "no");
        add("mms temporal order, bdf1", st.monotone && std::abs(st.observed_order - 1.0) <= 0.3, buf);

        st = mms_temporal(mc, 249, dts, 2, 1.0);
        std::snprintf(buf, sizeof buf, "observed order %.3f (want 2.0 +/- 0.3), monotone %s",
                      st.observed_order, st.monotone ? "yes" : "no");
        add("mms temporal order, bdf2", st.monotone && std::abs(st.observed_order - 2.0) <= 0.3, buf);
    }
    {
        const double d1 = dense_cross_check(32, 1e-3, 42);
        std::snprintf(buf, sizeof buf, "max discrepancy %.3e (want < 1e-12)", d1);
        add("banded vs dense solve, n=32", d1 < 1e-12, buf);
        const double d2 = dense_cross_check(32, 1e-6, 43);
        std::snprintf(buf, sizeof buf, "max discrepancy %.3e (want < 1e-12)", d2);
        add("banded vs dense solve, identity-dominant", d2 < 1e-12, buf);
    }
    {
        std::vector<int> ns = quick ? std::vector<int>{50, 100, 200} : std::vector<int>{50, 100, 200, 400};
        auto rows = clamped_eigen_reference(ns, 1.0);
        bool ok = true;
        std::string detail;
        for (size_t i = 0; i + 1 < rows.size(); ++i) {
            const double ratio = rows[i].error / rows[i + 1].error;
            std::snprintf(buf, sizeof buf, "n=%d->%d ratio %.2f ", rows[i].n, rows[i + 1].n, ratio);
            detail += buf;
            if (rows[i].n == 100 && std::abs(ratio - 4.0) > 0.5) ok = false;
        }
        add("clamped d4 smallest eigenvalue, h^2 convergence", ok, detail + "(want 4.0 +/- 0.5 at n=100->200)");
    }
    {
        const double disc = dirichlet_d2_eigen_discrepancy(50, 1.0);
        std::snprintf(buf, sizeof buf, "|lambda - exact| = %.3e (want < 1e-12)", disc);
        add("dirichlet d2 smallest eigenvalue, discrete formula", disc < 1e-12, buf);
    }
    return sum;
}

} // namespace disp::verify
