#ifndef DISP_VERIFY_HPP
#define DISP_VERIFY_HPP

#include "integrator.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace disp::verify {

/// Dense matrix helpers kept deliberately separate from the banded solver
/// path so they can cross-check it.
struct DenseMatrix {
    int n = 0;
    std::vector<double> a;  // row-major

    static DenseMatrix zeros(int n);
    static DenseMatrix from_banded(const BandedOperator& op);

    double& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }
};

/// LU with partial pivoting; throws NumericError on a zero pivot.
std::vector<double> dense_solve(DenseMatrix m, std::vector<double> rhs);

/// True iff the symmetric matrix is positive definite (Cholesky succeeds).
bool dense_positive_definite(const DenseMatrix& m);

/// Smallest eigenvalue of a symmetric positive-definite matrix by inverse
/// power iteration on a dense LU factorization.
double smallest_eigenvalue(const DenseMatrix& m, double tol = 1e-13, int max_iter = 500);

/// First positive root of cos(b) cosh(b) = 1 (clamped-beam characteristic
/// equation), near 4.7300.
double clamped_beam_beta1();

/// Manufactured solution u*(x,t) = e^{-t} x^2 (ell - x)^2 with the forcing
/// that makes it solve the model exactly; the closed form extends to t < 0,
/// so the delayed factor needs no special history handling.
struct ManufacturedCase {
    ModelParams params;
    DampingProfile profile = DampingProfile::constant(0.0);

    double u(double x, double t) const;
    double u_x(double x, double t) const;
    double forcing(double x, double t) const;

    RunConfig config(int n, double dt, double T) const;
    Forcing forcing_fn() const;
};

ManufacturedCase make_manufactured_case(const ModelParams& params, const DampingProfile& profile);

struct ConvergenceStudy {
    std::vector<double> params;  // h or dt per level
    std::vector<double> errors;  // max-node error at T
    double observed_order = 0.0;
    bool monotone = false;
};

/// Spatial refinement at fixed small dt; order from log2 of consecutive
/// error ratios.
ConvergenceStudy mms_spatial(const ManufacturedCase& c, std::span<const int> ns, double dt,
                             double T, int bdf_order);

/// Temporal refinement at fixed fine grid; the spatial error floor is
/// cancelled by differencing consecutive errors before taking ratios.
ConvergenceStudy mms_temporal(const ManufacturedCase& c, int n, std::span<const double> dts,
                              int bdf_order, double T);

/// Max abs discrepancy between the banded step solve and a dense LU solve of
/// the identical matrix, on a random healthy step.
double dense_cross_check(int n, double dt, std::uint64_t seed);

struct EigenRefRow {
    int n = 0;
    double eigenvalue = 0.0;
    double reference = 0.0;
    double error = 0.0;
};

/// Smallest eigenvalue of the clamped fourth-difference operator against
/// (beta1 / ell)^4; the error should shrink by ~4x per grid doubling.
std::vector<EigenRefRow> clamped_eigen_reference(std::span<const int> ns, double ell);

/// |smallest eigenvalue of -D2 minus the exact discrete value
/// (2/h^2)(1 - cos(pi h / ell))|.
double dirichlet_d2_eigen_discrepancy(int n, double ell);

struct VerifyLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifySummary {
    std::vector<VerifyLine> lines;
    bool all_pass = true;

    std::string table() const;
};

/// The full verification battery (quick mode shrinks the grids).
VerifySummary run_verification(bool quick);

} // namespace disp::verify

#endif
