#ifndef DISP_LINALG_HPP
#define DISP_LINALG_HPP

#include <span>
#include <vector>

namespace disp {

/// Band matrix in row-major band storage: entry (i, j) with
/// j - i in [-lower, upper] lives at bands[i * width() + (j - i + lower)].
/// Entries outside the matrix are kept at zero so rows can be applied
/// without branching.
struct BandedOperator {
    int n = 0;
    int lower = 0;
    int upper = 0;
    std::vector<double> bands;

    int width() const { return lower + upper + 1; }

    static BandedOperator zeros(int n, int lower, int upper);

    double& at(int i, int d);      // d = j - i, in [-lower, upper]
    double at(int i, int d) const;

    void apply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> apply(std::span<const double> x) const;

    /// Band-pattern mirror symmetry: at(i, d) == at(i + d, -d) for all
    /// stored entries.
    bool symmetric(double tol = 0.0) const;
};

/// LU factorization of a banded matrix with partial pivoting.
/// Working storage follows the usual band layout with `lower` extra
/// super-diagonals for pivot fill-in.
class BandedLU {
public:
    BandedLU() = default;

    /// Factors A in place of any previous factorization.
    /// Throws NumericError on a singular pivot or non-finite entry.
    void factor(const BandedOperator& a);

    /// Solves A x = b in place. Requires factor() first.
    void solve(std::span<double> b) const;

    bool ready() const { return n_ > 0; }

private:
    int n_ = 0, kl_ = 0, ku_ = 0;
    std::vector<double> ab_;     // (2*kl + ku + 1) x n, column-major bands
    std::vector<int> ipiv_;

    double& ab(int i, int j) { return ab_[static_cast<size_t>(j) * stride() + (i - j + kl_ + ku_)]; }
    double ab(int i, int j) const { return ab_[static_cast<size_t>(j) * stride() + (i - j + kl_ + ku_)]; }
    int stride() const { return 2 * kl_ + ku_ + 1; }
};

} // namespace disp

#endif
