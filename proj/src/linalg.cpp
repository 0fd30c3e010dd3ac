#include "linalg.hpp"

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace disp {

BandedOperator BandedOperator::zeros(int n, int lower, int upper) {
    BandedOperator op;
    op.n = n;
    op.lower = lower;
    op.upper = upper;
    op.bands.assign(static_cast<size_t>(n) * (lower + upper + 1), 0.0);
    return op;
}

double& BandedOperator::at(int i, int d) {
    return bands[static_cast<size_t>(i) * width() + (d + lower)];
}

double BandedOperator::at(int i, int d) const {
    return bands[static_cast<size_t>(i) * width() + (d + lower)];
}

void BandedOperator::apply(std::span<const double> x, std::span<double> y) const {
    for (int i = 0; i < n; ++i) {
        const double* row = bands.data() + static_cast<size_t>(i) * width();
        double acc = 0.0;
        const int d0 = std::max(-lower, -i);
        const int d1 = std::min(upper, n - 1 - i);
        for (int d = d0; d <= d1; ++d)
            acc += row[d + lower] * x[static_cast<size_t>(i + d)];
        y[static_cast<size_t>(i)] = acc;
    }
}

std::vector<double> BandedOperator::apply(std::span<const double> x) const {
    std::vector<double> y(static_cast<size_t>(n));
    apply(x, y);
    return y;
}

bool BandedOperator::symmetric(double tol) const {
    for (int i = 0; i < n; ++i) {
        for (int d = 1; d <= upper; ++d) {
            if (i + d >= n) continue;
            if (std::abs(at(i, d) - at(i + d, -d)) > tol) return false;
        }
    }
    return true;
}

void BandedLU::factor(const BandedOperator& a) {
    n_ = a.n;
    kl_ = a.lower;
    ku_ = a.upper;
    ab_.assign(static_cast<size_t>(n_) * stride(), 0.0);
    ipiv_.assign(static_cast<size_t>(n_), 0);

    for (int i = 0; i < n_; ++i) {
        const int d0 = std::max(-kl_, -i);
        const int d1 = std::min(ku_, n_ - 1 - i);
        for (int d = d0; d <= d1; ++d)
            ab(i, i + d) = a.at(i, d);
    }

    for (int j = 0; j < n_; ++j) {
        // pivot search within the column's lower band
        const int imax = std::min(j + kl_, n_ - 1);
        int p = j;
        double best = std::abs(ab(j, j));
        for (int i = j + 1; i <= imax; ++i) {
            const double v = std::abs(ab(i, j));
            if (v > best) { best = v; p = i; }
        }
        ipiv_[static_cast<size_t>(j)] = p;
        if (best == 0.0 || !std::isfinite(best))
            throw NumericError("banded LU: singular or non-finite pivot at column " + std::to_string(j));

        const int cmax = std::min(j + kl_ + ku_, n_ - 1);
        if (p != j) {
            for (int c = j; c <= cmax; ++c)
                std::swap(ab(j, c), ab(p, c));
        }
        const double piv = ab(j, j);
        for (int i = j + 1; i <= imax; ++i) {
            const double m = ab(i, j) / piv;
            ab(i, j) = m;
            if (m != 0.0) {
                for (int c = j + 1; c <= cmax; ++c)
                    ab(i, c) -= m * ab(j, c);
            }
        }
    }
}

void BandedLU::solve(std::span<double> b) const {
    for (int j = 0; j < n_; ++j) {
        const int p = ipiv_[static_cast<size_t>(j)];
        if (p != j) std::swap(b[static_cast<size_t>(j)], b[static_cast<size_t>(p)]);
        const double bj = b[static_cast<size_t>(j)];
        if (bj != 0.0) {
            const int imax = std::min(j + kl_, n_ - 1);
            for (int i = j + 1; i <= imax; ++i)
                b[static_cast<size_t>(i)] -= ab(i, j) * bj;
        }
    }
    for (int j = n_ - 1; j >= 0; --j) {
        double v = b[static_cast<size_t>(j)] / ab(j, j);
        b[static_cast<size_t>(j)] = v;
        if (v != 0.0) {
            const int imin = std::max(0, j - kl_ - ku_);
            for (int i = imin; i < j; ++i)
                b[static_cast<size_t>(i)] -= ab(i, j) * v;
        }
    }
}

} // namespace disp
