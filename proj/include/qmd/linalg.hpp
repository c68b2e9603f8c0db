#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qmd {

using cplx = std::complex<double>;

// Largest deviation from unitarity tolerated anywhere in the engine.
inline constexpr double unitary_tol = 1e-12;

// Floor modulus: result is always in [0, n).
inline int mod_floor(long long v, int n) {
    long long r = v % n;
    if (r < 0) r += n;
    return static_cast<int>(r);
}

// Dense square complex matrix, row-major.  Sized for the small registers
// this project works with (a few dozen rows), so no clever storage.
class SquareMatrix {
public:
    explicit SquareMatrix(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim) {
        if (dim < 1) throw std::invalid_argument("matrix dimension must be positive");
    }

    static SquareMatrix identity(int dim) {
        SquareMatrix m(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
        return m;
    }

    // Permutation matrix for |j> -> |(j + shift) mod dim>.
    static SquareMatrix cyclic_shift(int dim, int shift) {
        if (shift < 0 || shift >= dim) throw std::invalid_argument("cyclic shift out of range");
        SquareMatrix m(dim);
        for (int j = 0; j < dim; ++j) m.at((j + shift) % dim, j) = 1.0;
        return m;
    }

    int dim() const { return dim_; }

    cplx& at(int r, int c) { return a_[static_cast<size_t>(r) * dim_ + c]; }
    const cplx& at(int r, int c) const { return a_[static_cast<size_t>(r) * dim_ + c]; }

    SquareMatrix adjoint() const {
        SquareMatrix m(dim_);
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c < dim_; ++c) m.at(c, r) = std::conj(at(r, c));
        return m;
    }

    SquareMatrix operator*(const SquareMatrix& rhs) const {
        if (rhs.dim_ != dim_) throw std::invalid_argument("matrix dimension mismatch");
        SquareMatrix out(dim_);
        for (int r = 0; r < dim_; ++r)
            for (int k = 0; k < dim_; ++k) {
                cplx v = at(r, k);
                if (v == 0.0) continue;
                for (int c = 0; c < dim_; ++c) out.at(r, c) += v * rhs.at(k, c);
            }
        return out;
    }

    std::vector<cplx> operator*(const std::vector<cplx>& v) const {
        if (static_cast<int>(v.size()) != dim_) throw std::invalid_argument("vector dimension mismatch");
        std::vector<cplx> out(v.size());
        for (int r = 0; r < dim_; ++r) {
            cplx acc = 0.0;
            for (int c = 0; c < dim_; ++c) acc += at(r, c) * v[c];
            out[r] = acc;
        }
        return out;
    }

    // max |(U^dagger U - I)_{rc}|; zero for an exactly unitary matrix.
    double unitarity_defect() const {
        SquareMatrix p = adjoint() * (*this);
        double worst = 0.0;
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c < dim_; ++c) {
                cplx want = (r == c) ? 1.0 : 0.0;
                worst = std::max(worst, std::abs(p.at(r, c) - want));
            }
        return worst;
    }

    bool is_unitary(double tol = unitary_tol) const { return unitarity_defect() <= tol; }

    // Column permutation view: perm[j] = r when column j is exactly e_r.
    // Empty when the matrix is not an exact 0/1 permutation.
    std::vector<int> as_permutation() const {
        std::vector<int> perm(dim_, -1);
        std::vector<bool> hit(dim_, false);
        for (int c = 0; c < dim_; ++c) {
            for (int r = 0; r < dim_; ++r) {
                cplx v = at(r, c);
                if (v == 1.0) {
                    if (perm[c] >= 0 || hit[r]) return {};
                    perm[c] = r;
                    hit[r] = true;
                } else if (v != 0.0) {
                    return {};
                }
            }
            if (perm[c] < 0) return {};
        }
        return perm;
    }

private:
    int dim_;
    std::vector<cplx> a_;
};

}  // namespace qmd
