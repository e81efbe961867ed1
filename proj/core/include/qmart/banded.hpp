#ifndef QMART_BANDED_HPP
#define QMART_BANDED_HPP

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

namespace qmart {

/// Square banded matrix with half-bandwidth b (b <= 2 in this library).
/// Row i stores entries for columns i-b .. i+b; out-of-range slots are zero.
template <typename T>
class Banded {
public:
    Banded() = default;

    Banded(int n, int b) : n_(n), b_(b), a_(static_cast<size_t>(n) * (2 * b + 1), T{}) {
        if (n < 1 || b < 0) throw std::invalid_argument("Banded: bad dimensions");
    }

    static Banded identity(int n, int b) {
        Banded m(n, b);
        for (int i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    int size() const { return n_; }
    int bandwidth() const { return b_; }

    bool in_band(int i, int j) const {
        return i >= 0 && i < n_ && j >= 0 && j < n_ && j - i >= -b_ && j - i <= b_;
    }

    T& operator()(int i, int j) { return a_[idx(i, j)]; }
    const T& operator()(int i, int j) const { return a_[idx(i, j)]; }

    /// Entry with zero returned outside the band.
    T get(int i, int j) const { return in_band(i, j) ? a_[idx(i, j)] : T{}; }

    std::vector<T> apply(const std::vector<T>& x) const {
        if (static_cast<int>(x.size()) != n_)
            throw std::invalid_argument("Banded::apply: size mismatch");
        std::vector<T> y(n_, T{});
        for (int i = 0; i < n_; ++i) {
            const int jlo = std::max(0, i - b_), jhi = std::min(n_ - 1, i + b_);
            T s{};
            for (int j = jlo; j <= jhi; ++j) s += a_[idx(i, j)] * x[j];
            y[i] = s;
        }
        return y;
    }

    Banded& operator+=(const Banded& o) {
        check_shape(o);
        for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }

    Banded& operator-=(const Banded& o) {
        check_shape(o);
        for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }

    Banded& operator*=(T s) {
        for (auto& v : a_) v *= s;
        return *this;
    }

    friend Banded operator+(Banded a, const Banded& b) { return a += b; }
    friend Banded operator-(Banded a, const Banded& b) { return a -= b; }
    friend Banded operator*(T s, Banded a) { return a *= s; }

    /// Add s to every diagonal entry.
    void shift_diagonal(T s) {
        for (int i = 0; i < n_; ++i) (*this)(i, i) += s;
    }

    /// this <- diag(d_left) * this * diag(d_right)
    template <typename S>
    void scale(const std::vector<S>& d_left, const std::vector<S>& d_right) {
        for (int i = 0; i < n_; ++i) {
            const int jlo = std::max(0, i - b_), jhi = std::min(n_ - 1, i + b_);
            for (int j = jlo; j <= jhi; ++j)
                a_[idx(i, j)] *= d_left[i] * d_right[j];
        }
    }

private:
    size_t idx(int i, int j) const {
        return static_cast<size_t>(i) * (2 * b_ + 1) + (j - i + b_);
    }
    void check_shape(const Banded& o) const {
        if (o.n_ != n_ || o.b_ != b_) throw std::invalid_argument("Banded: shape mismatch");
    }

    int n_{0};
    int b_{0};
    std::vector<T> a_;
};

/// In-band LU factorization without pivoting. Valid for the diagonally
/// dominant Crank-Nicolson step matrices used here.
template <typename T>
class BandedLU {
public:
    explicit BandedLU(Banded<T> m) : lu_(std::move(m)) {
        const int n = lu_.size(), b = lu_.bandwidth();
        for (int k = 0; k < n - 1; ++k) {
            const T piv = lu_(k, k);
            if (piv == T{}) throw std::runtime_error("BandedLU: zero pivot");
            for (int i = k + 1; i <= std::min(n - 1, k + b); ++i) {
                const T m_ik = lu_(i, k) / piv;
                lu_(i, k) = m_ik;
                for (int j = k + 1; j <= std::min(n - 1, k + b); ++j)
                    lu_(i, j) -= m_ik * lu_(k, j);
            }
        }
    }

    std::vector<T> solve(std::vector<T> rhs) const {
        const int n = lu_.size(), b = lu_.bandwidth();
        if (static_cast<int>(rhs.size()) != n)
            throw std::invalid_argument("BandedLU::solve: size mismatch");
        for (int k = 0; k < n - 1; ++k)
            for (int i = k + 1; i <= std::min(n - 1, k + b); ++i)
                rhs[i] -= lu_(i, k) * rhs[k];
        for (int i = n - 1; i >= 0; --i) {
            T s = rhs[i];
            for (int j = i + 1; j <= std::min(n - 1, i + b); ++j)
                s -= lu_(i, j) * rhs[j];
            rhs[i] = s / lu_(i, i);
        }
        return rhs;
    }

private:
    Banded<T> lu_;
};

} // namespace qmart

#endif
