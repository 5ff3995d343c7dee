#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace peer {

using Complex = std::complex<double>;
using RealVector = std::vector<double>;
using ComplexVector = std::vector<Complex>;

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a pivot falls below the singularity threshold.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// Thrown when the eigenvalue iteration exhausts its budget.
class EigenConvergenceError : public Error {
public:
    using Error::Error;
};

/// Dense row-major matrix over double or std::complex<double>.
/// Sized for tableau work (s <= 4) and small semi-discrete systems.
template <typename T>
class Mat {
public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<T>& data() const noexcept { return data_; }
    std::vector<T>& data() noexcept { return data_; }

    Mat transposed() const {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Mat<double>;
using ComplexMatrix = Mat<Complex>;

template <typename T>
Mat<T> operator+(const Mat<T>& a, const Mat<T>& b) {
    Mat<T> r = a;
    for (std::size_t i = 0; i < r.data().size(); ++i) r.data()[i] += b.data()[i];
    return r;
}

template <typename T>
Mat<T> operator-(const Mat<T>& a, const Mat<T>& b) {
    Mat<T> r = a;
    for (std::size_t i = 0; i < r.data().size(); ++i) r.data()[i] -= b.data()[i];
    return r;
}

template <typename T, typename S>
Mat<T> operator*(const S& s, const Mat<T>& a) {
    Mat<T> r = a;
    for (auto& x : r.data()) x = T(s) * x;
    return r;
}

template <typename T>
Mat<T> operator*(const Mat<T>& a, const Mat<T>& b) {
    Mat<T> r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const T aik = a(i, k);
            if (aik == T{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

template <typename T>
std::vector<T> operator*(const Mat<T>& a, const std::vector<T>& x) {
    std::vector<T> y(a.rows(), T{});
    for (std::size_t i = 0; i < a.rows(); ++i) {
        T acc{};
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

/// Maximum absolute row sum.
template <typename T>
double norm_inf(const Mat<T>& a) {
    double best = 0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double row = 0;
        for (std::size_t j = 0; j < a.cols(); ++j) row += std::abs(a(i, j));
        if (row > best) best = row;
    }
    return best;
}

template <typename T>
double norm_inf(const std::vector<T>& x) {
    double best = 0;
    for (const auto& v : x) best = std::max(best, std::abs(v));
    return best;
}

template <typename T>
double norm_frobenius(const Mat<T>& a) {
    double acc = 0;
    for (const auto& v : a.data()) acc += std::norm(Complex(v));
    return std::sqrt(acc);
}

template <typename T>
double norm_l2(const std::vector<T>& x) {
    double acc = 0;
    for (const auto& v : x) acc += std::norm(Complex(v));
    return std::sqrt(acc);
}

template <typename T>
double max_abs(const Mat<T>& a) {
    double best = 0;
    for (const auto& v : a.data()) best = std::max(best, std::abs(v));
    return best;
}

inline ComplexMatrix to_complex(const RealMatrix& a) {
    ComplexMatrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.data().size(); ++i) c.data()[i] = Complex(a.data()[i], 0.0);
    return c;
}

/// LU decomposition with partial pivoting. A pivot smaller than
/// 1e-14 * ||A||_inf declares the matrix singular.
template <typename T>
class LuFactorization {
public:
    explicit LuFactorization(Mat<T> a);

    std::vector<T> solve(const std::vector<T>& b) const;
    Mat<T> solve(const Mat<T>& b) const;
    std::size_t size() const noexcept { return lu_.rows(); }

private:
    Mat<T> lu_;
    std::vector<std::size_t> perm_;
};

/// Solve A X = B. Requires A square and nonsingular, B.rows() == A.rows().
template <typename T>
Mat<T> lu_solve(const Mat<T>& a, const Mat<T>& b) {
    return LuFactorization<T>(a).solve(b);
}

template <typename T>
std::vector<T> lu_solve(const Mat<T>& a, const std::vector<T>& b) {
    return LuFactorization<T>(a).solve(b);
}

template <typename T>
Mat<T> inverse(const Mat<T>& a) {
    return LuFactorization<T>(a).solve(Mat<T>::identity(a.rows()));
}

/// All eigenvalues with multiplicity (Hessenberg reduction + shifted QR).
/// Intended for tableau-scale matrices (dimension <= 16).
ComplexVector eigenvalues(const ComplexMatrix& a);
ComplexVector eigenvalues(const RealMatrix& a);

double spectral_radius(const ComplexMatrix& a);
double spectral_radius(const RealMatrix& a);

/// Basis vector of a one-dimensional null space, via LU with full pivoting.
/// Rank is decided at `tol` relative to the largest entry of `a`; a nullity
/// different from one raises Error.
RealVector null_vector(const RealMatrix& a, double tol);

}  // namespace peer
