#include "peer/matrix.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace peer {

namespace {

constexpr double kPivotRel = 1e-14;
constexpr double kMachEps = std::numeric_limits<double>::epsilon();

}  // namespace

template <typename T>
LuFactorization<T>::LuFactorization(Mat<T> a) : lu_(std::move(a)) {
    if (!lu_.square()) throw Error("lu: matrix must be square");
    const std::size_t n = lu_.rows();
    const double threshold = kPivotRel * norm_inf(lu_);
    perm_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(lu_(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            const double v = std::abs(lu_(i, k));
            if (v > best) {
                best = v;
                piv = i;
            }
        }
        if (best <= threshold)
            throw SingularMatrixError("lu: pivot " + std::to_string(k) + " below threshold");
        perm_[k] = piv;
        if (piv != k)
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
        const T inv_piv = T{1} / lu_(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const T m = lu_(i, k) * inv_piv;
            lu_(i, k) = m;
            if (m == T{}) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
        }
    }
}

template <typename T>
std::vector<T> LuFactorization<T>::solve(const std::vector<T>& b) const {
    const std::size_t n = lu_.rows();
    if (b.size() != n) throw Error("lu: right-hand side size mismatch");
    std::vector<T> x = b;
    // Apply the full row permutation before any elimination; the stored
    // multipliers refer to final row positions.
    for (std::size_t k = 0; k < n; ++k)
        if (perm_[k] != k) std::swap(x[k], x[perm_[k]]);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = k + 1; i < n; ++i) x[i] -= lu_(i, k) * x[k];
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = k + 1; j < n; ++j) x[k] -= lu_(k, j) * x[j];
        x[k] /= lu_(k, k);
    }
    return x;
}

template <typename T>
Mat<T> LuFactorization<T>::solve(const Mat<T>& b) const {
    const std::size_t n = lu_.rows();
    if (b.rows() != n) throw Error("lu: right-hand side row count mismatch");
    Mat<T> x = b;
    for (std::size_t k = 0; k < n; ++k)
        if (perm_[k] != k)
            for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(k, j), x(perm_[k], j));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = k + 1; i < n; ++i) {
            const T m = lu_(i, k);
            if (m == T{}) continue;
            for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= m * x(k, j);
        }
    }
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = k + 1; j < n; ++j) {
            const T m = lu_(k, j);
            if (m == T{}) continue;
            for (std::size_t jj = 0; jj < x.cols(); ++jj) x(k, jj) -= m * x(j, jj);
        }
        const T inv = T{1} / lu_(k, k);
        for (std::size_t jj = 0; jj < x.cols(); ++jj) x(k, jj) *= inv;
    }
    return x;
}

template class LuFactorization<double>;
template class LuFactorization<Complex>;

namespace {

// Householder reduction of a complex matrix to upper Hessenberg form.
void reduce_to_hessenberg(ComplexMatrix& h) {
    const std::size_t n = h.rows();
    std::vector<Complex> v(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double scale = 0;
        for (std::size_t i = k + 1; i < n; ++i) scale += std::abs(h(i, k));
        if (scale == 0) continue;
        double vnorm2 = 0;
        for (std::size_t i = k + 1; i < n; ++i) {
            v[i] = h(i, k) / scale;
            vnorm2 += std::norm(v[i]);
        }
        const double vnorm = std::sqrt(vnorm2);
        const Complex v0 = v[k + 1];
        const Complex phase = (std::abs(v0) == 0) ? Complex(1, 0) : v0 / std::abs(v0);
        const Complex alpha = -phase * vnorm;
        v[k + 1] -= alpha;
        double vv = 0;
        for (std::size_t i = k + 1; i < n; ++i) vv += std::norm(v[i]);
        if (vv == 0) continue;
        const double beta = 2.0 / vv;
        // Left: H <- (I - beta v v^*) H, rows k+1..n-1.
        for (std::size_t j = k; j < n; ++j) {
            Complex w{};
            for (std::size_t i = k + 1; i < n; ++i) w += std::conj(v[i]) * h(i, j);
            w *= beta;
            for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= w * v[i];
        }
        // Right: H <- H (I - beta v v^*), columns k+1..n-1.
        for (std::size_t i = 0; i < n; ++i) {
            Complex w{};
            for (std::size_t j = k + 1; j < n; ++j) w += h(i, j) * v[j];
            w *= beta;
            for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= w * std::conj(v[j]);
        }
        h(k + 1, k) = alpha * scale;
        for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0;
    }
}

// Complex Givens rotation [c s; -conj(s) c] with real c annihilating y in (x, y).
void make_givens(Complex x, Complex y, double& c, Complex& s) {
    const double ax = std::abs(x), ay = std::abs(y);
    const double r = std::hypot(ax, ay);
    if (r == 0 || ay == 0) {
        c = 1;
        s = Complex{};
        return;
    }
    if (ax == 0) {
        c = 0;
        s = std::conj(y) / ay;
        return;
    }
    c = ax / r;
    s = (x / ax) * std::conj(y) / r;
}

Complex wilkinson_shift(const ComplexMatrix& h, std::size_t hi) {
    const Complex a = h(hi - 2, hi - 2), b = h(hi - 2, hi - 1);
    const Complex c = h(hi - 1, hi - 2), d = h(hi - 1, hi - 1);
    const Complex tr = a + d;
    const Complex det = a * d - b * c;
    const Complex disc = std::sqrt(tr * tr - 4.0 * det);
    const Complex r1 = 0.5 * (tr + disc);
    const Complex r2 = 0.5 * (tr - disc);
    return (std::abs(r1 - d) < std::abs(r2 - d)) ? r1 : r2;
}

// Shifted QR iteration on an upper Hessenberg matrix; eigenvalues land on
// the diagonal as the active block deflates from the bottom.
ComplexVector qr_eigenvalues(ComplexMatrix h) {
    const std::size_t n = h.rows();
    ComplexVector out(n);
    if (n == 0) return out;
    std::size_t hi = n;
    long iters_since_deflate = 0;
    long total_iters = 0;
    const long budget = 60 * static_cast<long>(n) + 100;
    std::vector<double> cs(n);
    std::vector<Complex> ss(n);
    while (hi > 0) {
        if (hi == 1) {
            out[0] = h(0, 0);
            break;
        }
        // Negligible sub-diagonals split the active block.
        std::size_t lo = hi - 1;
        while (lo > 0) {
            const double s = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
            if (std::abs(h(lo, lo - 1)) <= kMachEps * s + 1e-300) {
                h(lo, lo - 1) = 0;
                break;
            }
            --lo;
        }
        if (lo == hi - 1) {
            out[hi - 1] = h(hi - 1, hi - 1);
            --hi;
            iters_since_deflate = 0;
            continue;
        }
        if (++total_iters > budget)
            throw EigenConvergenceError("eigenvalues: QR iteration exceeded budget");
        Complex mu;
        if (iters_since_deflate > 0 && iters_since_deflate % 12 == 0) {
            // Exceptional shift to break symmetric stalls; deterministic.
            mu = h(hi - 1, hi - 1) + Complex(1.0, 0.5) * std::abs(h(hi - 1, hi - 2));
        } else {
            mu = wilkinson_shift(h, hi);
        }
        ++iters_since_deflate;
        // One QR sweep on the block [lo, hi): H - mu I = Q R, H <- R Q + mu I.
        for (std::size_t i = lo; i < hi; ++i) h(i, i) -= mu;
        for (std::size_t k = lo; k + 1 < hi; ++k) {
            double c;
            Complex s;
            make_givens(h(k, k), h(k + 1, k), c, s);
            cs[k] = c;
            ss[k] = s;
            for (std::size_t j = k; j < hi; ++j) {
                const Complex t1 = h(k, j);
                const Complex t2 = h(k + 1, j);
                h(k, j) = c * t1 + s * t2;
                h(k + 1, j) = -std::conj(s) * t1 + c * t2;
            }
            h(k + 1, k) = 0;
        }
        for (std::size_t k = lo; k + 1 < hi; ++k) {
            const double c = cs[k];
            const Complex s = ss[k];
            for (std::size_t i = lo; i <= k + 1; ++i) {
                const Complex t1 = h(i, k);
                const Complex t2 = h(i, k + 1);
                h(i, k) = c * t1 + std::conj(s) * t2;
                h(i, k + 1) = -s * t1 + c * t2;
            }
        }
        for (std::size_t i = lo; i < hi; ++i) h(i, i) += mu;
    }
    return out;
}

}  // namespace

ComplexVector eigenvalues(const ComplexMatrix& a) {
    if (!a.square()) throw Error("eigenvalues: matrix must be square");
    const std::size_t n = a.rows();
    if (n == 0) return {};
    if (n == 1) return {a(0, 0)};
    const double scale = max_abs(a);
    if (scale == 0) return ComplexVector(n, Complex{});
    ComplexMatrix h(n, n);
    for (std::size_t i = 0; i < a.data().size(); ++i) h.data()[i] = a.data()[i] / scale;
    reduce_to_hessenberg(h);
    ComplexVector lam = qr_eigenvalues(std::move(h));
    for (auto& l : lam) l *= scale;
    return lam;
}

ComplexVector eigenvalues(const RealMatrix& a) { return eigenvalues(to_complex(a)); }

double spectral_radius(const ComplexMatrix& a) {
    double r = 0;
    for (const Complex& l : eigenvalues(a)) r = std::max(r, std::abs(l));
    return r;
}

double spectral_radius(const RealMatrix& a) { return spectral_radius(to_complex(a)); }

RealVector null_vector(const RealMatrix& a, double tol) {
    if (!a.square()) throw Error("null_vector: matrix must be square");
    const std::size_t n = a.rows();
    RealMatrix u = a;
    const double threshold = tol * std::max(max_abs(a), 1e-300);
    std::vector<std::size_t> col_perm(n);
    for (std::size_t j = 0; j < n; ++j) col_perm[j] = j;
    std::size_t rank = 0;
    for (std::size_t k = 0; k < n; ++k) {
        // Full pivoting over the trailing block.
        std::size_t pi = k, pj = k;
        double best = 0;
        for (std::size_t i = k; i < n; ++i)
            for (std::size_t j = k; j < n; ++j)
                if (std::abs(u(i, j)) > best) {
                    best = std::abs(u(i, j));
                    pi = i;
                    pj = j;
                }
        if (best <= threshold) break;
        if (pi != k)
            for (std::size_t j = 0; j < n; ++j) std::swap(u(k, j), u(pi, j));
        if (pj != k) {
            for (std::size_t i = 0; i < n; ++i) std::swap(u(i, k), u(i, pj));
            std::swap(col_perm[k], col_perm[pj]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double m = u(i, k) / u(k, k);
            u(i, k) = 0;
            for (std::size_t j = k + 1; j < n; ++j) u(i, j) -= m * u(k, j);
        }
        ++rank;
    }
    if (rank != n - 1)
        throw Error("null_vector: null space dimension is " + std::to_string(n - rank) +
                    ", expected 1");
    // Back-substitute with the free variable set to one.
    RealVector y(n, 0.0);
    y[n - 1] = 1.0;
    for (std::size_t k = rank; k-- > 0;) {
        double acc = 0;
        for (std::size_t j = k + 1; j < n; ++j) acc += u(k, j) * y[j];
        y[k] = -acc / u(k, k);
    }
    RealVector x(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) x[col_perm[j]] = y[j];
    return x;
}

}  // namespace peer
