// Test-only oracles, independent of the library's solver paths: a hand-rolled
// normal-equations least squares, a Jacobi eigensolver, quadrature and
// regression helpers, and seeded random inputs. Nothing here may call into
// the code paths it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "arblab/rng.hpp"

namespace oracle {

// Least squares via the normal equations (A'A) x = A'b, solved by
// Gauss-Jordan elimination with partial pivoting. Requires full column rank.
inline Eigen::VectorXd normal_equations_lsq(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    const int m = static_cast<int>(a.cols());
    std::vector<std::vector<double>> g(m, std::vector<double>(m + 1, 0.0));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int r = 0; r < a.rows(); ++r) s += a(r, i) * a(r, j);
            g[i][j] = s;
        }
        double s = 0.0;
        for (int r = 0; r < a.rows(); ++r) s += a(r, i) * b[r];
        g[i][m] = s;
    }
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(g[r][col]) > std::abs(g[pivot][col])) pivot = r;
        if (std::abs(g[pivot][col]) < 1e-14)
            throw std::runtime_error("normal_equations_lsq: rank deficient");
        std::swap(g[pivot], g[col]);
        const double d = g[col][col];
        for (int c = col; c <= m; ++c) g[col][c] /= d;
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const double f = g[r][col];
            for (int c = col; c <= m; ++c) g[r][c] -= f * g[col][c];
        }
    }
    Eigen::VectorXd x(m);
    for (int i = 0; i < m; ++i) x[i] = g[i][m];
    return x;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd s) {
    const int n = static_cast<int>(s.rows());
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(s(p, q)) < 1e-300) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(n, n);
                rot(p, p) = c;
                rot(q, q) = c;
                rot(p, q) = sn;
                rot(q, p) = -sn;
                s = rot.transpose() * s * rot;
            }
        }
    }
    std::vector<double> eig(n);
    for (int i = 0; i < n; ++i) eig[i] = s(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

// Ordinary least-squares line fit.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

// Deterministic test inputs.
class Rand {
public:
    explicit Rand(std::uint64_t seed, std::uint64_t stream = 0) : normals_(seed, stream) {}

    double normal() { return normals_.next(); }
    double uniform(double lo, double hi) {
        // Fold a normal through the error function for a cheap uniform.
        const double u = 0.5 * (1.0 + std::erf(normals_.next() / std::sqrt(2.0)));
        return lo + (hi - lo) * u;
    }
    Eigen::VectorXd normal_vector(int n, double scale = 1.0) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = scale * normal();
        return v;
    }
    Eigen::MatrixXd normal_matrix(int rows, int cols, double scale = 1.0) {
        Eigen::MatrixXd m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = scale * normal();
        return m;
    }
    // Random weights summing to one, entries bounded away from the limit.
    Eigen::VectorXd weights(int n) {
        Eigen::VectorXd w = normal_vector(n, 0.6);
        w.array() += 1.0 / n - w.mean();  // shift to sum exactly-ish to 1
        w[0] += 1.0 - w.sum();            // absorb rounding in one slot
        return w;
    }
    // Random orthogonal matrix from a QR factorization.
    Eigen::MatrixXd orthogonal(int n) {
        const Eigen::MatrixXd g = normal_matrix(n, n);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
        const Eigen::MatrixXd r = q.transpose() * g;
        for (int i = 0; i < n; ++i)
            if (r(i, i) < 0.0) q.col(i) = -q.col(i);
        return q;
    }

private:
    arblab::NormalStream normals_;
};

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double stderr_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    var /= static_cast<double>(v.size() - 1);
    return std::sqrt(var / static_cast<double>(v.size()));
}

}  // namespace oracle
