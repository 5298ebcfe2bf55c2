#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "bergman/errors.hpp"

namespace bergman {

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using LinearMap = std::function<Vec<Scalar>(const Vec<Scalar>&)>;

template <class Scalar>
struct SingularValue {
    double value = 0.0;
    int iterations = 0;
    Vec<Scalar> right;  // unit maximizer of |Nx|/|x|
};

// Largest singular value of N by Lanczos on N*N with full reorthogonalization, started from the
// best of the given vectors. The result is never below the Rayleigh quotient of any start.
template <class Scalar>
SingularValue<Scalar> largest_singular_value(const LinearMap<Scalar>& N, const LinearMap<Scalar>& Nadj,
                                             Eigen::Index n, const std::vector<Vec<Scalar>>& starts,
                                             int max_iter = 200, double rel_tol = 1e-13)
{
    require(n > 0, ErrorKind::InvalidArgument, "empty operator");
    Vec<Scalar> v0 = Vec<Scalar>::Ones(n);
    double best = -1.0;
    for (const auto& s : starts) {
        const double ns = s.norm();
        if (ns == 0.0) continue;
        const double q = N(s).norm() / ns;
        if (q > best) {
            best = q;
            v0 = s;
        }
    }
    v0 /= v0.norm();

    const int kmax = static_cast<int>(std::min<Eigen::Index>(max_iter, n));
    std::vector<Vec<Scalar>> V;
    std::vector<double> alpha, beta;
    V.push_back(v0);
    double prev = 0.0;
    SingularValue<Scalar> out;
    for (int k = 0; k < kmax; ++k) {
        Vec<Scalar> w = Nadj(N(V[k]));
        alpha.push_back(std::real(V[k].dot(w)));
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& u : V) w -= u * u.dot(w);
        }
        const double b = w.norm();

        const int m = k + 1;
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const double lam = es.eigenvalues()(m - 1);
        out.iterations = m;
        out.value = std::sqrt(std::max(lam, 0.0));
        Vec<Scalar> x = Vec<Scalar>::Zero(n);
        for (int i = 0; i < m; ++i) x += V[i] * Scalar(es.eigenvectors()(i, m - 1));
        out.right = x / x.norm();

        const bool converged = k > 0 && std::fabs(lam - prev) <= rel_tol * std::fabs(lam);
        prev = lam;
        if (converged || b <= 1e-14 * std::sqrt(std::max(lam, 1e-300))) break;
        beta.push_back(b);
        V.push_back(w / b);
    }
    out.value = std::max(out.value, best);
    return out;
}

// Boyd's nonlinear power method for the l^p -> l^p norm of a nonnegative matrix; returns the
// best ratio |Nx|_p/|x|_p seen, a lower bound.
inline double boyd_lower_bound(const LinearMap<double>& N, const LinearMap<double>& NT, Eigen::Index n,
                               double p, std::vector<Vec<double>> starts, int iters = 200,
                               std::uint64_t seed = 1)
{
    require(p > 1.0, ErrorKind::InvalidArgument, "p must exceed 1");
    const double q = p / (p - 1.0);
    auto lp = [](const Vec<double>& x, double e) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::fabs(x(i)), e);
        return std::pow(s, 1.0 / e);
    };
    auto dual = [](const Vec<double>& x, double e) {
        Vec<double> y(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = std::copysign(std::pow(std::fabs(x(i)), e - 1.0), x(i));
        return y;
    };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int s = 0; s < 16; ++s) {
        Vec<double> x(n);
        for (Eigen::Index i = 0; i < n; ++i) x(i) = U(rng);
        starts.push_back(x);
    }
    double best = 0.0;
    for (Vec<double> x : starts) {
        x = x.cwiseAbs();
        double nx = lp(x, p);
        if (nx == 0.0) continue;
        x /= nx;
        double last = 0.0;
        for (int it = 0; it < iters; ++it) {
            const Vec<double> y = N(x);
            const double val = lp(y, p);
            best = std::max(best, val);
            if (it > 0 && std::fabs(val - last) <= 1e-12 * val) break;
            last = val;
            Vec<double> z = dual(NT(dual(y, p)), q);
            nx = lp(z, p);
            if (nx == 0.0) break;
            x = z / nx;
        }
    }
    return best;
}

} // namespace bergman
