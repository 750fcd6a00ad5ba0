#include "ovstokes/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "ovstokes/errors.hpp"

namespace ovs {

namespace {

Rule1D compute_gauss(int n)
{
    Rule1D r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.x[i] = 0.5 * (1.0 - z);
        r.x[n - 1 - i] = 0.5 * (1.0 + z);
        r.w[i] = 0.5 * w;
        r.w[n - 1 - i] = 0.5 * w;
    }
    return r;
}

} // namespace

Rule1D gauss_legendre(int n)
{
    if (n < 1) throw ParameterError("gauss_legendre: n must be positive");
    static std::mutex mtx;
    static std::map<int, Rule1D> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    return cache.emplace(n, compute_gauss(n)).first->second;
}

Rule2D gauss_square(int n)
{
    Rule1D g = gauss_legendre(n);
    Rule2D r;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            r.x.emplace_back(g.x[i], g.x[j]);
            r.w.push_back(g.w[i] * g.w[j]);
        }
    return r;
}

Rule2D gauss_triangle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c, int n)
{
    Rule1D g = gauss_legendre(n);
    Eigen::Vector2d e1 = b - a, e2 = c - a;
    double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    Rule2D r;
    r.x.reserve(n * n);
    r.w.reserve(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double u = g.x[i];
            double v = g.x[j] * (1.0 - u);
            r.x.push_back(a + u * e1 + v * e2);
            r.w.push_back(g.w[i] * g.w[j] * (1.0 - u) * jac);
        }
    return r;
}

} // namespace ovs
