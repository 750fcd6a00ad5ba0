#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ovs {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// exact Stokes pair with mu = 1, sigma = Du - pI
class ExactSolution {
public:
    virtual ~ExactSolution() = default;
    virtual std::string name() const = 0;
    virtual Vec2 u(const Vec2& x) const = 0;
    // rows: components, columns: d/dx, d/dy
    virtual Mat2 grad_u(const Vec2& x) const = 0;
    virtual double p(const Vec2& x) const = 0;
    // -Laplace(u) + grad p
    virtual Vec2 f(const Vec2& x) const = 0;
    Vec2 traction(const Vec2& x, const Vec2& n) const { return grad_u(x) * n - p(x) * n; }
};

std::shared_ptr<const ExactSolution> manufactured(const std::string& name);
std::vector<std::string> manufactured_names();
// s times another solution (linearity checks)
std::shared_ptr<const ExactSolution> scaled(std::shared_ptr<const ExactSolution> base, double s);

// second-order forward-mode number in two variables
struct Dual2 {
    double v = 0.0;
    double dx = 0.0, dy = 0.0;
    double xx = 0.0, xy = 0.0, yy = 0.0;

    Dual2() = default;
    Dual2(double c) : v(c) {}
    static Dual2 var_x(double x) { Dual2 d(x); d.dx = 1.0; return d; }
    static Dual2 var_y(double y) { Dual2 d(y); d.dy = 1.0; return d; }
};

inline Dual2 operator+(const Dual2& a, const Dual2& b)
{
    Dual2 r;
    r.v = a.v + b.v;
    r.dx = a.dx + b.dx;
    r.dy = a.dy + b.dy;
    r.xx = a.xx + b.xx;
    r.xy = a.xy + b.xy;
    r.yy = a.yy + b.yy;
    return r;
}

inline Dual2 operator*(const Dual2& a, const Dual2& b)
{
    Dual2 r;
    r.v = a.v * b.v;
    r.dx = a.dx * b.v + a.v * b.dx;
    r.dy = a.dy * b.v + a.v * b.dy;
    r.xx = a.xx * b.v + 2.0 * a.dx * b.dx + a.v * b.xx;
    r.xy = a.xy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.xy;
    r.yy = a.yy * b.v + 2.0 * a.dy * b.dy + a.v * b.yy;
    return r;
}

inline Dual2 operator-(const Dual2& a) { return a * -1.0; }
inline Dual2 operator-(const Dual2& a, const Dual2& b) { return a + b * -1.0; }

inline Dual2 exp(const Dual2& a)
{
    double e = std::exp(a.v);
    Dual2 r;
    r.v = e;
    r.dx = e * a.dx;
    r.dy = e * a.dy;
    r.xx = e * (a.xx + a.dx * a.dx);
    r.xy = e * (a.xy + a.dx * a.dy);
    r.yy = e * (a.yy + a.dy * a.dy);
    return r;
}

} // namespace ovs
