#include "ovstokes/manufactured.hpp"

#include "ovstokes/errors.hpp"

namespace ovs {

namespace {

template <class T>
T ms_u1(const T& x, const T& y)
{
    using std::exp;
    return 2.0 * exp(x) * (x - 1.0) * (x - 1.0) * x * x * (y * y - y) * (2.0 * y - 1.0);
}

template <class T>
T ms_u2(const T& x, const T& y)
{
    using std::exp;
    return -exp(x) * (x - 1.0) * x * (x * x + 3.0 * x - 2.0) * (y - 1.0) * (y - 1.0) * y * y;
}

template <class T>
T ms_p(const T& x, const T& y)
{
    using std::exp;
    const double e = std::exp(1.0);
    T s = y * y - y;
    T x2 = x * x;
    T inner = 456.0 + x2 * (228.0 - 5.0 * s) + 2.0 * x * (-228.0 + s) + 2.0 * x2 * x * (-36.0 + s) + x2 * x2 * (12.0 + s);
    return -424.0 + 156.0 * e + s * (-456.0 + exp(x) * inner);
}

class ReferenceSolution : public ExactSolution {
public:
    std::string name() const override { return "ms-stokes-2021"; }
    Vec2 u(const Vec2& x) const override { return {ms_u1(x.x(), x.y()), ms_u2(x.x(), x.y())}; }
    Mat2 grad_u(const Vec2& x) const override
    {
        Dual2 X = Dual2::var_x(x.x()), Y = Dual2::var_y(x.y());
        Dual2 a = ms_u1(X, Y), b = ms_u2(X, Y);
        Mat2 g;
        g << a.dx, a.dy, b.dx, b.dy;
        return g;
    }
    double p(const Vec2& x) const override { return ms_p(x.x(), x.y()); }
    Vec2 f(const Vec2& x) const override
    {
        Dual2 X = Dual2::var_x(x.x()), Y = Dual2::var_y(x.y());
        Dual2 a = ms_u1(X, Y), b = ms_u2(X, Y), q = ms_p(X, Y);
        return {-(a.xx + a.yy) + q.dx, -(b.xx + b.yy) + q.dy};
    }
};

// u = (y, x), p = x, f = (1, 0): reproduced exactly by the discrete spaces
class LinearSolution : public ExactSolution {
public:
    std::string name() const override { return "linear-patch"; }
    Vec2 u(const Vec2& x) const override { return {x.y(), x.x()}; }
    Mat2 grad_u(const Vec2&) const override
    {
        Mat2 g;
        g << 0.0, 1.0, 1.0, 0.0;
        return g;
    }
    double p(const Vec2& x) const override { return x.x(); }
    Vec2 f(const Vec2&) const override { return {1.0, 0.0}; }
};

class ScaledSolution : public ExactSolution {
public:
    ScaledSolution(std::shared_ptr<const ExactSolution> b, double s) : base_(std::move(b)), s_(s) {}
    std::string name() const override { return base_->name(); }
    Vec2 u(const Vec2& x) const override { return s_ * base_->u(x); }
    Mat2 grad_u(const Vec2& x) const override { return s_ * base_->grad_u(x); }
    double p(const Vec2& x) const override { return s_ * base_->p(x); }
    Vec2 f(const Vec2& x) const override { return s_ * base_->f(x); }

private:
    std::shared_ptr<const ExactSolution> base_;
    double s_;
};

} // namespace

std::shared_ptr<const ExactSolution> manufactured(const std::string& name)
{
    if (name == "ms-stokes-2021") return std::make_shared<ReferenceSolution>();
    if (name == "linear-patch") return std::make_shared<LinearSolution>();
    throw ConfigurationError("unknown manufactured solution '" + name + "'");
}

std::vector<std::string> manufactured_names() { return {"ms-stokes-2021", "linear-patch"}; }

std::shared_ptr<const ExactSolution> scaled(std::shared_ptr<const ExactSolution> base, double s)
{
    return std::make_shared<ScaledSolution>(std::move(base), s);
}

} // namespace ovs
