#pragma once

#include <vector>

#include <Eigen/Dense>

namespace ovs {

struct Rule1D {
    std::vector<double> x; // on [0,1]
    std::vector<double> w;
};

// n-point Gauss-Legendre on [0,1], exact for degree 2n-1
Rule1D gauss_legendre(int n);

struct Rule2D {
    std::vector<Eigen::Vector2d> x;
    std::vector<double> w;
};

// tensor rule on [0,1]^2
Rule2D gauss_square(int n);

// collapsed (Duffy) rule on the triangle a,b,c with n points per direction;
// weights carry the physical area
Rule2D gauss_triangle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c, int n);

} // namespace ovs
