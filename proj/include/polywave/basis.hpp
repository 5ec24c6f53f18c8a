#pragma once

#include "polywave/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace polywave {

// Graded lexicographic multi-index ordering, fixed project-wide:
// (0,0) | (1,0) (0,1) | (2,0) (1,1) (0,2) | ...
struct MultiIndex {
    int ax = 0, ay = 0;
    int degree() const { return ax + ay; }
};

inline int poly_space_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }

inline MultiIndex multi_index(int linear)
{
    int d = 0;
    while ((d + 1) * (d + 2) / 2 <= linear) ++d;
    const int j = linear - d * (d + 1) / 2;
    return {d - j, j};
}

inline int linear_index(const MultiIndex& a)
{
    const int d = a.degree();
    return d * (d + 1) / 2 + a.ay;
}

// Scaled monomials m_a(x) = ((x - x_E)/h_E)^a on a cell.
class ScaledMonomialBasis {
public:
    ScaledMonomialBasis() = default;
    ScaledMonomialBasis(int degree, const Vec2& centroid, double h)
        : degree_(degree), centroid_(centroid), h_(h)
    {
        if (degree < 0 || h <= 0.0)
            throw std::invalid_argument("ScaledMonomialBasis: bad degree or diameter");
    }

    int degree() const { return degree_; }
    int size() const { return poly_space_dim(degree_); }
    const Vec2& centroid() const { return centroid_; }
    double diameter() const { return h_; }

    Vec2 scaled(const Vec2& x) const { return (x - centroid_) / h_; }

    static double power(double base, int e)
    {
        double r = 1.0;
        for (int i = 0; i < e; ++i) r *= base;
        return r;
    }

    double eval_one(int i, const Vec2& x) const
    {
        const MultiIndex a = multi_index(i);
        const Vec2 s = scaled(x);
        return power(s.x(), a.ax) * power(s.y(), a.ay);
    }

    // gradient in physical coordinates (carries the 1/h_E factor)
    Vec2 grad_one(int i, const Vec2& x) const
    {
        const MultiIndex a = multi_index(i);
        const Vec2 s = scaled(x);
        double gx = 0.0, gy = 0.0;
        if (a.ax > 0) gx = a.ax * power(s.x(), a.ax - 1) * power(s.y(), a.ay);
        if (a.ay > 0) gy = a.ay * power(s.x(), a.ax) * power(s.y(), a.ay - 1);
        return Vec2(gx / h_, gy / h_);
    }

    // values matrix: rows = points, cols = basis functions
    template <class Pts> Eigen::MatrixXd eval(const Pts& points) const
    {
        Eigen::MatrixXd V(points.size(), size());
        for (std::size_t p = 0; p < points.size(); ++p)
            for (int i = 0; i < size(); ++i) V(p, i) = eval_one(i, point_of(points, p));
        return V;
    }

    double eval_poly(const Eigen::VectorXd& coeff, const Vec2& x) const
    {
        double v = 0.0;
        for (int i = 0; i < coeff.size(); ++i) v += coeff[i] * eval_one(i, x);
        return v;
    }

private:
    template <class Pts> static const Vec2& point_of(const Pts& pts, std::size_t i)
    {
        if constexpr (std::is_same_v<typename Pts::value_type, QuadPoint>)
            return pts[i].x;
        else
            return pts[i];
    }

    int degree_ = 0;
    Vec2 centroid_ = Vec2::Zero();
    double h_ = 1.0;
};

// Basis of [P_k(E)]^2 realized through the decomposition
//   [P_k]^2 = grad P_{k+1}  (+)  x_perp P_{k-1},
// with the gradient family scaled by h_E so all entries are O(1), and
// x_perp the rotated scaled coordinate ((y-y_E)/h_E, -(x-x_E)/h_E).
class VectorPolyBasis {
public:
    VectorPolyBasis() = default;
    VectorPolyBasis(int k, const Vec2& centroid, double h)
        : k_(k), scalar_(k + 1, centroid, h)
    {
    }

    int k() const { return k_; }
    int n_grad() const { return poly_space_dim(k_ + 1) - 1; }
    int n_rot() const { return k_ > 0 ? poly_space_dim(k_ - 1) : 0; }
    int size() const { return n_grad() + n_rot(); } // == (k+1)(k+2) == dim [P_k]^2
    const ScaledMonomialBasis& scalar_kp1() const { return scalar_; }

    Vec2 eval_one(int j, const Vec2& x) const
    {
        const double h = scalar_.diameter();
        if (j < n_grad()) return h * scalar_.grad_one(j + 1, x);
        const MultiIndex b = multi_index(j - n_grad());
        const Vec2 s = scalar_.scaled(x);
        const double m = ScaledMonomialBasis::power(s.x(), b.ax) *
                         ScaledMonomialBasis::power(s.y(), b.ay);
        return Vec2(s.y() * m, -s.x() * m);
    }

    double div_one(int j, const Vec2& x) const
    {
        const double h = scalar_.diameter();
        const Vec2 s = scalar_.scaled(x);
        if (j < n_grad()) {
            const MultiIndex a = multi_index(j + 1);
            double lap = 0.0;
            if (a.ax > 1)
                lap += a.ax * (a.ax - 1) * ScaledMonomialBasis::power(s.x(), a.ax - 2) *
                       ScaledMonomialBasis::power(s.y(), a.ay);
            if (a.ay > 1)
                lap += a.ay * (a.ay - 1) * ScaledMonomialBasis::power(s.x(), a.ax) *
                       ScaledMonomialBasis::power(s.y(), a.ay - 2);
            return lap / h;
        }
        const MultiIndex b = multi_index(j - n_grad());
        double d = 0.0;
        if (b.ax > 0)
            d += b.ax * ScaledMonomialBasis::power(s.x(), b.ax - 1) *
                 ScaledMonomialBasis::power(s.y(), b.ay + 1);
        if (b.ay > 0)
            d -= b.ay * ScaledMonomialBasis::power(s.x(), b.ax + 1) *
                 ScaledMonomialBasis::power(s.y(), b.ay - 1);
        return d / h;
    }

    Vec2 eval_poly(const Eigen::VectorXd& coeff, const Vec2& x) const
    {
        Vec2 v = Vec2::Zero();
        for (int j = 0; j < coeff.size(); ++j) v += coeff[j] * eval_one(j, x);
        return v;
    }

private:
    int k_ = 0;
    ScaledMonomialBasis scalar_; // degree k+1, shared by both families
};

// Triangular change of basis T with T G T^T = I for an SPD Gram matrix G.
// New basis functions are rows of T applied to the old ones.
inline Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& gram)
{
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("orthonormalize: Gram matrix is not SPD (Cholesky failed)");
    const Eigen::MatrixXd L = llt.matrixL();
    return L.triangularView<Eigen::Lower>().solve(
        Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
}

} // namespace polywave
