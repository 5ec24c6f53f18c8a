#pragma once

#include "polywave/assembly.hpp"
#include "polywave/timestepping.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <string>
#include <vector>

namespace polywave {

struct ErrorReport {
    double e_u = 0.0;      // || u(T) - Pi0_k u_h(T) ||_0
    double e_p = 0.0;      // || p(T) - p_h(T) ||_0
    double e_energy = 0.0; // combined energy-norm error
    double h = 0.0;
    int k = 0;
    std::string mesh_family;
    int n_u = 0, n_p = 0;
    double wall_time = 0.0;
    double c_hat = 0.0;
};

// Errors by cellwise quadrature at order 2k+4 (elevated above the assembly
// order so quadrature cannot mask the discretization error).
inline ErrorReport compute_errors(const PolygonalMesh& mesh, const DofMap& dofmap,
                                  const std::vector<ElementOps>& ops,
                                  const MaterialField& material, const WaveState& state,
                                  const VectorField& u_exact, const ScalarField& p_exact,
                                  int quad_order = -1)
{
    const int k = dofmap.k();
    const int order = quad_order > 0 ? quad_order : 2 * k + 4;
    double eu2 = 0.0, ep2 = 0.0, epc2 = 0.0;
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const ElementOps& op = ops[c];
        const Eigen::VectorXd loc = dofmap.gather(static_cast<int>(c), state.u);
        const Eigen::VectorXd ucoef = op.Pi * loc;
        Eigen::VectorXd pcoef(op.n_pressure());
        for (int i = 0; i < op.n_pressure(); ++i)
            pcoef[i] = state.p[dofmap.pressure_dof(static_cast<int>(c), i)];
        const double cinv = 1.0 / material.c(mesh.cells[c].region);
        const PolygonQuadrature rule = polygon_rule(op.geo.poly, order);
        for (const auto& q : rule.points) {
            const Vec2 du = u_exact(q.x, state.t) - op.eval_vector(ucoef, q.x);
            const double dp = p_exact(q.x, state.t) - op.eval_pressure(pcoef, q.x);
            eu2 += q.w * du.squaredNorm();
            ep2 += q.w * dp * dp;
            epc2 += q.w * cinv * cinv * dp * dp;
        }
    }
    ErrorReport rep;
    rep.e_u = std::sqrt(eu2);
    rep.e_p = std::sqrt(ep2);
    rep.e_energy = std::sqrt(eu2 + epc2);
    rep.k = k;
    rep.n_u = dofmap.n_velocity();
    rep.n_p = dofmap.n_pressure();
    rep.c_hat = material.c_hat();
    return rep;
}

struct ConvergenceTable {
    std::vector<ErrorReport> rows;

    void add(ErrorReport rep) { rows.push_back(std::move(rep)); }
};

struct EocResult {
    std::vector<double> pairwise_u, pairwise_p, pairwise_energy;
    double slope_u = 0.0, slope_p = 0.0, slope_energy = 0.0; // least-squares
};

inline double least_squares_slope(const std::vector<double>& h, const std::vector<double>& e)
{
    const std::size_t n = h.size();
    double sx = 0.0, sy = 0.0;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(h[i]);
        y[i] = std::log(e[i]);
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

inline EocResult eoc(const ConvergenceTable& table)
{
    const auto& rows = table.rows;
    if (rows.size() < 2) throw ConfigError("EOC needs at least two refinement rows");
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].h < rows[i - 1].h))
            throw ConfigError("EOC requires strictly decreasing mesh size down the table");
    EocResult res;
    std::vector<double> h, eu, ep, ee;
    for (const auto& r : rows) {
        h.push_back(r.h);
        eu.push_back(r.e_u);
        ep.push_back(r.e_p);
        ee.push_back(r.e_energy);
    }
    auto rate = [](double e0, double e1, double h0, double h1) {
        return std::log(e0 / e1) / std::log(h0 / h1);
    };
    for (std::size_t i = 1; i < rows.size(); ++i) {
        res.pairwise_u.push_back(rate(eu[i - 1], eu[i], h[i - 1], h[i]));
        res.pairwise_p.push_back(rate(ep[i - 1], ep[i], h[i - 1], h[i]));
        res.pairwise_energy.push_back(rate(ee[i - 1], ee[i], h[i - 1], h[i]));
    }
    res.slope_u = least_squares_slope(h, eu);
    res.slope_p = least_squares_slope(h, ep);
    res.slope_energy = least_squares_slope(h, ee);
    return res;
}

// || u0 - Pi0_k u0 ||^2 + || c^-1 (p0 - Pi0_k p0) ||^2: the gap between the
// conserved continuous and semi-discrete energies, expected to decay at rate
// 2(k+1).
inline double projection_energy_gap(const PolygonalMesh& mesh, const std::vector<ElementOps>& ops,
                                    const MaterialField& material, const VectorField& u0,
                                    const ScalarField& p0)
{
    double gap = 0.0;
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const ElementOps& op = ops[c];
        const Eigen::VectorXd uc = op.project_vector(u0, 0.0);
        const Eigen::VectorXd pc = op.project_scalar(p0, 0.0);
        const double cinv = 1.0 / material.c(mesh.cells[c].region);
        const PolygonQuadrature rule = polygon_rule(op.geo.poly, op.data_order + 2);
        for (const auto& q : rule.points) {
            const Vec2 du = u0(q.x, 0.0) - op.eval_vector(uc, q.x);
            const double dp = p0(q.x, 0.0) - op.eval_pressure(pc, q.x);
            gap += q.w * (du.squaredNorm() + cinv * cinv * dp * dp);
        }
    }
    return gap;
}

// Dense inf-sup diagnostic: smallest nonzero generalized singular value of B
// with respect to the discrete H(div) and pressure norms. Informational only;
// skipped above the size threshold.
inline std::optional<double> infsup_probe(const GlobalSystem& sys, int size_limit = 4000)
{
    if (sys.n_u > size_limit || sys.n_p > size_limit) return std::nullopt;
    const Eigen::MatrixXd M = Eigen::MatrixXd(sys.M);
    const Eigen::MatrixXd N = Eigen::MatrixXd(sys.N);
    Eigen::MatrixXd B(sys.n_p, sys.n_u);
    B = Eigen::MatrixXd(sys.B);
    // restrict to Neumann-free velocity DoFs
    const int nf = sys.n_free();
    Eigen::MatrixXd Mf(nf, nf), Bf(sys.n_p, nf);
    for (int i = 0; i < nf; ++i) {
        Bf.col(i) = B.col(sys.full_of[i]);
        for (int j = 0; j < nf; ++j) Mf(i, j) = M(sys.full_of[i], sys.full_of[j]);
    }
    const Eigen::MatrixXd Tv = Mf + Bf.transpose() * N.ldlt().solve(Bf); // H(div) norm
    const Eigen::MatrixXd A = Bf * Tv.ldlt().solve(Bf.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, N);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double cutoff = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    double min_nonzero = std::numeric_limits<double>::max();
    for (int i = 0; i < ev.size(); ++i)
        if (ev[i] > cutoff) min_nonzero = std::min(min_nonzero, ev[i]);
    if (min_nonzero == std::numeric_limits<double>::max()) return 0.0;
    return std::sqrt(min_nonzero);
}

inline void write_convergence_csv(const ConvergenceTable& table, const EocResult& rates,
                                  const std::string& path)
{
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open convergence table file: " + path);
    os << "h,e_u,e_p,e_energy,eoc_u,eoc_p\n" << std::setprecision(12);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& r = table.rows[i];
        os << r.h << "," << r.e_u << "," << r.e_p << "," << r.e_energy << ",";
        if (i == 0)
            os << ",";
        else
            os << rates.pairwise_u[i - 1] << "," << rates.pairwise_p[i - 1];
        os << "\n";
    }
}

} // namespace polywave
