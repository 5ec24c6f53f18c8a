#pragma once

#include "polywave/assembly.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <string>

namespace polywave {

// One time level. `energy` is the squared discrete energy norm
// u^T M u + p^T N p.
struct WaveState {
    Eigen::VectorXd u;
    Eigen::VectorXd p;
    double t = 0.0;
    double energy = 0.0;
};

enum class Scheme { theta, symplectic };

struct SteppingConfig {
    Scheme scheme = Scheme::theta;
    double theta = 0.5;
    double tau = 0.0;
    double T = 0.0;
    bool use_iterative = false;
    double solver_tol = 1e-12;

    int n_steps() const
    {
        if (tau <= 0.0) throw ConfigError("time step tau must be positive");
        const double n = std::round(T / tau);
        if (std::abs(n * tau - T) > 1e-12 * std::max(1.0, std::abs(T)))
            throw ConfigError("final time T must be an integer multiple of tau");
        return static_cast<int>(n);
    }
};

inline WaveState make_state(const GlobalSystem& sys, Eigen::VectorXd u, Eigen::VectorXd p,
                            double t)
{
    WaveState s;
    s.energy = sys.energy(u, p);
    s.u = std::move(u);
    s.p = std::move(p);
    s.t = t;
    return s;
}

// Initial state: velocity DoFs by Fortin interpolation of u0, pressure by
// cellwise L^2 projection of p0.
inline WaveState init_state(const PolygonalMesh& mesh, const DofMap& dofmap,
                            const std::vector<ElementOps>& ops, const GlobalSystem& sys,
                            const VectorField& u0, const ScalarField& p0)
{
    Eigen::VectorXd u = fortin_interpolate(mesh, dofmap, ops, u0, 0.0);
    Eigen::VectorXd p(dofmap.n_pressure());
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const Eigen::VectorXd pc = ops[c].project_scalar(p0, 0.0);
        for (int i = 0; i < pc.size(); ++i) p[dofmap.pressure_dof(static_cast<int>(c), i)] = pc[i];
    }
    return make_state(sys, std::move(u), std::move(p), 0.0);
}

// Reference energy of the projected initial data,
// || (Pi0_k u0, Pi0_k p0) ||_E^2, evaluated by quadrature of the projections.
inline double projected_initial_energy(const PolygonalMesh& mesh,
                                       const std::vector<ElementOps>& ops,
                                       const MaterialField& material, const VectorField& u0,
                                       const ScalarField& p0)
{
    double total = 0.0;
    for (std::size_t c = 0; c < mesh.n_cells(); ++c) {
        const ElementOps& op = ops[c];
        const Eigen::VectorXd uc = op.project_vector(u0, 0.0);
        const Eigen::VectorXd pc = op.project_scalar(p0, 0.0);
        const double cinv = 1.0 / material.c(mesh.cells[c].region);
        const PolygonQuadrature rule = polygon_rule(op.geo.poly, op.data_order);
        for (const auto& q : rule.points) {
            const Vec2 uv = op.eval_vector(uc, q.x);
            const double pv = op.eval_pressure(pc, q.x);
            total += q.w * (uv.squaredNorm() + cinv * cinv * pv * pv);
        }
    }
    return total;
}

// theta-scheme: one factorization of the fixed block matrix
//   K = [ M/tau + theta R, theta B^T; -theta B, N/tau ]
// on the Neumann-free DoFs, reused across all steps.
class ThetaStepper {
public:
    ThetaStepper(const GlobalSystem& sys, double theta, double tau, bool use_iterative = false,
                 double solver_tol = 1e-12)
        : sys_(sys), theta_(theta), tau_(tau), iterative_(use_iterative), tol_(solver_tol)
    {
        if (theta < 0.0 || theta > 1.0) throw ConfigError("theta must lie in [0,1]");
        const int nf = sys.n_free();
        const int n = nf + sys.n_p;
        std::vector<Eigen::Triplet<double>> trips;
        auto add_uu = [&](const SparseMat& A, double scale) {
            for (int col = 0; col < A.outerSize(); ++col)
                for (SparseMat::InnerIterator it(A, col); it; ++it) {
                    const int i = sys.free_of[static_cast<int>(it.row())];
                    const int j = sys.free_of[static_cast<int>(it.col())];
                    if (i >= 0 && j >= 0 && it.value() != 0.0)
                        trips.emplace_back(i, j, scale * it.value());
                }
        };
        add_uu(sys.M, 1.0 / tau);
        if (theta != 0.0 && sys.R.nonZeros() > 0) add_uu(sys.R, theta);
        for (int col = 0; col < sys.B.outerSize(); ++col)
            for (SparseMat::InnerIterator it(sys.B, col); it; ++it) {
                const int j = sys.free_of[static_cast<int>(it.col())];
                if (j < 0 || it.value() == 0.0) continue;
                const int ip = nf + static_cast<int>(it.row());
                trips.emplace_back(j, ip, theta_ * it.value());  // theta B^T
                trips.emplace_back(ip, j, -theta_ * it.value()); // -theta B
            }
        for (int col = 0; col < sys.N.outerSize(); ++col)
            for (SparseMat::InnerIterator it(sys.N, col); it; ++it)
                trips.emplace_back(nf + static_cast<int>(it.row()),
                                   nf + static_cast<int>(it.col()), it.value() / tau);
        K_.resize(n, n);
        K_.setFromTriplets(trips.begin(), trips.end());
        K_.makeCompressed();
        if (iterative_) {
            bicg_.setTolerance(tol_);
            bicg_.compute(K_);
        } else {
            lu_.compute(K_);
            if (lu_.info() != Eigen::Success)
                throw SolverError("theta-step matrix factorization failed (n=" +
                                  std::to_string(n) + ", tau=" + std::to_string(tau) + ")");
        }
        ++n_factorizations_;
    }

    double theta() const { return theta_; }
    double tau() const { return tau_; }
    int factorization_count() const { return n_factorizations_; }
    int solve_count() const { return n_solves_; }

    WaveState step(const WaveState& s, const Loads& at_n, const Loads& at_np1) const
    {
        const GlobalSystem& sys = sys_;
        const double th = theta_;

        Eigen::VectorXd ru = (sys.M * s.u) / tau_ + th * at_np1.G_u + (1.0 - th) * at_n.G_u;
        if (sys.R.nonZeros() > 0) ru -= (1.0 - th) * (sys.R * s.u);
        ru -= (1.0 - th) * (sys.B.transpose() * s.p);
        Eigen::VectorXd rp = (sys.N * s.p) / tau_ + (1.0 - th) * (sys.B * s.u) +
                             th * at_np1.F_p + (1.0 - th) * at_n.F_p;

        // essential lift at t_{n+1}
        const Eigen::VectorXd& lift = at_np1.essential_values;
        const bool lifted = !sys.essential.empty();
        if (lifted) {
            ru -= (sys.M * lift) / tau_;
            if (theta_ != 0.0) {
                if (sys.R.nonZeros() > 0) ru -= th * (sys.R * lift);
                rp += th * (sys.B * lift);
            }
        }

        const int nf = sys.n_free();
        Eigen::VectorXd rhs(nf + sys.n_p);
        rhs.head(nf) = sys.reduce(ru);
        rhs.tail(sys.n_p) = rp;

        Eigen::VectorXd sol;
        if (iterative_) {
            sol = bicg_.solve(rhs);
            if (bicg_.info() != Eigen::Success)
                throw SolverError("iterative theta-step solve did not converge, residual " +
                                  std::to_string(bicg_.error()));
        } else {
            sol = lu_.solve(rhs);
            if (lu_.info() != Eigen::Success) throw SolverError("theta-step solve failed");
        }
        ++n_solves_;

        Eigen::VectorXd u_next = sys.expand(sol.head(nf), lifted ? lift : Eigen::VectorXd::Zero(sys.n_u));
        return make_state(sys, std::move(u_next), sol.tail(sys.n_p), s.t + tau_);
    }

private:
    const GlobalSystem& sys_;
    double theta_, tau_;
    bool iterative_;
    double tol_;
    SparseMat K_;
    Eigen::SparseLU<SparseMat> lu_;
    Eigen::BiCGSTAB<SparseMat> bicg_;
    mutable int n_solves_ = 0;
    int n_factorizations_ = 0;
};

// Symplectic Euler: explicit pressure update through the block-diagonal N,
// then the velocity update with p^{n+1}.
class SymplecticStepper {
public:
    SymplecticStepper(const GlobalSystem& sys, double tau) : sys_(sys), tau_(tau)
    {
        nllt_.compute(sys.N);
        if (nllt_.info() != Eigen::Success)
            throw SolverError("pressure mass factorization failed");
        const int nf = sys.n_free();
        std::vector<Eigen::Triplet<double>> trips;
        for (int col = 0; col < sys.M.outerSize(); ++col)
            for (SparseMat::InnerIterator it(sys.M, col); it; ++it) {
                const int i = sys.free_of[static_cast<int>(it.row())];
                const int j = sys.free_of[static_cast<int>(it.col())];
                if (i >= 0 && j >= 0) trips.emplace_back(i, j, it.value());
            }
        SparseMat Mff(nf, nf);
        Mff.setFromTriplets(trips.begin(), trips.end());
        mllt_.compute(Mff);
        if (mllt_.info() != Eigen::Success)
            throw SolverError("velocity mass factorization failed");
        ++n_factorizations_;
    }

    double tau() const { return tau_; }
    int factorization_count() const { return n_factorizations_; }
    int solve_count() const { return n_solves_; }

    WaveState step(const WaveState& s, const Loads& at_n, const Loads& at_np1) const
    {
        const GlobalSystem& sys = sys_;
        Eigen::VectorXd p_next =
            s.p + tau_ * nllt_.solve(sys.B * s.u + at_n.F_p);
        Eigen::VectorXd ru = sys.M * s.u - tau_ * (sys.B.transpose() * p_next) + tau_ * at_n.G_u;
        if (sys.R.nonZeros() > 0) ru -= tau_ * (sys.R * s.u);
        const Eigen::VectorXd& lift = at_np1.essential_values;
        if (!sys.essential.empty()) ru -= sys.M * lift;
        const Eigen::VectorXd uf = mllt_.solve(sys.reduce(ru));
        ++n_solves_;
        Eigen::VectorXd u_next = sys.expand(uf, lift);
        return make_state(sys, std::move(u_next), std::move(p_next), s.t + tau_);
    }

private:
    const GlobalSystem& sys_;
    double tau_;
    Eigen::SimplicialLLT<SparseMat> nllt_;
    Eigen::SimplicialLLT<SparseMat> mllt_;
    mutable int n_solves_ = 0;
    int n_factorizations_ = 0;
};

// Exact algebraic identity of the theta scheme with f = 0 and no Robin part:
//   E^{n+1} + (2 theta - 1) ||(du, dp)||_{E_h}^2 = E^n.
// The returned residual certifies assembly and solver jointly.
inline double energy_identity_residual(const GlobalSystem& sys, const WaveState& s0,
                                       const WaveState& s1, double theta)
{
    const Eigen::VectorXd du = s1.u - s0.u;
    const Eigen::VectorXd dp = s1.p - s0.p;
    const double incr = sys.energy(du, dp);
    return std::abs(s1.energy + (2.0 * theta - 1.0) * incr - s0.energy);
}

// CSV energy trace: step, t, energy, energy_minus_initial.
class EnergyTraceWriter {
public:
    explicit EnergyTraceWriter(const std::string& path) : os_(path)
    {
        if (!os_) throw ConfigError("cannot open energy trace file: " + path);
        os_ << "step,t,energy,energy_minus_initial\n";
        os_ << std::setprecision(17);
    }

    void record(int step, const WaveState& s)
    {
        if (step == 0) initial_ = s.energy;
        os_ << step << "," << s.t << "," << s.energy << "," << (s.energy - initial_) << "\n";
    }

private:
    std::ofstream os_;
    double initial_ = 0.0;
};

} // namespace polywave
