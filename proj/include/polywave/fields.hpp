#pragma once

#include "polywave/geometry.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <string>

namespace polywave {

// Time-dependent analytic fields. Divergence is optional on vector fields;
// interpolation falls back to integration by parts when it is missing.
struct ScalarField {
    std::function<double(const Vec2&, double)> value;
    bool trivially_zero = false;
    bool valid() const { return static_cast<bool>(value); }
    double operator()(const Vec2& x, double t) const { return value(x, t); }
};

struct VectorField {
    std::function<Vec2(const Vec2&, double)> value;
    std::function<double(const Vec2&, double)> divergence; // optional
    bool valid() const { return static_cast<bool>(value); }
    Vec2 operator()(const Vec2& x, double t) const { return value(x, t); }
    bool has_divergence() const { return static_cast<bool>(divergence); }
};

inline ScalarField zero_scalar()
{
    return {[](const Vec2&, double) { return 0.0; }, true};
}

inline VectorField zero_vector()
{
    return {[](const Vec2&, double) { return Vec2::Zero(); },
            [](const Vec2&, double) { return 0.0; }};
}

// One named experiment: data functions plus the exact solution when known.
struct ScenarioData {
    VectorField u_exact;  // also provides the initial velocity at t = 0
    ScalarField p_exact;  // also provides the initial pressure at t = 0
    bool has_exact = false;
    ScalarField f;
    ScalarField g_dirichlet;
    ScalarField g_neumann;
    ScalarField g_robin;
};

// Built-in data registry. "convergence61" is the manufactured smooth solution
// on the unit square; the velocity sign is chosen so that u_t = grad p holds,
// which makes the pair an exact solution of the momentum equation (the
// printed benchmark velocity satisfies u_t = -grad p instead).
inline const std::map<std::string, ScenarioData>& field_registry()
{
    static const std::map<std::string, ScenarioData> registry = [] {
        std::map<std::string, ScenarioData> reg;

        {
            ScenarioData zero;
            zero.u_exact = zero_vector();
            zero.p_exact = zero_scalar();
            zero.has_exact = true;
            zero.f = zero_scalar();
            zero.g_dirichlet = zero_scalar();
            zero.g_neumann = zero_scalar();
            zero.g_robin = zero_scalar();
            reg["zero"] = zero;
        }

        {
            const double tp = 2.0 * M_PI;
            ScenarioData s;
            s.u_exact = {
                [tp](const Vec2& x, double t) {
                    return Vec2(tp * std::cos(tp * x.x()) * std::cos(tp * x.y()) * std::sin(t),
                                -tp * std::sin(tp * x.x()) * std::sin(tp * x.y()) * std::sin(t));
                },
                [tp](const Vec2& x, double t) {
                    return -2.0 * tp * tp * std::sin(tp * x.x()) * std::cos(tp * x.y()) *
                           std::sin(t);
                }};
            s.p_exact = {[tp](const Vec2& x, double t) {
                return std::cos(tp * x.y()) * std::sin(tp * x.x()) * std::cos(t);
            }};
            s.has_exact = true;
            // f = p_t - div u with c = 1
            s.f = {[tp](const Vec2& x, double t) {
                const double sc = std::sin(tp * x.x()) * std::cos(tp * x.y());
                return (2.0 * tp * tp - 1.0) * sc * std::sin(t);
            }};
            s.g_dirichlet = s.p_exact;
            s.g_neumann = zero_scalar();
            s.g_robin = zero_scalar();
            reg["convergence61"] = s;
        }

        {
            const double tp = 2.0 * M_PI;
            ScenarioData s;
            s.u_exact = {[](const Vec2& x, double) {
                             return Vec2(std::sin(x.x()), std::cos(x.y()));
                         },
                         [](const Vec2& x, double) {
                             return std::cos(x.x()) - std::sin(x.y());
                         }};
            s.p_exact = {[tp](const Vec2& x, double) {
                return std::cos(tp * x.y()) * std::sin(tp * x.x());
            }};
            s.has_exact = false; // initial data only, used by the energy study
            s.f = zero_scalar();
            s.g_dirichlet = zero_scalar();
            s.g_neumann = zero_scalar();
            s.g_robin = zero_scalar();
            reg["energy62"] = s;
        }

        {
            ScenarioData s;
            s.u_exact = zero_vector();
            s.p_exact = zero_scalar();
            s.has_exact = false;
            const double sigma1 = 0.01, sigma2 = 0.00125;
            const Vec2 xc(0.5, 0.5);
            s.f = {[sigma1, sigma2, xc](const Vec2& x, double t) {
                return 10.0 * std::exp(-(t - 1.0) * (t - 1.0) / sigma1) *
                       std::exp(-(x - xc).squaredNorm() / sigma2);
            }};
            s.g_dirichlet = zero_scalar();
            s.g_neumann = zero_scalar();
            s.g_robin = zero_scalar();
            reg["gauss63"] = s;
        }

        return reg;
    }();
    return registry;
}

inline const ScenarioData& find_scenario_data(const std::string& name)
{
    const auto& reg = field_registry();
    auto it = reg.find(name);
    if (it == reg.end()) {
        std::string known;
        for (const auto& [k, v] : reg) known += (known.empty() ? "" : ", ") + k;
        throw std::invalid_argument("unknown data registry entry '" + name + "' (known: " +
                                    known + ")");
    }
    return it->second;
}

} // namespace polywave
