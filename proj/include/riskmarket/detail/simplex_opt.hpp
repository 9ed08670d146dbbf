#pragma once
#include <functional>

#include "riskmarket/oracle.hpp"
#include "riskmarket/types.hpp"

namespace riskmarket::detail {

using ScalarFn = std::function<double(const Vector&)>;
using GradFn = std::function<Vector(const Vector&)>;

/// Euclidean projection onto the probability simplex.
Vector project_to_simplex(const Vector& v);

/// Visit every point of the regular simplex grid with `steps` subdivisions
/// per coordinate (all compositions of `steps` into `dim` parts).
void for_each_simplex_grid(int dim, int steps,
                           const std::function<void(const Vector&)>& visit);

/// Grid resolution used by the sup-oracles, chosen so the enumeration stays
/// desk-scale as the dimension grows.
int default_grid_steps(int dim);

/// Maximize f(q) = lin.q - g(q) over the probability simplex: dense grid
/// seeding plus projected gradient ascent from the best seeds and a handful
/// of random starts. `g_grad` may be null; central differences (one-sided at
/// the boundary) are used in that case.
OracleResult maximize_linear_minus_over_simplex(const Vector& lin,
                                                const ScalarFn& g,
                                                const GradFn* g_grad,
                                                double tol,
                                                std::uint64_t seed);

/// Maximize a concave f over an axis-aligned box by projected gradient
/// ascent with backtracking, from the box center and random starts.
OracleResult maximize_over_box(const ScalarFn& f, const GradFn* grad,
                               const Vector& lo, const Vector& hi, double tol,
                               std::uint64_t seed);

} // namespace riskmarket::detail
