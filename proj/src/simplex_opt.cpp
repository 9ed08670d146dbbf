#include "riskmarket/detail/simplex_opt.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "riskmarket/detail/rng.hpp"

namespace riskmarket::detail {

Vector project_to_simplex(const Vector& v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, tau = 0.0;
    int rho = 0;
    for (int j = 0; j < n; ++j) {
        css += u[static_cast<std::size_t>(j)];
        const double t = (1.0 - css) / (j + 1);
        if (u[static_cast<std::size_t>(j)] + t > 0.0) {
            rho = j + 1;
            tau = t;
        }
    }
    (void)rho;
    return (v.array() + tau).cwiseMax(0.0).matrix();
}

namespace {

void grid_rec(int dim, int steps, int coord, int left, Vector& q,
              const std::function<void(const Vector&)>& visit) {
    if (coord == dim - 1) {
        q(coord) = static_cast<double>(left) / steps;
        visit(q);
        return;
    }
    for (int c = 0; c <= left; ++c) {
        q(coord) = static_cast<double>(c) / steps;
        grid_rec(dim, steps, coord + 1, left - c, q, visit);
    }
}

// Central differences, one-sided where a coordinate would leave the
// nonnegative orthant. Penalties only need to be evaluable near the simplex.
Vector numeric_gradient(const ScalarFn& f, const Vector& q) {
    const int n = static_cast<int>(q.size());
    Vector g(n);
    Vector p = q;
    for (int i = 0; i < n; ++i) {
        const double h = 1e-6 * (1.0 + std::abs(q(i)));
        const double qi = q(i);
        if (qi - h >= 0.0) {
            p(i) = qi + h;
            const double fp = f(p);
            p(i) = qi - h;
            const double fm = f(p);
            g(i) = (fp - fm) / (2.0 * h);
        } else {
            p(i) = qi + h;
            const double fp = f(p);
            p(i) = qi;
            const double f0 = f(p);
            g(i) = (fp - f0) / h;
        }
        p(i) = qi;
    }
    return g;
}

struct AscentResult {
    Vector q;
    double value;
    bool stationary;
};

// Monotone projected gradient ascent with backtracking; `project` maps a
// trial point back into the feasible set.
AscentResult projected_ascent(const ScalarFn& f, const GradFn& grad,
                              const std::function<Vector(const Vector&)>& project,
                              Vector q, double tol, int max_iter) {
    double fq = f(q);
    double step = 1.0;
    bool stationary = false;
    for (int it = 0; it < max_iter; ++it) {
        const Vector g = grad(q);
        if (!g.allFinite()) break;
        const Vector mapped = project(q + g) - q;
        if (mapped.lpNorm<Eigen::Infinity>() <= tol) {
            stationary = true;
            break;
        }
        bool improved = false;
        for (int bt = 0; bt < 60; ++bt) {
            Vector cand = project(q + step * g);
            const double fc = f(cand);
            if (std::isfinite(fc) && fc > fq + 1e-16 * std::abs(fq)) {
                q = std::move(cand);
                fq = fc;
                step *= 1.5;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            // No ascent step accepted; re-test stationarity with the mapped
            // gradient before giving up.
            stationary = mapped.lpNorm<Eigen::Infinity>() <= 10.0 * tol;
            break;
        }
    }
    return {std::move(q), fq, stationary};
}

} // namespace

void for_each_simplex_grid(int dim, int steps,
                           const std::function<void(const Vector&)>& visit) {
    Vector q(dim);
    grid_rec(dim, steps, 0, steps, q, visit);
}

int default_grid_steps(int dim) {
    switch (dim) {
        case 1: return 1;
        case 2: return 100;
        case 3: return 100;
        case 4: return 50;
        case 5: return 20;
        case 6: return 12;
        case 7: return 10;
        default: return 8;
    }
}

namespace {

// Frank-Wolfe gap over the simplex: max_p grad.(p - q) = max_i grad_i -
// grad.q. For concave objectives it upper-bounds f* - f(q) without any
// curvature constant, so it certifies the oracle's value accuracy.
double simplex_fw_gap(const Vector& grad, const Vector& q) {
    return grad.maxCoeff() - grad.dot(q);
}

// Exponentiated-gradient polish: multiplicative updates respect the simplex
// boundary, where projected steps stall when the penalty's curvature blows
// up (KL-type penalties near a vertex).
struct PolishResult {
    Vector q;
    double value;
};

PolishResult exponentiated_ascent(const ScalarFn& f, const GradFn& grad, Vector q,
                                  double gap_target, int max_iter) {
    const double floor = 1e-300;
    q = q.cwiseMax(floor);
    q /= q.sum();
    double fq = f(q);
    double eta = 1.0;
    for (int it = 0; it < max_iter; ++it) {
        const Vector gr = grad(q);
        if (!gr.allFinite()) break;
        if (simplex_fw_gap(gr, q) <= gap_target) break;
        bool improved = false;
        for (int bt = 0; bt < 60; ++bt) {
            const Vector scaled = (eta * (gr.array() - gr.maxCoeff())).cwiseMax(-700.0);
            Vector cand = q.array() * scaled.array().exp();
            const double z = cand.sum();
            if (z <= 0.0 || !std::isfinite(z)) {
                eta *= 0.5;
                continue;
            }
            cand = (cand / z).cwiseMax(floor);
            cand /= cand.sum();
            const double fc = f(cand);
            if (std::isfinite(fc) && fc > fq) {
                q = std::move(cand);
                fq = fc;
                eta *= 1.5;
                improved = true;
                break;
            }
            eta *= 0.5;
        }
        if (!improved) break;
    }
    return {std::move(q), fq};
}

} // namespace

OracleResult maximize_linear_minus_over_simplex(const Vector& lin,
                                                const ScalarFn& g,
                                                const GradFn* g_grad,
                                                double tol,
                                                std::uint64_t seed) {
    const int dim = static_cast<int>(lin.size());
    const ScalarFn f = [&](const Vector& q) { return lin.dot(q) - g(q); };
    const GradFn grad = [&](const Vector& q) -> Vector {
        if (g_grad) return lin - (*g_grad)(q);
        return lin - numeric_gradient(g, q);
    };

    // Seeds: the best grid points, the uniform point, and random draws.
    std::vector<std::pair<double, Vector>> seeds;
    for_each_simplex_grid(dim, default_grid_steps(dim), [&](const Vector& q) {
        const double v = f(q);
        if (!std::isfinite(v)) return;
        if (seeds.size() < 4) {
            seeds.emplace_back(v, q);
            std::sort(seeds.begin(), seeds.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
        } else if (v > seeds.back().first) {
            seeds.back() = {v, q};
            std::sort(seeds.begin(), seeds.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });
        }
    });
    std::vector<Vector> starts;
    for (auto& s : seeds) starts.push_back(std::move(s.second));
    starts.push_back(Vector::Constant(dim, 1.0 / dim));
    SplitMix64 rng(seed ^ 0x9d2c5680cafeULL);
    for (int r = 0; r < 8; ++r) {
        Vector q(dim);
        for (int i = 0; i < dim; ++i) q(i) = -std::log(std::max(rng.u01(), 1e-12));
        q /= q.sum();
        starts.push_back(std::move(q));
    }

    OracleResult best;
    best.value = -std::numeric_limits<double>::infinity();
    const double inner_tol = std::min(tol * 1e-2, 1e-8);
    for (const auto& start : starts) {
        auto res = projected_ascent(f, grad, project_to_simplex, start, inner_tol, 2000);
        if (res.value > best.value) {
            best.value = res.value;
            best.argmax = res.q;
        }
    }

    double gap = simplex_fw_gap(grad(best.argmax), best.argmax);
    if (gap > 0.5 * tol) {
        auto polished = exponentiated_ascent(f, grad, best.argmax, 0.25 * tol, 5000);
        if (polished.value >= best.value) {
            best.value = polished.value;
            best.argmax = std::move(polished.q);
        }
        gap = simplex_fw_gap(grad(best.argmax), best.argmax);
    }
    best.converged = gap <= tol;
    return best;
}

OracleResult maximize_over_box(const ScalarFn& f, const GradFn* grad,
                               const Vector& lo, const Vector& hi, double tol,
                               std::uint64_t seed) {
    const int dim = static_cast<int>(lo.size());
    const auto clamp = [&](const Vector& v) -> Vector {
        return v.cwiseMax(lo).cwiseMin(hi);
    };
    const GradFn use_grad = [&](const Vector& q) -> Vector {
        if (grad) return (*grad)(q);
        const int n = static_cast<int>(q.size());
        Vector g(n);
        Vector p = q;
        for (int i = 0; i < n; ++i) {
            const double h = 1e-6 * (1.0 + std::abs(q(i)));
            const double qi = q(i);
            p(i) = qi + h;
            const double fp = f(p);
            p(i) = qi - h;
            const double fm = f(p);
            g(i) = (fp - fm) / (2.0 * h);
            p(i) = qi;
        }
        return g;
    };

    std::vector<Vector> starts;
    starts.push_back(clamp(0.5 * (lo + hi)));
    SplitMix64 rng(seed ^ 0xb0c5a11dULL);
    for (int r = 0; r < 8; ++r) {
        Vector q(dim);
        for (int i = 0; i < dim; ++i) q(i) = rng.uniform(lo(i), hi(i));
        starts.push_back(std::move(q));
    }

    OracleResult best;
    best.value = -std::numeric_limits<double>::infinity();
    const double inner_tol = std::min(tol * 1e-2, 1e-8);
    for (const auto& start : starts) {
        auto res = projected_ascent(f, use_grad, clamp, start, inner_tol, 5000);
        if (res.value > best.value) {
            best.value = res.value;
            best.argmax = res.q;
        }
    }
    // Frank-Wolfe gap over the box certifies the value accuracy.
    const Vector gr = use_grad(best.argmax);
    double gap = 0.0;
    for (int i = 0; i < dim; ++i)
        gap += gr(i) * ((gr(i) > 0.0 ? hi(i) : lo(i)) - best.argmax(i));
    best.converged = gap <= tol;
    return best;
}

} // namespace riskmarket::detail
