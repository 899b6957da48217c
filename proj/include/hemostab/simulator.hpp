#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hemostab/error.hpp"
#include "hemostab/models.hpp"
#include "hemostab/numeric.hpp"
#include "hemostab/spectral.hpp"
#include "hemostab/stability.hpp"

namespace hemostab {

namespace detail {

/// Cubic Hermite on node interval j with local coordinate u in [0, 1].
[[nodiscard]] inline double hermite(double x0, double d0, double x1, double d1, double h, double u)
{
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2.0 * u3 - 3.0 * u2 + 1.0) * x0 + (u3 - 2.0 * u2 + u) * h * d0 +
           (-2.0 * u3 + 3.0 * u2) * x1 + (u3 - u2) * h * d1;
}

/// Node storage contract: push(x, dx), count(), x_at(j), dx_at(j) for recent j.
struct FullStore {
    std::vector<double> x, dx;
    void reserve(std::size_t n) { x.reserve(n); dx.reserve(n); }
    void push(double v, double d) { x.push_back(v); dx.push_back(d); }
    [[nodiscard]] std::size_t count() const noexcept { return x.size(); }
    [[nodiscard]] double x_at(std::size_t j) const { return x[j]; }
    [[nodiscard]] double dx_at(std::size_t j) const { return dx[j]; }
};

/// Keeps only the last `capacity` nodes; enough when lookups never reach further back than tau.
class RingStore {
public:
    explicit RingStore(std::size_t capacity) : x_(capacity), dx_(capacity) {}
    void reserve(std::size_t) {}
    void push(double v, double d)
    {
        x_[count_ % x_.size()] = v;
        dx_[count_ % x_.size()] = d;
        ++count_;
    }
    [[nodiscard]] std::size_t count() const noexcept { return count_; }
    [[nodiscard]] double x_at(std::size_t j) const { return x_[j % x_.size()]; }
    [[nodiscard]] double dx_at(std::size_t j) const { return dx_[j % x_.size()]; }

private:
    std::vector<double> x_, dx_;
    std::size_t count_ = 0;
};

template <class Store>
[[nodiscard]] double history_at(const Store& store, double history_value, double h, double s)
{
    if (s <= 0.0) return history_value;
    const double pos = s / h;
    auto j = static_cast<std::size_t>(pos);
    const std::size_t last = store.count() - 1;
    if (j >= last) {
        if (j == last && pos == static_cast<double>(j)) return store.x_at(last);
        j = last - 1;
    }
    return hermite(store.x_at(j), store.dx_at(j), store.x_at(j + 1), store.dx_at(j + 1), h,
                   pos - static_cast<double>(j));
}

}  // namespace detail

/// Uniform-step solution of x' = eta (beta F(x(t - tau)) - gamma x) with constant history x0 on [-tau, 0].
struct Trajectory {
    ModelKind kind = ModelKind::MackeyGlass;
    ModelParameters params;
    double history_value = 0.0;
    double h = 0.0;
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> dx;  // right-hand side at each node, used for Hermite interpolation

    [[nodiscard]] std::size_t size() const noexcept { return x.size(); }

    /// x(s) for any s <= t.back(): constant history for s <= 0, cubic Hermite between nodes otherwise.
    [[nodiscard]] double value_at(double s) const
    {
        if (s <= 0.0) return history_value;
        const double pos = s / h;
        auto j = static_cast<std::size_t>(pos);
        const std::size_t last = x.size() - 1;
        if (j >= last) {
            if (j == last && pos == static_cast<double>(j)) return x[last];
            j = last - 1;
        }
        return detail::hermite(x[j], dx[j], x[j + 1], dx[j + 1], h, pos - static_cast<double>(j));
    }
};

struct IntegrateOptions {
    /// Explicit-scheme guards: h <= tau / min_steps_per_delay and h eta max(gamma, |b|) <= max_rate_step.
    double min_steps_per_delay = 10.0;
    double max_rate_step = 0.1;
};

/// Default step min(tau/40, 0.01) (0.01 for tau = 0).
[[nodiscard]] inline double default_step(double tau)
{
    return tau > 0.0 ? std::min(tau / 40.0, 0.01) : 0.01;
}

namespace detail {

inline void check_step(ModelKind kind, const ModelParameters& params, double x0, double t_end,
                       double h, const IntegrateOptions& opt)
{
    params.validate();
    if (!(x0 > 0.0)) throw DomainError("initial value must be positive");
    if (!(h > 0.0) || !(t_end > 0.0)) throw DomainError("step and horizon must be positive");
    const double tau = params.tau;
    if (tau > 0.0 && h > tau / opt.min_steps_per_delay * (1.0 + 1e-12)) {
        throw StepTooLarge("step exceeds tau / " + std::to_string(opt.min_steps_per_delay));
    }
    double b_scale = 0.0;
    try {
        b_scale = std::fabs(linearize(kind, params, largest_equilibrium(kind, params)).b);
    } catch (const NoEquilibrium&) {
    }
    if (h * params.eta * std::max(params.gamma, b_scale) > opt.max_rate_step * (1.0 + 1e-12)) {
        throw StepTooLarge("step too large for the linearised rates");
    }
}

/**
 * Classical RK4 by the method of steps. Delayed arguments come from cubic
 * Hermite interpolation of stored nodes; h <= tau keeps every stage in the past.
 * on_node(k, t_k, x_k) is called for every node including k = 0.
 */
template <class Store, class OnNode>
void run_method_of_steps(ModelKind kind, const ModelParameters& params, double x0, std::size_t steps,
                         double h, Store& store, OnNode&& on_node)
{
    const double tau = params.tau;
    const double eta = params.eta;
    const double beta = params.beta;
    const double gamma = params.gamma;
    const double n = params.n;
    auto rhs = [&](double x, double y) {
        if (!(y > 0.0) || !(x > 0.0)) throw NonPositiveState("state left the positive half-line");
        return eta * (beta * nonlinear_F(kind, y, n) - gamma * x);
    };
    auto delayed = [&](double s) { return history_at(store, x0, h, s); };

    store.reserve(steps + 1);
    store.push(x0, rhs(x0, x0));
    on_node(std::size_t{0}, 0.0, x0);
    double xk = x0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double tk = static_cast<double>(k) * h;
        double k1, k2, k3, k4;
        if (tau > 0.0) {
            const double y0 = delayed(tk - tau);
            const double yh = delayed(tk + 0.5 * h - tau);
            const double y1 = delayed(tk + h - tau);
            k1 = rhs(xk, y0);
            k2 = rhs(xk + 0.5 * h * k1, yh);
            k3 = rhs(xk + 0.5 * h * k2, yh);
            k4 = rhs(xk + h * k3, y1);
        } else {
            k1 = rhs(xk, xk);
            const double xa = xk + 0.5 * h * k1;
            k2 = rhs(xa, xa);
            const double xb = xk + 0.5 * h * k2;
            k3 = rhs(xb, xb);
            const double xc = xk + h * k3;
            k4 = rhs(xc, xc);
        }
        const double next = xk + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        const double t_next = static_cast<double>(k + 1) * h;
        if (!(next > 0.0) || !std::isfinite(next)) {
            throw NonPositiveState("x <= 0 at t = " + std::to_string(t_next));
        }
        // The node must be stored before its own delayed lookup when tau is a multiple of h.
        const double y_next = tau > 0.0 ? delayed(t_next - tau) : next;
        store.push(next, rhs(next, y_next));
        on_node(k + 1, t_next, next);
        xk = next;
    }
}

[[nodiscard]] inline std::size_t step_count(double t_end, double h)
{
    return static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
}

}  // namespace detail

/**
 * @brief Integrates the model from constant history x0 up to t_end with step h.
 *
 * Throws StepTooLarge when h > tau/10 or h eta max(gamma, |b|) > 0.1, and
 * NonPositiveState if the solution leaves x > 0.
 */
[[nodiscard]] inline Trajectory integrate(ModelKind kind, const ModelParameters& params, double x0,
                                          double t_end, double h, const IntegrateOptions& opt = {})
{
    detail::check_step(kind, params, x0, t_end, h, opt);
    const std::size_t steps = detail::step_count(t_end, h);
    detail::FullStore store;
    Trajectory tr;
    tr.kind = kind;
    tr.params = params;
    tr.history_value = x0;
    tr.h = h;
    tr.t.reserve(steps + 1);
    detail::run_method_of_steps(kind, params, x0, steps, h, store,
                                [&](std::size_t, double t, double) { tr.t.push_back(t); });
    tr.x = std::move(store.x);
    tr.dx = std::move(store.dx);
    return tr;
}

/// Min/max of x over t >= window_from without storing the trajectory.
struct StreamedExtremes {
    double x_min = std::numeric_limits<double>::infinity();
    double x_max = -std::numeric_limits<double>::infinity();
    double x_end = 0.0;
};

[[nodiscard]] inline StreamedExtremes integrate_extremes(ModelKind kind, const ModelParameters& params,
                                                         double x0, double t_end, double h,
                                                         double window_from,
                                                         const IntegrateOptions& opt = {})
{
    detail::check_step(kind, params, x0, t_end, h, opt);
    const std::size_t steps = detail::step_count(t_end, h);
    const auto capacity = static_cast<std::size_t>(std::ceil(params.tau / h)) + 4;
    detail::RingStore store(capacity);
    StreamedExtremes ex;
    detail::run_method_of_steps(kind, params, x0, steps, h, store, [&](std::size_t, double t, double x) {
        if (t >= window_from) {
            ex.x_min = std::min(ex.x_min, x);
            ex.x_max = std::max(ex.x_max, x);
        }
        ex.x_end = x;
    });
    return ex;
}

namespace detail {

[[nodiscard]] inline std::size_t window_start(const Trajectory& traj, double transient_fraction)
{
    if (!(transient_fraction >= 0.0) || !(transient_fraction < 1.0)) {
        throw DomainError("transient fraction must lie in [0, 1)");
    }
    return static_cast<std::size_t>(transient_fraction * static_cast<double>(traj.size()));
}

}  // namespace detail

/**
 * Sign changes of x - x* after the transient. Samples within `deadband` of x*
 * are skipped so round-off jitter around a converged state is not counted.
 */
[[nodiscard]] inline int count_sign_changes(const Trajectory& traj, double x_star,
                                            double transient_fraction, double deadband = -1.0)
{
    if (deadband < 0.0) deadband = 1e-9 * std::fabs(x_star);
    int changes = 0;
    int last_sign = 0;
    for (std::size_t i = detail::window_start(traj, transient_fraction); i < traj.size(); ++i) {
        const double d = traj.x[i] - x_star;
        if (std::fabs(d) <= deadband) continue;
        const int s = d > 0.0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) ++changes;
        last_sign = s;
    }
    return changes;
}

struct LimitCycleMetrics {
    double amplitude = 0.0;  // (max - min) / 2 over the window
    std::optional<double> period;
    bool converged_to_equilibrium = false;
    double x_min = 0.0;
    double x_max = 0.0;
    double mean = 0.0;
};

/// Amplitude, period (mean spacing of upward mean-crossings) and convergence flag over the window.
[[nodiscard]] inline LimitCycleMetrics limit_cycle_metrics(const Trajectory& traj,
                                                           double transient_fraction)
{
    const std::size_t start = detail::window_start(traj, transient_fraction);
    if (traj.size() < start + 16) throw WindowTooShort("post-transient window has too few samples");
    const std::span<const double> w(traj.x.data() + start, traj.size() - start);

    LimitCycleMetrics m;
    const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
    m.x_min = *lo;
    m.x_max = *hi;
    double sum = 0.0;
    for (double v : w) sum += v;
    m.mean = sum / static_cast<double>(w.size());
    m.amplitude = 0.5 * (m.x_max - m.x_min);
    m.converged_to_equilibrium = (m.x_max - m.x_min) < 1e-4 * std::fabs(m.mean);
    if (m.converged_to_equilibrium) return m;

    std::vector<double> ups;
    for (std::size_t i = 1; i < w.size(); ++i) {
        if (w[i - 1] < m.mean && w[i] >= m.mean) {
            const double frac = (m.mean - w[i - 1]) / (w[i] - w[i - 1]);
            ups.push_back(traj.t[start + i - 1] + frac * traj.h);
        }
    }
    if (ups.size() < 3) throw WindowTooShort("fewer than two full oscillations in the window");
    m.period = (ups.back() - ups.front()) / static_cast<double>(ups.size() - 1);
    return m;
}

struct PhasePoint {
    double x_t = 0.0;
    double x_t_minus_tau = 0.0;
};

/// (x(t), x(t - tau)) on the trajectory grid.
[[nodiscard]] inline std::vector<PhasePoint> phase_portrait(const Trajectory& traj)
{
    std::vector<PhasePoint> out;
    out.reserve(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out.push_back({traj.x[i], traj.value_at(traj.t[i] - traj.params.tau)});
    }
    return out;
}

struct BifurcationRow {
    double eta = 0.0;
    double x_min = 0.0;
    double x_max = 0.0;
    double t_end = 0.0;
};

struct SweepOptions {
    /// Constant history x*(1 + perturbation).
    double perturbation = 1e-5;
    double transient_fraction = 0.8;
    /// Horizon covers at least this many e-folds of the linear growth/decay rate.
    double efolds = 30.0;
    std::size_t max_steps = 4'000'000;
    double h = 0.0;  // 0: tau / 100
};

/**
 * @brief Post-transient min/max of x for each gain eta.
 *
 * Runs start next to the equilibrium and last max(100 tau, 50 T_pred,
 * efolds / |Re lambda|) days, capped at max_steps steps, where lambda is the
 * rightmost characteristic root at that gain.
 */
[[nodiscard]] inline std::vector<BifurcationRow> bifurcation_sweep(ModelKind kind,
                                                                   const ModelParameters& params,
                                                                   std::span<const double> etas,
                                                                   const SweepOptions& opt = {})
{
    if (!(params.tau > 0.0)) throw DomainError("bifurcation sweep requires tau > 0");
    const auto eq = largest_equilibrium(kind, params);
    const auto lin = linearize(kind, params, eq);
    const double tau = params.tau;
    const double omega = crossing_frequency(lin, 1.0);
    const double h = opt.h > 0.0 ? opt.h : tau / 100.0;
    return numeric::parallel_map(etas.size(), [&](std::size_t i) {
        ModelParameters p = params;
        p.eta = etas[i];
        const double t_pred = 2.0 * numeric::kPi / (omega * p.eta);
        double t_end = std::max(100.0 * tau, 50.0 * t_pred);
        const double rate = std::fabs(rightmost_root(lin, tau, p.eta).re);
        if (rate > 0.0) t_end = std::max(t_end, opt.efolds / rate);
        t_end = std::min(t_end, static_cast<double>(opt.max_steps) * h);
        const auto ex = integrate_extremes(kind, p, eq.x_star * (1.0 + opt.perturbation), t_end, h,
                                           opt.transient_fraction * t_end);
        return BifurcationRow{p.eta, ex.x_min, ex.x_max, t_end};
    });
}

}  // namespace hemostab
