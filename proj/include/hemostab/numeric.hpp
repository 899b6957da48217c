#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "hemostab/error.hpp"

namespace hemostab::numeric {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInvE = 0.36787944117144233;  // 1/e

/**
 * @brief Bisection for a sign change of @p f on [lo, hi].
 *
 * Stops when the bracket is narrower than @p width or after 400 halvings.
 * Requires f(lo) and f(hi) to have opposite signs (zero at an endpoint is accepted).
 */
template <class Fn>
[[nodiscard]] double bisect(Fn&& f, double lo, double hi, double width = 1e-12)
{
    double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0.0) == (fhi < 0.0)) {
        throw ConvergenceError("bisection: no sign change on [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
    }
    for (int it = 0; it < 400 && (hi - lo) > width; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// n points evenly spaced on [lo, hi]; n == 1 yields {lo}.
[[nodiscard]] inline std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
    out[n - 1] = hi;
    return out;
}

/// Worker count from HEMOSTAB_WORKERS, falling back to the hardware concurrency.
[[nodiscard]] inline unsigned worker_count()
{
    if (const char* env = std::getenv("HEMOSTAB_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/**
 * Evaluates fn(i) for i in [0, n) on up to worker_count() threads. Results are
 * stored by index, so ordering never depends on completion order. The first
 * exception thrown by any task is rethrown after all workers join.
 */
template <class Fn>
[[nodiscard]] auto parallel_map(std::size_t n, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))>
{
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out(n);
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) out[i] = fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace hemostab::numeric
