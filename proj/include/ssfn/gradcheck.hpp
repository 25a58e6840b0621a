#pragma once

// Central finite-difference verification of analytic gradients. Meant to run
// in double precision on small problems.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace ssfn {

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::size_t checked = 0;
};

/// Compares analytic gradients against (f(x+h) - f(x-h)) / 2h for each listed
/// coordinate. `coords` pairs a mutable value location with its analytic
/// gradient. `loss_fn` must re-evaluate the scalar from current values.
inline GradCheckReport grad_check(const std::function<double()>& loss_fn,
                                  const std::vector<std::pair<double*, double>>& coords,
                                  double h = 1e-3) {
    GradCheckReport rep;
    for (const auto& [ptr, analytic] : coords) {
        const double saved = *ptr;
        *ptr = saved + h;
        const double fp = loss_fn();
        *ptr = saved - h;
        const double fm = loss_fn();
        *ptr = saved;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw std::runtime_error("grad_check: non-finite evaluation");
        const double fd = (fp - fm) / (2.0 * h);
        const double rel = std::abs(analytic - fd) /
                           std::max({std::abs(analytic), std::abs(fd), 1e-8});
        rep.max_rel_err = std::max(rep.max_rel_err, rel);
        rep.checked += 1;
    }
    return rep;
}

}  // namespace ssfn
