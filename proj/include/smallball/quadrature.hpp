#pragma once

// Adaptive Simpson quadrature with caller-supplied breakpoints.

#include <cstdint>
#include <functional>
#include <vector>

namespace smallball {

struct QuadratureOptions {
    double abs_tolerance = 1e-10;
    std::uint64_t max_subdivisions = std::uint64_t{1} << 20;
    /// Initial uniform panels over the whole interval; peaked integrands need
    /// enough of them that no peak hides between sample points.
    std::size_t min_panels = 64;
    /// Points where the integrand may have a kink; panels never straddle them.
    std::vector<double> breakpoints;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::uint64_t subdivisions = 0;
};

/// Integral of f over [a, b]. Throws QuadratureNonConvergence when the
/// tolerance is not met within the subdivision budget.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  const QuadratureOptions& options = {});

}  // namespace smallball
