#pragma once

#include <functional>
#include <vector>

namespace hetnet {

/// A real integrand over a closed, bounded interval with known jump/kink locations.
struct PiecewiseIntegrand {
    std::function<double(double)> f;
    std::vector<double> breakpoints;  // any order; entries outside [lower, upper] are ignored
    double lower = 0.0;
    double upper = 0.0;
};

struct Tolerance {
    double abs = 1e-9;
    double rel = 1e-7;
    int max_panels = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
    int evaluations = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration.
///
/// The initial panels are delimited by the breakpoints, so no panel ever straddles one.
/// The panel with the largest error estimate is bisected until the summed estimate is
/// at most max(abs, rel * |value|). When `max_panels` is reached the best value is
/// returned with `converged == false`. Unbounded or non-finite limits throw
/// std::invalid_argument.
QuadratureResult integrate(const PiecewiseIntegrand& integrand, const Tolerance& tol = {});

/// Sum of results; error estimates add, convergence is the conjunction.
QuadratureResult& operator+=(QuadratureResult& lhs, const QuadratureResult& rhs);

}  // namespace hetnet
