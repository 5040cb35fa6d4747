#include "hetnet/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace hetnet {

namespace {

// Kronrod 15-point abscissae / weights and the embedded Gauss 7-point weights (QUADPACK qk15).
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

struct ByError {
    bool operator()(const Panel& x, const Panel& y) const {
        if (x.error != y.error) return x.error < y.error;
        return x.a > y.a;  // deterministic tie-break
    }
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b, int& evals) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double s = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * s;
        if (j % 2 == 1) {
            gauss += kWg[j / 2] * s;
        }
    }
    evals += 15;
    const double value = kronrod * half;
    double error = std::abs((kronrod - gauss) * half);
    // Round-off floor so that panels of exact polynomials terminate.
    error = std::max(error, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(value));
    return {a, b, value, error};
}

}  // namespace

QuadratureResult integrate(const PiecewiseIntegrand& integrand, const Tolerance& tol) {
    const double lo = integrand.lower;
    const double hi = integrand.upper;
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("integrate: support must be bounded");
    }
    if (!(tol.abs > 0.0) || !(tol.rel > 0.0)) {
        throw std::invalid_argument("integrate: tolerances must be positive");
    }
    QuadratureResult result;
    if (!(hi > lo)) {
        return result;
    }

    std::vector<double> cuts{lo};
    for (double b : integrand.breakpoints) {
        if (b > lo && b < hi) cuts.push_back(b);
    }
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::priority_queue<Panel, std::vector<Panel>, ByError> panels;
    double value = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Panel p = gauss_kronrod(integrand.f, cuts[i], cuts[i + 1], result.evaluations);
        value += p.value;
        error += p.error;
        panels.push(p);
    }

    while (error > std::max(tol.abs, tol.rel * std::abs(value))) {
        if (static_cast<int>(panels.size()) >= tol.max_panels) {
            result.converged = false;
            break;
        }
        const Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            result.converged = false;  // interval exhausted at machine precision
            break;
        }
        panels.pop();
        Panel left = gauss_kronrod(integrand.f, worst.a, mid, result.evaluations);
        Panel right = gauss_kronrod(integrand.f, mid, worst.b, result.evaluations);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }

    // Re-sum from the panel list to shed the drift of the running updates.
    value = 0.0;
    error = 0.0;
    std::vector<Panel> all;
    all.reserve(panels.size());
    while (!panels.empty()) {
        all.push_back(panels.top());
        panels.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    for (const Panel& p : all) {
        value += p.value;
        error += p.error;
    }
    result.value = value;
    result.error = error;
    if (!std::isfinite(value)) {
        result.converged = false;
    }
    return result;
}

QuadratureResult& operator+=(QuadratureResult& lhs, const QuadratureResult& rhs) {
    lhs.value += rhs.value;
    lhs.error += rhs.error;
    lhs.converged = lhs.converged && rhs.converged;
    lhs.evaluations += rhs.evaluations;
    return lhs;
}

}  // namespace hetnet
