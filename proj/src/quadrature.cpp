#include "opcalc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "opcalc/errors.hpp"

namespace opcalc {

namespace {

GaussRule compute_rule(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    // Nodes are roots of P_n; Newton from the Chebyshev-like initial guess.
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[n - 1 - i] = x;
        r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

std::map<int, GaussRule> g_rules;
std::mutex g_rules_mu;

} // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1 || n > 256) throw ParameterError("gauss_legendre: order out of range");
    std::lock_guard<std::mutex> lk(g_rules_mu);
    auto it = g_rules.find(n);
    if (it == g_rules.end()) it = g_rules.emplace(n, compute_rule(n)).first;
    return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int n) {
    const GaussRule& r = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.w[i] * f(mid + half * r.x[i]);
    return s * half;
}

double integrate_composite(const std::function<double(double)>& f, double a,
                           double b, int panels, int n) {
    if (panels < 1) throw ParameterError("integrate_composite: panels < 1");
    double s = 0.0;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
        s += integrate_gl(f, a + p * h, a + (p + 1) * h, n);
    return s;
}

double integrate_breakpoints(const std::function<double(double)>& f, double a,
                             double b, std::vector<double> breakpoints,
                             double tol, int n, int max_doublings) {
    if (!(a < b)) throw ParameterError("integrate_breakpoints: empty interval");
    breakpoints.push_back(a);
    breakpoints.push_back(b);
    std::sort(breakpoints.begin(), breakpoints.end());
    std::vector<double> cuts;
    for (double c : breakpoints) {
        if (c <= a || c >= b) continue;
        if (!cuts.empty() && c - cuts.back() < 1e-14 * (b - a)) continue;
        cuts.push_back(c);
    }
    std::vector<double> edges;
    edges.push_back(a);
    for (double c : cuts) edges.push_back(c);
    edges.push_back(b);

    double prev = 0.0;
    for (int d = 0; d <= max_doublings; ++d) {
        const int panels_per_cell = 1 << d;
        double s = 0.0;
        for (std::size_t e = 0; e + 1 < edges.size(); ++e)
            s += integrate_composite(f, edges[e], edges[e + 1], panels_per_cell, n);
        if (d > 0 && std::abs(s - prev) <= tol * (1.0 + std::abs(s))) return s;
        prev = s;
    }
    throw AccuracyError("integrate_breakpoints: tolerance not reached");
}

double integrate_endpoint_refined(const std::function<double(double)>& f,
                                  double a, double b, bool refine_left,
                                  bool refine_right, int levels, int n) {
    if (!(a < b)) throw ParameterError("integrate_endpoint_refined: empty interval");
    if (!refine_left && !refine_right) return integrate_gl(f, a, b, n);
    // Split at the midpoint and build geometric panels toward each flagged
    // end. The innermost panel is open only in the limit; its omitted mass
    // is 2^-levels of the nearest panel scale, negligible for levels ~ 40
    // when the integrand is integrable at the endpoint.
    const double mid = 0.5 * (a + b);
    // Panels narrower than a few ulps of the refined endpoint put
    // quadrature nodes on the wrong side of it; stop there and drop the
    // (integrable) rest. An endpoint at 0 supports arbitrary depth.
    const double floor_left = 64.0 * 1e-16 * std::abs(a);
    const double floor_right = 64.0 * 1e-16 * std::abs(b);
    double s = 0.0;
    if (refine_left) {
        double hi = mid;
        for (int l = 0; l < levels && hi - a > floor_left; ++l) {
            const double lo = a + (hi - a) * 0.5;
            s += integrate_gl(f, lo, hi, n);
            hi = lo;
        }
    } else {
        s += integrate_gl(f, a, mid, n);
    }
    if (refine_right) {
        double lo = mid;
        for (int l = 0; l < levels && b - lo > floor_right; ++l) {
            const double hi = b - (b - lo) * 0.5;
            s += integrate_gl(f, lo, hi, n);
            lo = hi;
        }
    } else {
        s += integrate_gl(f, mid, b, n);
    }
    return s;
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
    if (!(lo > 0.0) || !(hi > lo)) throw ParameterError("log_grid: need 0 < lo < hi");
    if (per_decade < 1) throw ParameterError("log_grid: per_decade < 1");
    const double l0 = std::log10(lo), l1 = std::log10(hi);
    const int steps = std::max(1, (int)std::ceil((l1 - l0) * per_decade));
    std::vector<double> g;
    g.reserve(steps + 1);
    for (int i = 0; i <= steps; ++i)
        g.push_back(std::pow(10.0, l0 + (l1 - l0) * i / steps));
    g.front() = lo;
    g.back() = hi;
    return g;
}

} // namespace opcalc
