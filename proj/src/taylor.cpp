#include "opcalc/taylor.hpp"

#include <algorithm>
#include <cmath>

#include "opcalc/errors.hpp"

namespace opcalc {

namespace {
int common_order(const Jet& a, const Jet& b) {
    return std::min(a.order(), b.order());
}
} // namespace

Jet Jet::variable(double x, int order) {
    if (order < 0) throw ParameterError("Jet::variable: negative order");
    Jet j(x, order);
    if (order >= 1) j.m_c[1] = 1.0;
    return j;
}

double Jet::derivative(int k) const {
    if (k < 0 || k > order()) throw ParameterError("Jet::derivative: order exceeded");
    double fact = 1.0;
    for (int i = 2; i <= k; ++i) fact *= i;
    return m_c[k] * fact;
}

Jet Jet::operator-() const {
    Jet r = *this;
    for (double& c : r.m_c) c = -c;
    return r;
}

Jet operator+(const Jet& a, const Jet& b) {
    const int n = common_order(a, b);
    Jet r(0.0, n);
    for (int k = 0; k <= n; ++k) r.m_c[k] = a.m_c[k] + b.m_c[k];
    return r;
}

Jet operator-(const Jet& a, const Jet& b) {
    const int n = common_order(a, b);
    Jet r(0.0, n);
    for (int k = 0; k <= n; ++k) r.m_c[k] = a.m_c[k] - b.m_c[k];
    return r;
}

Jet operator*(const Jet& a, const Jet& b) {
    const int n = common_order(a, b);
    Jet r(0.0, n);
    for (int k = 0; k <= n; ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += a.m_c[j] * b.m_c[k - j];
        r.m_c[k] = s;
    }
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    const int n = common_order(a, b);
    if (b.m_c[0] == 0.0) throw SingularityError("Jet division by zero value");
    Jet r(0.0, n);
    for (int k = 0; k <= n; ++k) {
        double s = a.m_c[k];
        for (int j = 1; j <= k; ++j) s -= b.m_c[j] * r.m_c[k - j];
        r.m_c[k] = s / b.m_c[0];
    }
    return r;
}

Jet operator+(const Jet& a, double s) { Jet r = a; r.m_c[0] += s; return r; }
Jet operator+(double s, const Jet& a) { return a + s; }
Jet operator-(const Jet& a, double s) { Jet r = a; r.m_c[0] -= s; return r; }
Jet operator-(double s, const Jet& a) { return (-a) + s; }

Jet operator*(const Jet& a, double s) {
    Jet r = a;
    for (double& c : r.m_c) c *= s;
    return r;
}
Jet operator*(double s, const Jet& a) { return a * s; }
Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }

Jet operator/(double s, const Jet& a) {
    Jet num(s, a.order());
    return num / a;
}

Jet exp(const Jet& a) {
    const int n = a.order();
    Jet r(0.0, n);
    r.m_c[0] = std::exp(a.m_c[0]);
    // e' = a' e gives the convolution recurrence below.
    for (int k = 1; k <= n; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += j * a.m_c[j] * r.m_c[k - j];
        r.m_c[k] = s / k;
    }
    return r;
}

} // namespace opcalc
