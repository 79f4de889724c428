#pragma once

#include <vector>

namespace opcalc {

// Truncated Taylor series (jet) of a scalar function at a point, carrying
// value and derivatives up to a fixed order. Arithmetic propagates
// derivatives exactly (no finite differences), so chains like the smooth
// bump exp(1 - 1/(1 - u^2)) get machine-accurate derivatives of any order
// we care to request.
class Jet {
public:
    Jet() : m_c(1, 0.0) {}
    // Constant c with `order` derivative slots.
    Jet(double c, int order) : m_c(order + 1, 0.0) { m_c[0] = c; }
    // The identity function evaluated at x: value x, first derivative 1.
    static Jet variable(double x, int order);

    int order() const { return (int)m_c.size() - 1; }
    // k-th derivative value (not the raw coefficient): d^k f = k! * c_k.
    double derivative(int k) const;
    double value() const { return m_c[0]; }
    // Raw Taylor coefficient c_k.
    double coeff(int k) const { return m_c[k]; }

    Jet operator-() const;
    friend Jet operator+(const Jet& a, const Jet& b);
    friend Jet operator-(const Jet& a, const Jet& b);
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator+(const Jet& a, double s);
    friend Jet operator+(double s, const Jet& a);
    friend Jet operator-(const Jet& a, double s);
    friend Jet operator-(double s, const Jet& a);
    friend Jet operator*(const Jet& a, double s);
    friend Jet operator*(double s, const Jet& a);
    friend Jet operator/(const Jet& a, double s);
    friend Jet operator/(double s, const Jet& a);

    friend Jet exp(const Jet& a);

private:
    std::vector<double> m_c; // c[k] = f^(k)/k!
};

} // namespace opcalc
