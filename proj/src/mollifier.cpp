#include "opcalc/mollifier.hpp"

#include <cmath>
#include <limits>

#include "opcalc/errors.hpp"
#include "opcalc/quadrature.hpp"

namespace opcalc {

SupportedPoly::SupportedPoly(std::vector<double> coef) : coef_(std::move(coef)) {
    if (coef_.empty()) coef_.push_back(0.0);
}

double SupportedPoly::operator()(double v) const {
    if (v < -1.0 || v > 1.0) return 0.0;
    double acc = 0.0;
    for (std::size_t k = coef_.size(); k-- > 0;) acc = acc * v + coef_[k];
    return acc;
}

SupportedPoly SupportedPoly::derivative() const {
    if (coef_.size() <= 1) return SupportedPoly({0.0});
    std::vector<double> d(coef_.size() - 1);
    for (std::size_t k = 1; k < coef_.size(); ++k)
        d[k - 1] = static_cast<double>(k) * coef_[k];
    return SupportedPoly(std::move(d));
}

double SupportedPoly::moment(int k) const {
    if (k < 0) throw ParameterError("polynomial moment order must be nonnegative");
    double acc = 0.0;
    for (std::size_t j = 0; j < coef_.size(); ++j) {
        const int power = k + static_cast<int>(j);
        if (power % 2 == 0) acc += 2.0 * coef_[j] / static_cast<double>(power + 1);
    }
    return acc;
}

double SupportedPoly::integral_from_left(double x) const {
    if (x <= -1.0) return 0.0;
    const double xc = std::min(x, 1.0);
    double at_x = 0.0, at_lo = 0.0;
    for (std::size_t k = coef_.size(); k-- > 0;) {
        const double c = coef_[k] / static_cast<double>(k + 1);
        at_x = at_x * xc + c;
        at_lo = at_lo * (-1.0) + c;
    }
    return at_x * xc - at_lo * (-1.0);
}

namespace {

// Mass-one kernel with vanishing 2nd and 4th moments; coefficients are
// exact dyadic rationals.
const SupportedPoly& phi_poly() {
    static const SupportedPoly p({4725.0 / 2048.0, 0.0, -44100.0 / 2048.0, 0.0,
                                  119070.0 / 2048.0, 0.0, -124740.0 / 2048.0, 0.0,
                                  45045.0 / 2048.0});
    return p;
}

// psi = -(v phi)' has coefficients -(k+1) c_k.
const SupportedPoly& psi_poly() {
    static const SupportedPoly p = [] {
        const auto& c = phi_poly().coefficients();
        std::vector<double> q(c.size());
        for (std::size_t k = 0; k < c.size(); ++k)
            q[k] = -static_cast<double>(k + 1) * c[k];
        return SupportedPoly(std::move(q));
    }();
    return p;
}

} // namespace

const SupportedPoly& mollifier_phi() { return phi_poly(); }

const SupportedPoly& mollifier_phi_d1() {
    static const SupportedPoly p = phi_poly().derivative();
    return p;
}

const SupportedPoly& mollifier_phi_d2() {
    static const SupportedPoly p = mollifier_phi_d1().derivative();
    return p;
}

const SupportedPoly& mollifier_psi() { return psi_poly(); }

const SupportedPoly& mollifier_psi_d1() {
    static const SupportedPoly p = psi_poly().derivative();
    return p;
}

double mollifier_mu6() { return phi_poly().moment(6); }

namespace {

// Series branch for c > 2: expand (c+v)^p = c^p sum_i binom(p,i) (v/c)^i.
// |v/c| <= 1/2, so terms eventually halve each step.
double series_branch(double c, double p, const SupportedPoly& P) {
    double sum = 0.0;
    double binom = 1.0; // binom(p, i), updated multiplicatively
    double cpow = 1.0;  // c^{-i}
    int tiny_streak = 0;
    for (int i = 0; i <= 200; ++i) {
        const double term = binom * cpow * P.moment(i);
        sum += term;
        // Long runs of vanishing moments are normal here: the main kernel
        // kills moments 1 through 5, and kernels derived from it can have
        // every moment below index 7 equal to zero (the psi-derivative
        // does). A run of small terms proves nothing until the index is
        // past that barren prefix and the run outlasts the parity gaps.
        if (std::abs(term) <= 1e-17 * (std::abs(sum) + 1e-300)) {
            if (++tiny_streak >= 10 && i >= 12) break;
        } else {
            tiny_streak = 0;
        }
        binom *= (p - static_cast<double>(i)) / static_cast<double>(i + 1);
        cpow /= c;
        if (binom == 0.0) break; // integer p: series terminates exactly
    }
    return std::pow(c, p) * sum;
}

// Singular branch for -1 < c <= 2 via w = c + v. The piece touching the
// w^p singularity is integrated exactly against the Taylor polynomial of
// P(w - c); the remainder is smooth and handled with Gauss panels laid
// out geometrically from the split point.
double substitution_branch(double c, double p, const SupportedPoly& P) {
    const double w_hi = c + 1.0;
    double result = 0.0;
    double start;
    if (c <= 1.0) {
        // The w^p singularity sits at the left end of the range. Integrate
        // [0, w_b] exactly against the Taylor polynomial of P(w - c): the
        // expansion center -c lies inside the kernel support, so the
        // coefficients stay on the scale of the kernel and nothing cancels
        // badly.
        const double w_b = std::min(0.5, 0.5 * w_hi);
        SupportedPoly deriv = P;
        double factorial = 1.0;
        const int deg = P.degree();
        for (int j = 0; j <= deg; ++j) {
            if (j > 0) {
                deriv = deriv.derivative();
                factorial *= static_cast<double>(j);
            }
            // Evaluate the raw polynomial (argument is within support).
            double val = 0.0;
            const auto& dc = deriv.coefficients();
            for (std::size_t k = dc.size(); k-- > 0;) val = val * (-c) + dc[k];
            const double e = p + static_cast<double>(j) + 1.0;
            result += val / factorial * std::pow(w_b, e) / e;
        }
        start = w_b;
    } else {
        // Singularity outside the range: the whole integrand is smooth.
        start = c - 1.0;
    }

    if (w_hi > start) {
        // Geometric panels from the split point keep the w^p variation per
        // panel bounded, so 16 nodes per panel reach machine accuracy even
        // when the range nearly touches the singularity.
        const int panels = std::min(
            120, std::max(4, static_cast<int>(std::ceil(std::log(w_hi / start) /
                                                        std::log(1.6)))));
        const auto& rule = gauss_legendre(16);
        const double ratio = std::pow(w_hi / start, 1.0 / panels);
        double a = start;
        for (int k = 0; k < panels; ++k) {
            const double b = (k == panels - 1) ? w_hi : a * ratio;
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            double acc = 0.0;
            for (std::size_t i = 0; i < rule.x.size(); ++i) {
                const double w = mid + half * rule.x[i];
                acc += rule.w[i] * std::pow(w, p) * P(w - c);
            }
            result += acc * half;
            a = b;
        }
    }
    return result;
}

} // namespace

double edge_kernel_integral(double c, double p, const SupportedPoly& P) {
    if (!(p > -1.0))
        throw ParameterError("edge kernel integral needs exponent p > -1 to be integrable");
    if (c <= -1.0 + 1e-14) return 0.0;
    if (c > 2.0) return series_branch(c, p, P);
    return substitution_branch(c, p, P);
}

} // namespace opcalc
