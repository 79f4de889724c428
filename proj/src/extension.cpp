#include "opcalc/extension.hpp"

#include <algorithm>
#include <cmath>

#include "opcalc/errors.hpp"

namespace opcalc {

namespace {

using cplx = std::complex<double>;

// Vertical cutoff: 1 for u <= y_max/2, 0 for u >= y_max, with a C^3
// polynomial ramp in between. Returns (chi, chi') at height u > 0. A
// polynomial ramp (rather than a flat-exponential one) keeps the planar
// quadrature's fixed-order Gauss rule exact across the roof band, and its
// breakpoints sit exactly on the dyadic band edges.
std::pair<double, double> vertical_cutoff(double u, double y_max) {
    const double half = 0.5 * y_max;
    if (u <= half) return {1.0, 0.0};
    if (u >= y_max) return {0.0, 0.0};
    const double t = (u - half) / half;
    const double s = ((( -20.0 * t + 70.0) * t - 84.0) * t + 35.0) * t * t * t * t;
    const double omt = 1.0 - t;
    const double ds = 140.0 * t * t * t * omt * omt * omt;
    return {1.0 - s, -ds / half};
}

} // namespace

Extension::Extension(ModelFunctionPtr f, int n0, double pad, double y_max) {
    if (!f) throw ParameterError("extension needs a source function");
    if (!f->compactly_supported())
        throw ParameterError(
            "extension source must be compactly supported; apply a cutoff window first");
    if (n0 < 1) throw ParameterError("extension needs taylor order >= 1");
    if (n0 > f->max_taylor_order())
        throw ParameterError("taylor order exceeds what the source regularity supports");
    if (!(pad > 0.0)) throw ParameterError("extension pad must be positive");
    if (!(y_max > 0.0)) throw ParameterError("extension height must be positive");
    if (y_max > pad)
        throw ParameterError("extension height must not exceed the pad, "
                             "otherwise the mollified support leaves the declared box");
    if (y_max > f->max_kernel_scale())
        throw ParameterError("extension height exceeds the source's kernel scale cap");

    Component c;
    c.f = std::move(f);
    c.n0 = n0;
    c.y_max = y_max;
    c.sup_lo = c.f->support_lo();
    c.sup_hi = c.f->support_hi();
    comps_.push_back(std::move(c));
    y_max_ = y_max;
    x_lo_ = comps_[0].sup_lo - pad;
    x_hi_ = comps_[0].sup_hi + pad;
}

int Extension::taylor_order() const {
    int n = 0;
    for (const auto& c : comps_) n = std::max(n, c.n0);
    return n;
}

double Extension::support_lo() const {
    double v = comps_[0].sup_lo;
    for (const auto& c : comps_) v = std::min(v, c.sup_lo);
    return v;
}

double Extension::support_hi() const {
    double v = comps_[0].sup_hi;
    for (const auto& c : comps_) v = std::max(v, c.sup_hi);
    return v;
}

std::vector<double> Extension::singular_x() const {
    std::vector<double> pts;
    for (const auto& c : comps_)
        for (double s : c.f->singular_points()) pts.push_back(s);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

std::vector<double> Extension::structure_x() const {
    std::vector<double> pts;
    for (const auto& c : comps_) {
        for (double s : c.f->structure_points()) pts.push_back(s);
        pts.push_back(c.sup_lo);
        pts.push_back(c.sup_hi);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

// dbar F for y = u > 0. Writing g_n = (f^(n) * phi_u)(x) and
// h_n = (f^(n) * psi_u)(x), the x- and y-derivatives telescope to
//
//   dbar F = chi/2 (iu)^{n0}/n0! g_{n0+1}
//          + i/2 chi' sum_{n<=n0} (iu)^n/n! g_n
//          + i/(2u) chi sum_{n<=n0} (iu)^n/n! h_n.
//
// The first term is the classical Taylor remainder; the last reflects how
// the mollification scale changes with height; chi' localizes the roof.
std::complex<double> Extension::omega_upper(double x, double u) const {
    cplx total(0.0, 0.0);
    for (const auto& c : comps_) {
        if (u >= c.y_max) continue;
        if (x - u >= c.sup_hi || x + u <= c.sup_lo) continue;
        const auto [chi, dchi] = vertical_cutoff(u, c.y_max);
        const MollifiedJet jet = c.f->mollified_jet(x, u, c.n0);

        cplx iy_pow(1.0, 0.0); // (iu)^n / n!
        const cplx iu(0.0, u);
        cplx sum_g(0.0, 0.0), sum_h(0.0, 0.0);
        for (int n = 0; n <= c.n0; ++n) {
            sum_g += iy_pow * jet.conv_phi[n];
            sum_h += iy_pow * jet.conv_psi[n];
            iy_pow *= iu / static_cast<double>(n + 1);
        }
        // iy_pow is now (iu)^{n0+1}/(n0+1)!; the remainder term needs
        // (iu)^{n0}/n0! = iy_pow * (n0+1) / (iu).
        const cplx lead = iy_pow * static_cast<double>(c.n0 + 1) / iu;
        total += 0.5 * chi * lead * jet.conv_phi[c.n0 + 1];
        total += cplx(0.0, 0.5) * (dchi * sum_g + chi / u * sum_h);
    }
    return total;
}

std::complex<double> Extension::tilde_upper(double x, double u) const {
    cplx total(0.0, 0.0);
    for (const auto& c : comps_) {
        if (u >= c.y_max) continue;
        if (x - u >= c.sup_hi || x + u <= c.sup_lo) continue;
        const auto [chi, dchi] = vertical_cutoff(u, c.y_max);
        (void)dchi;
        const MollifiedJet jet = c.f->mollified_jet(x, u, c.n0);
        cplx iy_pow(1.0, 0.0);
        const cplx iu(0.0, u);
        cplx sum(0.0, 0.0);
        for (int n = 0; n <= c.n0; ++n) {
            sum += iy_pow * jet.conv_phi[n];
            iy_pow *= iu / static_cast<double>(n + 1);
        }
        total += chi * sum;
    }
    return total;
}

std::complex<double> Extension::omega(std::complex<double> z) const {
    const double u = std::abs(z.imag());
    if (u >= y_max_ || u < 1e-300) return {0.0, 0.0};
    const cplx w = omega_upper(z.real(), u);
    return z.imag() > 0.0 ? w : std::conj(w);
}

std::complex<double> Extension::tilde(std::complex<double> z) const {
    const double u = std::abs(z.imag());
    if (u >= y_max_) return {0.0, 0.0};
    if (u < 1e-300) {
        double v = 0.0;
        for (const auto& c : comps_) v += c.f->value(z.real());
        return {v, 0.0};
    }
    const cplx w = tilde_upper(z.real(), u);
    return z.imag() > 0.0 ? w : std::conj(w);
}

Extension operator+(const Extension& a, const Extension& b) {
    Extension out;
    out.comps_ = a.comps_;
    out.comps_.insert(out.comps_.end(), b.comps_.begin(), b.comps_.end());
    out.y_max_ = std::max(a.y_max_, b.y_max_);
    out.x_lo_ = std::min(a.x_lo_, b.x_lo_);
    out.x_hi_ = std::max(a.x_hi_, b.x_hi_);
    return out;
}

} // namespace opcalc
