#include "opcalc/model_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "opcalc/errors.hpp"
#include "opcalc/quadrature.hpp"
#include "opcalc/taylor.hpp"

namespace opcalc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double falling(double gamma, int n) {
    double p = 1.0;
    for (int k = 0; k < n; ++k) p *= (gamma - k);
    return p;
}

double binom_int(int n, int k) {
    double b = 1.0;
    for (int j = 0; j < k; ++j) b = b * (n - j) / (j + 1);
    return b;
}

const SupportedPoly& phi_deriv(int k) {
    switch (k) {
        case 0: return mollifier_phi();
        case 1: return mollifier_phi_d1();
        case 2: return mollifier_phi_d2();
        default: throw ParameterError("mollifier derivative order beyond C^1 transfer limit");
    }
}

const SupportedPoly& psi_deriv(int k) {
    switch (k) {
        case 0: return mollifier_psi();
        case 1: return mollifier_psi_d1();
        default: throw ParameterError("scale kernel derivative order beyond transfer limit");
    }
}

} // namespace

Jet smoothstep_jet(double t, int order) {
    if (t <= 1e-8) return Jet(0.0, order);
    if (t >= 1.0 - 1e-8) return Jet(1.0, order);
    const Jet tj = Jet::variable(t, order);
    const Jet e0 = exp(-1.0 / tj);
    const Jet e1 = exp(-1.0 / (1.0 - tj));
    return e0 / (e0 + e1);
}

bool ModelFunction::compactly_supported() const {
    return std::isfinite(support_lo()) && std::isfinite(support_hi());
}

double ModelFunction::max_kernel_scale() const { return kInf; }

// ---------------------------------------------------------------------------
// Edge power (a - x)^gamma below a.

namespace {

class EdgePower final : public ModelFunction {
public:
    EdgePower(double gamma, double a) : gamma_(gamma), a_(a) {
        if (!(gamma > 0.0)) throw ParameterError("edge power needs gamma > 0");
        if (!std::isfinite(a)) throw ParameterError("edge power needs a finite edge");
        m_ = static_cast<int>(std::ceil(gamma));
    }

    double value(double x) const override {
        return x < a_ ? std::pow(a_ - x, gamma_) : 0.0;
    }

    double derivative(int n, double x) const override {
        if (n < 0) throw ParameterError("derivative order must be nonnegative");
        if (x > a_) return 0.0;
        if (x == a_) throw DomainError("edge power has no classical derivative at the edge");
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        return sign * falling(gamma_, n) * std::pow(a_ - x, gamma_ - n);
    }

    int max_taylor_order() const override { return m_ + 1; }

    std::vector<double> singular_points() const override { return {a_}; }
    std::vector<double> structure_points() const override { return {a_}; }
    double support_lo() const override { return -kInf; }
    double support_hi() const override { return a_; }

    MollifiedJet mollified_jet(double x, double u, int n0) const override {
        if (!(u > 0.0)) throw ParameterError("kernel scale must be positive");
        if (n0 > max_taylor_order())
            throw ParameterError("taylor order exceeds what the edge regularity supports");
        MollifiedJet jet;
        jet.conv_phi.resize(n0 + 2);
        jet.conv_psi.resize(n0 + 1);
        const double c = (a_ - x) / u;
        for (int n = 0; n <= n0 + 1; ++n) {
            // Differentiate f classically m times (still integrable), push
            // the rest onto the kernel. The kernel is C^1 with two vanishing
            // edge orders, so up to two transferred derivatives stay
            // classical integrals.
            const int mn = std::min(n, m_);
            const double sign = (mn % 2 == 0) ? 1.0 : -1.0;
            const double amp = sign * falling(gamma_, mn) * std::pow(u, gamma_ - n);
            jet.conv_phi[n] =
                amp * edge_kernel_integral(c, gamma_ - mn, phi_deriv(n - mn));
            if (n <= n0)
                jet.conv_psi[n] =
                    amp * edge_kernel_integral(c, gamma_ - mn, psi_deriv(n - mn));
        }
        return jet;
    }

    std::string describe() const override {
        std::ostringstream os;
        os << "edge_power(gamma=" << gamma_ << ", a=" << a_ << ")";
        return os.str();
    }

    double gamma() const { return gamma_; }
    double edge() const { return a_; }

private:
    double gamma_, a_;
    int m_; // ceil(gamma): derivatives beyond this go onto the kernel
};

// ---------------------------------------------------------------------------
// Indicator of (-inf, a).

class IndicatorBelow final : public ModelFunction {
public:
    explicit IndicatorBelow(double a) : a_(a) {
        if (!std::isfinite(a)) throw ParameterError("indicator needs a finite threshold");
    }

    double value(double x) const override { return x < a_ ? 1.0 : 0.0; }

    double derivative(int n, double x) const override {
        if (n < 0) throw ParameterError("derivative order must be nonnegative");
        if (x == a_) throw DomainError("indicator has no classical derivative at the jump");
        return n == 0 ? value(x) : 0.0;
    }

    int max_taylor_order() const override { return 2; }

    std::vector<double> singular_points() const override { return {a_}; }
    std::vector<double> structure_points() const override { return {a_}; }
    double support_lo() const override { return -kInf; }
    double support_hi() const override { return a_; }

    MollifiedJet mollified_jet(double x, double u, int n0) const override {
        if (!(u > 0.0)) throw ParameterError("kernel scale must be positive");
        if (n0 > max_taylor_order())
            throw ParameterError("taylor order exceeds what a jump discontinuity supports");
        MollifiedJet jet;
        jet.conv_phi.resize(n0 + 2);
        jet.conv_psi.resize(n0 + 1);
        const double c = (a_ - x) / u;
        // f * phi_u integrates the kernel over v > -c; derivatives of f
        // fall entirely on the kernel and evaluate its antiderivatives at
        // the jump position.
        jet.conv_phi[0] = 1.0 - mollifier_phi().integral_from_left(-c);
        jet.conv_psi[0] = -mollifier_psi().integral_from_left(-c);
        double upow = u;
        for (int n = 1; n <= n0 + 1; ++n) {
            jet.conv_phi[n] = -phi_deriv(n - 1)(-c) / upow;
            if (n <= n0) jet.conv_psi[n] = -psi_deriv(n - 1)(-c) / upow;
            upow *= u;
        }
        return jet;
    }

    std::string describe() const override {
        std::ostringstream os;
        os << "indicator_below(a=" << a_ << ")";
        return os.str();
    }

private:
    double a_;
};

// ---------------------------------------------------------------------------
// Smooth bump exp(1 - 1/(1 - s^2)).

class SmoothBump final : public ModelFunction {
public:
    SmoothBump(double center, double width) : center_(center), width_(width) {
        if (!(width > 0.0)) throw ParameterError("bump width must be positive");
    }

    static Jet bump_jet(double s, int order) {
        // Jet of exp(1 - 1/(1 - s^2)) in the normalized coordinate.
        if (std::abs(s) >= 1.0 - 1e-12) return Jet(0.0, order);
        const Jet sj = Jet::variable(s, order);
        const Jet g = 1.0 - 1.0 / (1.0 - sj * sj);
        return exp(g);
    }

    double value(double x) const override {
        const double s = (x - center_) / width_;
        if (std::abs(s) >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - s * s));
    }

    double derivative(int n, double x) const override {
        if (n < 0) throw ParameterError("derivative order must be nonnegative");
        const double s = (x - center_) / width_;
        const Jet j = bump_jet(s, n);
        return j.derivative(n) / std::pow(width_, n);
    }

    int max_taylor_order() const override { return 8; }

    std::vector<double> singular_points() const override { return {}; }
    std::vector<double> structure_points() const override {
        return {center_ - width_, center_ + width_};
    }
    double support_lo() const override { return center_ - width_; }
    double support_hi() const override { return center_ + width_; }

    MollifiedJet mollified_jet(double x, double u, int n0) const override {
        if (!(u > 0.0)) throw ParameterError("kernel scale must be positive");
        if (n0 > max_taylor_order())
            throw ParameterError("taylor order beyond configured bump jet depth");
        MollifiedJet jet;
        jet.conv_phi.assign(n0 + 2, 0.0);
        jet.conv_psi.assign(n0 + 1, 0.0);

        // Accumulate the jet-weighted kernel integral over one v-interval.
        // One jet per quadrature node supplies every derivative order at once.
        auto accumulate = [&](double p, double q, int order) {
            const auto& rule = gauss_legendre(order);
            const double mid = 0.5 * (p + q), half = 0.5 * (q - p);
            for (std::size_t i = 0; i < rule.x.size(); ++i) {
                const double v = mid + half * rule.x[i];
                const double t = x - u * v;
                const Jet j = bump_jet((t - center_) / width_, n0 + 1);
                const double pw = half * rule.w[i] * mollifier_phi()(v);
                const double sw = half * rule.w[i] * mollifier_psi()(v);
                double scale = 1.0;
                for (int n = 0; n <= n0 + 1; ++n) {
                    const double dn = j.derivative(n) / scale;
                    jet.conv_phi[n] += pw * dn;
                    if (n <= n0) jet.conv_psi[n] += sw * dn;
                    scale *= width_;
                }
            }
        };

        // Distance from the image of a kernel point to the nearest support
        // edge, in units of the bump width. The high derivatives oscillate
        // at a scale that shrinks with this distance, so it drives both the
        // panel density and the dyadic end-grading below.
        auto edge_distance = [&](double v) {
            const double t = x - u * v;
            return std::min(std::abs(t - (center_ - width_)),
                            std::abs(t - (center_ + width_))) / width_;
        };
        // Integrate one kernel piece with panels no wider than a twentieth
        // of the bump width in the function coordinate, grading dyadically
        // toward ends that sit near an edge. A single wide Gauss rule here
        // silently loses five or six digits on the derivative spikes.
        auto integrate_piece = [&](double p, double q) {
            const double tw = u * (q - p) / width_;
            const int npan = std::clamp(static_cast<int>(std::ceil(tw / 0.05)), 1, 24);
            std::vector<double> sub;
            for (int i = 0; i <= npan; ++i)
                sub.push_back(p + (q - p) * i / npan);
            const double w = q - p;
            for (int lvl = 1; lvl <= 8; ++lvl) {
                const double d = w * std::pow(0.5, lvl);
                if (edge_distance(p) < 0.3) sub.push_back(p + d);
                if (edge_distance(q) < 0.3) sub.push_back(q - d);
            }
            std::sort(sub.begin(), sub.end());
            sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
            for (std::size_t j = 0; j + 1 < sub.size(); ++j)
                if (sub[j + 1] > sub[j]) accumulate(sub[j], sub[j + 1], 24);
        };

        // Where do the support edges land in the kernel coordinate?
        std::vector<double> cuts = {-1.0, 1.0};
        for (double e : {center_ - width_, center_ + width_}) {
            const double ve = (x - e) / u;
            if (ve > -1.0 + 1e-14 && ve < 1.0 - 1e-14) cuts.push_back(ve);
        }
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            const double p = cuts[k], q = cuts[k + 1];
            const double t_lo = x - u * q, t_hi = x - u * p;
            if (t_hi <= center_ - width_ || t_lo >= center_ + width_) continue;
            integrate_piece(p, q);
        }
        return jet;
    }

    std::string describe() const override {
        std::ostringstream os;
        os << "smooth_bump(center=" << center_ << ", width=" << width_ << ")";
        return os.str();
    }

private:
    double center_, width_;
};

// ---------------------------------------------------------------------------
// C-infinity window and products against it.

struct Window {
    double lo, hi, ramp;

    Window(double w_lo, double w_hi) : lo(w_lo), hi(w_hi) {
        if (!(w_lo < w_hi)) throw ParameterError("cutoff window must have positive length");
        ramp = (w_hi - w_lo) / 8.0;
    }

    double flat_lo() const { return lo + ramp; }
    double flat_hi() const { return hi - ramp; }

    Jet jet(double x, int order) const {
        if (x <= lo || x >= hi) return Jet(0.0, order);
        if (x < flat_lo()) {
            Jet s = smoothstep_jet((x - lo) / ramp, order);
            return rescale(s, order, 1.0 / ramp);
        }
        if (x > flat_hi()) {
            Jet s = smoothstep_jet((hi - x) / ramp, order);
            return rescale(s, order, -1.0 / ramp);
        }
        return Jet(1.0, order);
    }

    double value(double x) const { return jet(x, 0).value(); }

    std::vector<double> transition_points() const {
        return {lo, flat_lo(), flat_hi(), hi};
    }

private:
    // Chain rule for the affine reparametrization t = slope * x + const.
    static Jet rescale(const Jet& inner, int order, double slope) {
        // Build the jet in x from the jet in t: coefficients scale by slope^k.
        Jet out(inner.value(), order);
        double pw = 1.0;
        std::vector<double> c(order + 1);
        for (int k = 0; k <= order; ++k) {
            c[k] = inner.coeff(k) * pw;
            pw *= slope;
        }
        // Reassemble via polynomial arithmetic on the identity jet.
        Jet x = Jet::variable(0.0, order); // increment variable
        Jet acc(c[order], order);
        for (int k = order - 1; k >= 0; --k) acc = acc * x + c[k];
        return acc;
    }
};

class CutoffProduct final : public ModelFunction {
public:
    CutoffProduct(ModelFunctionPtr base, double w_lo, double w_hi)
        : base_(std::move(base)), win_(w_lo, w_hi) {
        if (!base_) throw ParameterError("cutoff product needs a base function");
        double d0 = kInf;
        for (double s : base_->singular_points()) {
            for (int side = 0; side < 2; ++side) {
                const double rl = side == 0 ? win_.lo : win_.flat_hi();
                const double rh = side == 0 ? win_.flat_lo() : win_.hi;
                double d;
                if (s < rl) d = rl - s;
                else if (s > rh) d = s - rh;
                else d = 0.0;
                d0 = std::min(d0, d);
            }
        }
        if (d0 <= 0.0)
            throw ParameterError(
                "cutoff window transition overlaps a singular point of the base function");
        scale_cap_ = std::min(base_->max_kernel_scale(), 0.499 * d0);
    }

    double value(double x) const override {
        const double w = win_.value(x);
        return w == 0.0 ? 0.0 : base_->value(x) * w;
    }

    double derivative(int n, double x) const override {
        const Jet w = win_.jet(x, n);
        double acc = 0.0;
        for (int k = 0; k <= n; ++k)
            acc += binom_int(n, k) * base_->derivative(k, x) * w.derivative(n - k);
        return acc;
    }

    int max_taylor_order() const override { return base_->max_taylor_order(); }

    std::vector<double> singular_points() const override {
        std::vector<double> pts;
        for (double s : base_->singular_points())
            if (s > win_.lo && s < win_.hi) pts.push_back(s);
        return pts;
    }

    std::vector<double> structure_points() const override {
        std::vector<double> pts = base_->structure_points();
        for (double t : win_.transition_points()) pts.push_back(t);
        return pts;
    }

    double support_lo() const override { return std::max(base_->support_lo(), win_.lo); }
    double support_hi() const override { return std::min(base_->support_hi(), win_.hi); }

    double max_kernel_scale() const override { return scale_cap_; }

    MollifiedJet mollified_jet(double x, double u, int n0) const override {
        if (!(u > 0.0)) throw ParameterError("kernel scale must be positive");
        if (u > scale_cap_)
            throw ParameterError(
                "kernel scale exceeds the window's clearance around singular points");
        // Kernel window entirely inside a region where W is constant:
        // reuse the base jets (exact closed forms for edge-type bases).
        if (x + u <= win_.lo || x - u >= win_.hi) {
            MollifiedJet jet;
            jet.conv_phi.assign(n0 + 2, 0.0);
            jet.conv_psi.assign(n0 + 1, 0.0);
            return jet;
        }
        if (x - u >= win_.flat_lo() && x + u <= win_.flat_hi())
            return base_->mollified_jet(x, u, n0);

        // Otherwise the window ramp intersects the kernel support; the
        // construction guarantees the base is smooth there, so integrate
        // numerically with Leibniz jets, splitting panels at the ramp
        // and structure points.
        MollifiedJet jet;
        jet.conv_phi.assign(n0 + 2, 0.0);
        jet.conv_psi.assign(n0 + 1, 0.0);
        std::vector<double> cuts{-1.0, 1.0};
        for (double t : structure_points()) {
            const double v = (x - t) / u; // t = x - u v
            if (v > -1.0 + 1e-12 && v < 1.0 - 1e-12) cuts.push_back(v);
        }
        std::sort(cuts.begin(), cuts.end());
        const auto& rule = gauss_legendre(24);
        std::vector<double> fd(n0 + 2), wd(n0 + 2);
        for (std::size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
            const double mid = 0.5 * (cuts[seg] + cuts[seg + 1]);
            const double half = 0.5 * (cuts[seg + 1] - cuts[seg]);
            if (half <= 0.0) continue;
            for (std::size_t i = 0; i < rule.x.size(); ++i) {
                const double v = mid + half * rule.x[i];
                const double t = x - u * v;
                const Jet w = win_.jet(t, n0 + 1);
                for (int k = 0; k <= n0 + 1; ++k) {
                    fd[k] = base_->derivative(k, t);
                    wd[k] = w.derivative(k);
                }
                const double pw = half * rule.w[i] * mollifier_phi()(v);
                const double sw = half * rule.w[i] * mollifier_psi()(v);
                for (int n = 0; n <= n0 + 1; ++n) {
                    double prod = 0.0;
                    for (int k = 0; k <= n; ++k)
                        prod += binom_int(n, k) * fd[k] * wd[n - k];
                    jet.conv_phi[n] += pw * prod;
                    if (n <= n0) jet.conv_psi[n] += sw * prod;
                }
            }
        }
        return jet;
    }

    std::string describe() const override {
        std::ostringstream os;
        os << "cutoff(" << base_->describe() << ", window=[" << win_.lo << ", "
           << win_.hi << "])";
        return os.str();
    }

    const Window& window() const { return win_; }
    const ModelFunctionPtr& base() const { return base_; }

private:
    ModelFunctionPtr base_;
    Window win_;
    double scale_cap_;
};

// Smooth remainder f - cutoff(f): the edge singularity sits in the flat
// part of the window, where the complement vanishes identically.
class EdgeSplitRemainder final : public ModelFunction {
public:
    EdgeSplitRemainder(std::shared_ptr<const EdgePower> edge,
                       std::shared_ptr<const CutoffProduct> cut)
        : edge_(std::move(edge)), cut_(std::move(cut)) {}

    double value(double x) const override {
        return edge_->value(x) - cut_->value(x);
    }

    double derivative(int n, double x) const override {
        const auto& win = cut_->window();
        if (x >= win.flat_lo() && x <= win.flat_hi()) return 0.0; // complement is flat zero
        if (x >= win.hi) return 0.0; // edge lies below the upper ramp
        return edge_->derivative(n, x) - cut_->derivative(n, x);
    }

    int max_taylor_order() const override { return edge_->max_taylor_order(); }
    std::vector<double> singular_points() const override { return {}; }
    std::vector<double> structure_points() const override {
        return cut_->structure_points();
    }
    double support_lo() const override { return -kInf; }
    double support_hi() const override { return cut_->window().flat_lo(); }

    MollifiedJet mollified_jet(double x, double u, int n0) const override {
        MollifiedJet a = edge_->mollified_jet(x, u, n0);
        MollifiedJet b = cut_->mollified_jet(x, u, n0);
        for (std::size_t i = 0; i < a.conv_phi.size(); ++i) a.conv_phi[i] -= b.conv_phi[i];
        for (std::size_t i = 0; i < a.conv_psi.size(); ++i) a.conv_psi[i] -= b.conv_psi[i];
        return a;
    }

    std::string describe() const override {
        return "split_remainder(" + edge_->describe() + ")";
    }

private:
    std::shared_ptr<const EdgePower> edge_;
    std::shared_ptr<const CutoffProduct> cut_;
};

} // namespace

ModelFunctionPtr edge_power(double gamma, double a) {
    return std::make_shared<EdgePower>(gamma, a);
}

ModelFunctionPtr indicator_below(double a) {
    return std::make_shared<IndicatorBelow>(a);
}

ModelFunctionPtr smooth_bump(double center, double width) {
    return std::make_shared<SmoothBump>(center, width);
}

ModelFunctionPtr cutoff_product(ModelFunctionPtr base, double w_lo, double w_hi) {
    return std::make_shared<CutoffProduct>(std::move(base), w_lo, w_hi);
}

std::pair<ModelFunctionPtr, ModelFunctionPtr>
split_edge_function(double gamma, double a, double w_lo, double w_hi) {
    auto edge = std::make_shared<EdgePower>(gamma, a);
    auto cut = std::make_shared<CutoffProduct>(edge, w_lo, w_hi);
    // The remainder is smooth only if the edge sits strictly inside the
    // flat part of the window and below the upper ramp.
    if (!(a > cut->window().flat_lo() && a < cut->window().flat_hi()))
        throw ParameterError("edge position must lie in the flat interior of the window");
    auto rest = std::make_shared<EdgeSplitRemainder>(edge, cut);
    return {cut, rest};
}

} // namespace opcalc
