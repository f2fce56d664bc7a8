#include "qgibbs/gibbs.hpp"

#include <cmath>
#include <numbers>

namespace qgibbs {

namespace {
constexpr double kPi = std::numbers::pi;

SpectralField project(const SpectralField& f, int n) {
    SpectralField out(n);
    const auto& red = out.modes().reduced();
    for (size_t i = 0; i < red.size(); ++i) out.data()[i] = f.coeff(red[i]);
    return out;
}
}  // namespace

GibbsParams::GibbsParams(double a, double m, double b, const SpectralField& topography, int n)
    : alpha(a), mu(m), beta(b), cutoff(n) {
    if (!(alpha > 0.0)) throw std::invalid_argument("GibbsParams: alpha must be > 0");
    if (!(mu > 0.0)) throw std::invalid_argument("GibbsParams: mu must be > 0");
    if (n < 1) throw std::invalid_argument("GibbsParams: cutoff must be >= 1");
    h = topography.cutoff() == 0 ? SpectralField(n) : project(topography, n);
}

double mode_variance(ModeIndex l, const GibbsParams& p) {
    const double n2 = l.norm2();
    return n2 / (p.alpha * (p.mu + n2));
}

double u_variance(const GibbsParams& p) { return 1.0 / (p.alpha * p.mu); }

State sample_state(const GibbsParams& p, rng::Key stream) {
    State s;
    s.omega = SpectralField(p.cutoff);
    const auto& red = s.omega.modes().reduced();
    for (size_t i = 0; i < red.size(); ++i) {
        const double sig2 = mode_variance(red[i], p);
        const auto [z0, z1] = rng::gaussian_pair(stream, i);
        if (red[i].j == 0)
            s.omega.data()[i] = Complex(std::sqrt(sig2) * z0, 0.0);
        else
            s.omega.data()[i] = std::sqrt(0.5 * sig2) * Complex(z0, z1);
    }
    s.U = std::sqrt(u_variance(p)) * rng::gaussian(stream.child(0x55), 0);
    return s;
}

SpectralField mean_vorticity(const GibbsParams& p) {
    SpectralField out(p.cutoff);
    const auto& red = out.modes().reduced();
    for (size_t i = 0; i < red.size(); ++i) {
        const auto l = red[i];
        Complex c = p.mu / (p.mu + l.norm2()) * p.h.data()[i];
        if (l.j == 0) {
            const double ysin = 4.0 * kPi * ((l.k % 2 == 1) ? 1.0 : -1.0) / l.k;
            c += p.beta * ysin;
        }
        out.data()[i] = c;
    }
    return out;
}

Decentered decenter(const State& s, const GibbsParams& p) {
    if (s.omega.cutoff() != p.cutoff) throw std::invalid_argument("decenter: cutoff mismatch");
    return {s.U - p.beta / p.mu, s.omega + mean_vorticity(p)};
}

State center(const Decentered& d, const GibbsParams& p) {
    if (d.q.cutoff() != p.cutoff) throw std::invalid_argument("center: cutoff mismatch");
    return {d.V + p.beta / p.mu, d.q - mean_vorticity(p)};
}

}  // namespace qgibbs
