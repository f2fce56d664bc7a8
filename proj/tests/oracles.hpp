#pragma once

// Test-side oracles, deliberately independent of the library's spectral
// pipeline: fields are evaluated directly from their coefficient accessors
// on quadrature grids, so any normalization slip in the library shows up as
// a mismatch instead of cancelling.

#include "qgibbs/rng.hpp"
#include "qgibbs/spectral.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

using qgibbs::Complex;
using qgibbs::ModeIndex;
using qgibbs::SpectralField;

inline constexpr double kPi = std::numbers::pi;

struct Grid {
    int n;
    std::vector<double> x;  // = y; periodic nodes of [-pi, pi)
    explicit Grid(int n_) : n(n_), x(n_) {
        for (int i = 0; i < n; ++i) x[i] = -kPi + 2.0 * kPi * i / n;
    }
    double weight() const { return (2.0 * kPi / n) * (2.0 * kPi / n); }
};

/// Pointwise synthesis sum over the full mode set (independent evaluator).
inline double eval(const SpectralField& f, double x, double y) {
    Complex s{};
    for (const auto& l : f.modes().full())
        s += f.coeff(l) * std::polar(1.0 / (2.0 * kPi), l.j * x) * std::sin(l.k * y);
    return s.real();
}

inline double eval_dx(const SpectralField& f, double x, double y) {
    Complex s{};
    for (const auto& l : f.modes().full())
        s += f.coeff(l) * Complex(0.0, l.j) * std::polar(1.0 / (2.0 * kPi), l.j * x) *
             std::sin(l.k * y);
    return s.real();
}

inline double eval_dy(const SpectralField& f, double x, double y) {
    Complex s{};
    for (const auto& l : f.modes().full())
        s += f.coeff(l) * double(l.k) * std::polar(1.0 / (2.0 * kPi), l.j * x) *
             std::cos(l.k * y);
    return s.real();
}

/// integral_D f g dx dy by the periodic rectangle rule (spectrally exact for
/// band-limited integrands resolved by the grid).
inline double quad_product(const SpectralField& f, const SpectralField& g, int n = 64) {
    const Grid grid(n);
    double s = 0.0;
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix)
            s += eval(f, grid.x[ix], grid.x[iy]) * eval(g, grid.x[ix], grid.x[iy]);
    return s * grid.weight();
}

/// Synthesis-convention coefficient recovered by quadrature:
/// 2 * integral_D f e_{-j} s_k.
inline Complex quad_coefficient(const SpectralField& f, ModeIndex l, int n = 64) {
    const Grid grid(n);
    Complex s{};
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix)
            s += eval(f, grid.x[ix], grid.x[iy]) *
                 std::polar(1.0 / (2.0 * kPi), -l.j * grid.x[ix]) * std::sin(l.k * grid.x[iy]);
    return 2.0 * s * grid.weight();
}

/// grad^perp(a) . grad(b) evaluated pointwise from spectral derivatives.
inline double eval_jacobian(const SpectralField& a, const SpectralField& b, double x, double y) {
    return -eval_dy(a, x, y) * eval_dx(b, x, y) + eval_dx(a, x, y) * eval_dy(b, x, y);
}

/// Deterministic random real field with decaying coefficients.
inline SpectralField random_field(int cutoff, std::uint64_t seed, double decay = 1.0) {
    SpectralField f(cutoff);
    const auto& red = f.modes().reduced();
    const qgibbs::rng::Key key{seed};
    for (size_t i = 0; i < red.size(); ++i) {
        const auto [z0, z1] = qgibbs::rng::gaussian_pair(key, i);
        const double w = std::pow(1.0 + red[i].norm2(), -decay);
        f.data()[i] = (red[i].j == 0) ? Complex(w * z0, 0.0) : w * Complex(z0, z1);
    }
    return f;
}

}  // namespace oracle
