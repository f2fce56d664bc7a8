#pragma once

#include "qgibbs/gibbs.hpp"
#include "qgibbs/kernel.hpp"
#include "qgibbs/spectral.hpp"

#include <vector>

// Truncated dynamics B^N of the centred system:
//   d(omega)/dt = -Pi_N(grad^perp Lap^-1 w . grad w) - L_N w
//   dU/dt       = <h^N, dx Lap^-1 w>   (H^0 duality bracket)
// with L_N w = (U - beta/mu) dx w + U mu dx f + Pi_N(grad^perp f . grad w)
//            + Pi_N(grad^perp Lap^-1 w . grad(mu f)) + beta dx Lap^-1 w,
// f = (mu - Delta)^{-1} h^N. The duality normalization of dU is the one under
// which the sampling measure of gibbs.hpp is invariant (checked by the
// Liouville test below); see kernel.hpp for the bracket convention.

namespace qgibbs {

struct StateDeriv {
    double dU = 0.0;
    SpectralField domega;
};

StateDeriv vector_field(const State& s, const GibbsParams& p);

/// The affine part L_N omega alone (used by the weak-residual evaluation).
SpectralField linear_term(const State& s, const GibbsParams& p);

State rk4_step(const State& s, const GibbsParams& p, double dt);

struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
};

/// Classical RK4 with fixed step; records every `stride`-th state (and the
/// final one). Throws NumericalError on non-finite values.
Trajectory integrate(const State& initial, const GibbsParams& p, double dt, double t_final,
                     int stride = 1);

/// E = V^2/2 + 1/2 sum |l|^2 |psi'_l|^2 with psi' = Lap^-1 w + f.
double energy(const State& s, const GibbsParams& p);
/// Q = beta V + 1/2 sum |w_l + mu f_l|^2   (the (q - beta y) quadratic form).
double enstrophy(const State& s, const GibbsParams& p);
/// S_mu = mu U^2/2 + 1/2 sum (1 + mu/|l|^2) |w_l|^2; -(1/alpha) log of the
/// Gibbs density, exactly conserved by the truncated flow.
double pseudoenergy(const State& s, const GibbsParams& p);

struct LiouvilleEstimate {
    double divergence = 0.0;  // div_Lebesgue B - grad(alpha S_mu) . B
    double term_mass = 0.0;   // sum of absolute values of all cancelling terms
    double normalized() const { return divergence / std::max(term_mass, 1e-300); }
};

/// Central-difference divergence of B^N with respect to the Gibbs measure in
/// real coordinates (Re/Im per j > 0 mode, real j = 0 modes, U).
LiouvilleEstimate liouville_divergence(const State& s, const GibbsParams& p, double eps);

enum class ResidualKind { Tensor, Diamond };

/// max_t | <w_t,phi> - <w_0,phi> + int_0^t [ pair(w_s, H^N_phi) + <L_N w_s, phi> ] ds |
/// with trapezoidal time quadrature on the recorded stride; Diamond uses the
/// trace-renormalized pairing.
double weak_residual(const Trajectory& traj, const SpectralField& phi, const GibbsParams& p,
                     ResidualKind kind = ResidualKind::Tensor);
std::vector<double> weak_residual_curve(const Trajectory& traj, const SpectralField& phi,
                                        const GibbsParams& p,
                                        ResidualKind kind = ResidualKind::Tensor);

}  // namespace qgibbs
