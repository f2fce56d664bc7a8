#pragma once

#include "qgibbs/rng.hpp"
#include "qgibbs/spectral.hpp"

// Gibbs ensembles of the truncated channel model. Under eta_{alpha,mu} the
// centred state (U, omega) has independent Gaussian components:
//   U ~ N(0, 1/(alpha mu)),
//   omega_hat(j,k) with E|omega_hat|^2 = sigma^2(j,k) = (j^2+k^2)/(alpha(mu+j^2+k^2)),
// realized as Re/Im ~ N(0, sigma^2/2) for j > 0 and a real N(0, sigma^2) for j = 0.

namespace qgibbs {

struct GibbsParams {
    double alpha = 1.0;  // inverse-temperature scale
    double mu = 1.0;     // energy weight
    double beta = 1.0;   // beta-plane coefficient (0 allowed; dynamics stay defined)
    SpectralField h;     // topography, projected to Lambda_N on construction
    int cutoff = 0;

    GibbsParams(double alpha, double mu, double beta, const SpectralField& topography, int n);
};

struct State {
    double U = 0.0;
    SpectralField omega;
};

double mode_variance(ModeIndex l, const GibbsParams& p);
double u_variance(const GibbsParams& p);

/// Exact sampler; deterministic function of the stream key.
State sample_state(const GibbsParams& p, rng::Key stream);

/// Mean vorticity q_bar = mu (mu - Delta)^{-1} h + beta y, with y expanded in
/// its sine series (coefficient 4 pi (-1)^{k+1}/k at (0,k)), truncated to Lambda_N.
SpectralField mean_vorticity(const GibbsParams& p);

struct Decentered {
    double V = 0.0;
    SpectralField q;  // omega + q_bar; the beta*y tail beyond Lambda_N is truncated
};

Decentered decenter(const State& s, const GibbsParams& p);
State center(const Decentered& d, const GibbsParams& p);

}  // namespace qgibbs
