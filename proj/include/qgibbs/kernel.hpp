#pragma once

#include "qgibbs/gibbs.hpp"
#include "qgibbs/spectral.hpp"

#include <vector>

// Kernel algebra of the renormalized nonlinearity.
//
// Kernel2 stores the double Fourier table F_l F_l'(H) over Lambda_N x Lambda_N.
// For a test function phi, hphi_kernel computes
//   F_l F_l'(H_phi) = [ (j'k - jk') g(j+j', k+k') - (j'k + jk') g(j+j', k-k') ]
//                     * (1/|l|^2 - 1/|l'|^2) / (4i)
// with g(m) = phi_hat(m) / (2 pi) and the odd extension g(j,-k) = -g(j,k),
// g(j,0) = 0. The 1/(2 pi) rescaling is the single place where the coefficient
// convention is fixed: it makes phi(x,y) = sin(y) (synthesis coefficient 2 pi
// at (0,1)) reproduce the closed form
//   1{j+j'=0} 1{k-k'=1} / (4i) * j(1-2k) / ((j^2+k^2)(j^2+(k-1)^2))
// entry-wise, and with that normalization
//   pair_tensor(omega, hphi_kernel_truncated(phi, N))
//     = duality_product(jacobian_triad(laplacian_inverse(omega), omega, N), phi),
// the H^0 duality bracket (2x the L2 inner product). All pairings and Wick
// moments below operate in this convention.

namespace qgibbs {

class Kernel2 {
  public:
    Kernel2() = default;
    explicit Kernel2(int cutoff);

    int cutoff() const { return set_ ? set_->cutoff() : 0; }
    const IndexSet& modes() const { return *set_; }

    /// Entry at any pair of lattice modes; reality reflection
    /// entry(-l,-l') = conj(entry(l,l')) applied for rows with j < 0.
    Complex entry(ModeIndex l, ModeIndex lp) const;

    /// Assign the orbit {(l,l'), (l',l), (-l,-l'), (-l',-l)} consistently with
    /// symmetry and reality. Degenerate orbits (both j = 0) must be real.
    void set_entry_sym(ModeIndex l, ModeIndex lp, Complex c);

    bool is_symmetric(double tol = 1e-12) const;

    Complex& raw(int row_reduced, int col_full) { return e_[idx(row_reduced, col_full)]; }
    const Complex& raw(int row_reduced, int col_full) const { return e_[idx(row_reduced, col_full)]; }

  private:
    size_t idx(int r, int c) const { return static_cast<size_t>(r) * ncols_ + c; }
    std::shared_ptr<const IndexSet> set_;
    size_t ncols_ = 0;
    std::vector<Complex> e_;  // reduced rows x full columns
};

Kernel2 operator-(const Kernel2& a, const Kernel2& b);

/// Kernel of the full nonlinearity paired against phi, restricted to
/// Lambda_N x Lambda_N.
Kernel2 hphi_kernel(const SpectralField& phi, int n);

/// Kernel of the projected nonlinearity Pi_N(grad^perp Lap^-1 w . grad w):
/// same formula with the indicator 1{output mode in Lambda_N} on each branch.
/// Entries are stored over Lambda_M x Lambda_M (default M = N).
Kernel2 hphi_kernel_truncated(const SpectralField& phi, int n, int m = -1);

/// Progressive Fourier truncation: zero all entries outside Lambda_M x Lambda_M.
Kernel2 restrict_kernel(const Kernel2& h, int m);

/// <w (x) w, H> = sum_{l,l'} F_{-l}F_{-l'}(H) w_l w_l'; real for
/// conjugate-symmetric inputs (imaginary residue checked).
double pair_tensor(const SpectralField& omega, const Kernel2& h);

/// S = sum_l F_l F_l(H) sigma^2_l, the renormalization trace.
double diag_trace(const Kernel2& h, const GibbsParams& p);

/// <w <> w, H> = pair_tensor - diag_trace; requires a symmetric kernel.
double diamond_pair(const SpectralField& omega, const Kernel2& h, const GibbsParams& p);

/// E[<w (x) w, H>^2] = S^2 + 2 sum_{l,l'} |F_l F_l'(H)|^2 sigma^2_l sigma^2_l'.
double wick_second_moment(const Kernel2& h, const GibbsParams& p);
/// The fluctuation part 2 sum |F F(H)|^2 s^2 s^2 (variance of the diamond pairing).
double wick_variance(const Kernel2& h, const GibbsParams& p);

/// Mean-square distance of pairings, sqrt(E[(pair(H1) - pair(H2))^2]).
double kernel_distance(const Kernel2& h1, const Kernel2& h2, const GibbsParams& p);

/// Partial sums sum (1 + |l|^2 + |l'|^2)^delta |F_l F_l'(H_phi)|^2 over the
/// first M kernel-support pairs (ordered by weight, then lexicographically),
/// for each M in m_list. Bounded for delta < 1, divergent for delta >= 1.
std::vector<double> hphi_tail_profile(const SpectralField& phi, double delta,
                                      const std::vector<long>& m_list);

/// Pointwise realization on a grid, normalized so that the double integral
/// over D x D against a(z) b(z') reproduces the spectral pairing; used by
/// quadrature oracles. Row-major over (iy', ix', iy, ix) collapsed as
/// [point(z')][point(z)].
std::vector<double> kernel_on_grid(const Kernel2& h, int nx, int ny);

}  // namespace qgibbs
