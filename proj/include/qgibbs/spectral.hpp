#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

// Spectral core for odd-in-y fields on the torus D = [-pi,pi]^2.
//
// A field is represented by its coefficients against the synthesis basis
//   e_j(x) s_k(y),   e_j(x) = exp(i j x) / (2 pi),   s_k(y) = sin(k y),
// over the mode lattice Lambda = {(j,k) : j in Z, k >= 1}. Real fields obey
// the conjugate symmetry c(-j,k) = conj(c(j,k)); only the reduced half
// (j >= 0) is stored.
//
// Two pairings appear throughout and differ by a constant:
//   inner_product(a,b)   = integral_D a b dx dy = 1/2 sum_Lambda a_l conj(b_l)
//   duality_product(a,b) =                            sum_Lambda a_l conj(b_l)
// The plain sum is the H^0 duality bracket the kernel algebra and the
// truncated dynamics are formulated in; see kernel.hpp.

namespace qgibbs {

using Complex = std::complex<double>;

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModeIndex {
    int j = 0;
    int k = 0;
    int norm2() const { return j * j + k * k; }
    ModeIndex reflected() const { return {-j, k}; }
    bool operator==(const ModeIndex&) const = default;
};

/// Mode bookkeeping for one truncation level N: the full set
/// Lambda_N = {(j,k) : k >= 1, j^2 + k^2 <= N} and its reduced half (j >= 0),
/// both ordered k-major then j ascending. Instances are cached per N.
class IndexSet {
  public:
    static std::shared_ptr<const IndexSet> make(int cutoff);

    int cutoff() const { return cutoff_; }
    const std::vector<ModeIndex>& reduced() const { return reduced_; }
    const std::vector<ModeIndex>& full() const { return full_; }

    bool contains(ModeIndex l) const { return l.k >= 1 && l.norm2() <= cutoff_; }
    /// Position in reduced() (requires j >= 0), or -1 if absent.
    int reduced_index(ModeIndex l) const;
    /// Position in full(), or -1 if absent.
    int full_index(ModeIndex l) const;

  private:
    explicit IndexSet(int cutoff);
    int cutoff_ = 0, kmax_ = 0, jmax_ = 0;
    std::vector<ModeIndex> reduced_, full_;
    std::vector<int> red_lut_, full_lut_;
};

/// Complex coefficient vector over the reduced modes of Lambda_N with the
/// conjugate symmetry of a real field implied; j = 0 coefficients are real.
class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(int cutoff);

    int cutoff() const { return set_ ? set_->cutoff() : 0; }
    const IndexSet& modes() const { return *set_; }
    std::shared_ptr<const IndexSet> modes_ptr() const { return set_; }

    /// Coefficient at any lattice mode; reflection/conjugation applied for
    /// j < 0, zero outside Lambda_N.
    Complex coeff(ModeIndex l) const;
    /// Set a reduced-mode coefficient (j >= 0; j = 0 must be real).
    void set_coeff(ModeIndex l, Complex c);

    const std::vector<Complex>& data() const { return c_; }
    std::vector<Complex>& data() { return c_; }

    /// Coefficients materialized over modes().full(), conjugates applied.
    std::vector<Complex> full_coeffs() const;

    bool is_zero() const;

  private:
    std::shared_ptr<const IndexSet> set_;
    std::vector<Complex> c_;
};

SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);
SpectralField operator*(double s, const SpectralField& a);

using DiagSymbol = std::function<Complex(ModeIndex)>;

/// Coefficient-wise multiplication by a diagonal operator symbol. The symbol
/// must preserve reality, symbol(-j,k) = conj(symbol(j,k)); violations throw.
SpectralField apply_diag(const SpectralField& f, const DiagSymbol& symbol);

// Ready-made symbols of the model operators.
DiagSymbol laplacian_inverse_symbol();           // -1/(j^2+k^2)
DiagSymbol partial_x_symbol();                   // i j
DiagSymbol helmholtz_inverse_symbol(double mu);  // 1/(mu + j^2 + k^2)
DiagSymbol beta_term_symbol(double beta);        // -i beta j/(j^2+k^2)

// Common compositions, loop-level (no std::function overhead).
SpectralField laplacian_inverse(const SpectralField& f);
SpectralField partial_x(const SpectralField& f);
SpectralField helmholtz_inverse(const SpectralField& f, double mu);

/// L2(D) integral of a*b, computed spectrally: 1/2 sum_{Lambda_N} a conj(b).
double inner_product(const SpectralField& a, const SpectralField& b);
/// Average integral (1/4pi^2) * inner_product.
double mean_product(const SpectralField& a, const SpectralField& b);
/// H^0 duality bracket: plain Parseval sum over Lambda_N (= 2*inner_product).
double duality_product(const SpectralField& a, const SpectralField& b);

/// H^s norm with the weight (j^2+k^2)^{2s}, summed over the full set.
/// Note the exponent 2s: this follows the source convention for the H^alpha
/// scale literally, where the usual Sobolev weight would be (j^2+k^2)^s.
double sobolev_norm(const SpectralField& a, double s);

/// Projection of grad^perp(a) . grad(b) onto Lambda_{n_out}, by direct
/// O(|Lambda|^2) triad summation. Conjugate symmetry of the output is
/// enforced by folding and verified.
SpectralField jacobian_triad(const SpectralField& a, const SpectralField& b, int n_out);

struct GridField {
    int nx = 0, ny = 0;
    std::vector<double> v;  // row-major [iy][ix]
    double at(int ix, int iy) const { return v[static_cast<size_t>(iy) * nx + ix]; }
    double& at(int ix, int iy) { return v[static_cast<size_t>(iy) * nx + ix]; }
};

/// Pointwise synthesis on the uniform periodic grid x_i = -pi + 2pi i/nx,
/// y_i likewise. Throws NumericalError if the imaginary residue exceeds 1e-12.
GridField synthesize_on_grid(const SpectralField& a, int nx, int ny);

}  // namespace qgibbs
