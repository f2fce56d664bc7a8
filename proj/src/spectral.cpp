#include "qgibbs/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace qgibbs {

namespace {
constexpr double kPi = std::numbers::pi;

int isqrt_floor(int n) {
    if (n <= 0) return 0;
    int r = static_cast<int>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}
}  // namespace

IndexSet::IndexSet(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 1) throw std::invalid_argument("IndexSet: cutoff must be >= 1");
    kmax_ = isqrt_floor(cutoff);
    jmax_ = isqrt_floor(cutoff - 1);
    red_lut_.assign(static_cast<size_t>(kmax_) * (jmax_ + 1), -1);
    full_lut_.assign(static_cast<size_t>(kmax_) * (2 * jmax_ + 1), -1);
    for (int k = 1; k <= kmax_; ++k) {
        for (int j = -jmax_; j <= jmax_; ++j) {
            if (j * j + k * k > cutoff) continue;
            full_lut_[static_cast<size_t>(k - 1) * (2 * jmax_ + 1) + (j + jmax_)] =
                static_cast<int>(full_.size());
            full_.push_back({j, k});
            if (j >= 0) {
                red_lut_[static_cast<size_t>(k - 1) * (jmax_ + 1) + j] =
                    static_cast<int>(reduced_.size());
                reduced_.push_back({j, k});
            }
        }
    }
}

std::shared_ptr<const IndexSet> IndexSet::make(int cutoff) {
    static std::mutex mtx;
    static std::map<int, std::shared_ptr<const IndexSet>> cache;
    std::lock_guard lock(mtx);
    auto& slot = cache[cutoff];
    if (!slot) slot = std::shared_ptr<const IndexSet>(new IndexSet(cutoff));
    return slot;
}

int IndexSet::reduced_index(ModeIndex l) const {
    if (l.j < 0 || l.j > jmax_ || l.k < 1 || l.k > kmax_) return -1;
    return red_lut_[static_cast<size_t>(l.k - 1) * (jmax_ + 1) + l.j];
}

int IndexSet::full_index(ModeIndex l) const {
    if (l.j < -jmax_ || l.j > jmax_ || l.k < 1 || l.k > kmax_) return -1;
    return full_lut_[static_cast<size_t>(l.k - 1) * (2 * jmax_ + 1) + (l.j + jmax_)];
}

SpectralField::SpectralField(int cutoff)
    : set_(IndexSet::make(cutoff)), c_(set_->reduced().size(), Complex{}) {}

Complex SpectralField::coeff(ModeIndex l) const {
    if (!set_) return {};
    if (l.j >= 0) {
        int i = set_->reduced_index(l);
        return i < 0 ? Complex{} : c_[i];
    }
    int i = set_->reduced_index(l.reflected());
    return i < 0 ? Complex{} : std::conj(c_[i]);
}

void SpectralField::set_coeff(ModeIndex l, Complex c) {
    if (!set_) throw std::invalid_argument("SpectralField: unset cutoff");
    if (l.j < 0) throw std::invalid_argument("SpectralField: set_coeff takes reduced modes (j >= 0)");
    int i = set_->reduced_index(l);
    if (i < 0) throw std::invalid_argument("SpectralField: mode outside Lambda_N");
    if (l.j == 0 && c.imag() != 0.0)
        throw std::invalid_argument("SpectralField: j = 0 coefficients must be real");
    c_[i] = c;
}

std::vector<Complex> SpectralField::full_coeffs() const {
    const auto& fl = set_->full();
    std::vector<Complex> out(fl.size());
    for (size_t i = 0; i < fl.size(); ++i) out[i] = coeff(fl[i]);
    return out;
}

bool SpectralField::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](Complex c) { return c == Complex{}; });
}

namespace {
void require_same_cutoff(const SpectralField& a, const SpectralField& b, const char* what) {
    if (a.cutoff() != b.cutoff())
        throw std::invalid_argument(std::string(what) + ": cutoff mismatch");
}
}  // namespace

SpectralField operator+(const SpectralField& a, const SpectralField& b) {
    require_same_cutoff(a, b, "operator+");
    SpectralField out = a;
    for (size_t i = 0; i < out.data().size(); ++i) out.data()[i] += b.data()[i];
    return out;
}

SpectralField operator-(const SpectralField& a, const SpectralField& b) {
    require_same_cutoff(a, b, "operator-");
    SpectralField out = a;
    for (size_t i = 0; i < out.data().size(); ++i) out.data()[i] -= b.data()[i];
    return out;
}

SpectralField operator*(double s, const SpectralField& a) {
    SpectralField out = a;
    for (auto& c : out.data()) c *= s;
    return out;
}

SpectralField apply_diag(const SpectralField& f, const DiagSymbol& symbol) {
    SpectralField out(f.cutoff());
    const auto& red = f.modes().reduced();
    for (size_t i = 0; i < red.size(); ++i) {
        Complex s = symbol(red[i]);
        Complex sr = symbol(red[i].reflected());
        if (std::abs(sr - std::conj(s)) > 1e-12 * (1.0 + std::abs(s)))
            throw std::invalid_argument("apply_diag: symbol violates the reality condition");
        out.data()[i] = s * f.data()[i];
        if (red[i].j == 0)  // keep the j = 0 slot exactly real
            out.data()[i] = Complex(out.data()[i].real(), 0.0);
    }
    return out;
}

DiagSymbol laplacian_inverse_symbol() {
    return [](ModeIndex l) { return Complex(-1.0 / l.norm2(), 0.0); };
}
DiagSymbol partial_x_symbol() {
    return [](ModeIndex l) { return Complex(0.0, static_cast<double>(l.j)); };
}
DiagSymbol helmholtz_inverse_symbol(double mu) {
    return [mu](ModeIndex l) { return Complex(1.0 / (mu + l.norm2()), 0.0); };
}
DiagSymbol beta_term_symbol(double beta) {
    return [beta](ModeIndex l) { return Complex(0.0, -beta * l.j / l.norm2()); };
}

SpectralField laplacian_inverse(const SpectralField& f) {
    SpectralField out(f.cutoff());
    const auto& red = f.modes().reduced();
    for (size_t i = 0; i < red.size(); ++i)
        out.data()[i] = Complex(-1.0 / red[i].norm2(), 0.0) * f.data()[i];
    return out;
}

SpectralField partial_x(const SpectralField& f) {
    SpectralField out(f.cutoff());
    const auto& red = f.modes().reduced();
    for (size_t i = 0; i < red.size(); ++i)
        out.data()[i] = Complex(0.0, double(red[i].j)) * f.data()[i];
    return out;
}

SpectralField helmholtz_inverse(const SpectralField& f, double mu) {
    SpectralField out(f.cutoff());
    const auto& red = f.modes().reduced();
    for (size_t i = 0; i < red.size(); ++i)
        out.data()[i] = Complex(1.0 / (mu + red[i].norm2()), 0.0) * f.data()[i];
    return out;
}

double inner_product(const SpectralField& a, const SpectralField& b) {
    return 0.5 * duality_product(a, b);
}

double mean_product(const SpectralField& a, const SpectralField& b) {
    return inner_product(a, b) / (4.0 * kPi * kPi);
}

double duality_product(const SpectralField& a, const SpectralField& b) {
    require_same_cutoff(a, b, "duality_product");
    const auto& red = a.modes().reduced();
    double s = 0.0;
    for (size_t i = 0; i < red.size(); ++i) {
        double t = (a.data()[i] * std::conj(b.data()[i])).real();
        s += (red[i].j == 0) ? t : 2.0 * t;  // j and -j contribute equally
    }
    return s;
}

double sobolev_norm(const SpectralField& a, double s) {
    const auto& red = a.modes().reduced();
    double sum = 0.0;
    for (size_t i = 0; i < red.size(); ++i) {
        double w = std::pow(static_cast<double>(red[i].norm2()), 2.0 * s);
        double t = std::norm(a.data()[i]) * w;
        sum += (red[i].j == 0) ? t : 2.0 * t;
    }
    return std::sqrt(sum);
}

SpectralField jacobian_triad(const SpectralField& a, const SpectralField& b, int n_out) {
    require_same_cutoff(a, b, "jacobian_triad");
    auto out_set = IndexSet::make(n_out);
    std::vector<Complex> acc(out_set->full().size(), Complex{});

    const auto& fa = a.modes().full();
    const auto av = a.full_coeffs();
    const auto bv = b.full_coeffs();
    const Complex norm(0.0, -1.0 / (4.0 * kPi));  // 1/(4 pi i)

    for (size_t ia = 0; ia < fa.size(); ++ia) {
        if (av[ia] == Complex{}) continue;
        const int j = fa[ia].j, k = fa[ia].k;
        for (size_t ib = 0; ib < fa.size(); ++ib) {
            if (bv[ib] == Complex{}) continue;
            const int jp = fa[ib].j, kp = fa[ib].k;
            const Complex c = av[ia] * bv[ib] * norm;
            int m = out_set->full_index({j + jp, k + kp});
            if (m >= 0) acc[m] += double(jp * k - j * kp) * c;
            const int dk = k - kp;
            if (dk > 0) {
                m = out_set->full_index({j + jp, dk});
                if (m >= 0) acc[m] -= double(jp * k + j * kp) * c;
            } else if (dk < 0) {
                m = out_set->full_index({j + jp, -dk});
                if (m >= 0) acc[m] += double(jp * k + j * kp) * c;
            }
        }
    }

    // Fold to the reduced half; averaging with the reflected conjugate keeps
    // the result exactly conjugate-symmetric.
    SpectralField out(n_out);
    const auto& red = out_set->reduced();
    double scale = 0.0;
    for (const auto& c : acc) scale = std::max(scale, std::abs(c));
    for (size_t i = 0; i < red.size(); ++i) {
        Complex c = acc[out_set->full_index(red[i])];
        Complex cr = std::conj(acc[out_set->full_index(red[i].reflected())]);
        if (std::abs(c - cr) > 1e-10 * std::max(1.0, scale))
            throw NumericalError("jacobian_triad: conjugate symmetry broken");
        Complex folded = 0.5 * (c + cr);
        if (red[i].j == 0) folded = Complex(folded.real(), 0.0);
        out.data()[i] = folded;
    }
    return out;
}

GridField synthesize_on_grid(const SpectralField& a, int nx, int ny) {
    if (nx < 2 || ny < 2) throw std::invalid_argument("synthesize_on_grid: nx, ny >= 2");
    GridField g;
    g.nx = nx;
    g.ny = ny;
    g.v.assign(static_cast<size_t>(nx) * ny, 0.0);

    const auto& red = a.modes().reduced();
    std::vector<Complex> acc(g.v.size(), Complex{});
    for (size_t i = 0; i < red.size(); ++i) {
        const Complex c = a.data()[i];
        if (c == Complex{}) continue;
        const int j = red[i].j, k = red[i].k;
        for (int iy = 0; iy < ny; ++iy) {
            const double y = -kPi + 2.0 * kPi * iy / ny;
            const double sk = std::sin(k * y);
            for (int ix = 0; ix < nx; ++ix) {
                const double x = -kPi + 2.0 * kPi * ix / nx;
                // c e_j s_k + conj for -j (j = 0 counted once)
                const Complex e = std::polar(1.0 / (2.0 * kPi), j * x);
                Complex term = c * e * sk;
                if (j != 0) term += std::conj(term);
                acc[static_cast<size_t>(iy) * nx + ix] += term;
            }
        }
    }
    double scale = 0.0, imag = 0.0;
    for (const auto& c : acc) {
        scale = std::max(scale, std::abs(c));
        imag = std::max(imag, std::abs(c.imag()));
    }
    if (imag > 1e-12 * std::max(1.0, scale))
        throw NumericalError("synthesize_on_grid: imaginary residue exceeds 1e-12");
    for (size_t i = 0; i < acc.size(); ++i) g.v[i] = acc[i].real();
    return g;
}

}  // namespace qgibbs
