#include "qgibbs/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace qgibbs {

namespace {
constexpr double kPi = std::numbers::pi;

// phi coefficients in the closed-form normalization (sin y -> 1 at (0,1)),
// with the odd extension in k.
struct PhiTable {
    const SpectralField* phi;
    Complex operator()(int j, int k) const {
        if (k == 0) return {};
        if (k > 0) return phi->coeff({j, k}) / (2.0 * kPi);
        return -(phi->coeff({j, -k}) / (2.0 * kPi));
    }
};

Complex hphi_entry(const PhiTable& g, ModeIndex l, ModeIndex lp, int proj) {
    const int j = l.j, k = l.k, jp = lp.j, kp = lp.k;
    Complex t1 = double(jp * k - j * kp) * g(j + jp, k + kp);
    if (proj >= 0 && (j + jp) * (j + jp) + (k + kp) * (k + kp) > proj) t1 = Complex{};
    Complex t2 = double(jp * k + j * kp) * g(j + jp, k - kp);
    if (proj >= 0 && k != kp) {
        const int dk = std::abs(k - kp);
        if ((j + jp) * (j + jp) + dk * dk > proj) t2 = Complex{};
    }
    const double fac = 1.0 / l.norm2() - 1.0 / lp.norm2();
    return (t1 - t2) * fac * Complex(0.0, -0.25);  // 1/(4i)
}
}  // namespace

Kernel2::Kernel2(int cutoff) : set_(IndexSet::make(cutoff)) {
    ncols_ = set_->full().size();
    e_.assign(set_->reduced().size() * ncols_, Complex{});
}

Complex Kernel2::entry(ModeIndex l, ModeIndex lp) const {
    if (!set_) return {};
    if (l.j >= 0) {
        const int r = set_->reduced_index(l);
        const int c = set_->full_index(lp);
        return (r < 0 || c < 0) ? Complex{} : e_[idx(r, c)];
    }
    const int r = set_->reduced_index(l.reflected());
    const int c = set_->full_index(lp.reflected());
    return (r < 0 || c < 0) ? Complex{} : std::conj(e_[idx(r, c)]);
}

void Kernel2::set_entry_sym(ModeIndex l, ModeIndex lp, Complex c) {
    if (!set_->contains(l) || !set_->contains(lp))
        throw std::invalid_argument("Kernel2: mode outside Lambda_N");
    if (l.j == 0 && lp.j == 0 && c.imag() != 0.0)
        throw std::invalid_argument("Kernel2: entries with j = j' = 0 must be real");
    auto put = [&](ModeIndex a, ModeIndex b, Complex v) {
        if (a.j < 0) return;  // reflection covers it
        e_[idx(set_->reduced_index(a), set_->full_index(b))] = v;
    };
    put(l, lp, c);
    put(lp, l, c);
    put(l.reflected(), lp.reflected(), std::conj(c));
    put(lp.reflected(), l.reflected(), std::conj(c));
}

bool Kernel2::is_symmetric(double tol) const {
    const auto& fl = set_->full();
    for (const auto& l : fl)
        for (const auto& lp : fl) {
            const Complex a = entry(l, lp), b = entry(lp, l);
            if (std::abs(a - b) > tol * std::max(1.0, std::abs(a))) return false;
        }
    return true;
}

Kernel2 operator-(const Kernel2& a, const Kernel2& b) {
    if (a.cutoff() != b.cutoff()) throw std::invalid_argument("Kernel2: cutoff mismatch");
    Kernel2 out = a;
    const auto nr = a.modes().reduced().size();
    const auto nc = a.modes().full().size();
    for (size_t r = 0; r < nr; ++r)
        for (size_t c = 0; c < nc; ++c)
            out.raw(static_cast<int>(r), static_cast<int>(c)) -=
                b.raw(static_cast<int>(r), static_cast<int>(c));
    return out;
}

Kernel2 hphi_kernel(const SpectralField& phi, int n) {
    Kernel2 out(n);
    const PhiTable g{&phi};
    const auto& red = out.modes().reduced();
    const auto& fl = out.modes().full();
    for (size_t r = 0; r < red.size(); ++r)
        for (size_t c = 0; c < fl.size(); ++c)
            out.raw(static_cast<int>(r), static_cast<int>(c)) = hphi_entry(g, red[r], fl[c], -1);
    return out;
}

Kernel2 hphi_kernel_truncated(const SpectralField& phi, int n, int m) {
    if (m < 0) m = n;
    Kernel2 out(m);
    const PhiTable g{&phi};
    const auto& red = out.modes().reduced();
    const auto& fl = out.modes().full();
    for (size_t r = 0; r < red.size(); ++r)
        for (size_t c = 0; c < fl.size(); ++c)
            out.raw(static_cast<int>(r), static_cast<int>(c)) = hphi_entry(g, red[r], fl[c], n);
    return out;
}

Kernel2 restrict_kernel(const Kernel2& h, int m) {
    Kernel2 out = h;
    const auto& red = h.modes().reduced();
    const auto& fl = h.modes().full();
    for (size_t r = 0; r < red.size(); ++r)
        for (size_t c = 0; c < fl.size(); ++c)
            if (red[r].norm2() > m || fl[c].norm2() > m)
                out.raw(static_cast<int>(r), static_cast<int>(c)) = Complex{};
    return out;
}

double pair_tensor(const SpectralField& omega, const Kernel2& h) {
    if (omega.cutoff() != h.cutoff()) throw std::invalid_argument("pair_tensor: cutoff mismatch");
    const auto& fl = h.modes().full();
    const auto w = omega.full_coeffs();
    Complex sum{};
    double mass = 0.0;
    for (size_t a = 0; a < fl.size(); ++a) {
        if (w[a] == Complex{}) continue;
        for (size_t b = 0; b < fl.size(); ++b) {
            const Complex e = h.entry(fl[a].reflected(), fl[b].reflected());
            if (e == Complex{}) continue;
            const Complex t = e * w[a] * w[b];
            sum += t;
            mass += std::abs(t);
        }
    }
    if (std::abs(sum.imag()) > 1e-12 * std::max(1.0, mass))
        throw NumericalError("pair_tensor: imaginary residue exceeds 1e-12");
    return sum.real();
}

double diag_trace(const Kernel2& h, const GibbsParams& p) {
    if (h.cutoff() != p.cutoff) throw std::invalid_argument("diag_trace: cutoff mismatch");
    Complex s{};
    double mass = 0.0;
    for (const auto& l : h.modes().full()) {
        const Complex t = h.entry(l, l) * mode_variance(l, p);
        s += t;
        mass += std::abs(t);
    }
    if (std::abs(s.imag()) > 1e-12 * std::max(1.0, mass))
        throw NumericalError("diag_trace: trace is not real");
    return s.real();
}

double diamond_pair(const SpectralField& omega, const Kernel2& h, const GibbsParams& p) {
    if (!h.is_symmetric()) throw std::invalid_argument("diamond_pair: kernel must be symmetric");
    return pair_tensor(omega, h) - diag_trace(h, p);
}

double wick_variance(const Kernel2& h, const GibbsParams& p) {
    if (h.cutoff() != p.cutoff) throw std::invalid_argument("wick_variance: cutoff mismatch");
    const auto& fl = h.modes().full();
    std::vector<double> sig(fl.size());
    for (size_t i = 0; i < fl.size(); ++i) sig[i] = mode_variance(fl[i], p);
    double s = 0.0;
    for (size_t a = 0; a < fl.size(); ++a)
        for (size_t b = 0; b < fl.size(); ++b)
            s += std::norm(h.entry(fl[a], fl[b])) * sig[a] * sig[b];
    return 2.0 * s;
}

double wick_second_moment(const Kernel2& h, const GibbsParams& p) {
    const double tr = diag_trace(h, p);
    return tr * tr + wick_variance(h, p);
}

double kernel_distance(const Kernel2& h1, const Kernel2& h2, const GibbsParams& p) {
    return std::sqrt(wick_second_moment(h1 - h2, p));
}

std::vector<double> hphi_tail_profile(const SpectralField& phi, double delta,
                                      const std::vector<long>& m_list) {
    struct Entry {
        long w;
        ModeIndex l, lp;
        double e2;
    };
    const PhiTable g{&phi};
    long m_max = 0;
    for (long m : m_list) m_max = std::max(m_max, m);

    // Support modes of phi (full set, nonzero coefficients).
    std::vector<ModeIndex> supp;
    if (phi.cutoff() > 0)
        for (const auto& m : phi.modes().full())
            if (phi.coeff(m) != Complex{}) supp.push_back(m);

    std::vector<Entry> entries;
    const auto canonical = [](ModeIndex a, ModeIndex b) {
        return std::tuple(a.k, a.j, b.k, b.j) <= std::tuple(b.k, b.j, a.k, a.j);
    };
    long w_cut = 256;
    while (!supp.empty()) {
        entries.clear();
        std::map<std::tuple<int, int, int, int>, bool> seen;
        const int rad = static_cast<int>(std::sqrt(static_cast<double>(w_cut))) + 1;
        for (const auto& m : supp) {
            for (int k = 1; k <= rad; ++k) {
                for (int j = -rad; j <= rad; ++j) {
                    const ModeIndex l{j, k};
                    if (1 + l.norm2() > w_cut) continue;
                    // partners from the three branches hitting phi-mode m
                    const ModeIndex cands[3] = {{m.j - j, m.k - k},   // k + k' = m.k
                                                {m.j - j, k - m.k},   // k - k' = m.k
                                                {m.j - j, k + m.k}};  // k' - k = m.k
                    for (const auto& lp : cands) {
                        if (lp.k < 1) continue;
                        const long w = 1 + l.norm2() + lp.norm2();
                        if (w > w_cut) continue;
                        if (!canonical(l, lp)) continue;
                        auto key = std::tuple(l.k, l.j, lp.k, lp.j);
                        if (seen.count(key)) continue;
                        seen[key] = true;
                        const Complex e = hphi_entry(g, l, lp, -1);
                        if (e == Complex{}) continue;
                        entries.push_back({w, l, lp, std::norm(e)});
                    }
                }
            }
        }
        if (static_cast<long>(entries.size()) >= m_max) break;
        w_cut *= 2;
        if (w_cut > (1L << 40)) break;  // phi too sparse to ever reach m_max
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return std::tuple(a.w, a.l.k, a.l.j, a.lp.k, a.lp.j) <
               std::tuple(b.w, b.l.k, b.l.j, b.lp.k, b.lp.j);
    });

    std::vector<double> out;
    out.reserve(m_list.size());
    double s = 0.0;
    size_t i = 0;
    for (long m : m_list) {
        while (i < entries.size() && static_cast<long>(i) < m) {
            s += std::pow(static_cast<double>(entries[i].w), delta) * entries[i].e2;
            ++i;
        }
        out.push_back(s);
    }
    return out;
}

std::vector<double> kernel_on_grid(const Kernel2& h, int nx, int ny) {
    const auto& fl = h.modes().full();
    const size_t nm = fl.size();
    const size_t np = static_cast<size_t>(nx) * ny;

    // basis values B_l[p] = e_j(x) s_k(y) on the periodic grid
    std::vector<Complex> B(nm * np);
    for (size_t i = 0; i < nm; ++i) {
        for (int iy = 0; iy < ny; ++iy) {
            const double y = -kPi + 2.0 * kPi * iy / ny;
            const double sk = std::sin(fl[i].k * y);
            for (int ix = 0; ix < nx; ++ix) {
                const double x = -kPi + 2.0 * kPi * ix / nx;
                B[i * np + static_cast<size_t>(iy) * nx + ix] =
                    std::polar(1.0 / (2.0 * kPi), fl[i].j * x) * sk;
            }
        }
    }
    // C[l][p'] = sum_l' 4 entry(l,l') B_l'[p']
    std::vector<Complex> C(nm * np, Complex{});
    for (size_t a = 0; a < nm; ++a)
        for (size_t b = 0; b < nm; ++b) {
            const Complex e = 4.0 * h.entry(fl[a], fl[b]);
            if (e == Complex{}) continue;
            for (size_t p = 0; p < np; ++p) C[a * np + p] += e * B[b * np + p];
        }
    std::vector<double> out(np * np);
    for (size_t pp = 0; pp < np; ++pp)
        for (size_t p = 0; p < np; ++p) {
            Complex s{};
            for (size_t a = 0; a < nm; ++a) s += B[a * np + p] * C[a * np + pp];
            out[pp * np + p] = s.real();
        }
    return out;
}

}  // namespace qgibbs
