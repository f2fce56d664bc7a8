#include "qgibbs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qgibbs {

namespace {
constexpr double kPi = std::numbers::pi;

// Preassembled per-trajectory quantities and scratch buffers. All mode
// arrays are aligned with IndexSet::full(); the reduced state vector is
// aligned with IndexSet::reduced().
struct Workspace {
    std::shared_ptr<const IndexSet> set;
    double alpha = 0, mu = 0, beta = 0;
    std::vector<Complex> f_full;    // (mu - Delta)^{-1} h^N
    std::vector<Complex> muf_full;  // mu * f
    std::vector<Complex> dxf_red;   // dx f on reduced modes
    std::vector<Complex> h_full;
    std::vector<double> inv_n2_full;
    std::vector<int> refl;  // full index of the reflected mode
    // scratch
    std::vector<Complex> om_full, psi_full, adv_full, acc;

    Workspace(const GibbsParams& p) : set(IndexSet::make(p.cutoff)) {
        alpha = p.alpha;
        mu = p.mu;
        beta = p.beta;
        const auto& fl = set->full();
        f_full.resize(fl.size());
        muf_full.resize(fl.size());
        h_full = p.h.full_coeffs();
        inv_n2_full.resize(fl.size());
        refl.resize(fl.size());
        for (size_t i = 0; i < fl.size(); ++i) {
            inv_n2_full[i] = 1.0 / fl[i].norm2();
            f_full[i] = h_full[i] / (mu + fl[i].norm2());
            muf_full[i] = mu * f_full[i];
            refl[i] = set->full_index(fl[i].reflected());
        }
        const auto& red = set->reduced();
        dxf_red.resize(red.size());
        for (size_t i = 0; i < red.size(); ++i)
            dxf_red[i] = Complex(0.0, double(red[i].j)) * p.h.coeff(red[i]) / (mu + red[i].norm2());
        om_full.resize(fl.size());
        psi_full.resize(fl.size());
        adv_full.resize(fl.size());
        acc.resize(fl.size());
    }

    void expand(const std::vector<Complex>& red_coeffs, std::vector<Complex>& out) const {
        const auto& fl = set->full();
        for (size_t i = 0; i < fl.size(); ++i) {
            const int r = set->reduced_index(fl[i].j >= 0 ? fl[i] : fl[i].reflected());
            out[i] = fl[i].j >= 0 ? red_coeffs[r] : std::conj(red_coeffs[r]);
        }
    }

    // acc += triad(a, b) over full modes (no projection beyond the index set)
    void triad_accumulate(const std::vector<Complex>& a, const std::vector<Complex>& b) {
        const auto& fl = set->full();
        const Complex norm(0.0, -1.0 / (4.0 * kPi));
        for (size_t ia = 0; ia < fl.size(); ++ia) {
            if (a[ia] == Complex{}) continue;
            const int j = fl[ia].j, k = fl[ia].k;
            for (size_t ib = 0; ib < fl.size(); ++ib) {
                if (b[ib] == Complex{}) continue;
                const int jp = fl[ib].j, kp = fl[ib].k;
                const Complex c = a[ia] * b[ib] * norm;
                int m = set->full_index({j + jp, k + kp});
                if (m >= 0) acc[m] += double(jp * k - j * kp) * c;
                const int dk = k - kp;
                if (dk > 0) {
                    m = set->full_index({j + jp, dk});
                    if (m >= 0) acc[m] -= double(jp * k + j * kp) * c;
                } else if (dk < 0) {
                    m = set->full_index({j + jp, -dk});
                    if (m >= 0) acc[m] += double(jp * k + j * kp) * c;
                }
            }
        }
    }

    // B^N in reduced coordinates. `red` and `dred` must not alias.
    void eval(double U, const std::vector<Complex>& red, double& dU,
              std::vector<Complex>& dred, bool with_nonlinearity = true) {
        const auto& fl = set->full();
        const auto& rd = set->reduced();
        expand(red, om_full);
        for (size_t i = 0; i < fl.size(); ++i) psi_full[i] = -om_full[i] * inv_n2_full[i];
        std::fill(acc.begin(), acc.end(), Complex{});
        if (with_nonlinearity) {
            // J(psi, w) + J(f, w) = J(psi + f, w), plus J(psi, mu f)
            for (size_t i = 0; i < fl.size(); ++i) adv_full[i] = psi_full[i] + f_full[i];
            triad_accumulate(adv_full, om_full);
            triad_accumulate(psi_full, muf_full);
        } else {
            for (size_t i = 0; i < fl.size(); ++i) adv_full[i] = f_full[i];
            triad_accumulate(adv_full, om_full);
            triad_accumulate(psi_full, muf_full);
        }
        dU = 0.0;
        for (size_t i = 0; i < fl.size(); ++i) {
            const int j = fl[i].j;
            if (j == 0 || h_full[i] == Complex{}) continue;
            // <h, dx Lap^-1 w> = sum_l h_l * i j conj(w_l) / |l|^2
            dU += (h_full[i] * Complex(0.0, double(j)) * std::conj(om_full[i])).real() *
                  inv_n2_full[i];
        }
        for (size_t i = 0; i < rd.size(); ++i) {
            const int fi = set->full_index(rd[i]);
            Complex quad = 0.5 * (acc[fi] + std::conj(acc[refl[fi]]));  // symmetric fold
            const Complex ij(0.0, double(rd[i].j));
            Complex lin = (U - beta / mu) * ij * red[i] + U * mu * dxf_red[i] +
                          beta * ij * psi_full[fi];
            dred[i] = -(quad + lin);
            if (rd[i].j == 0) dred[i] = Complex(dred[i].real(), 0.0);
        }
    }

    void rk4(double dt, double& U, std::vector<Complex>& w) {
        const size_t n = w.size();
        if (k1.size() != n) {
            k1.resize(n); k2.resize(n); k3.resize(n); k4.resize(n); tmp.resize(n);
        }
        double kU1, kU2, kU3, kU4;
        eval(U, w, kU1, k1);
        for (size_t i = 0; i < n; ++i) tmp[i] = w[i] + 0.5 * dt * k1[i];
        eval(U + 0.5 * dt * kU1, tmp, kU2, k2);
        for (size_t i = 0; i < n; ++i) tmp[i] = w[i] + 0.5 * dt * k2[i];
        eval(U + 0.5 * dt * kU2, tmp, kU3, k3);
        for (size_t i = 0; i < n; ++i) tmp[i] = w[i] + dt * k3[i];
        eval(U + dt * kU3, tmp, kU4, k4);
        U += dt / 6.0 * (kU1 + 2 * kU2 + 2 * kU3 + kU4);
        for (size_t i = 0; i < n; ++i)
            w[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    std::vector<Complex> k1, k2, k3, k4, tmp;
};

void require_state(const State& s, const GibbsParams& p, const char* what) {
    if (s.omega.cutoff() != p.cutoff)
        throw std::invalid_argument(std::string(what) + ": state/params cutoff mismatch");
}

bool finite(double x) { return std::isfinite(x); }

bool finite_state(double U, const std::vector<Complex>& w) {
    if (!finite(U)) return false;
    for (const auto& c : w)
        if (!finite(c.real()) || !finite(c.imag())) return false;
    return true;
}
}  // namespace

StateDeriv vector_field(const State& s, const GibbsParams& p) {
    require_state(s, p, "vector_field");
    Workspace ws(p);
    StateDeriv d;
    d.domega = SpectralField(p.cutoff);
    ws.eval(s.U, s.omega.data(), d.dU, d.domega.data());
    return d;
}

SpectralField linear_term(const State& s, const GibbsParams& p) {
    require_state(s, p, "linear_term");
    Workspace ws(p);
    SpectralField lin(p.cutoff);
    double dU;
    // eval with the nonlinearity off returns -(L_N w)
    ws.eval(s.U, s.omega.data(), dU, lin.data(), /*with_nonlinearity=*/false);
    for (auto& c : lin.data()) c = -c;
    return lin;
}

State rk4_step(const State& s, const GibbsParams& p, double dt) {
    require_state(s, p, "rk4_step");
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be > 0");
    Workspace ws(p);
    State out = s;
    ws.rk4(dt, out.U, out.omega.data());
    return out;
}

Trajectory integrate(const State& initial, const GibbsParams& p, double dt, double t_final,
                     int stride) {
    require_state(initial, p, "integrate");
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
    if (!(t_final >= dt)) throw std::invalid_argument("integrate: t_final must be >= dt");
    if (stride < 1) throw std::invalid_argument("integrate: stride must be >= 1");

    Workspace ws(p);
    const long nsteps = std::lround(t_final / dt);
    Trajectory traj;
    traj.times.reserve(nsteps / stride + 2);
    traj.states.reserve(nsteps / stride + 2);

    double U = initial.U;
    std::vector<Complex> w = initial.omega.data();
    auto record = [&](long step) {
        State s;
        s.U = U;
        s.omega = SpectralField(p.cutoff);
        s.omega.data() = w;
        traj.times.push_back(step * dt);
        traj.states.push_back(std::move(s));
    };
    record(0);
    for (long step = 1; step <= nsteps; ++step) {
        ws.rk4(dt, U, w);
        if (!finite_state(U, w))
            throw NumericalError("integrate: non-finite state at t = " + std::to_string(step * dt));
        if (step % stride == 0 || step == nsteps) record(step);
    }
    return traj;
}

double energy(const State& s, const GibbsParams& p) {
    require_state(s, p, "energy");
    const double V = s.U - p.beta / p.mu;
    const auto& red = s.omega.modes().reduced();
    double sum = 0.0;
    for (size_t i = 0; i < red.size(); ++i) {
        const double n2 = red[i].norm2();
        const Complex psi = -s.omega.data()[i] / n2 + p.h.data()[i] / (p.mu + n2);
        const double t = n2 * std::norm(psi);
        sum += (red[i].j == 0) ? t : 2.0 * t;
    }
    return 0.5 * V * V + 0.5 * sum;
}

double enstrophy(const State& s, const GibbsParams& p) {
    require_state(s, p, "enstrophy");
    const double V = s.U - p.beta / p.mu;
    const auto& red = s.omega.modes().reduced();
    double sum = 0.0;
    for (size_t i = 0; i < red.size(); ++i) {
        const Complex qmy = s.omega.data()[i] + p.mu * p.h.data()[i] / (p.mu + red[i].norm2());
        const double t = std::norm(qmy);
        sum += (red[i].j == 0) ? t : 2.0 * t;
    }
    return p.beta * V + 0.5 * sum;
}

double pseudoenergy(const State& s, const GibbsParams& p) {
    require_state(s, p, "pseudoenergy");
    const auto& red = s.omega.modes().reduced();
    double sum = 0.0;
    for (size_t i = 0; i < red.size(); ++i) {
        const double t = (1.0 + p.mu / red[i].norm2()) * std::norm(s.omega.data()[i]);
        sum += (red[i].j == 0) ? t : 2.0 * t;
    }
    return 0.5 * p.mu * s.U * s.U + 0.5 * sum;
}

LiouvilleEstimate liouville_divergence(const State& s, const GibbsParams& p, double eps) {
    require_state(s, p, "liouville_divergence");
    if (!(eps > 0.0)) throw std::invalid_argument("liouville_divergence: eps must be > 0");
    Workspace ws(p);
    const auto& red = s.omega.modes().reduced();
    const size_t nred = red.size();

    // real coordinates: U, then Re (and Im for j > 0) per reduced mode
    std::vector<double> x;
    x.push_back(s.U);
    for (size_t i = 0; i < nred; ++i) {
        x.push_back(s.omega.data()[i].real());
        if (red[i].j != 0) x.push_back(s.omega.data()[i].imag());
    }
    const size_t dim = x.size();

    std::vector<Complex> wbuf(nred), dbuf(nred);
    auto eval_coord = [&](const std::vector<double>& xs, size_t coord) -> double {
        double U = xs[0];
        size_t ix = 1;
        for (size_t i = 0; i < nred; ++i) {
            if (red[i].j == 0)
                wbuf[i] = Complex(xs[ix++], 0.0);
            else {
                wbuf[i] = Complex(xs[ix], xs[ix + 1]);
                ix += 2;
            }
        }
        double dU;
        ws.eval(U, wbuf, dU, dbuf);
        if (coord == 0) return dU;
        size_t c = 1;
        for (size_t i = 0; i < nred; ++i) {
            if (c == coord) return dbuf[i].real();
            ++c;
            if (red[i].j != 0) {
                if (c == coord) return dbuf[i].imag();
                ++c;
            }
        }
        return 0.0;
    };

    LiouvilleEstimate est;
    std::vector<double> xp = x;
    for (size_t i = 0; i < dim; ++i) {
        xp[i] = x[i] + eps;
        const double fp = eval_coord(xp, i);
        xp[i] = x[i] - eps;
        const double fm = eval_coord(xp, i);
        xp[i] = x[i];
        const double t = (fp - fm) / (2.0 * eps);
        est.divergence += t;
        est.term_mass += std::abs(t);
    }

    // Gibbs-weight terms: grad(alpha S_mu) . B
    double dU;
    for (size_t i = 0; i < nred; ++i) wbuf[i] = s.omega.data()[i];
    ws.eval(s.U, wbuf, dU, dbuf);
    double w = p.alpha * p.mu * s.U * dU;
    est.term_mass += std::abs(w);
    double wsum = w;
    for (size_t i = 0; i < nred; ++i) {
        const double sig2 = mode_variance(red[i], p);
        const Complex c = s.omega.data()[i];
        double t;
        if (red[i].j == 0)
            t = c.real() * dbuf[i].real() / sig2;
        else
            t = (c.real() * dbuf[i].real() + c.imag() * dbuf[i].imag()) / (0.5 * sig2);
        wsum += t;
        est.term_mass += std::abs(t);
    }
    est.divergence -= wsum;
    return est;
}

std::vector<double> weak_residual_curve(const Trajectory& traj, const SpectralField& phi,
                                        const GibbsParams& p, ResidualKind kind) {
    if (traj.states.empty()) throw std::invalid_argument("weak_residual: empty trajectory");
    const Kernel2 hk = hphi_kernel_truncated(phi, p.cutoff);
    const double trace = (kind == ResidualKind::Diamond) ? diag_trace(hk, p) : 0.0;

    // Project phi onto Lambda_N for the <w,phi> and <L w,phi> couplings.
    SpectralField phi_n(p.cutoff);
    const auto& red = phi_n.modes().reduced();
    for (size_t i = 0; i < red.size(); ++i) phi_n.data()[i] = phi.coeff(red[i]);

    const size_t n = traj.states.size();
    Workspace ws(p);
    SpectralField lin(p.cutoff);
    std::vector<double> integrand(n), lhs(n), out(n);
    for (size_t i = 0; i < n; ++i) {
        const State& s = traj.states[i];
        const double pair = pair_tensor(s.omega, hk) - trace;
        double dU;
        ws.eval(s.U, s.omega.data(), dU, lin.data(), /*with_nonlinearity=*/false);
        const double lw = -duality_product(lin, phi_n);  // eval gives -(L_N w)
        integrand[i] = pair + lw;
        lhs[i] = duality_product(s.omega, phi_n);
    }
    double acc = 0.0;
    out[0] = 0.0;
    for (size_t i = 1; i < n; ++i) {
        acc += 0.5 * (integrand[i - 1] + integrand[i]) * (traj.times[i] - traj.times[i - 1]);
        out[i] = lhs[i] - lhs[0] + acc;
    }
    return out;
}

double weak_residual(const Trajectory& traj, const SpectralField& phi, const GibbsParams& p,
                     ResidualKind kind) {
    const auto curve = weak_residual_curve(traj, phi, p, kind);
    double m = 0.0;
    for (double r : curve) m = std::max(m, std::abs(r));
    return m;
}

}  // namespace qgibbs
