#include "qgibbs/kernel.hpp"

#include "qgibbs/harness.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <numbers>

using namespace qgibbs;
constexpr double kPi = std::numbers::pi;

namespace {
// the printed closed form for phi = sin y, symmetrized
Complex closed_form(ModeIndex l, ModeIndex lp) {
    auto one_sided = [](ModeIndex a, ModeIndex b) -> Complex {
        if (a.j + b.j != 0 || a.k - b.k != 1) return {};
        const double num = a.j * (1.0 - 2.0 * a.k);
        const double den = double(a.norm2()) * (a.j * a.j + (a.k - 1) * (a.k - 1));
        return Complex(0.0, -0.25) * num / den;  // 1/(4i) = -i/4
    };
    const Complex c = one_sided(l, lp);
    return c != Complex{} ? c : one_sided(lp, l);
}

GibbsParams unit_params(int n) { return GibbsParams(1.0, 1.0, 1.0, SpectralField(n), n); }
}  // namespace

TEST_CASE("hphi kernel reproduces the sin(y) closed form on Lambda_12") {
    const Kernel2 h = hphi_kernel(sin_y_field(12), 12);
    const auto& fl = h.modes().full();
    double worst = 0.0;
    for (const auto& l : fl)
        for (const auto& lp : fl) worst = std::max(worst, std::abs(h.entry(l, lp) - closed_form(l, lp)));
    CHECK(worst <= 1e-12);
    CHECK(h.entry({1, 2}, {-1, 1}) == Complex(0.0, 3.0 / 40.0));
}

TEST_CASE("entries vanish when |l| = |l'| and kernels are symmetric") {
    const auto phi = oracle::random_field(8, 17, 2.0);
    const Kernel2 h = hphi_kernel(phi, 8);
    const auto& fl = h.modes().full();
    for (const auto& l : fl) {
        CHECK(h.entry(l, l) == Complex{});
        CHECK(h.entry(l.reflected(), l) == Complex{});
    }
    CHECK(h.is_symmetric());
    // reality: entry(-l,-l') = conj(entry(l,l'))
    for (const auto& l : fl)
        for (const auto& lp : fl)
            CHECK(std::abs(h.entry(l.reflected(), lp.reflected()) - std::conj(h.entry(l, lp))) <=
                  1e-15);
}

TEST_CASE("truncated kernel: indicators and agreement inside") {
    const auto phi = oracle::random_field(5, 18, 1.5);
    const Kernel2 full = hphi_kernel(phi, 5);
    const Kernel2 trunc = hphi_kernel_truncated(phi, 5);
    const Kernel2 wide = hphi_kernel_truncated(phi, 500, 5);  // indicators all pass
    const auto& fl = trunc.modes().full();
    for (const auto& l : fl)
        for (const auto& lp : fl) {
            CHECK(std::abs(wide.entry(l, lp) - full.entry(l, lp)) <= 1e-15);
            // first branch killed whenever the sum mode leaves Lambda_N
            if ((l.j + lp.j) * (l.j + lp.j) + (l.k + lp.k) * (l.k + lp.k) > 5 &&
                (l.k == lp.k || (l.j + lp.j) * (l.j + lp.j) + (l.k - lp.k) * (l.k - lp.k) > 5))
                CHECK(trunc.entry(l, lp) == Complex{});
        }
}

TEST_CASE("mutual oracle: kernel pairing vs jacobian triad") {
    const int n = 12;
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        const auto w = oracle::random_field(n, 100 + trial, 0.8);
        const auto phi = oracle::random_field(n, 200 + trial, 0.8);
        const double lhs = pair_tensor(w, hphi_kernel_truncated(phi, n));
        const double rhs = duality_product(jacobian_triad(laplacian_inverse(w), w, n), phi);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
    }
}

TEST_CASE("pair_tensor basics") {
    const int n = 5;
    Kernel2 kd(n);
    kd.set_entry_sym({0, 1}, {0, 1}, Complex(1.0, 0.0));
    SpectralField w(n);
    w.set_coeff({0, 1}, Complex(0.7, 0.0));
    w.set_coeff({1, 2}, Complex(0.3, -0.4));
    CHECK(pair_tensor(w, kd) == doctest::Approx(0.49).epsilon(1e-15));
    CHECK(pair_tensor(SpectralField(n), kd) == 0.0);

    SpectralField mism(8);
    CHECK_THROWS_AS(pair_tensor(mism, kd), std::invalid_argument);
}

TEST_CASE("pair_tensor against 2d quadrature of the kernel realization") {
    const int n = 4, grid_n = 12;
    const auto w = oracle::random_field(n, 55, 0.5);
    const Kernel2 h = hphi_kernel(oracle::random_field(n, 56, 1.0), n);
    const auto hg = kernel_on_grid(h, grid_n, grid_n);

    const oracle::Grid grid(grid_n);
    std::vector<double> wv(grid_n * grid_n);
    for (int iy = 0; iy < grid_n; ++iy)
        for (int ix = 0; ix < grid_n; ++ix)
            wv[iy * grid_n + ix] = oracle::eval(w, grid.x[ix], grid.x[iy]);
    double quad = 0.0;
    const size_t np = wv.size();
    for (size_t pp = 0; pp < np; ++pp)
        for (size_t p = 0; p < np; ++p) quad += hg[pp * np + p] * wv[p] * wv[pp];
    quad *= grid.weight() * grid.weight();
    CHECK(pair_tensor(w, h) == doctest::Approx(quad).epsilon(1e-8));
}

TEST_CASE("diamond pairing and the trace identity") {
    const int n = 5;
    const auto p = unit_params(n);
    Kernel2 kd(n);
    kd.set_entry_sym({0, 1}, {0, 1}, Complex(1.0, 0.0));
    SpectralField w(n);
    w.set_coeff({0, 1}, Complex(1.3, 0.0));
    CHECK(diag_trace(kd, p) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(diamond_pair(w, kd, p) == doctest::Approx(1.3 * 1.3 - 0.5).epsilon(1e-14));

    // purely off-diagonal kernel: diamond == tensor pairing
    const Kernel2 off = random_symmetric_kernel(n, rng::Key{77});
    const auto ws = oracle::random_field(n, 78, 0.5);
    CHECK(diag_trace(off, p) == 0.0);
    CHECK(diamond_pair(ws, off, p) == doctest::Approx(pair_tensor(ws, off)));

    // asymmetric kernels are rejected
    Kernel2 bad(n);
    bad.raw(0, 1) = Complex(1.0, 0.0);
    CHECK_THROWS_AS(diamond_pair(w, bad, p), std::invalid_argument);

    // H_phi kernels have vanishing diagonal trace
    CHECK(diag_trace(hphi_kernel(sin_y_field(n), n), p) == 0.0);
}

TEST_CASE("wick second moment: exact diagonal value and zero kernel") {
    const int n = 5;
    const auto p = unit_params(n);
    Kernel2 kd(n);
    kd.set_entry_sym({0, 1}, {0, 1}, Complex(1.0, 0.0));
    CHECK(wick_second_moment(kd, p) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(wick_second_moment(Kernel2(n), p) == 0.0);
    CHECK(wick_variance(kd, p) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("wick formulas match monte carlo on Lambda_5") {
    const int n = 5;
    const auto p = unit_params(n);
    const long m = 40000;
    Kernel2 kd(n);
    kd.set_entry_sym({0, 1}, {0, 1}, Complex(1.0, 0.0));
    const Kernel2 ks = hphi_kernel_truncated(sin_y_field(n), n);
    const Kernel2 kr = random_symmetric_kernel(n, rng::Key{5150});
    const rng::Key base = rng::Key{314159};
    const Kernel2* kernels[3] = {&kd, &ks, &kr};
    for (const Kernel2* k : kernels) {
        double sum = 0, sum2 = 0, sum4 = 0;
        for (long i = 0; i < m; ++i) {
            const State s = sample_state(p, base.child(i));
            const double v = pair_tensor(s.omega, *k);
            sum += v;
            sum2 += v * v;
            sum4 += v * v * v * v;
        }
        const double mc2 = sum2 / m;
        const double se2 = std::sqrt((sum4 / m - mc2 * mc2) / m);
        CHECK(std::abs(mc2 - wick_second_moment(*k, p)) <= 5.0 * se2);
        // diamond centredness
        const double dmean = sum / m - diag_trace(*k, p);
        CHECK(std::abs(dmean) <= 5.0 * std::sqrt(wick_variance(*k, p) / m));
    }
}

TEST_CASE("kernel distance: progressive truncations are cauchy") {
    const int n = 12;
    const auto p = unit_params(n);
    const Kernel2 full = hphi_kernel(sin_y_field(n), n);
    CHECK(kernel_distance(full, full, p) == 0.0);
    double prev = -1.0;
    for (int m : {2, 5, 8, 12}) {
        const double d = kernel_distance(restrict_kernel(full, m), full, p);
        if (prev >= 0.0) CHECK(d <= prev);
        prev = d;
    }
    CHECK(prev == 0.0);  // restriction at the full cutoff is the identity
}

TEST_CASE("tail profile: bounded for delta < 1, divergent for delta >= 1") {
    const std::vector<long> ms = {100, 1000, 10000, 100000};
    const auto phi = sin_y_field(2);
    const auto s0 = hphi_tail_profile(phi, 0.0, ms);
    const auto s15 = hphi_tail_profile(phi, 1.5, ms);
    REQUIRE(s0.size() == ms.size());
    CHECK((s0.back() - s0[s0.size() - 2]) / s0.back() < 0.01);
    CHECK(s15.back() > 1.5 * s15[s15.size() - 2]);
    for (size_t i = 1; i < s15.size(); ++i) CHECK(s15[i] > s15[i - 1]);

    const auto z = hphi_tail_profile(SpectralField(2), 0.5, ms);
    for (double v : z) CHECK(v == 0.0);
}

TEST_CASE("tail profile enumeration matches kernel entries for sin y") {
    // the first enumerated weights/values must agree with hphi_kernel on a
    // window large enough to contain them
    const auto ms = std::vector<long>{1, 2, 3, 4, 5, 10, 20};
    const auto phi = sin_y_field(2);
    const auto sums = hphi_tail_profile(phi, 0.0, ms);
    const Kernel2 h = hphi_kernel(phi, 60);
    // recompute by brute force over Lambda_60 x Lambda_60, same ordering rule
    struct E {
        long w;
        int lk, lj, pk, pj;
        double e2;
    };
    std::vector<E> all;
    const auto& fl = h.modes().full();
    for (size_t a = 0; a < fl.size(); ++a)
        for (size_t b = a; b < fl.size(); ++b) {
            const Complex e = h.entry(fl[a], fl[b]);
            if (e == Complex{}) continue;
            all.push_back({1 + fl[a].norm2() + fl[b].norm2(), fl[a].k, fl[a].j, fl[b].k, fl[b].j,
                           std::norm(e)});
        }
    std::sort(all.begin(), all.end(), [](const E& x, const E& y) {
        return std::tuple(x.w, x.lk, x.lj, x.pk, x.pj) < std::tuple(y.w, y.lk, y.lj, y.pk, y.pj);
    });
    for (size_t i = 0; i < ms.size(); ++i) {
        double s = 0.0;
        for (long t = 0; t < ms[i] && t < static_cast<long>(all.size()); ++t) s += all[t].e2;
        CHECK(sums[i] == doctest::Approx(s).epsilon(1e-13));
    }
}
