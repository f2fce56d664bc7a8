#include "qgibbs/config.hpp"
#include "qgibbs/version.hpp"

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qgibbs;

namespace {

py::array_t<double> grid_to_numpy(const GridField& g) {
    py::array_t<double> out({g.ny, g.nx});
    auto r = out.mutable_unchecked<2>();
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) r(iy, ix) = g.at(ix, iy);
    return out;
}

Report run_named_experiment(const std::string& name, const GibbsParams& p, std::uint64_t seed,
                            int threads, const py::dict& overrides) {
    // fold kwargs-style overrides into the raw config machinery
    RawConfig raw = default_raw_config();
    for (const auto& item : overrides) {
        std::vector<Diagnostic> d;
        apply_override(raw, py::str(item.first).cast<std::string>() + "=" +
                                py::str(item.second).cast<std::string>(), d);
        if (has_errors(d)) throw std::invalid_argument("bad override");
    }
    std::vector<Diagnostic> diags;
    RunConfig cfg = interpret_config(raw, diags);
    if (has_errors(diags)) throw std::invalid_argument("bad experiment config");
    if (name == "invariance") return invariance_experiment(p, cfg.invariance, seed, threads);
    if (name == "conservation") return conservation_experiment(p, cfg.conservation, seed);
    if (name == "chaos") return chaos_experiment(p, cfg.chaos, seed, threads);
    if (name == "regularity") return regularity_experiment(cfg.regularity);
    if (name == "residual") return residual_experiment(p, cfg.residual, seed);
    throw std::invalid_argument("unknown experiment '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(qgibbs, m) {
    m.doc() = "spectral Galerkin channel model with Gibbs-ensemble verification";
    m.attr("__version__") = kVersion;

    py::class_<ModeIndex>(m, "ModeIndex")
        .def(py::init<int, int>(), py::arg("j"), py::arg("k"))
        .def_readonly("j", &ModeIndex::j)
        .def_readonly("k", &ModeIndex::k)
        .def("norm2", &ModeIndex::norm2)
        .def("__repr__", [](const ModeIndex& l) {
            return "ModeIndex(" + std::to_string(l.j) + ", " + std::to_string(l.k) + ")";
        });

    m.def("make_index_set", [](int n) {
        auto s = IndexSet::make(n);
        std::vector<std::pair<int, int>> full, reduced;
        for (const auto& l : s->full()) full.emplace_back(l.j, l.k);
        for (const auto& l : s->reduced()) reduced.emplace_back(l.j, l.k);
        return py::dict(py::arg("N") = n, py::arg("full") = full, py::arg("reduced") = reduced);
    }, py::arg("N"));

    py::class_<SpectralField>(m, "SpectralField")
        .def(py::init<int>(), py::arg("cutoff"))
        .def_property_readonly("cutoff", &SpectralField::cutoff)
        .def("coeff", [](const SpectralField& f, int j, int k) { return f.coeff({j, k}); })
        .def("set_coeff",
             [](SpectralField& f, int j, int k, Complex c) { f.set_coeff({j, k}, c); })
        .def("is_zero", &SpectralField::is_zero)
        .def("__add__", [](const SpectralField& a, const SpectralField& b) { return a + b; })
        .def("__sub__", [](const SpectralField& a, const SpectralField& b) { return a - b; })
        .def("__rmul__", [](const SpectralField& a, double s) { return s * a; });

    m.def("apply_diag", [](const SpectralField& f, const std::function<Complex(int, int)>& sym) {
        return apply_diag(f, [&sym](ModeIndex l) { return sym(l.j, l.k); });
    });
    m.def("laplacian_inverse", &laplacian_inverse);
    m.def("partial_x", &partial_x);
    m.def("helmholtz_inverse", &helmholtz_inverse, py::arg("field"), py::arg("mu"));
    m.def("inner_product", &inner_product);
    m.def("mean_product", &mean_product);
    m.def("duality_product", &duality_product);
    m.def("sobolev_norm", &sobolev_norm, py::arg("field"), py::arg("s"));
    m.def("jacobian_triad", &jacobian_triad, py::arg("a"), py::arg("b"), py::arg("n_out"));
    m.def("synthesize_on_grid", [](const SpectralField& f, int nx, int ny) {
        return grid_to_numpy(synthesize_on_grid(f, nx, ny));
    }, py::arg("field"), py::arg("nx"), py::arg("ny"));
    m.def("sin_y_field", &sin_y_field, py::arg("cutoff"));
    m.def("random_smooth_field", [](int cutoff, std::uint64_t seed) {
        return random_smooth_field(cutoff, rng::Key{seed});
    }, py::arg("cutoff"), py::arg("seed"));

    py::class_<GibbsParams>(m, "GibbsParams")
        .def(py::init<double, double, double, const SpectralField&, int>(), py::arg("alpha"),
             py::arg("mu"), py::arg("beta"), py::arg("topography"), py::arg("N"))
        .def_readonly("alpha", &GibbsParams::alpha)
        .def_readonly("mu", &GibbsParams::mu)
        .def_readonly("beta", &GibbsParams::beta)
        .def_readonly("cutoff", &GibbsParams::cutoff)
        .def_readonly("h", &GibbsParams::h);

    py::class_<State>(m, "State")
        .def(py::init([](double u, const SpectralField& w) { return State{u, w}; }),
             py::arg("U"), py::arg("omega"))
        .def_readwrite("U", &State::U)
        .def_readwrite("omega", &State::omega);

    m.def("mode_variance", [](int j, int k, const GibbsParams& p) {
        return mode_variance({j, k}, p);
    });
    m.def("u_variance", &u_variance);
    m.def("sample_state", [](const GibbsParams& p, std::uint64_t seed, std::uint64_t member) {
        return sample_state(p, rng::Key{seed}.child(member));
    }, py::arg("params"), py::arg("seed"), py::arg("member") = 0);
    m.def("mean_vorticity", &mean_vorticity);
    m.def("decenter", [](const State& s, const GibbsParams& p) {
        const Decentered d = decenter(s, p);
        return py::make_tuple(d.V, d.q);
    });
    m.def("center", [](double v, const SpectralField& q, const GibbsParams& p) {
        return center({v, q}, p);
    });

    py::class_<Kernel2>(m, "Kernel2")
        .def(py::init<int>(), py::arg("cutoff"))
        .def_property_readonly("cutoff", &Kernel2::cutoff)
        .def("entry", [](const Kernel2& h, int j, int k, int jp, int kp) {
            return h.entry({j, k}, {jp, kp});
        })
        .def("set_entry_sym", [](Kernel2& h, int j, int k, int jp, int kp, Complex c) {
            h.set_entry_sym({j, k}, {jp, kp}, c);
        })
        .def("is_symmetric", &Kernel2::is_symmetric, py::arg("tol") = 1e-12);

    m.def("hphi_kernel", &hphi_kernel, py::arg("phi"), py::arg("N"));
    m.def("hphi_kernel_truncated", &hphi_kernel_truncated, py::arg("phi"), py::arg("N"),
          py::arg("M") = -1);
    m.def("restrict_kernel", &restrict_kernel);
    m.def("pair_tensor", &pair_tensor);
    m.def("diag_trace", &diag_trace);
    m.def("diamond_pair", &diamond_pair);
    m.def("wick_second_moment", &wick_second_moment);
    m.def("wick_variance", &wick_variance);
    m.def("kernel_distance", &kernel_distance);
    m.def("hphi_tail_profile", &hphi_tail_profile, py::arg("phi"), py::arg("delta"),
          py::arg("m_list"));
    m.def("random_symmetric_kernel", [](int cutoff, std::uint64_t seed) {
        return random_symmetric_kernel(cutoff, rng::Key{seed});
    });

    m.def("vector_field", [](const State& s, const GibbsParams& p) {
        const StateDeriv d = vector_field(s, p);
        return py::make_tuple(d.dU, d.domega);
    });
    m.def("linear_term", &linear_term);
    m.def("rk4_step", &rk4_step);
    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("times", &Trajectory::times)
        .def_readonly("states", &Trajectory::states);
    m.def("integrate", &integrate, py::arg("initial"), py::arg("params"), py::arg("dt"),
          py::arg("t_final"), py::arg("stride") = 1);
    m.def("energy", &energy);
    m.def("enstrophy", &enstrophy);
    m.def("pseudoenergy", &pseudoenergy);
    m.def("liouville_divergence", [](const State& s, const GibbsParams& p, double eps) {
        const LiouvilleEstimate e = liouville_divergence(s, p, eps);
        return py::dict(py::arg("divergence") = e.divergence, py::arg("term_mass") = e.term_mass,
                        py::arg("normalized") = e.normalized());
    }, py::arg("state"), py::arg("params"), py::arg("eps") = 1e-5);
    m.def("weak_residual", [](const Trajectory& t, const SpectralField& phi, const GibbsParams& p,
                              bool diamond) {
        return weak_residual(t, phi, p, diamond ? ResidualKind::Diamond : ResidualKind::Tensor);
    }, py::arg("trajectory"), py::arg("phi"), py::arg("params"), py::arg("diamond") = false);

    m.def("run_experiment", [](const std::string& name, const GibbsParams& p, std::uint64_t seed,
                               int threads, const py::dict& overrides) {
        const Report r = run_named_experiment(name, p, seed, threads, overrides);
        return py::make_tuple(r.pass, r.summary.dump());
    }, py::arg("name"), py::arg("params"), py::arg("seed") = 1, py::arg("threads") = 1,
       py::arg("overrides") = py::dict());
}
