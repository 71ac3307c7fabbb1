#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>

#include "vortexsim/acceptance.hpp"
#include "vortexsim/diagnostics.hpp"
#include "vortexsim/elements.hpp"
#include "vortexsim/fwm.hpp"
#include "vortexsim/image_io.hpp"
#include "vortexsim/modes.hpp"
#include "vortexsim/propagation.hpp"
#include "vortexsim/scenario.hpp"

namespace py = pybind11;
using namespace vortexsim;

namespace {

py::array_t<cplx> samples_array(const ScalarField& f) {
    py::array_t<cplx> a({f.grid().ny, f.grid().nx});
    std::copy(f.samples().begin(), f.samples().end(), a.mutable_data());
    return a;
}

ScalarField field_from_array(const GridSpec& g, double wavelength, py::array_t<cplx, py::array::c_style | py::array::forcecast> a) {
    if (a.ndim() != 2 || a.shape(0) != g.ny || a.shape(1) != g.nx) throw Error("array shape must be (ny, nx)");
    return ScalarField(g, wavelength, std::vector<cplx>(a.data(), a.data() + a.size()));
}

py::array_t<double> image_array(const IntensityImage& img) {
    py::array_t<double> a({img.grid.ny, img.grid.nx});
    std::copy(img.values.begin(), img.values.end(), a.mutable_data());
    return a;
}

py::object to_python(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_python(const py::object& o) { return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>()); }

py::dict reading_dict(const StripeReading& r) {
    py::dict d;
    d["count"] = r.count;
    d["sign"] = r.sign;
    d["contrast"] = r.contrast;
    d["plane_z"] = r.plane_z;
    d["inconclusive"] = r.inconclusive;
    d["stripe_angle"] = r.stripe_angle;
    d["anisotropy"] = r.anisotropy;
    return d;
}

py::dict outcome_dict(const ScenarioOutcome& o) {
    py::dict d;
    d["exit_code"] = o.exit_code;
    d["report"] = to_python(o.report);
    d["report_file"] = o.report_file;
    return d;
}

RunOptions options(const std::string& out_dir, bool write_files, const std::string& grid_override) {
    RunOptions o;
    o.out_dir = out_dir;
    o.write_files = write_files;
    if (!grid_override.empty()) o.grid_override = parse_grid_override(grid_override);
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Scalar wave-optics core: LG modes, masks, propagation, FWM and vortex diagnostics";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<SamplingError>(m, "SamplingError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<PhaseMatchError>(m, "PhaseMatchError", base.ptr());

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](int nx, int ny, double dx, double dy) {
                 GridSpec g{nx, ny, dx, dy};
                 g.validate();
                 return g;
             }),
             py::arg("nx"), py::arg("ny"), py::arg("dx"), py::arg("dy"))
        .def_readonly("nx", &GridSpec::nx)
        .def_readonly("ny", &GridSpec::ny)
        .def_readonly("dx", &GridSpec::dx)
        .def_readonly("dy", &GridSpec::dy)
        .def("x", &GridSpec::x)
        .def("y", &GridSpec::y)
        .def("__repr__", [](const GridSpec& g) { return "GridSpec(" + describe(g) + ")"; });

    py::class_<ScalarField>(m, "ScalarField")
        .def(py::init(&field_from_array), py::arg("grid"), py::arg("wavelength"), py::arg("samples"))
        .def_property_readonly("grid", &ScalarField::grid)
        .def_property_readonly("wavelength", &ScalarField::wavelength)
        .def_property_readonly("samples", &samples_array)
        .def("power", [](const ScalarField& f) { return power(f); })
        .def("intensity", [](const ScalarField& f) { return image_array(intensity(f)); });

    m.def("lg_mode", [](const GridSpec& g, double wavelength, int p, int l, double w0, double z) {
        return lg_mode(g, wavelength, {p, l, w0, z});
    }, py::arg("grid"), py::arg("wavelength"), py::arg("p") = 0, py::arg("l") = 0, py::arg("w0") = 100e-6, py::arg("z") = 0.0);
    m.def("gaussian", &gaussian, py::arg("grid"), py::arg("wavelength"), py::arg("w0"));
    m.def("overlap", &overlap);
    m.def("propagate", py::overload_cast<const ScalarField&, double>(&propagate), py::arg("field"), py::arg("dz"));
    m.def("mirrored_x", &mirrored_x);
    m.def("encode_vtxf", [](const ScalarField& f) {
        const auto b = encode_vtxf(f);
        return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
    });
    m.def("decode_vtxf", [](const py::bytes& data) {
        const std::string s = data;
        return decode_vtxf(std::vector<unsigned char>(s.begin(), s.end()));
    });

    m.def("staircase_mask", [](const ScalarField& f, int charge, int sectors, double t) { return apply(StaircaseMask{charge, sectors, t}, f); },
          py::arg("field"), py::arg("charge"), py::arg("sectors") = 8, py::arg("power_transmittance") = 0.95);
    m.def("spiral_plate", [](const ScalarField& f, int charge) { return apply(SpiralPlate{charge}, f); }, py::arg("field"), py::arg("charge"));
    m.def("forked_grating", [](const ScalarField& f, int charge, double eff) { return apply(ForkedGrating{charge, eff}, f); },
          py::arg("field"), py::arg("charge"), py::arg("efficiency") = 1.0);
    m.def("thin_lens", [](const ScalarField& f, double focal) { return apply(ThinLens{focal}, f); }, py::arg("field"), py::arg("focal_length"));

    m.def("oam_spectrum", [](const ScalarField& f, double cx, double cy, int l_min, int l_max) {
        const OamSpectrum s = oam_spectrum(f, cx, cy, l_min, l_max);
        py::dict weights;
        for (int l = s.l_min; l <= s.l_max; ++l) weights[py::int_(l)] = s.weight(l);
        py::dict d;
        d["weights"] = weights;
        d["residual"] = s.residual;
        d["dominant_charge"] = dominant_charge(s);
        return d;
    }, py::arg("field"), py::arg("cx") = 0.0, py::arg("cy") = 0.0, py::arg("l_min") = -8, py::arg("l_max") = 8);
    m.def("on_axis_ratio", &on_axis_ratio);
    m.def("is_doughnut", &is_doughnut, py::arg("field"), py::arg("threshold") = 1e-9);

    m.def("tilted_lens_reading", [](const ScalarField& f, double focal, double tilt_deg) {
        TiltedLensSetup s;
        s.f = focal;
        s.tilt = tilt_deg * std::numbers::pi / 180.0;
        const TiltedLensResult r = tilted_lens_reading(f, s);
        py::dict d = reading_dict(r.reading);
        d["image"] = image_array(r.image);
        return d;
    }, py::arg("field"), py::arg("focal_length") = 0.2, py::arg("tilt_deg") = 6.0);
    m.def("count_stripes", [](py::array_t<double, py::array::c_style | py::array::forcecast> img, double dx, double dy) {
        if (img.ndim() != 2) throw Error("image must be 2-D");
        GridSpec g{static_cast<int>(img.shape(1)), static_cast<int>(img.shape(0)), dx, dy};
        return reading_dict(count_stripes(IntensityImage{g, std::vector<double>(img.data(), img.data() + img.size())}));
    }, py::arg("image"), py::arg("dx"), py::arg("dy"));

    m.def("spherical_interferogram", [](const ScalarField& f, double radius) {
        const IntensityImage img = interferogram(f, SphericalReference{radius});
        return py::make_tuple(image_array(img), count_spiral_arms(img));
    }, py::arg("field"), py::arg("curvature_radius") = 0.05);
    m.def("tilted_interferogram", [](const ScalarField& f, double angle) {
        const IntensityImage img = interferogram(f, TiltedPlaneReference{angle});
        const ForkReading r = count_fork_surplus(img);
        return py::make_tuple(image_array(img), r.surplus, r.winding);
    }, py::arg("field"), py::arg("angle"));

    py::class_<FwmConfig>(m, "FwmConfig")
        .def(py::init<>())
        .def_readwrite("lambda1", &FwmConfig::lambda1)
        .def_readwrite("lambda2", &FwmConfig::lambda2)
        .def_readwrite("lambda_ir", &FwmConfig::lambda_ir)
        .def_readwrite("lambda_bl", &FwmConfig::lambda_bl)
        .def_readwrite("coupling", &FwmConfig::coupling)
        .def_readwrite("ir_charge", &FwmConfig::ir_charge)
        .def_readwrite("ir_waist", &FwmConfig::ir_waist)
        .def_readwrite("cell_length", &FwmConfig::cell_length)
        .def_readwrite("slices", &FwmConfig::slices)
        .def("blue_wavelength", &FwmConfig::blue_wavelength);
    m.def("expected_charge", &expected_charge, py::arg("l780"), py::arg("l776"), py::arg("l_ir") = 0);
    m.def("fwm_blue_field", &fwm_blue_field, py::arg("e780"), py::arg("e776"), py::arg("config") = FwmConfig{});
    m.def("fwm_scene", [](const ScalarField& a, const ScalarField& b, double alpha, const FwmConfig& cfg, double z_out) {
        return fwm_scene(a, b, BeamGeometry::crossing(alpha), cfg, z_out);
    }, py::arg("e780"), py::arg("e776"), py::arg("alpha"), py::arg("config") = FwmConfig{}, py::arg("z_out") = 0.0);
    m.def("phase_match", [](double alpha, const FwmConfig& cfg) {
        const PhaseMatchSolution s = phase_match(BeamGeometry::crossing(alpha), cfg);
        py::dict d;
        d["theta_bl"] = s.theta_bl;
        d["theta_ir"] = s.theta_ir;
        d["residual"] = s.residual;
        d["bl_inside"] = s.bl_inside;
        return d;
    }, py::arg("alpha"), py::arg("config") = FwmConfig{});

    m.def("figure_names", &figure_names);
    m.def("canned_scenario", [](const std::string& n) { return to_python(json::parse(canned_scenario(n))); });
    m.def("run_scenario", [](const py::object& doc, const std::string& out_dir, bool write_files, const std::string& grid_override) {
        const json j = py::isinstance<py::str>(doc) ? parse_scenario_text(doc.cast<std::string>(), "<string>") : from_python(doc);
        const RunOptions o = options(out_dir, write_files, grid_override);
        ScenarioOutcome out;
        {
            py::gil_scoped_release release;
            out = run_scenario(j, o);
        }
        return outcome_dict(out);
    }, py::arg("scenario"), py::arg("out_dir") = ".", py::arg("write_files") = false, py::arg("grid_override") = "");
    m.def("run_figure", [](const std::string& name, const std::string& out_dir, bool write_files) {
        const RunOptions o = options(out_dir, write_files, "");
        ScenarioOutcome out;
        {
            py::gil_scoped_release release;
            out = run_figure(name, o);
        }
        return outcome_dict(out);
    }, py::arg("name"), py::arg("out_dir") = ".", py::arg("write_files") = false);

    m.def("selftest", [](std::vector<int> only) {
        AcceptanceOptions o;
        o.only.insert(only.begin(), only.end());
        std::vector<CriterionResult> res;
        {
            py::gil_scoped_release release;
            res = run_acceptance(o);
        }
        py::list out;
        for (const auto& r : res) {
            py::dict d;
            d["id"] = r.id;
            d["name"] = r.name;
            d["pass"] = r.pass;
            d["detail"] = r.detail;
            d["seconds"] = r.seconds;
            out.append(d);
        }
        return out;
    }, py::arg("only") = std::vector<int>{});
}
