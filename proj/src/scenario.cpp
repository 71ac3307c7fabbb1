#include "vortexsim/scenario.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "vortexsim/diagnostics.hpp"
#include "vortexsim/elements.hpp"
#include "vortexsim/fwm.hpp"
#include "vortexsim/image_io.hpp"
#include "vortexsim/modes.hpp"
#include "vortexsim/propagation.hpp"

namespace vortexsim {

namespace fs = std::filesystem;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------- parsing helpers

[[noreturn]] void fail(const std::string& path, const std::string& msg) { throw ParseError(path + ": " + msg); }

std::string at_key(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at_index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    require_object(obj, path);
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || it.key() == k;
        if (!known) fail(at_key(path, it.key()), "unknown key");
    }
}

const json* find(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_num(const json& obj, const char* key, const std::string& path, std::optional<double> def = std::nullopt) {
    const json* v = find(obj, key);
    if (!v) {
        if (def) return *def;
        fail(at_key(path, key), "missing required number");
    }
    if (!v->is_number()) fail(at_key(path, key), "expected a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) fail(at_key(path, key), "must be finite");
    return d;
}

int get_int(const json& obj, const char* key, const std::string& path, std::optional<int> def = std::nullopt) {
    const json* v = find(obj, key);
    if (!v) {
        if (def) return *def;
        fail(at_key(path, key), "missing required integer");
    }
    if (!v->is_number_integer()) fail(at_key(path, key), "expected an integer");
    return v->get<int>();
}

std::string get_str(const json& obj, const char* key, const std::string& path, std::optional<std::string> def = std::nullopt) {
    const json* v = find(obj, key);
    if (!v) {
        if (def) return *def;
        fail(at_key(path, key), "missing required string");
    }
    if (!v->is_string()) fail(at_key(path, key), "expected a string");
    return v->get<std::string>();
}

const json& get_array(const json& obj, const char* key, const std::string& path, bool required) {
    static const json empty = json::array();
    const json* v = find(obj, key);
    if (!v) {
        if (required) fail(at_key(path, key), "missing required array");
        return empty;
    }
    if (!v->is_array()) fail(at_key(path, key), "expected an array");
    return *v;
}

void require_positive(double v, const std::string& path) {
    if (!(v > 0.0)) fail(path, "must be positive");
}

std::string checked_image_name(const json& obj, const std::string& path) {
    const std::string name = get_str(obj, "image", path, std::string());
    if (!name.empty() && (name.find('/') != std::string::npos || name.find('\\') != std::string::npos || name == "." || name == ".."))
        fail(at_key(path, "image"), "must be a plain file name");
    return name;
}

// ---------------------------------------------------------------- typed scenario

struct RelaySpec {
    double focal_length = 0.3;
    int pad = 4;
};

struct SourceSpec {
    std::string id;
    double wavelength = 0.0;
    LgParams mode;
    std::vector<OpticalElement> elements;
    std::optional<RelaySpec> relay;
};

struct FwmSpec {
    std::string id;
    std::string pump780, pump776;
    FwmConfig cfg;
    std::optional<BeamGeometry> geom;
    double z_out = 0.0;
};

struct PropSpec {
    std::string id, from;
    PropagationPlan plan;
};

struct OamDiag {
    int l_min = -8, l_max = 8;
    double cx = 0.0, cy = 0.0;
};
struct TiltedDiag {
    TiltedLensSetup setup;
};
struct DoughnutDiag {
    double threshold = 1e-9;
};
struct PhaseMatchDiag {};
struct InterferogramDiag {
    Reference ref;
};
struct PowerDiag {};
struct ImageDiag {};

using DiagKind = std::variant<OamDiag, TiltedDiag, DoughnutDiag, PhaseMatchDiag, InterferogramDiag, PowerDiag, ImageDiag>;

struct DiagSpec {
    std::string id, type, target;  // target: field id, or fwm id for phase_match
    std::string image;
    DiagKind kind;
};

struct ExpectSpec {
    std::string name, diagnostic, quantity;
    std::optional<int> l;
    std::optional<json> equals;
    std::optional<double> tolerance, min, max;
};

struct ScenarioSpec {
    std::string name, title;
    GridSpec grid;
    std::vector<SourceSpec> sources;
    std::vector<FwmSpec> fwm;
    std::vector<PropSpec> props;
    std::vector<DiagSpec> diags;
    std::vector<ExpectSpec> expects;
    std::vector<std::string> output_fields;
};

OpticalElement parse_element(const json& e, const std::string& path) {
    require_object(e, path);
    const std::string type = get_str(e, "type", path);
    OpticalElement out;
    if (type == "staircase_mask") {
        allow_keys(e, path, {"type", "charge", "sectors", "power_transmittance"});
        out = StaircaseMask{get_int(e, "charge", path), get_int(e, "sectors", path, 8), get_num(e, "power_transmittance", path, 0.95)};
    } else if (type == "spiral_plate") {
        allow_keys(e, path, {"type", "charge"});
        out = SpiralPlate{get_int(e, "charge", path)};
    } else if (type == "forked_grating") {
        allow_keys(e, path, {"type", "charge", "efficiency"});
        out = ForkedGrating{get_int(e, "charge", path), get_num(e, "efficiency", path, 1.0)};
    } else if (type == "thin_lens") {
        allow_keys(e, path, {"type", "focal_length_m"});
        out = ThinLens{get_num(e, "focal_length_m", path)};
    } else if (type == "tilted_lens") {
        allow_keys(e, path, {"type", "focal_length_m", "tilt_deg"});
        out = TiltedLens{get_num(e, "focal_length_m", path), get_num(e, "tilt_deg", path) * kDeg};
    } else if (type == "circular_aperture") {
        allow_keys(e, path, {"type", "radius_m"});
        out = CircularAperture{get_num(e, "radius_m", path)};
    } else {
        fail(at_key(path, "type"), "unknown element type '" + type +
                                       "' (staircase_mask, spiral_plate, forked_grating, thin_lens, tilted_lens, circular_aperture)");
    }
    try {
        validate(out);
    } catch (const Error& err) {
        fail(path, err.what());
    }
    return out;
}

std::vector<double> parse_z_scan(const json& d, const std::string& path, double f) {
    const json* z = find(d, "z_scan_m");
    if (!z) return {};
    const std::string zp = at_key(path, "z_scan_m");
    std::vector<double> out;
    if (z->is_array()) {
        for (std::size_t i = 0; i < z->size(); ++i) {
            if (!(*z)[i].is_number()) fail(at_index(zp, i), "expected a number");
            out.push_back((*z)[i].get<double>());
        }
    } else if (z->is_object()) {
        allow_keys(*z, zp, {"from_m", "to_m", "count"});
        const double a = get_num(*z, "from_m", zp, 0.85 * f);
        const double b = get_num(*z, "to_m", zp, 1.15 * f);
        const int n = get_int(*z, "count", zp, 21);
        if (n < 1) fail(at_key(zp, "count"), "must be at least 1");
        for (int i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    } else {
        fail(zp, "expected an array of distances or {from_m, to_m, count}");
    }
    if (out.empty()) fail(zp, "must not be empty");
    for (double v : out)
        if (!(v > 0.0)) fail(zp, "scan distances must be positive");
    return out;
}

Reference parse_reference(const json& r, const std::string& path) {
    require_object(r, path);
    const std::string kind = get_str(r, "kind", path);
    if (kind == "spherical") {
        allow_keys(r, path, {"kind", "curvature_radius_m"});
        const double rc = get_num(r, "curvature_radius_m", path);
        if (rc == 0.0) fail(at_key(path, "curvature_radius_m"), "must be nonzero");
        return SphericalReference{rc};
    }
    if (kind == "tilted_plane") {
        allow_keys(r, path, {"kind", "angle_mrad"});
        return TiltedPlaneReference{get_num(r, "angle_mrad", path) * 1e-3};
    }
    fail(at_key(path, "kind"), "unknown reference kind '" + kind + "' (spherical, tilted_plane)");
}

ScenarioSpec parse_spec(const json& doc) {
    const std::string root = "scenario";
    allow_keys(doc, root, {"scenario", "title", "grid", "sources", "fwm", "propagate", "diagnostics", "expectations", "outputs"});
    ScenarioSpec s;
    s.name = get_str(doc, "scenario", root);
    if (s.name.empty()) fail(at_key(root, "scenario"), "must not be empty");
    s.title = get_str(doc, "title", root, std::string());

    {
        const std::string p = at_key(root, "grid");
        const json* g = find(doc, "grid");
        if (!g) fail(p, "missing required object");
        allow_keys(*g, p, {"nx", "ny", "dx_m", "dy_m"});
        s.grid.nx = get_int(*g, "nx", p);
        s.grid.ny = get_int(*g, "ny", p);
        s.grid.dx = get_num(*g, "dx_m", p);
        s.grid.dy = get_num(*g, "dy_m", p, s.grid.dx);
        try {
            s.grid.validate();
        } catch (const Error& e) {
            fail(p, e.what());
        }
    }

    std::set<std::string> ids;
    std::map<std::string, std::string> kinds;  // id -> "source" | "fwm" | "propagate"
    auto claim = [&](const std::string& id, const std::string& path, const std::string& kind) {
        if (id.empty()) fail(path, "id must not be empty");
        if (!ids.insert(id).second) fail(path, "duplicate id '" + id + "'");
        kinds[id] = kind;
    };
    auto resolve_field = [&](const std::string& id, const std::string& path) {
        if (!kinds.count(id) || kinds[id] == "diagnostic") fail(path, "unresolved field reference '" + id + "'");
    };

    const json& sources = get_array(doc, "sources", root, true);
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const std::string p = at_index(at_key(root, "sources"), i);
        const json& src = sources[i];
        allow_keys(src, p, {"id", "wavelength_m", "mode", "elements", "relay"});
        SourceSpec sp;
        sp.id = get_str(src, "id", p);
        claim(sp.id, at_key(p, "id"), "source");
        sp.wavelength = get_num(src, "wavelength_m", p);
        require_positive(sp.wavelength, at_key(p, "wavelength_m"));
        const std::string mp = at_key(p, "mode");
        const json* m = find(src, "mode");
        if (!m) fail(mp, "missing required object");
        allow_keys(*m, mp, {"p", "l", "waist_m", "z_m"});
        sp.mode.p = get_int(*m, "p", mp, 0);
        sp.mode.l = get_int(*m, "l", mp, 0);
        sp.mode.w0 = get_num(*m, "waist_m", mp);
        sp.mode.z = get_num(*m, "z_m", mp, 0.0);
        if (sp.mode.p < 0) fail(at_key(mp, "p"), "must be nonnegative");
        require_positive(sp.mode.w0, at_key(mp, "waist_m"));
        const json& els = get_array(src, "elements", p, false);
        for (std::size_t k = 0; k < els.size(); ++k) sp.elements.push_back(parse_element(els[k], at_index(at_key(p, "elements"), k)));
        if (const json* r = find(src, "relay")) {
            const std::string rp = at_key(p, "relay");
            allow_keys(*r, rp, {"focal_length_m", "pad_factor"});
            RelaySpec rs;
            rs.focal_length = get_num(*r, "focal_length_m", rp);
            rs.pad = get_int(*r, "pad_factor", rp, 4);
            require_positive(rs.focal_length, at_key(rp, "focal_length_m"));
            if (rs.pad < 1 || rs.pad > 8) fail(at_key(rp, "pad_factor"), "must be in 1..8");
            if (sp.mode.z != 0.0) fail(at_key(mp, "z_m"), "must be 0 for a relayed source");
            sp.relay = rs;
        }
        s.sources.push_back(std::move(sp));
    }

    const json& fwm = get_array(doc, "fwm", root, false);
    for (std::size_t i = 0; i < fwm.size(); ++i) {
        const std::string p = at_index(at_key(root, "fwm"), i);
        const json& st = fwm[i];
        allow_keys(st, p, {"id", "pump780", "pump776", "config", "geometry", "z_out_m"});
        FwmSpec fs_;
        fs_.id = get_str(st, "id", p);
        fs_.pump780 = get_str(st, "pump780", p);
        fs_.pump776 = get_str(st, "pump776", p);
        resolve_field(fs_.pump780, at_key(p, "pump780"));
        resolve_field(fs_.pump776, at_key(p, "pump776"));
        claim(fs_.id, at_key(p, "id"), "fwm");
        if (const json* c = find(st, "config")) {
            const std::string cp = at_key(p, "config");
            allow_keys(*c, cp, {"lambda1_m", "lambda2_m", "lambda_ir_m", "lambda_bl_m", "coupling", "ir_charge", "ir_waist_m",
                                "cell_length_m", "slices"});
            FwmConfig& cfg = fs_.cfg;
            cfg.lambda1 = get_num(*c, "lambda1_m", cp, cfg.lambda1);
            cfg.lambda2 = get_num(*c, "lambda2_m", cp, cfg.lambda2);
            cfg.lambda_ir = get_num(*c, "lambda_ir_m", cp, cfg.lambda_ir);
            cfg.lambda_bl = get_num(*c, "lambda_bl_m", cp, cfg.lambda_bl);
            cfg.coupling = get_num(*c, "coupling", cp, cfg.coupling);
            cfg.ir_charge = get_int(*c, "ir_charge", cp, cfg.ir_charge);
            cfg.ir_waist = get_num(*c, "ir_waist_m", cp, cfg.ir_waist);
            cfg.cell_length = get_num(*c, "cell_length_m", cp, cfg.cell_length);
            cfg.slices = get_int(*c, "slices", cp, cfg.slices);
            try {
                cfg.validate();
            } catch (const Error& e) {
                fail(cp, e.what());
            }
        }
        if (const json* g = find(st, "geometry")) {
            const std::string gp = at_key(p, "geometry");
            allow_keys(*g, gp, {"crossing_angle_mrad", "theta1_mrad", "theta2_mrad"});
            BeamGeometry geom;
            if (find(*g, "crossing_angle_mrad")) {
                if (find(*g, "theta1_mrad") || find(*g, "theta2_mrad"))
                    fail(gp, "give either crossing_angle_mrad or theta1_mrad/theta2_mrad");
                geom = BeamGeometry::crossing(get_num(*g, "crossing_angle_mrad", gp) * 1e-3);
            } else {
                geom.theta1 = get_num(*g, "theta1_mrad", gp, 0.0) * 1e-3;
                geom.theta2 = get_num(*g, "theta2_mrad", gp) * 1e-3;
            }
            try {
                geom.validate();
            } catch (const Error& e) {
                fail(gp, e.what());
            }
            fs_.geom = geom;
        }
        fs_.z_out = get_num(st, "z_out_m", p, 0.0);
        s.fwm.push_back(fs_);
    }

    const json& props = get_array(doc, "propagate", root, false);
    for (std::size_t i = 0; i < props.size(); ++i) {
        const std::string p = at_index(at_key(root, "propagate"), i);
        allow_keys(props[i], p, {"id", "from", "dz_m", "bandlimit"});
        PropSpec ps;
        ps.id = get_str(props[i], "id", p);
        ps.from = get_str(props[i], "from", p);
        resolve_field(ps.from, at_key(p, "from"));
        claim(ps.id, at_key(p, "id"), "propagate");
        ps.plan.dz = get_num(props[i], "dz_m", p);
        ps.plan.bandlimit = get_num(props[i], "bandlimit", p, 1.0);
        if (!(ps.plan.bandlimit > 0.0 && ps.plan.bandlimit <= 1.0)) fail(at_key(p, "bandlimit"), "must be in (0, 1]");
        s.props.push_back(ps);
    }

    const json& diags = get_array(doc, "diagnostics", root, false);
    for (std::size_t i = 0; i < diags.size(); ++i) {
        const std::string p = at_index(at_key(root, "diagnostics"), i);
        const json& d = diags[i];
        require_object(d, p);
        DiagSpec ds;
        ds.id = get_str(d, "id", p);
        ds.type = get_str(d, "type", p);
        if (ds.type == "oam_spectrum") {
            allow_keys(d, p, {"id", "type", "field", "l_min", "l_max", "center_x_m", "center_y_m"});
            OamDiag o;
            o.l_min = get_int(d, "l_min", p, -8);
            o.l_max = get_int(d, "l_max", p, 8);
            if (o.l_min > o.l_max || o.l_max - o.l_min > 64) fail(p, "l_min..l_max must be a nonempty range of at most 65 charges");
            o.cx = get_num(d, "center_x_m", p, 0.0);
            o.cy = get_num(d, "center_y_m", p, 0.0);
            ds.kind = o;
        } else if (ds.type == "tilted_lens") {
            allow_keys(d, p, {"id", "type", "field", "focal_length_m", "tilt_deg", "relay_magnification", "upsample", "z_scan_m", "image"});
            TiltedDiag t;
            t.setup.f = get_num(d, "focal_length_m", p, 0.2);
            t.setup.tilt = get_num(d, "tilt_deg", p, 6.0) * kDeg;
            t.setup.relay_magnification = get_num(d, "relay_magnification", p, 32.0);
            t.setup.upsample = get_int(d, "upsample", p, 2);
            require_positive(t.setup.f, at_key(p, "focal_length_m"));
            require_positive(t.setup.relay_magnification, at_key(p, "relay_magnification"));
            if (t.setup.upsample < 1 || t.setup.upsample > 4) fail(at_key(p, "upsample"), "must be in 1..4");
            if (!(t.setup.tilt >= 0.0 && t.setup.tilt < std::numbers::pi / 2)) fail(at_key(p, "tilt_deg"), "must be in [0, 90)");
            t.setup.z_scan = parse_z_scan(d, p, t.setup.f);
            ds.image = checked_image_name(d, p);
            ds.kind = t;
        } else if (ds.type == "doughnut") {
            allow_keys(d, p, {"id", "type", "field", "threshold"});
            ds.kind = DoughnutDiag{get_num(d, "threshold", p, 1e-9)};
        } else if (ds.type == "phase_match") {
            allow_keys(d, p, {"id", "type", "fwm"});
            ds.target = get_str(d, "fwm", p);
            if (!kinds.count(ds.target) || kinds[ds.target] != "fwm") fail(at_key(p, "fwm"), "unresolved fwm reference '" + ds.target + "'");
            ds.kind = PhaseMatchDiag{};
        } else if (ds.type == "interferogram") {
            allow_keys(d, p, {"id", "type", "field", "reference", "image"});
            const json* r = find(d, "reference");
            if (!r) fail(at_key(p, "reference"), "missing required object");
            ds.kind = InterferogramDiag{parse_reference(*r, at_key(p, "reference"))};
            ds.image = checked_image_name(d, p);
        } else if (ds.type == "power") {
            allow_keys(d, p, {"id", "type", "field"});
            ds.kind = PowerDiag{};
        } else if (ds.type == "intensity_image") {
            allow_keys(d, p, {"id", "type", "field", "image"});
            ds.image = checked_image_name(d, p);
            if (ds.image.empty()) fail(at_key(p, "image"), "missing required string");
            ds.kind = ImageDiag{};
        } else {
            fail(at_key(p, "type"), "unknown diagnostic type '" + ds.type +
                                        "' (oam_spectrum, tilted_lens, doughnut, phase_match, interferogram, power, intensity_image)");
        }
        if (ds.type != "phase_match") {
            ds.target = get_str(d, "field", p);
            resolve_field(ds.target, at_key(p, "field"));
        }
        claim(ds.id, at_key(p, "id"), "diagnostic");
        s.diags.push_back(std::move(ds));
    }

    const json& exps = get_array(doc, "expectations", root, false);
    for (std::size_t i = 0; i < exps.size(); ++i) {
        const std::string p = at_index(at_key(root, "expectations"), i);
        const json& e = exps[i];
        allow_keys(e, p, {"name", "diagnostic", "quantity", "l", "equals", "tolerance", "min", "max"});
        ExpectSpec es;
        es.name = get_str(e, "name", p);
        es.diagnostic = get_str(e, "diagnostic", p);
        es.quantity = get_str(e, "quantity", p);
        if (!kinds.count(es.diagnostic) || (kinds[es.diagnostic] != "diagnostic" && kinds[es.diagnostic] != "fwm"))
            fail(at_key(p, "diagnostic"), "unresolved diagnostic reference '" + es.diagnostic + "'");
        if (find(e, "l")) es.l = get_int(e, "l", p);
        if (const json* eq = find(e, "equals")) {
            if (!(eq->is_number() || eq->is_boolean() || eq->is_string())) fail(at_key(p, "equals"), "expected a number, boolean or \"id.quantity\" reference");
            es.equals = *eq;
        }
        if (find(e, "tolerance")) es.tolerance = get_num(e, "tolerance", p);
        if (find(e, "min")) es.min = get_num(e, "min", p);
        if (find(e, "max")) es.max = get_num(e, "max", p);
        if (!es.equals && !es.min && !es.max) fail(p, "needs equals, min or max");
        if (es.equals && (es.min || es.max)) fail(p, "equals cannot be combined with min/max");
        if (es.equals && es.equals->is_string()) {
            const std::string ref = es.equals->get<std::string>();
            const auto dot = ref.find('.');
            if (dot == std::string::npos || !kinds.count(ref.substr(0, dot)))
                fail(at_key(p, "equals"), "unresolved reference '" + ref + "'");
        }
        s.expects.push_back(std::move(es));
    }

    if (const json* o = find(doc, "outputs")) {
        const std::string op = at_key(root, "outputs");
        allow_keys(*o, op, {"fields"});
        const json& fl = get_array(*o, "fields", op, false);
        for (std::size_t i = 0; i < fl.size(); ++i) {
            const std::string fp = at_index(at_key(op, "fields"), i);
            if (!fl[i].is_string()) fail(fp, "expected a field id");
            resolve_field(fl[i].get<std::string>(), fp);
            s.output_fields.push_back(fl[i].get<std::string>());
        }
    }
    return s;
}

// ---------------------------------------------------------------- execution

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json summary_json(const std::string& file, const IntensityImage& img) {
    const ImageSummary s = summarize(img);
    return json{{"path", file}, {"min", s.min}, {"max", s.max}, {"centroid_x_m", s.centroid_x}, {"centroid_y_m", s.centroid_y},
                {"nx", img.grid.nx}, {"ny", img.grid.ny}, {"dx_m", img.grid.dx}, {"dy_m", img.grid.dy}};
}

json reading_json(const StripeReading& r) {
    return json{{"count", r.count},       {"sign", r.sign},
                {"signed_count", r.sign * r.count},
                {"contrast", r.contrast}, {"plane_z_m", r.plane_z},
                {"inconclusive", r.inconclusive},
                {"stripe_angle_deg", r.stripe_angle},
                {"anisotropy", r.anisotropy}};
}

json spectrum_json(const OamSpectrum& spec) {
    json w = json::object();
    for (int l = spec.l_min; l <= spec.l_max; ++l) w[std::to_string(l)] = spec.weight(l);
    const int dom = dominant_charge(spec);
    return json{{"dominant_charge", dom}, {"dominant_weight", spec.weight(dom)}, {"weights", w}, {"residual", spec.residual}};
}

json match_json(const PhaseMatchSolution& sol, const BeamGeometry& geom, const FwmConfig& cfg) {
    const double kbl = 2.0 * std::numbers::pi / cfg.blue_wavelength();
    return json{{"alpha_mrad", geom.alpha() * 1e3},          {"theta_bl_mrad", sol.theta_bl * 1e3},
                {"theta_ir_mrad", sol.theta_ir * 1e3},       {"residual_rad_per_m", sol.residual},
                {"residual_rel", sol.residual / kbl},        {"bl_inside", sol.bl_inside},
                {"blue_wavelength_m", cfg.blue_wavelength()}};
}

class Runner {
public:
    Runner(const ScenarioSpec& spec, const RunOptions& opts) : spec_(spec), opts_(opts) {}

    json results;
    json artifacts = json::array();

    void run() {
        results = json{{"sources", json::object()}, {"fwm", json::object()}, {"diagnostics", json::object()}, {"images", json::array()}};
        for (const auto& s : spec_.sources) build_source(s);
        for (const auto& f : spec_.fwm) run_fwm(f);
        for (const auto& p : spec_.props) {
            fields_.insert_or_assign(p.id, propagate(fields_.at(p.from), p.plan));
            nominal_[p.id] = nominal_[p.from];
        }
        for (const auto& d : spec_.diags) run_diag(d);
        for (const auto& id : spec_.output_fields) {
            const std::string file = spec_.name + "_" + id + ".vtxf";
            if (opts_.write_files) save_field(fields_.at(id), (fs::path(opts_.out_dir) / file).string());
            artifacts.push_back(file);
        }
    }

private:
    const ScenarioSpec& spec_;
    const RunOptions& opts_;
    std::map<std::string, ScalarField> fields_;
    std::map<std::string, int> nominal_;
    std::map<std::string, std::pair<BeamGeometry, FwmConfig>> stages_;

    void build_source(const SourceSpec& s) {
        int charge = s.mode.l;
        for (const auto& e : s.elements) charge += element_charge(e);
        ScalarField f = [&] {
            if (!s.relay) {
                ScalarField out = lg_mode(spec_.grid, s.wavelength, s.mode);
                for (const auto& e : s.elements) out = vortexsim::apply(e, out);
                return out;
            }
            // elements act on the collimated beam in the front focal plane of the relay lens
            const GridSpec mg = relay_input_grid(spec_.grid, s.wavelength, s.relay->focal_length, s.relay->pad);
            LgParams wide = s.mode;
            wide.w0 = s.wavelength * s.relay->focal_length / (std::numbers::pi * s.mode.w0);
            ScalarField out = lg_mode(mg, s.wavelength, wide);
            int applied = 0;
            for (const auto& e : s.elements) {
                out = vortexsim::apply(e, out);
                applied += element_charge(e);
            }
            if (applied != 0) out.at(mg.ny / 2, mg.nx / 2) = 0.0;  // the singular point transmits nothing
            return fourier_relay(out, s.relay->focal_length, spec_.grid);
        }();
        results["sources"][s.id] = json{{"wavelength_m", s.wavelength}, {"nominal_charge", charge}, {"power", power(f)}};
        nominal_[s.id] = charge;
        fields_.insert_or_assign(s.id, std::move(f));
    }

    void run_fwm(const FwmSpec& st) {
        const ScalarField& a = fields_.at(st.pump780);
        const ScalarField& b = fields_.at(st.pump776);
        const int expected = expected_charge(nominal_[st.pump780], nominal_[st.pump776], st.cfg.ir_charge);
        json r{{"expected_charge", expected}, {"wavelength_m", st.cfg.blue_wavelength()}, {"pump780", st.pump780}, {"pump776", st.pump776}};
        if (st.geom) {
            PhaseMatchSolution sol;
            fields_.insert_or_assign(st.id, fwm_scene(a, b, *st.geom, st.cfg, st.z_out, &sol));
            r["phase_match"] = match_json(sol, *st.geom, st.cfg);
            stages_.insert_or_assign(st.id, std::make_pair(*st.geom, st.cfg));
        } else {
            fields_.insert_or_assign(st.id, propagate(fwm_blue_field(a, b, st.cfg), st.z_out));
            stages_.insert_or_assign(st.id, std::make_pair(BeamGeometry{}, st.cfg));
        }
        r["power"] = power(fields_.at(st.id));
        nominal_[st.id] = expected;
        results["fwm"][st.id] = r;
    }

    void emit_image(const std::string& file, const IntensityImage& img, json& r) {
        if (file.empty()) return;
        if (opts_.write_files) write_pgm(img, (fs::path(opts_.out_dir) / file).string());
        artifacts.push_back(file);
        const json s = summary_json(file, img);
        results["images"].push_back(s);
        r["image"] = s;
    }

    void run_diag(const DiagSpec& d) {
        json r{{"type", d.type}, {"target", d.target}};
        if (const auto* o = std::get_if<OamDiag>(&d.kind)) {
            r.update(spectrum_json(oam_spectrum(fields_.at(d.target), o->cx, o->cy, o->l_min, o->l_max)));
        } else if (const auto* t = std::get_if<TiltedDiag>(&d.kind)) {
            const TiltedLensResult res = tilted_lens_reading(fields_.at(d.target), t->setup);
            r.update(reading_json(res.reading));
            json scan = json::array();
            for (const auto& p : res.scan) scan.push_back(json{{"z_m", p.z}, {"count", p.count}, {"contrast", p.contrast}});
            r["scan"] = scan;
            emit_image(d.image, res.image, r);
        } else if (const auto* dn = std::get_if<DoughnutDiag>(&d.kind)) {
            const ScalarField& f = fields_.at(d.target);
            r["on_axis_ratio"] = on_axis_ratio(f);
            r["threshold"] = dn->threshold;
            r["doughnut"] = is_doughnut(f, dn->threshold);
        } else if (std::holds_alternative<PhaseMatchDiag>(d.kind)) {
            const auto& [geom, cfg] = stages_.at(d.target);
            r.update(match_json(phase_match(geom, cfg), geom, cfg));
        } else if (const auto* in = std::get_if<InterferogramDiag>(&d.kind)) {
            const IntensityImage img = interferogram(fields_.at(d.target), in->ref);
            if (std::holds_alternative<SphericalReference>(in->ref)) {
                r["reference"] = "spherical";
                r["arms"] = count_spiral_arms(img);
            } else {
                const ForkReading fk = count_fork_surplus(img);
                r["reference"] = "tilted_plane";
                r["fork_surplus"] = fk.surplus;
                r["winding"] = fk.winding;
            }
            emit_image(d.image, img, r);
        } else if (std::holds_alternative<PowerDiag>(d.kind)) {
            r["power"] = power(fields_.at(d.target));
        } else if (std::holds_alternative<ImageDiag>(d.kind)) {
            emit_image(d.image, intensity(fields_.at(d.target)), r);
        }
        results["diagnostics"][d.id] = r;
    }
};

const json* lookup(const json& results, const std::string& id, const std::string& quantity, std::optional<int> l) {
    const json* node = nullptr;
    if (results["diagnostics"].contains(id))
        node = &results["diagnostics"][id];
    else if (results["fwm"].contains(id))
        node = &results["fwm"][id];
    if (!node) return nullptr;
    if (quantity == "weight") {
        if (!l || !node->contains("weights")) return nullptr;
        const json& w = (*node)["weights"];
        const std::string key = std::to_string(*l);
        return w.contains(key) ? &w[key] : nullptr;
    }
    if (node->contains(quantity)) return &(*node)[quantity];
    if (node->contains("phase_match") && (*node)["phase_match"].contains(quantity)) return &(*node)["phase_match"][quantity];
    return nullptr;
}

json evaluate(const ExpectSpec& e, const json& results) {
    json out{{"name", e.name}, {"diagnostic", e.diagnostic}, {"quantity", e.quantity}};
    if (e.l) out["l"] = *e.l;
    const json* measured = lookup(results, e.diagnostic, e.quantity, e.l);
    out["measured"] = measured ? *measured : json(nullptr);
    bool pass = measured != nullptr;
    if (e.equals) {
        json expected = *e.equals;
        if (expected.is_string()) {
            const std::string ref = expected.get<std::string>();
            const auto dot = ref.find('.');
            const json* target = lookup(results, ref.substr(0, dot), ref.substr(dot + 1), std::nullopt);
            expected = target ? *target : json(nullptr);
            if (!target) pass = false;
        }
        if (e.tolerance) {
            out["expected"] = json{{"value", expected}, {"tolerance", *e.tolerance}};
            pass = pass && measured->is_number() && expected.is_number() &&
                   std::abs(measured->get<double>() - expected.get<double>()) <= *e.tolerance;
        } else {
            out["expected"] = expected;
            if (pass && measured->is_number() && expected.is_number())
                pass = measured->get<double>() == expected.get<double>();
            else
                pass = pass && *measured == expected;
        }
    } else {
        json range = json::object();
        if (e.min) range["min"] = *e.min;
        if (e.max) range["max"] = *e.max;
        out["expected"] = range;
        pass = pass && measured->is_number();
        if (pass && e.min) pass = measured->get<double>() >= *e.min;
        if (pass && e.max) pass = measured->get<double>() <= *e.max;
    }
    out["pass"] = pass;
    return out;
}

void apply_override(ScenarioSpec& s, const GridOverride& g) {
    s.grid.nx = g.nx;
    s.grid.ny = g.ny;
    if (g.pitch) s.grid.dx = s.grid.dy = *g.pitch;
    s.grid.validate();
}

std::string report_target(const std::string& name, const RunOptions& opts) {
    if (opts.report_path) return *opts.report_path;
    return (fs::path(opts.out_dir) / (name + "_report.json")).string();
}

void write_report(ScenarioOutcome& out, const std::string& name, const RunOptions& opts) {
    if (!opts.write_files) return;
    const std::string path = report_target(name, opts);
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw Error("cannot write report " + path);
    os << out.report.dump(2) << "\n";
    out.report_file = path;
}

ScenarioOutcome failure_outcome(const std::string& name, const std::vector<ExpectSpec>& expects, int code, const std::string& kind,
                                const std::string& message, const std::string& started, double seconds) {
    ScenarioOutcome out;
    out.exit_code = code;
    json ex = json::array();
    for (const auto& e : expects)
        ex.push_back(json{{"name", e.name}, {"diagnostic", e.diagnostic}, {"quantity", e.quantity}, {"expected", nullptr},
                          {"measured", nullptr}, {"pass", false}});
    out.report = json{{"scenario", name},
                      {"error", json{{"kind", kind}, {"message", message}}},
                      {"expectations", ex},
                      {"artifacts", json::array()},
                      {"meta", json{{"generator", "vortexsim"}, {"version", kVersion}, {"started_utc", started}, {"runtime_s", seconds}}}};
    return out;
}

}  // namespace

// ---------------------------------------------------------------- public API

GridOverride parse_grid_override(const std::string& text) {
    GridOverride g;
    std::string dims = text;
    const auto at = text.find('@');
    if (at != std::string::npos) {
        dims = text.substr(0, at);
        const std::string pitch = text.substr(at + 1);
        try {
            std::size_t used = 0;
            const double p = std::stod(pitch, &used);
            if (used != pitch.size() || !(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("pitch");
            g.pitch = p;
        } catch (const std::exception&) {
            throw ParseError("--grid-override: bad pitch '" + pitch + "' (expected NXxNY[@PITCH_M])");
        }
    }
    const auto x = dims.find('x');
    try {
        if (x == std::string::npos) throw std::invalid_argument("dims");
        std::size_t u1 = 0, u2 = 0;
        const std::string a = dims.substr(0, x), b = dims.substr(x + 1);
        g.nx = std::stoi(a, &u1);
        g.ny = std::stoi(b, &u2);
        if (u1 != a.size() || u2 != b.size()) throw std::invalid_argument("dims");
    } catch (const std::exception&) {
        throw ParseError("--grid-override: bad dimensions '" + dims + "' (expected NXxNY[@PITCH_M])");
    }
    if (g.nx < 16 || g.ny < 16) throw ParseError("--grid-override: grid too small");
    if (g.nx > 8192 || g.ny > 8192) throw ParseError("--grid-override: grid larger than 8192 per side");
    return g;
}

json parse_scenario_text(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < upto; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        const auto colon = msg.rfind(": ");
        if (colon != std::string::npos) msg = msg.substr(colon + 2);
        throw ParseError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
    }
    parse_spec(doc);
    return doc;
}

ScenarioOutcome run_scenario(const json& doc, const RunOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    std::string name = doc.is_object() && doc.contains("scenario") && doc["scenario"].is_string() ? doc["scenario"].get<std::string>() : "unnamed";

    ScenarioSpec spec;
    try {
        spec = parse_spec(doc);
        if (opts.grid_override) apply_override(spec, *opts.grid_override);
    } catch (const Error& e) {
        ScenarioOutcome out = failure_outcome(name, {}, kExitUsage, "parse", e.what(), started, elapsed());
        write_report(out, name, opts);
        return out;
    }
    name = spec.name;
    if (opts.write_files) fs::create_directories(opts.out_dir);

    ScenarioOutcome out;
    Runner runner(spec, opts);
    try {
        runner.run();
    } catch (const SamplingError& e) {
        out = failure_outcome(name, spec.expects, kExitSampling, "sampling", e.what(), started, elapsed());
        write_report(out, name, opts);
        return out;
    } catch (const Error& e) {
        out = failure_outcome(name, spec.expects, kExitUsage, "validation", e.what(), started, elapsed());
        write_report(out, name, opts);
        return out;
    }

    json ex = json::array();
    bool all = true;
    for (const auto& e : spec.expects) {
        json v = evaluate(e, runner.results);
        all = all && v["pass"].get<bool>();
        ex.push_back(std::move(v));
    }
    out.exit_code = all ? kExitPass : kExitExpectation;
    out.report = json{{"scenario", name},
                      {"title", spec.title},
                      {"grid", json{{"nx", spec.grid.nx}, {"ny", spec.grid.ny}, {"dx_m", spec.grid.dx}, {"dy_m", spec.grid.dy}}},
                      {"expectations", ex},
                      {"results", runner.results},
                      {"artifacts", runner.artifacts},
                      {"meta", json{{"generator", "vortexsim"}, {"version", kVersion}, {"started_utc", started}, {"runtime_s", elapsed()}}}};
    write_report(out, name, opts);
    return out;
}

ScenarioOutcome run_scenario_file(const std::string& path, const RunOptions& opts) {
    std::ifstream is(path);
    if (!is) {
        ScenarioOutcome out = failure_outcome(fs::path(path).stem().string(), {}, kExitUsage, "parse", "cannot open scenario file " + path, utc_now(), 0.0);
        return out;
    }
    std::stringstream ss;
    ss << is.rdbuf();
    json doc;
    try {
        doc = parse_scenario_text(ss.str(), path);
    } catch (const Error& e) {
        ScenarioOutcome out = failure_outcome(fs::path(path).stem().string(), {}, kExitUsage, "parse", e.what(), utc_now(), 0.0);
        return out;
    }
    return run_scenario(doc, opts);
}

std::vector<std::string> figure_names() {
    std::vector<std::string> names;
    for (const auto& [n, _] : canned_scenarios()) names.push_back(n);
    return names;
}

const std::string& canned_scenario(const std::string& name) {
    for (const auto& [n, text] : canned_scenarios())
        if (n == name) return text;
    std::string list;
    for (const auto& n : figure_names()) list += (list.empty() ? "" : ", ") + n;
    throw ParseError("unknown figure '" + name + "'; available: " + list);
}

ScenarioOutcome run_figure(const std::string& name, const RunOptions& opts) {
    const json doc = parse_scenario_text(canned_scenario(name), name + ".json");
    return run_scenario(doc, opts);
}

ScenarioOutcome measure_field_file(const std::string& path, const RunOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    const std::string stem = fs::path(path).stem().string();
    const std::string name = "measure:" + fs::path(path).filename().string();
    ScenarioOutcome out;
    try {
        const ScalarField f = load_field(path);
        if (opts.write_files) fs::create_directories(opts.out_dir);
        json artifacts = json::array();
        json images = json::array();
        json r;
        r["power"] = power(f);
        r["wavelength_m"] = f.wavelength();
        r["grid"] = json{{"nx", f.grid().nx}, {"ny", f.grid().ny}, {"dx_m", f.grid().dx}, {"dy_m", f.grid().dy}};
        r["oam_spectrum"] = spectrum_json(oam_spectrum(f));
        r["on_axis_ratio"] = on_axis_ratio(f);
        r["doughnut"] = is_doughnut(f);
        const TiltedLensResult tl = tilted_lens_reading(f);
        r["tilted_lens"] = reading_json(tl.reading);
        const std::pair<std::string, IntensityImage> imgs[] = {{stem + "_intensity.pgm", intensity(f)}, {stem + "_tilted.pgm", tl.image}};
        for (const auto& [file, img] : imgs) {
            if (opts.write_files) write_pgm(img, (fs::path(opts.out_dir) / file).string());
            artifacts.push_back(file);
            images.push_back(summary_json(file, img));
        }
        r["images"] = images;
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.report = json{{"scenario", name},
                          {"expectations", json::array()},
                          {"results", r},
                          {"artifacts", artifacts},
                          {"meta", json{{"generator", "vortexsim"}, {"version", kVersion}, {"started_utc", started}, {"runtime_s", secs}}}};
        out.exit_code = kExitPass;
    } catch (const SamplingError& e) {
        out = failure_outcome(name, {}, kExitSampling, "sampling", e.what(), started, 0.0);
    } catch (const Error& e) {
        out = failure_outcome(name, {}, kExitUsage, "input", e.what(), started, 0.0);
    }
    write_report(out, "measure_" + stem, opts);
    return out;
}

json without_meta(const json& report) {
    json r = report;
    r.erase("meta");
    return r;
}

}  // namespace vortexsim
