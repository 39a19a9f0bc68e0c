#include "eigenflow/commands.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace eigenflow {

using Json = nlohmann::ordered_json;

namespace {

Json cplx(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json cvec(const Eigen::VectorXcd& v) {
    Json a = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(cplx(v(k)));
    return a;
}

Json rvec(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
    return a;
}

Json cmat(const Eigen::MatrixXcd& m) {
    Json a = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(cvec(m.row(r).transpose()));
    return a;
}

// frame columns as a list of vectors
Json frame_vectors(const Eigen::MatrixXcd& f, bool normalize) {
    Json a = Json::array();
    for (Eigen::Index c = 0; c < f.cols(); ++c) {
        Eigen::VectorXcd v = f.col(c);
        if (normalize) v.normalize();
        a.push_back(cvec(v));
    }
    return a;
}

Json perm_json(const Permutation& p) { return Json{{"one_line", p.one_line()}, {"cycles", p.cycle_string()}}; }

Json holonomy_json(const HolonomyElement& h) {
    Json inv = Json::array();
    for (const auto& c : cycle_invariants(h)) {
        std::vector<int> cyc;
        for (int k : c.cycle) cyc.push_back(k + 1);
        inv.push_back(Json{{"cycle", cyc}, {"factor", cplx(c.factor)}, {"phase", c.phase}});
    }
    return Json{{"z", cvec(h.z())}, {"sigma", perm_json(h.sigma())}, {"matrix", cmat(h.matrix())}, {"cycle_invariants", inv}};
}

const char* order_name(BandOrder o) {
    switch (o) {
        case BandOrder::Ascending: return "asc";
        case BandOrder::Descending: return "desc";
        case BandOrder::Solver: return "solver";
    }
    return "";
}

const char* frame_name(FrameChoice f) {
    switch (f) {
        case FrameChoice::Canonical: return "canonical";
        case FrameChoice::Solver: return "solver";
        case FrameChoice::Unit: return "unit";
    }
    return "";
}

Json options_json(const SceneOptions& o) {
    Json j{{"samples", o.samples},
           {"max_depth", o.max_depth},
           {"tol_gap", o.tol_gap},
           {"hbar", o.hbar},
           {"tphys", o.tphys ? Json(*o.tphys) : Json(nullptr)},
           {"gauge", o.gauge == Gauge::Unit ? "unit" : "raw"},
           {"order", order_name(o.order)},
           {"frame", frame_name(o.frame)},
           {"grid", o.grid},
           {"band", o.band + 1}};
    if (!o.frame_scale.empty()) {
        Json s = Json::array();
        for (const auto& z : o.frame_scale) s.push_back(cplx(z));
        j["frame_scale"] = s;
    }
    return j;
}

LiftOptions lift_options(const Scene& scene) {
    LiftOptions lo;
    lo.init_samples = scene.options.samples;
    lo.tol_gap = scene.options.tol_gap;
    lo.max_depth = scene.options.max_depth;
    return lo;
}

std::string number(double x) {
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
}

std::string band_csv(const SpectralFlow& flow) {
    std::ostringstream s;
    s << "t";
    for (int b = 1; b <= flow.dim(); ++b) s << ",re_" << b << ",im_" << b;
    s << "\n";
    for (int k = 0; k < flow.size(); ++k) {
        s << number(flow.times()[static_cast<std::size_t>(k)]);
        for (int b = 0; b < flow.dim(); ++b) {
            const Complex e = flow.energy(b, k);
            s << "," << number(e.real()) << "," << number(e.imag());
        }
        s << "\n";
    }
    return s.str();
}

std::string trajectory_csv(const TransportResult& r, bool normalize) {
    const int n = static_cast<int>(r.transported.cols());
    const int dim = static_cast<int>(r.transported.rows());
    std::ostringstream s;
    s << "t";
    for (int b = 1; b <= n; ++b) {
        for (int c = 1; c <= dim; ++c) s << ",re_" << b << "_" << c << ",im_" << b << "_" << c;
    }
    s << "\n";
    for (int k = 0; k < r.flow.size(); ++k) {
        s << number(r.flow.times()[static_cast<std::size_t>(k)]);
        for (int b = 0; b < n; ++b) {
            Eigen::VectorXcd v = r.trajectory[static_cast<std::size_t>(k)].col(b);
            if (normalize) v.normalize();
            for (int c = 0; c < dim; ++c) s << "," << number(v(c).real()) << "," << number(v(c).imag());
        }
        s << "\n";
    }
    return s.str();
}

const PathSpec& need_path(const Scene& scene, const std::string& name) {
    const PathSpec* p = scene.path(name);
    if (!p) throw SceneError("scene has no path named '" + name + "'");
    return *p;
}

Json flow_diagnostics(const SpectralFlow& flow) {
    return Json{{"samples", flow.size()}, {"min_gap", flow.min_gap()}, {"subdivision_depth", flow.depth_reached()}};
}

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

void cmd_trace(const Scene& scene, const std::string& name, CommandOutput& out) {
    const PathSpec& path = need_path(scene, name);
    const EigenSystem s0 = initial_frame(scene, path.start());
    const SpectralFlow flow = lift_path(scene.family, path, lift_options(scene), s0);
    Json bands = Json::array();
    for (int b = 0; b < flow.dim(); ++b) {
        bands.push_back(Json{{"band", b + 1},
                             {"start", cplx(flow.energy(b, 0))},
                             {"end", cplx(flow.energy(b, flow.size() - 1))}});
    }
    out.report["results"] = Json{{"is_loop", flow.is_loop()},
                                 {"spectrum_start", cvec(flow.systems().front().lambdas())},
                                 {"bands", bands}};
    out.report["diagnostics"] = flow_diagnostics(flow);
    out.csv = band_csv(flow);
}

void cmd_monodromy(const Scene& scene, const std::string& name, CommandOutput& out) {
    const PathSpec& path = need_path(scene, name);
    const EigenSystem s0 = initial_frame(scene, path.start());
    const SpectralFlow flow = lift_path(scene.family, path, lift_options(scene), s0);
    const Permutation sigma = monodromy(flow);
    out.report["results"] = Json{{"spectrum", cvec(s0.lambdas())}, {"sigma", perm_json(sigma)}};
    out.report["diagnostics"] = flow_diagnostics(flow);
    out.csv = band_csv(flow);
}

void cmd_transport(const Scene& scene, const std::string& name, CommandOutput& out) {
    const PathSpec& path = need_path(scene, name);
    const EigenSystem s0 = initial_frame(scene, path.start());
    const SpectralFlow flow = lift_path(scene.family, path, lift_options(scene), s0);
    const bool unit = scene.options.gauge == Gauge::Unit;
    const TransportResult r = transport_frame(scene.family, flow, s0, scene.options.gauge);

    Json res{{"is_loop", flow.is_loop()},
             {"spectrum", cvec(s0.lambdas())},
             {"initial_frame", frame_vectors(r.initial_frame.frame(), unit)},
             {"transported_frame", frame_vectors(r.transported, unit)},
             {"log_factors", cvec(r.log_factors)}};
    if (r.holonomy) {
        res["holonomy"] = holonomy_json(*r.holonomy);
        Json phases = Json::array();
        for (int b = 0; b < flow.dim(); ++b) {
            if (r.holonomy->sigma()(b) == b) {
                phases.push_back(Json{{"band", b + 1}, {"phase", cplx(geometric_phase(r, b))}});
            } else {
                phases.push_back(Json{{"band", b + 1}, {"phase", nullptr}});
            }
        }
        res["geometric_phases"] = phases;
    } else {
        const EigenSystem ref = initial_frame(scene, path.end());
        res["reference_frame"] = frame_vectors(ref.frame(), unit);
        res["frame_matrix"] = cmat(open_path_frame_matrix(r, ref));
    }
    if (scene.options.tphys) {
        const double tphys = *scene.options.tphys;
        Json dyn = Json::array();
        for (int b = 0; b < flow.dim(); ++b) dyn.push_back(cplx(dynamical_phase(flow, b, tphys, scene.options.hbar)));
        res["dynamical_phases"] = dyn;
        const TransportResult tot = total_transport(scene.family, flow, s0, tphys, scene.options.hbar, scene.options.gauge);
        Json total{{"transported_frame", frame_vectors(tot.transported, unit)}};
        if (tot.holonomy) {
            total["z"] = cvec(tot.holonomy->z());
            total["matrix"] = cmat(tot.holonomy->matrix());
        }
        res["total"] = total;
    }
    out.report["results"] = res;
    Json diag = flow_diagnostics(flow);
    diag["max_residual"] = r.max_residual;
    out.report["diagnostics"] = diag;
    out.csv = trajectory_csv(r, unit);
}

void cmd_qgt(const Scene& scene, const std::string& name, CommandOutput& out) {
    const int band = scene.options.band;
    if (const ParamPoint* x = scene.point(name)) {
        SpectralOptions so;
        so.tol_gap = scene.options.tol_gap;
        const TensorResult t = qgt(scene.family, *x, band, scene.options.order, so);
        out.report["results"] = Json{{"point", rvec(*x)}, {"band", band + 1}, {"G", cmat(t.G)}, {"M", cmat(t.M)}, {"K", cmat(t.K)}};
        return;
    }
    const SurfaceGrid* s = scene.surface(name);
    if (!s) throw SceneError("scene has no point or surface named '" + name + "'");
    std::ostringstream csv;
    csv << "u,v,max_abs_K\n";
    double worst = 0.0;
    int count = 0;
    for (int a = 0; a <= s->n; ++a) {
        for (int b = 0; b <= s->n; ++b) {
            const double u = s->u0 + (s->u1 - s->u0) * a / s->n;
            const double v = s->v0 + (s->v1 - s->v0) * b / s->n;
            const double k = flatness_check(scene.family, {s->at(u, v)}, band, scene.options.order);
            worst = std::max(worst, k);
            ++count;
            csv << number(u) << "," << number(v) << "," << number(k) << "\n";
        }
    }
    out.report["results"] = Json{{"surface", name}, {"band", band + 1}, {"points", count}, {"flatness_max", worst}};
    out.csv = csv.str();
}

void cmd_curvature_phase(const Scene& scene, const std::string& name, CommandOutput& out) {
    const SurfaceGrid* s = scene.surface(name);
    if (!s) throw SceneError("scene has no surface named '" + name + "'");
    const int band = scene.options.band;
    const CurvaturePhase cp = curvature_phase(scene.family, *s, band, scene.options.order);

    const PathSpec boundary = surface_boundary(*s);
    const EigenSystem s0 = initial_frame(scene, boundary.start());
    const SpectralFlow flow = lift_path(scene.family, boundary, lift_options(scene), s0);
    const TransportResult r = transport_frame(scene.family, flow, s0, scene.options.gauge);
    Json res{{"surface", name}, {"band", band + 1}, {"grid", s->n}, {"orientation", s->orientation},
             {"curvature_phase", cplx(cp.value)}};
    if (r.holonomy->sigma()(band) == band) {
        const Complex geo = geometric_phase(r, band);
        res["boundary_phase"] = cplx(geo);
        const Complex diff = cp.value - geo;
        res["difference"] = std::abs(Complex(wrap_angle(diff.real()), diff.imag()));
    } else {
        res["boundary_phase"] = nullptr;
        res["difference"] = nullptr;
    }
    out.report["results"] = res;
    Json diag = flow_diagnostics(flow);
    diag["surface_min_gap"] = cp.min_gap;
    diag["max_residual"] = r.max_residual;
    out.report["diagnostics"] = diag;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"trace", "monodromy", "transport", "qgt", "curvature-phase"};
    return names;
}

int exit_code_for(const Error& e) {
    switch (e.category()) {
        case ErrorCategory::Input: return 2;
        case ErrorCategory::Degeneracy: return 3;
        case ErrorCategory::Numerical: return 4;
    }
    return 4;
}

CommandOutput run_command(const std::string& command, const std::string& scene_location, const std::string& name,
                          const std::function<void(Scene&)>& overrides) {
    CommandOutput out;
    out.report = Json{{"command", command},
                      {"inputs", Json{{"scene", scene_location}, {"name", name}}},
                      {"results", nullptr},
                      {"diagnostics", Json::object()},
                      {"status", "ok"}};
    auto failed = [&](const std::string& kind, const std::string& message, int code) {
        out.report["results"] = nullptr;
        out.report["status"] = Json{{"error", kind}, {"message", message}};
        out.csv.clear();
        out.exit_code = code;
    };
    try {
        Scene scene = load_scene(scene_location);
        if (overrides) overrides(scene);
        out.report["inputs"]["family"] = scene.family.to_source();
        if (scene.preset) out.report["inputs"]["preset"] = *scene.preset;
        out.report["inputs"]["options"] = options_json(scene.options);

        if (command == "trace") cmd_trace(scene, name, out);
        else if (command == "monodromy") cmd_monodromy(scene, name, out);
        else if (command == "transport") cmd_transport(scene, name, out);
        else if (command == "qgt") cmd_qgt(scene, name, out);
        else if (command == "curvature-phase") cmd_curvature_phase(scene, name, out);
        else throw SceneError("unknown command '" + command + "'");
    } catch (const Error& e) {
        failed(e.kind(), e.what(), exit_code_for(e));
    } catch (const std::invalid_argument& e) {
        failed("InvalidArgument", e.what(), 2);
    } catch (const std::exception& e) {
        failed("InternalError", e.what(), 4);
    }
    return out;
}

}  // namespace eigenflow
