#include "eigenflow/scene.hpp"

#include "eigenflow/presets.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numbers>
#include <sstream>

namespace eigenflow {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void fail(int line, const std::string& msg) { throw SceneError("line " + std::to_string(line) + ": " + msg); }

expr::SymbolTable constants_only() { return {{}, {{"pi", std::numbers::pi}}}; }
expr::SymbolTable path_symbols() { return {{"t"}, {{"pi", std::numbers::pi}}}; }

Complex complex_value(const expr::Node& node) { return expr::evaluate(node, {}); }

double real_value(std::string_view text, int line) {
    const Complex c = complex_value(*expr::parse(text, constants_only()));
    if (!std::isfinite(c.real()) || c.imag() != 0.0) fail(line, "expected a real number, got '" + std::string(text) + "'");
    return c.real();
}

std::vector<double> real_list(std::string_view text, int line) {
    std::vector<double> out;
    for (const auto& n : expr::parse_list(text, constants_only())) {
        const Complex c = complex_value(*n);
        if (!std::isfinite(c.real()) || c.imag() != 0.0) fail(line, "expected real numbers in '" + std::string(text) + "'");
        out.push_back(c.real());
    }
    return out;
}

int int_value(std::string_view text, int line) {
    const std::string t = trim(text);
    int v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) fail(line, "expected an integer, got '" + t + "'");
    return v;
}

bool bool_value(std::string_view text, int line) {
    const std::string t = lower(trim(text));
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    fail(line, "expected true or false, got '" + t + "'");
}

ParamPoint to_point(const std::vector<double>& v) {
    ParamPoint x(static_cast<Eigen::Index>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k) x(static_cast<Eigen::Index>(k)) = v[k];
    return x;
}

// "(a, b) (c, d)" -> tuples, parentheses inside tuples allowed
std::vector<ParamPoint> tuples(std::string_view text, int line) {
    std::vector<ParamPoint> out;
    std::size_t k = 0;
    while (k < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[k]))) {
            ++k;
            continue;
        }
        if (text[k] != '(') fail(line, "expected '(' in point list");
        int depth = 0;
        std::size_t end = k;
        for (; end < text.size(); ++end) {
            if (text[end] == '(') ++depth;
            if (text[end] == ')' && --depth == 0) break;
        }
        if (end >= text.size()) fail(line, "unbalanced parentheses in point list");
        out.push_back(to_point(real_list(text.substr(k + 1, end - k - 1), line)));
        k = end + 1;
    }
    return out;
}

struct Section {
    std::string kind;
    std::string name;
    int line = 0;
    std::vector<std::pair<int, std::string>> body;  // (line, text)
};

std::pair<std::string, std::string> key_value(const std::string& text, int line) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = lower(trim(text.substr(0, eq)));
    if (key.empty()) fail(line, "missing key");
    return {key, trim(text.substr(eq + 1))};
}

template <typename T>
const T* find_named(const std::vector<std::pair<std::string, T>>& v, std::string_view name) {
    for (const auto& [n, value] : v) {
        if (n == name) return &value;
    }
    return nullptr;
}

}  // namespace

const PathSpec* Scene::path(std::string_view name) const { return find_named(paths, name); }
const ParamPoint* Scene::point(std::string_view name) const { return find_named(points, name); }
const SurfaceGrid* Scene::surface(std::string_view name) const { return find_named(surfaces, name); }

Scene parse_scene(std::string_view text) {
    std::vector<Section> sections;
    {
        std::istringstream in{std::string(text)};
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            const auto hash = raw.find('#');
            const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (content.empty()) continue;
            if (content.front() == '[') {
                if (content.back() != ']') fail(line, "malformed section header");
                std::istringstream h(content.substr(1, content.size() - 2));
                Section s;
                s.line = line;
                h >> s.kind >> s.name;
                std::string extra;
                if (h >> extra) fail(line, "section header has too many words");
                s.kind = lower(s.kind);
                sections.push_back(std::move(s));
                continue;
            }
            if (sections.empty()) fail(line, "text before the first section");
            sections.back().body.emplace_back(line, content);
        }
    }

    std::optional<std::string> family_text;
    std::optional<std::string> preset;
    int family_line = 0;
    SceneOptions opts;
    bool have_options = false;
    for (const auto& s : sections) {
        if (s.kind == "family") {
            if (family_text || preset) fail(s.line, "duplicate [family] section");
            if (!s.name.empty()) fail(s.line, "[family] takes no name");
            if (s.body.empty()) fail(s.line, "empty [family] section");
            const std::string& first = s.body.front().second;
            const auto eq = first.find('=');
            if (eq != std::string::npos && lower(trim(first.substr(0, eq))) == "preset") {
                if (s.body.size() != 1) fail(s.body[1].first, "a preset family takes no further lines");
                preset = trim(first.substr(eq + 1));
                family_text = preset_family(*preset);
                if (!family_text) fail(s.body.front().first, "unknown preset '" + *preset + "'");
            } else {
                std::string src;
                for (const auto& [ln, t] : s.body) src += t + "\n";
                family_text = src;
                family_line = s.body.front().first;
            }
        } else if (s.kind == "options") {
            if (have_options) fail(s.line, "duplicate [options] section");
            have_options = true;
            for (const auto& [ln, t] : s.body) {
                const auto [key, value] = key_value(t, ln);
                if (key == "samples") opts.samples = int_value(value, ln);
                else if (key == "max_depth") opts.max_depth = int_value(value, ln);
                else if (key == "tol_gap") opts.tol_gap = real_value(value, ln);
                else if (key == "hbar") opts.hbar = real_value(value, ln);
                else if (key == "tphys") opts.tphys = real_value(value, ln);
                else if (key == "grid") opts.grid = int_value(value, ln);
                else if (key == "band") opts.band = int_value(value, ln) - 1;
                else if (key == "gauge") {
                    const std::string v = lower(value);
                    if (v == "raw") opts.gauge = Gauge::Raw;
                    else if (v == "unit") opts.gauge = Gauge::Unit;
                    else fail(ln, "gauge must be raw or unit");
                } else if (key == "order") {
                    const std::string v = lower(value);
                    if (v == "asc") opts.order = BandOrder::Ascending;
                    else if (v == "desc") opts.order = BandOrder::Descending;
                    else if (v == "solver") opts.order = BandOrder::Solver;
                    else fail(ln, "order must be asc, desc or solver");
                } else if (key == "frame") {
                    const std::string v = lower(value);
                    if (v == "canonical") opts.frame = FrameChoice::Canonical;
                    else if (v == "solver") opts.frame = FrameChoice::Solver;
                    else if (v == "unit") opts.frame = FrameChoice::Unit;
                    else fail(ln, "frame must be canonical, solver or unit");
                } else if (key == "frame_scale") {
                    opts.frame_scale.clear();
                    for (const auto& n : expr::parse_list(value, constants_only())) opts.frame_scale.push_back(complex_value(*n));
                } else {
                    fail(ln, "unknown option '" + key + "'");
                }
            }
        } else if (s.kind != "path" && s.kind != "point" && s.kind != "surface") {
            fail(s.line, "unknown section [" + s.kind + "]");
        }
    }
    if (!family_text) throw SceneError("scene has no [family] section");
    if (opts.samples < 2) throw SceneError("samples must be at least 2");
    if (opts.max_depth < 0) throw SceneError("max_depth must be non-negative");
    if (opts.grid < 1) throw SceneError("grid must be positive");
    if (!(opts.hbar > 0.0)) throw SceneError("hbar must be positive");
    if (!(opts.tol_gap > 0.0)) throw SceneError("tol_gap must be positive");

    FamilySpec family = [&] {
        try {
            return parse_family(*family_text);
        } catch (const SyntaxError& e) {
            if (preset) throw;
            const std::string msg = e.what();
            const auto colon = msg.find(": ");
            throw SyntaxError(colon == std::string::npos ? msg : msg.substr(colon + 2), e.offset(),
                              e.line() + family_line - 1, e.column());
        }
    }();
    if (opts.band < 0 || opts.band >= family.dim()) throw SceneError("band option out of range");
    if (!opts.frame_scale.empty() && static_cast<int>(opts.frame_scale.size()) != family.dim()) {
        throw DimensionError("frame_scale needs one factor per level");
    }

    Scene scene{*family_text, preset, std::move(family), opts, {}, {}, {}, {}};
    const int d = scene.family.num_params();
    std::vector<std::string> names;
    for (const auto& s : sections) {
        if (s.kind != "path" && s.kind != "point" && s.kind != "surface") continue;
        if (s.name.empty()) fail(s.line, "[" + s.kind + "] needs a name");
        if (std::find(names.begin(), names.end(), s.name) != names.end()) fail(s.line, "duplicate name '" + s.name + "'");
        names.push_back(s.name);

        if (s.kind == "path") {
            std::vector<PathSpec::Segment> segs;
            bool loop = false;
            int loop_line = s.line;
            for (const auto& [ln, t] : s.body) {
                const auto [key, value] = key_value(t, ln);
                if (key == "polyline") {
                    PathSpec::Segment seg;
                    seg.kind = PathSpec::Segment::Kind::Polyline;
                    seg.vertices = tuples(value, ln);
                    for (const auto& v : seg.vertices) {
                        if (v.size() != d) throw DimensionError("line " + std::to_string(ln) + ": point has " + std::to_string(v.size()) + " coordinates, family has " + std::to_string(d) + " parameters");
                    }
                    if (seg.vertices.size() < 2) fail(ln, "polyline needs at least two points");
                    segs.push_back(std::move(seg));
                } else if (key == "parametric") {
                    PathSpec::Segment seg;
                    seg.kind = PathSpec::Segment::Kind::Parametric;
                    seg.coords = expr::parse_list(value, path_symbols());
                    if (static_cast<int>(seg.coords.size()) != d) throw DimensionError("line " + std::to_string(ln) + ": parametric path has " + std::to_string(seg.coords.size()) + " coordinates, family has " + std::to_string(d) + " parameters");
                    seg.base = Eigen::VectorXd::Zero(1);
                    seg.dir = Eigen::VectorXd::Ones(1);
                    segs.push_back(std::move(seg));
                } else if (key == "loop") {
                    loop = bool_value(value, ln);
                    loop_line = ln;
                } else {
                    fail(ln, "unknown path key '" + key + "'");
                }
            }
            if (segs.empty()) fail(s.line, "path '" + s.name + "' has no segments");
            PathSpec p = [&] {
                try {
                    return PathSpec::from_segments(std::move(segs));
                } catch (const DimensionError& e) {
                    throw DimensionError("line " + std::to_string(s.line) + ": " + e.what());
                }
            }();
            if (loop && !p.is_loop()) {
                throw NotALoop("line " + std::to_string(loop_line) + ": path '" + s.name +
                               "' is declared as a loop but its endpoints differ");
            }
            scene.paths.emplace_back(s.name, std::move(p));
            scene.declared_loops.emplace_back(s.name, loop);
        } else if (s.kind == "point") {
            std::optional<ParamPoint> at;
            for (const auto& [ln, t] : s.body) {
                const auto [key, value] = key_value(t, ln);
                if (key != "at") fail(ln, "unknown point key '" + key + "'");
                at = to_point(real_list(value, ln));
                if (at->size() != d) throw DimensionError("line " + std::to_string(ln) + ": point has " + std::to_string(at->size()) + " coordinates, family has " + std::to_string(d) + " parameters");
            }
            if (!at) fail(s.line, "point '" + s.name + "' has no 'at'");
            scene.points.emplace_back(s.name, *at);
        } else {
            SurfaceGrid g;
            g.n = opts.grid;
            for (const auto& [ln, t] : s.body) {
                const auto [key, value] = key_value(t, ln);
                if (key == "map") {
                    g.map = expr::parse_list(value, surface_symbols());
                    if (g.dim() != d) throw DimensionError("line " + std::to_string(ln) + ": surface map has " + std::to_string(g.dim()) + " coordinates, family has " + std::to_string(d) + " parameters");
                } else if (key == "grid") {
                    g.n = int_value(value, ln);
                    if (g.n < 1) fail(ln, "grid must be positive");
                } else if (key == "orientation") {
                    g.orientation = int_value(value, ln);
                    if (g.orientation != 1 && g.orientation != -1) fail(ln, "orientation must be 1 or -1");
                } else if (key == "u" || key == "v") {
                    const auto r = real_list(value, ln);
                    if (r.size() != 2 || !(r[1] > r[0])) fail(ln, "range must be 'a, b' with a < b");
                    (key == "u" ? g.u0 : g.v0) = r[0];
                    (key == "u" ? g.u1 : g.v1) = r[1];
                } else {
                    fail(ln, "unknown surface key '" + key + "'");
                }
            }
            if (g.map.empty()) fail(s.line, "surface '" + s.name + "' has no map");
            scene.surfaces.emplace_back(s.name, std::move(g));
        }
    }
    return scene;
}

Scene load_scene(const std::string& location) {
    constexpr std::string_view prefix = "preset:";
    if (location.rfind(prefix, 0) == 0) {
        const std::string name = location.substr(prefix.size());
        const auto text = preset_scene(name);
        if (!text) throw SceneError("unknown preset scene '" + name + "'");
        return parse_scene(*text);
    }
    std::ifstream in(location);
    if (!in) throw SceneError("cannot read scene file '" + location + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scene(buf.str());
}

EigenSystem initial_frame(const Scene& scene, const ParamPoint& x) {
    SpectralOptions so;
    so.tol_gap = scene.options.tol_gap;
    EigenSystem sys = order_bands(decompose(scene.family.eval(x), so), scene.options.order);
    switch (scene.options.frame) {
        case FrameChoice::Canonical: sys = canonical_gauge(sys); break;
        case FrameChoice::Unit: sys = unit_gauge(sys); break;
        case FrameChoice::Solver: break;
    }
    if (!scene.options.frame_scale.empty()) {
        Eigen::VectorXcd s(sys.dim());
        for (int k = 0; k < sys.dim(); ++k) s(k) = scene.options.frame_scale[static_cast<std::size_t>(k)];
        sys = sys.rescaled(s);
    }
    return sys;
}

PathSpec surface_boundary(const SurfaceGrid& surface) {
    const double du = surface.u1 - surface.u0;
    const double dv = surface.v1 - surface.v0;
    const double base[4][2] = {{surface.u0, surface.v0}, {surface.u1, surface.v0}, {surface.u1, surface.v1}, {surface.u0, surface.v1}};
    const double dir[4][2] = {{du, 0.0}, {0.0, dv}, {-du, 0.0}, {0.0, -dv}};
    std::vector<PathSpec::Segment> segs;
    for (int k = 0; k < 4; ++k) {
        PathSpec::Segment s;
        s.kind = PathSpec::Segment::Kind::Parametric;
        s.coords = surface.map;
        s.base = Eigen::Vector2d(base[k][0], base[k][1]);
        s.dir = Eigen::Vector2d(dir[k][0], dir[k][1]);
        segs.push_back(std::move(s));
    }
    PathSpec p = PathSpec::from_segments(std::move(segs));
    return surface.orientation == 1 ? p : p.reversed();
}

}  // namespace eigenflow
