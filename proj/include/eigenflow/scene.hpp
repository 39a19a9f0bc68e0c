// Scene files: a family, run options and named paths, points and surfaces.
//
//   [family]            either `preset = NAME` or family source text
//   [options]           key = value lines
//   [path NAME]         ordered `polyline = (..) (..)` / `parametric = ..` lines, `loop = true`
//   [point NAME]        at = x1, x2, ...
//   [surface NAME]      map = ..., grid = N, orientation = 1|-1, u = a, b, v = a, b
//
// `#` starts a comment. Path and surface expressions may use the constant pi.

#pragma once

#include "eigenflow/expr.hpp"
#include "eigenflow/flow.hpp"
#include "eigenflow/spectra.hpp"
#include "eigenflow/tensor.hpp"
#include "eigenflow/transport.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace eigenflow {

enum class FrameChoice { Canonical, Solver, Unit };

struct SceneOptions {
    int samples = 512;
    int max_depth = 40;
    double tol_gap = 1e-8;
    double hbar = 1.0;
    std::optional<double> tphys;
    Gauge gauge = Gauge::Raw;
    BandOrder order = BandOrder::Descending;
    FrameChoice frame = FrameChoice::Canonical;
    std::vector<Complex> frame_scale;  // empty: no rescaling
    int grid = 64;
    int band = 0;  // 0-based
};

struct Scene {
    std::string family_source;
    std::optional<std::string> preset;
    FamilySpec family;
    SceneOptions options;
    std::vector<std::pair<std::string, PathSpec>> paths;
    std::vector<std::pair<std::string, bool>> declared_loops;
    std::vector<std::pair<std::string, ParamPoint>> points;
    std::vector<std::pair<std::string, SurfaceGrid>> surfaces;

    const PathSpec* path(std::string_view name) const;
    const ParamPoint* point(std::string_view name) const;
    const SurfaceGrid* surface(std::string_view name) const;
};

Scene parse_scene(std::string_view text);

// `preset:NAME` loads a built-in scene, anything else is a file path.
Scene load_scene(const std::string& location);

// Basepoint frame used by the commands: ordered, gauged and scaled per options.
EigenSystem initial_frame(const Scene& scene, const ParamPoint& x);

// Boundary loop of a surface, counter-clockwise in (u, v) for orientation +1,
// starting at (u0, v0).
PathSpec surface_boundary(const SurfaceGrid& surface);

}  // namespace eigenflow
