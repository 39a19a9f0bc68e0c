#include "eigenflow/presets.hpp"

#include <array>
#include <utility>

namespace eigenflow {

namespace {

struct Preset {
    const char* name;
    const char* family;
    const char* scene;
};

constexpr const char* kEp2Loop = R"(
# around the exceptional point at +i, counter-clockwise, basepoint 0
[path loop]
polyline = (0, 0) (0, 0.5)
parametric = 0.5*cos(2*pi*t - pi/2), 1 + 0.5*sin(2*pi*t - pi/2)
polyline = (0, 0.5) (0, 0)
loop = true

[path double]
polyline = (0, 0) (0, 0.5)
parametric = 0.5*cos(4*pi*t - pi/2), 1 + 0.5*sin(4*pi*t - pi/2)
polyline = (0, 0.5) (0, 0)
loop = true

[path contractible]
parametric = 0.3 - 0.3*cos(2*pi*t), 0.3*sin(2*pi*t)
loop = true

[path through_ep]
polyline = (0, 0) (0, 2)
)";

const std::array<Preset, 5> kPresets = {{
    {"ep2", "params re, im; H = [[1, re + i*im], [re + i*im, -1]]",
     R"([family]
preset = ep2

[options]
samples = 512
order = desc
)"},
    {"ep2_plus_level", "params re, im; H = [[1, re + i*im, 0], [re + i*im, -1, 0], [0, 0, 0]]",
     R"([family]
preset = ep2_plus_level

[options]
samples = 512
order = desc
)"},
    {"dp", "params a, b; H = [[a, b], [b, -a]]",
     R"([family]
preset = dp

[options]
samples = 512
order = desc

[path circle]
parametric = cos(2*pi*t), sin(2*pi*t)
loop = true

[point east]
at = 1, 0

[surface annulus]
map = (1 + u)*cos(2*pi*v), (1 + u)*sin(2*pi*v)
grid = 32
)"},
    {"spin", "params x, y, z; H = [[z, x - i*y], [x + i*y, -z]]",
     R"([family]
preset = spin

[options]
samples = 4096
order = asc
band = 1
grid = 64

[path equator]
parametric = cos(2*pi*t), sin(2*pi*t), 0
loop = true

[point north]
at = 0, 0, 1

[surface hemisphere]
map = sin(u*pi/2)*cos(2*pi*v), sin(u*pi/2)*sin(2*pi*v), cos(u*pi/2)

[surface cap60]
map = sin(u*pi/3)*cos(2*pi*v), sin(u*pi/3)*sin(2*pi*v), cos(u*pi/3)
)"},
    {"constant", "params a, b; H = [[1, 0], [0, -1]]",
     R"([family]
preset = constant

[options]
samples = 64
order = desc

[path circle]
parametric = cos(2*pi*t), sin(2*pi*t)
loop = true

[point origin]
at = 0, 0

[surface square]
map = u, v
grid = 8
)"},
}};

}  // namespace

std::optional<std::string> preset_family(std::string_view name) {
    for (const auto& p : kPresets) {
        if (name == p.name) return std::string(p.family);
    }
    return std::nullopt;
}

std::optional<std::string> preset_scene(std::string_view name) {
    for (const auto& p : kPresets) {
        if (name != p.name) continue;
        std::string s = p.scene;
        if (name == "ep2" || name == "ep2_plus_level") {
            s += kEp2Loop;
            s += R"(
[point p]
at = 0.3, 0.2

[surface patch]
map = 0.5 + 0.5*u, 0.2*v
grid = 16

# encloses the exceptional point at +i
[surface enclosing]
map = -0.5 + u, 0.5 + v
grid = 15
)";
        }
        return s;
    }
    return std::nullopt;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& p : kPresets) out.emplace_back(p.name);
    return out;
}

}  // namespace eigenflow
