// eigenflow <command> --scene FILE --name NAME [options]

#include "eigenflow/commands.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

namespace {

bool write_atomically(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) return false;
        f << content;
        if (!f) return false;
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    return !ec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eigenvalue braiding, eigenframe holonomy and geometric phases of non-Hermitian families"};
    app.require_subcommand(1);

    std::string scene;
    std::string name;
    std::string json_out;
    std::string csv_out;
    std::optional<int> samples;
    std::optional<double> hbar;
    std::optional<double> tphys;
    std::optional<std::string> gauge;
    std::optional<int> band;

    const std::map<std::string, std::string> about{
        {"trace", "follow every band along a path"},
        {"monodromy", "permutation of the bands around a loop"},
        {"transport", "transported eigenframe, holonomy and phases along a path"},
        {"qgt", "geometric tensor at a point, or flatness over a surface"},
        {"curvature-phase", "curvature integral over a surface against its boundary phase"},
    };
    for (const auto& cmd : eigenflow::command_names()) {
        const auto it = about.find(cmd);
        CLI::App* sub = app.add_subcommand(cmd, it == about.end() ? "" : it->second);
        sub->add_option("--scene", scene, "scene file, or preset:NAME")->required();
        sub->add_option("--name", name, "path, point or surface in the scene")->required();
        sub->add_option("--json", json_out, "write the JSON report here (default: stdout)");
        sub->add_option("--csv", csv_out, "write CSV plot data here");
        sub->add_option("--samples", samples, "initial samples per path")->check(CLI::Range(2, 1 << 24));
        sub->add_option("--hbar", hbar, "reduced Planck constant")->check(CLI::PositiveNumber);
        sub->add_option("--tphys", tphys, "physical duration of the path");
        sub->add_option("--gauge", gauge, "raw or unit")->check(CLI::IsMember({"raw", "unit"}));
        sub->add_option("--band", band, "band (1-based slot in the basepoint ordering)")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    const auto overrides = [&](eigenflow::Scene& s) {
        if (samples) s.options.samples = *samples;
        if (hbar) s.options.hbar = *hbar;
        if (tphys) s.options.tphys = *tphys;
        if (gauge) s.options.gauge = *gauge == "unit" ? eigenflow::Gauge::Unit : eigenflow::Gauge::Raw;
        if (band) {
            if (*band > s.family.dim()) throw eigenflow::SceneError("--band out of range");
            s.options.band = *band - 1;
        }
    };
    const eigenflow::CommandOutput out = eigenflow::run_command(command, scene, name, overrides);

    const std::string report = out.report.dump(2) + "\n";
    if (json_out.empty()) {
        std::cout << report;
    } else if (!write_atomically(json_out, report)) {
        std::cerr << "eigenflow: cannot write " << json_out << "\n";
        return 2;
    }
    if (!csv_out.empty() && !out.csv.empty() && !write_atomically(csv_out, out.csv)) {
        std::cerr << "eigenflow: cannot write " << csv_out << "\n";
        return 2;
    }
    if (out.exit_code != 0) {
        const auto& st = out.report["status"];
        std::cerr << "eigenflow: " << st["error"].get<std::string>() << ": " << st["message"].get<std::string>() << "\n";
    }
    return out.exit_code;
}
