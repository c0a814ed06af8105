// Command-line front end: single cases, convergence studies, named presets
// and mesh export.

#include "zzsfem/harness.hpp"
#include "zzsfem/mesh_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace zzsfem;

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2 };

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("-c,--config", c.config_path, "INI configuration file");
    cmd->add_option("-s,--set", c.overrides, "Override a key, e.g. --set recovery.variant=SPR")->take_all();
}

StudyConfig resolve(const Common& c)
{
    KeyValues overrides;
    for (const std::string& o : c.overrides)
        overrides.push_back(parse_override(o));
    if (c.config_path.empty())
        return build_config(overrides);
    return load_config(c.config_path, overrides);
}

ReportFormat parse_format(const std::string& f)
{
    if (f == "csv")
        return ReportFormat::Csv;
    if (f == "json")
        return ReportFormat::Json;
    if (f == "both")
        return ReportFormat::Both;
    throw ConfigError("--format must be csv, json or both");
}

void print_levels(const StudyReport& r)
{
    std::printf("%-28s %5s %8s %12s %12s %12s %8s %8s %8s\n", r.config.name.c_str(), "level", "dof", "exact",
                "estimated", "recovered", "theta", "mD", "sigmaD");
    for (const LevelReport& l : r.levels) {
        const ErrorReport& e = l.errors;
        std::printf("%-28s %5d %8d %12.5e %12.5e %12.5e %8.4f %8.4f %8.4f\n", "", l.level, e.dofs, e.exact,
                    e.estimated, e.recovered, e.theta, e.mean_abs_d, e.sigma_d);
    }
    for (const char* q : {"exact", "estimated", "recovered"}) {
        const auto it = r.rates.find(q);
        if (it != r.rates.end())
            std::printf("%-28s rate(%s) fitted %.4f average %.4f\n", "", q, it->second.fitted, it->second.average);
    }
}

int finish(const StudyReport& r, const std::string& output, ReportFormat format)
{
    print_levels(r);
    for (const std::string& path : emit_report(r, output, format))
        std::printf("wrote %s\n", path.c_str());
    if (!r.complete) {
        std::fprintf(stderr, "study aborted: %s\n", r.failure.c_str());
        return kNumerical;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Smoothed FEM / FEM elasticity with SPR-family recovery and ZZ error estimation"};
    app.require_subcommand(1);

    Common run_opts, study_opts, preset_opts, mesh_opts;
    int run_level = 1;
    int mesh_level = 1;
    std::string output, format = "both", mesh_file, preset_name;

    CLI::App* run = app.add_subcommand("run", "Solve, recover and measure one mesh level");
    add_common(run, run_opts);
    run->add_option("-l,--level", run_level, "Mesh level")->required();
    run->add_option("-o,--output", output, "Output directory (default: study.output)");
    run->add_option("-f,--format", format, "csv, json or both");

    CLI::App* study = app.add_subcommand("study", "Run a convergence study over study.levels");
    add_common(study, study_opts);
    study->add_option("-o,--output", output, "Output directory (default: study.output)");
    study->add_option("-f,--format", format, "csv, json or both");

    CLI::App* pre = app.add_subcommand("preset", "Run a named experiment preset");
    pre->add_option("name", preset_name, "cylinder-subcells, cylinder-variants, cylinder-poly-order or lshape-variants")
        ->required();
    pre->add_option("-s,--set", preset_opts.overrides, "Override a key in every study of the preset")->take_all();
    pre->add_option("-o,--output", output, "Output directory (default: results/<preset>)");
    pre->add_option("-f,--format", format, "csv, json or both");

    CLI::App* mesh = app.add_subcommand("export-mesh", "Write the mesh of a level in the text mesh format");
    add_common(mesh, mesh_opts);
    mesh->add_option("-l,--level", mesh_level, "Mesh level")->required();
    mesh->add_option("-o,--output", mesh_file, "Output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        const ReportFormat fmt = parse_format(format);
        if (*run) {
            StudyConfig c = resolve(run_opts);
            StudyReport r;
            r.config = c;
            r.config.levels = {run_level};
            r.version = version_string();
            r.levels.push_back(run_case(c, run_level));
            return finish(r, output.empty() ? c.output : output, fmt);
        }
        if (*study) {
            const StudyConfig c = resolve(study_opts);
            return finish(run_convergence_study(c), output.empty() ? c.output : output, fmt);
        }
        if (*pre) {
            KeyValues overrides;
            for (const std::string& o : preset_opts.overrides)
                overrides.push_back(parse_override(o));
            const std::string dir = output.empty() ? "results/" + preset_name : output;
            int status = kOk;
            for (const StudyConfig& base : preset(preset_name)) {
                KeyValues kv = to_key_values(base);
                kv.insert(kv.end(), overrides.begin(), overrides.end());
                const int s = finish(run_convergence_study(build_config(kv)), dir, fmt);
                status = std::max(status, s);
            }
            return status;
        }
        if (*mesh) {
            const StudyConfig c = resolve(mesh_opts);
            const BenchmarkProblem p = make_benchmark(c, mesh_level);
            if (mesh_file.empty()) {
                write_mesh(std::cout, *p.mesh);
            } else {
                std::ofstream out(mesh_file);
                if (!out)
                    throw ConfigError("cannot write '" + mesh_file + "'");
                write_mesh(out, *p.mesh);
            }
            return kOk;
        }
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfig;
    }
    return kOk;
}
