#include "zzsfem/harness.hpp"

#include "zzsfem/gsif.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#ifndef ZZSFEM_VERSION
#define ZZSFEM_VERSION "unknown"
#endif

namespace zzsfem {

std::string version_string()
{
    return ZZSFEM_VERSION;
}

Vec2 patch_displacement(const Vec2& x)
{
    return 1e-3 * Vec2(1.0 + 2.0 * x.x() + 3.0 * x.y(), -1.0 + 0.5 * x.x() - x.y());
}

namespace {

Vec2 traction_of(const Stress& s, const Vec2& n)
{
    return {s(0) * n.x() + s(2) * n.y(), s(2) * n.x() + s(1) * n.y()};
}

BenchmarkProblem cylinder_benchmark(const StudyConfig& c, int level)
{
    CylinderProblem cyl;
    cyl.inner_radius = c.inner_radius;
    cyl.outer_radius = c.outer_radius;
    cyl.pressure = c.pressure;
    cyl.material = c.material;

    BenchmarkProblem p;
    p.mesh = std::make_shared<const Mesh>(build_cylinder_mesh(c.inner_radius, c.outer_radius, level));
    p.material = c.material;
    auto bcs = std::make_shared<BoundaryConditions>();
    const double pressure = c.pressure;
    bcs->tractions[cylinder_tags::kInnerPressure.id] = [pressure](const Vec2&, const Vec2& n) -> Vec2 {
        return -pressure * n;
    };
    bcs->tractions[cylinder_tags::kOuterFree.id] = [](const Vec2&, const Vec2&) { return Vec2(0, 0); };
    bcs->dirichlet[cylinder_tags::kSymmetryX.id] = {false, true, {}};
    bcs->dirichlet[cylinder_tags::kSymmetryY.id] = {true, false, {}};
    p.bcs = bcs;
    p.exact_stress = [cyl](const Vec2& x) { return cylinder_stress(cyl, x.x(), x.y()).cartesian; };
    p.exact_displacement = [cyl](const Vec2& x) { return cylinder_displacement(cyl, x.x(), x.y()); };
    return p;
}

BenchmarkProblem lshape_benchmark(const StudyConfig& c, int level)
{
    BenchmarkProblem p;
    p.mesh = std::make_shared<const Mesh>(
        build_lshape_mesh(level, c.grading, LShapeOptions{c.half_size, c.base_divisions}));
    p.material = c.material;
    const SingularSolution sing = SingularSolution::make(1.5 * std::numbers::pi, c.k_I, c.k_II, c.material);
    p.singular = sing;
    p.singular_point = Vec2::Zero();

    auto bcs = std::make_shared<BoundaryConditions>();
    bcs->tractions[lshape_tags::kOuterTraction.id] = [sing](const Vec2& x, const Vec2& n) {
        return traction_of(williams_stress(sing, x), n);
    };
    bcs->tractions[lshape_tags::kNotchFace.id] = [](const Vec2&, const Vec2&) { return Vec2(0, 0); };

    // Pure traction problem: remove the rigid modes by pinning three dofs to
    // the exact displacement at the two domain corners farthest from the notch
    // (tip of the bisector and the lowest node).
    const Mesh& m = *p.mesh;
    int a = 0, b = 0;
    for (int i = 1; i < m.num_nodes(); ++i) {
        if (m.node(i).x() > m.node(a).x())
            a = i;
        if (m.node(i).y() < m.node(b).y())
            b = i;
    }
    const Vec2 ua = williams_displacement(sing, m.node(a));
    const Vec2 ub = williams_displacement(sing, m.node(b));
    bcs->point_constraints = {{a, 0, ua.x()}, {a, 1, ua.y()}, {b, 0, ub.x()}};
    p.bcs = bcs;
    p.exact_stress = [sing](const Vec2& x) { return williams_stress(sing, x); };
    // r^lambda -> 0 at the corner.
    p.exact_displacement = [sing](const Vec2& x) { return x.norm() > 0 ? williams_displacement(sing, x) : Vec2(0, 0); };
    return p;
}

BenchmarkProblem patch_benchmark(const StudyConfig& c, int level)
{
    BenchmarkProblem p;
    p.mesh = std::make_shared<const Mesh>(build_distorted_square_mesh(c.patch_divisions << level));
    p.material = c.material;
    // Constant strain of the linear field.
    const Strain eps(2e-3, -1e-3, 3e-3 + 0.5e-3);
    const Stress sigma = elasticity_matrix(c.material) * eps;
    auto bcs = std::make_shared<BoundaryConditions>();
    bcs->dirichlet[patch_tags::kFixed.id] = {true, true, patch_displacement};
    bcs->tractions[patch_tags::kLoaded.id] = [sigma](const Vec2&, const Vec2& n) { return traction_of(sigma, n); };
    p.bcs = bcs;
    p.exact_stress = [sigma](const Vec2&) { return sigma; };
    p.exact_displacement = patch_displacement;
    return p;
}

std::string number(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

template <class E>
[[noreturn]] void rethrow_with(const std::string& context, const E& e)
{
    throw E(context + e.what());
}

} // namespace

BenchmarkProblem make_benchmark(const StudyConfig& config, int level)
{
    switch (config.benchmark) {
    case Benchmark::Cylinder:
        return cylinder_benchmark(config, level);
    case Benchmark::LShape:
        return lshape_benchmark(config, level);
    case Benchmark::Patch:
        return patch_benchmark(config, level);
    }
    throw ConfigError("unknown benchmark");
}

RecoveryConfig recovery_config(const StudyConfig& config, const BenchmarkProblem& problem)
{
    RecoveryConfig rc;
    rc.variant = config.variant;
    rc.interior_degree = config.interior_degree;
    rc.boundary_degree = config.boundary_degree;
    rc.splitting_radius = config.splitting_radius;
    rc.gsif_mode = config.gsif_mode;
    rc.singular = problem.singular;
    rc.singular_point = problem.singular_point;
    rc.plateau.inner = config.plateau_inner;
    rc.plateau.outer = config.plateau_outer;
    rc.plateau.center = problem.singular_point;
    return rc;
}

LevelReport run_case(const StudyConfig& config, int level)
{
    const std::string context = "level " + std::to_string(level) + ", " + to_string(config.variant) + ": ";
    try {
        validate(config);
        const BenchmarkProblem problem = make_benchmark(config, level);
        const DiscreteSolution solution =
            assemble_and_solve(problem.mesh, problem.material, config.formulation, problem.bcs);
        const RecoveryConfig rc = recovery_config(config, problem);
        const RecoveredStressField field = recover(solution, rc);

        QuadratureOptions q;
        q.regular_order = config.regular_order;
        q.singular_order = config.singular_order;
        if (problem.singular)
            q.singular_point = problem.singular_point;

        LevelReport out;
        out.level = level;
        out.errors = compute_error_report(solution, field, problem.exact_stress, q);
        out.degree_fallbacks = field.degree_fallbacks;
        if (problem.singular) {
            const GsifEstimate k = extract_gsifs(solution, *problem.singular, rc.plateau);
            out.gsif_extracted = std::array<double, 2>{k.k_I, k.k_II};
            out.gsif_used = config.gsif_mode == GsifMode::Exact
                                ? std::array<double, 2>{problem.singular->k_I, problem.singular->k_II}
                                : *out.gsif_extracted;
        }
        return out;
    } catch (const ConfigError& e) {
        rethrow_with(context, e);
    } catch (const NumericalError& e) {
        rethrow_with(context, e);
    } catch (const std::invalid_argument& e) {
        rethrow_with(context, e);
    }
}

std::map<std::string, ConvergenceRate> study_rates(const std::vector<LevelReport>& levels)
{
    std::map<std::string, ConvergenceRate> rates;
    if (levels.size() < 2)
        return rates;
    std::vector<double> dofs;
    for (const LevelReport& l : levels)
        dofs.push_back(l.errors.dofs);
    for (std::size_t i = 1; i < dofs.size(); ++i)
        if (!(dofs[i] > dofs[i - 1]))
            return rates;
    const std::vector<std::pair<std::string, double ErrorReport::*>> quantities{
        {"exact", &ErrorReport::exact},     {"estimated", &ErrorReport::estimated},
        {"recovered", &ErrorReport::recovered}, {"theta", &ErrorReport::theta},
        {"mD", &ErrorReport::mean_abs_d},   {"sigmaD", &ErrorReport::sigma_d}};
    for (const auto& [name, member] : quantities) {
        std::vector<double> values;
        for (const LevelReport& l : levels)
            values.push_back(l.errors.*member);
        if (std::all_of(values.begin(), values.end(), [](double v) { return v > 0 && std::isfinite(v); }))
            rates[name] = convergence_rate(dofs, values);
    }
    return rates;
}

StudyReport run_convergence_study(const StudyConfig& config)
{
    validate(config);
    if (config.levels.size() < 2)
        throw ConfigError("a convergence study needs at least two levels");
    std::vector<int> levels = config.levels;
    std::sort(levels.begin(), levels.end());

    StudyReport report;
    report.config = config;
    report.version = version_string();
    for (int level : levels) {
        try {
            report.levels.push_back(run_case(config, level));
        } catch (const std::exception& e) {
            report.complete = false;
            report.failure = e.what();
            break;
        }
    }
    report.rates = study_rates(report.levels);
    return report;
}

std::string report_csv(const StudyReport& report)
{
    std::string out = "level,dof,exact_error,estimated_error,recovered_error,theta,mD,sigmaD,rate_exact,rate_est\n";
    const auto rate = [](double v1, double v0, double d1, double d0) -> std::string {
        if (!(v1 > 0 && v0 > 0 && d1 > d0))
            return "";
        return number(-std::log(v1 / v0) / std::log(d1 / d0));
    };
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        const LevelReport& l = report.levels[i];
        const ErrorReport& e = l.errors;
        std::string rate_exact, rate_est;
        if (i > 0) {
            const ErrorReport& p = report.levels[i - 1].errors;
            rate_exact = rate(e.exact, p.exact, e.dofs, p.dofs);
            rate_est = rate(e.estimated, p.estimated, e.dofs, p.dofs);
        }
        out += std::to_string(l.level) + "," + std::to_string(e.dofs) + "," + number(e.exact) + "," +
               number(e.estimated) + "," + number(e.recovered) + "," + number(e.theta) + "," +
               number(e.mean_abs_d) + "," + number(e.sigma_d) + "," + rate_exact + "," + rate_est + "\n";
    }
    return out;
}

nlohmann::ordered_json report_json(const StudyReport& report)
{
    using nlohmann::ordered_json;
    ordered_json j;
    j["version"] = report.version;
    j["complete"] = report.complete;
    j["failure"] = report.failure;
    ordered_json config = ordered_json::object();
    for (const auto& [key, value] : to_key_values(report.config))
        config[key] = value;
    j["config"] = config;

    ordered_json levels = ordered_json::array();
    for (const LevelReport& l : report.levels) {
        const ErrorReport& e = l.errors;
        ordered_json lj;
        lj["level"] = l.level;
        lj["dof"] = e.dofs;
        lj["exact_error"] = e.exact;
        lj["estimated_error"] = e.estimated;
        lj["recovered_error"] = e.recovered;
        lj["theta"] = e.theta;
        lj["mD"] = e.mean_abs_d;
        lj["sigmaD"] = e.sigma_d;
        lj["excluded"] = e.excluded;
        lj["degree_fallbacks"] = l.degree_fallbacks;
        if (l.gsif_used)
            lj["gsif_used"] = {{"k_I", (*l.gsif_used)[0]}, {"k_II", (*l.gsif_used)[1]}};
        if (l.gsif_extracted)
            lj["gsif_extracted"] = {{"k_I", (*l.gsif_extracted)[0]}, {"k_II", (*l.gsif_extracted)[1]}};
        ordered_json el;
        std::vector<int> id, included;
        std::vector<double> est, ex, rec, theta, d;
        for (const ElementError& x : e.elements) {
            id.push_back(x.element);
            est.push_back(x.estimated);
            ex.push_back(x.exact);
            rec.push_back(x.recovered);
            theta.push_back(x.theta);
            d.push_back(x.d);
            included.push_back(x.included ? 1 : 0);
        }
        el["element"] = id;
        el["estimated_error"] = est;
        el["exact_error"] = ex;
        el["recovered_error"] = rec;
        el["theta"] = theta;
        el["D"] = d;
        el["included"] = included;
        lj["elements"] = el;
        levels.push_back(lj);
    }
    j["levels"] = levels;

    ordered_json rates = ordered_json::object();
    for (const auto& [name, r] : report.rates)
        rates[name] = {{"fitted", r.fitted}, {"average", r.average}, {"pairwise", r.pairwise}};
    j["rates"] = rates;
    return j;
}

StudyReport report_from_json(const nlohmann::json& j)
{
    try {
        StudyReport report;
        report.version = j.at("version").get<std::string>();
        report.complete = j.at("complete").get<bool>();
        report.failure = j.at("failure").get<std::string>();
        KeyValues kv;
        for (const auto& [key, value] : j.at("config").items())
            kv.emplace_back(key, value.get<std::string>());
        report.config = build_config(kv);

        for (const auto& lj : j.at("levels")) {
            LevelReport l;
            ErrorReport& e = l.errors;
            l.level = lj.at("level").get<int>();
            e.dofs = lj.at("dof").get<int>();
            e.exact = lj.at("exact_error").get<double>();
            e.estimated = lj.at("estimated_error").get<double>();
            e.recovered = lj.at("recovered_error").get<double>();
            e.theta = lj.at("theta").get<double>();
            e.mean_abs_d = lj.at("mD").get<double>();
            e.sigma_d = lj.at("sigmaD").get<double>();
            e.excluded = lj.at("excluded").get<int>();
            l.degree_fallbacks = lj.at("degree_fallbacks").get<int>();
            if (lj.contains("gsif_used"))
                l.gsif_used = std::array<double, 2>{lj["gsif_used"].at("k_I").get<double>(),
                                                    lj["gsif_used"].at("k_II").get<double>()};
            if (lj.contains("gsif_extracted"))
                l.gsif_extracted = std::array<double, 2>{lj["gsif_extracted"].at("k_I").get<double>(),
                                                         lj["gsif_extracted"].at("k_II").get<double>()};
            const auto& el = lj.at("elements");
            const auto id = el.at("element").get<std::vector<int>>();
            const auto est = el.at("estimated_error").get<std::vector<double>>();
            const auto ex = el.at("exact_error").get<std::vector<double>>();
            const auto rec = el.at("recovered_error").get<std::vector<double>>();
            const auto theta = el.at("theta").get<std::vector<double>>();
            const auto d = el.at("D").get<std::vector<double>>();
            const auto included = el.at("included").get<std::vector<int>>();
            for (std::size_t i = 0; i < id.size(); ++i)
                e.elements.push_back(
                    {id.at(i), est.at(i), ex.at(i), rec.at(i), theta.at(i), d.at(i), included.at(i) != 0});
            report.levels.push_back(std::move(l));
        }
        for (const auto& [name, rj] : j.at("rates").items())
            report.rates[name] = {rj.at("fitted").get<double>(), rj.at("average").get<double>(),
                                  rj.at("pairwise").get<std::vector<double>>()};
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
}

std::vector<std::string> emit_report(const StudyReport& report, const std::string& directory, ReportFormat format)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(directory, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + directory + "': " + ec.message());
    std::vector<std::string> written;
    const auto write = [&](const std::string& ext, const std::string& content) {
        const std::string path = (fs::path(directory) / (report.config.name + ext)).string();
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write '" + path + "'");
        out << content;
        if (!out)
            throw std::runtime_error("write failed for '" + path + "'");
        written.push_back(path);
    };
    if (format != ReportFormat::Json)
        write(".csv", report_csv(report));
    if (format != ReportFormat::Csv)
        write(".json", report_json(report).dump(2) + "\n");
    return written;
}

std::vector<std::string> preset_names()
{
    return {"cylinder-subcells", "cylinder-variants", "cylinder-poly-order", "lshape-variants"};
}

std::vector<StudyConfig> preset(const std::string& name)
{
    std::vector<StudyConfig> out;
    const StudyConfig cyl = [] {
        StudyConfig c = default_config(Benchmark::Cylinder);
        c.levels = {1, 2, 3, 4, 5};
        return c;
    }();
    if (name == "cylinder-subcells") {
        for (int nc : {2, 4, 8}) {
            StudyConfig c = cyl;
            c.formulation = Formulation::sfem(nc);
            c.name = "cylinder-sfem" + std::to_string(nc) + "-spr-cx";
            out.push_back(c);
        }
    } else if (name == "cylinder-variants") {
        StudyConfig c = cyl;
        c.name = "cylinder-sfem4-spr-cx";
        out.push_back(c);
        c.variant = RecoveryVariant::SPR;
        c.name = "cylinder-sfem4-spr";
        out.push_back(c);
        c.variant = RecoveryVariant::SPR_CX;
        c.formulation = Formulation::fem();
        c.name = "cylinder-fem-spr-cx";
        out.push_back(c);
    } else if (name == "cylinder-poly-order") {
        for (int degree : {1, 2}) {
            for (int nc : {2, 4, 8}) {
                StudyConfig c = cyl;
                c.formulation = Formulation::sfem(nc);
                c.interior_degree = degree;
                c.name = "cylinder-sfem" + std::to_string(nc) + "-p" + std::to_string(degree);
                out.push_back(c);
            }
        }
    } else if (name == "lshape-variants") {
        for (RecoveryVariant v :
             {RecoveryVariant::SPR_CX, RecoveryVariant::SPR_X, RecoveryVariant::SPR_C, RecoveryVariant::SPR}) {
            StudyConfig c = default_config(Benchmark::LShape);
            c.variant = v;
            std::string lower = to_string(v);
            std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
            c.name = "lshape-sfem4-" + lower;
            out.push_back(c);
        }
    } else {
        std::string names;
        for (const std::string& n : preset_names())
            names += " " + n;
        throw ConfigError("unknown preset '" + name + "' (available:" + names + ")");
    }
    return out;
}

} // namespace zzsfem
