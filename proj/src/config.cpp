#include "zzsfem/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace zzsfem {

std::string to_string(Benchmark b)
{
    switch (b) {
    case Benchmark::Cylinder:
        return "cylinder";
    case Benchmark::LShape:
        return "lshape";
    case Benchmark::Patch:
        return "patch";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string number(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& key, const std::string& v)
{
    double out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    return out;
}

int parse_int(const std::string& key, const std::string& v)
{
    int out = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc() || r.ptr != v.data() + v.size())
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return out;
}

Benchmark parse_benchmark(const std::string& v)
{
    for (Benchmark b : {Benchmark::Cylinder, Benchmark::LShape, Benchmark::Patch})
        if (to_string(b) == v)
            return b;
    throw ConfigError("study.benchmark: unknown benchmark '" + v + "' (expected cylinder, lshape or patch)");
}

std::vector<int> parse_levels(const std::string& key, const std::string& v)
{
    std::vector<int> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_int(key, trim(item)));
    if (out.empty())
        throw ConfigError(key + ": empty level list");
    return out;
}

using Setter = std::function<void(StudyConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        const auto dbl = [](double StudyConfig::*m, const char* key) {
            return [m, key](StudyConfig& c, const std::string& v) { c.*m = parse_double(key, v); };
        };
        const auto integer = [](int StudyConfig::*m, const char* key) {
            return [m, key](StudyConfig& c, const std::string& v) { c.*m = parse_int(key, v); };
        };
        t["study.name"] = [](StudyConfig& c, const std::string& v) { c.name = v; };
        t["study.benchmark"] = [](StudyConfig& c, const std::string& v) { c.benchmark = parse_benchmark(v); };
        t["study.levels"] = [](StudyConfig& c, const std::string& v) { c.levels = parse_levels("study.levels", v); };
        t["study.output"] = [](StudyConfig& c, const std::string& v) { c.output = v; };
        t["discretization.formulation"] = [](StudyConfig& c, const std::string& v) {
            if (v == "FEM")
                c.formulation.kind = Formulation::Kind::FEM;
            else if (v == "SFEM")
                c.formulation.kind = Formulation::Kind::SFEM;
            else
                throw ConfigError("discretization.formulation: expected FEM or SFEM, got '" + v + "'");
        };
        t["discretization.subcells"] = [](StudyConfig& c, const std::string& v) {
            c.formulation.subcells = parse_int("discretization.subcells", v);
        };
        t["recovery.variant"] = [](StudyConfig& c, const std::string& v) { c.variant = parse_variant(v); };
        t["recovery.interior_degree"] = integer(&StudyConfig::interior_degree, "recovery.interior_degree");
        t["recovery.boundary_degree"] = integer(&StudyConfig::boundary_degree, "recovery.boundary_degree");
        t["recovery.splitting_radius"] = dbl(&StudyConfig::splitting_radius, "recovery.splitting_radius");
        t["gsif.mode"] = [](StudyConfig& c, const std::string& v) {
            if (v == "exact")
                c.gsif_mode = GsifMode::Exact;
            else if (v == "extracted")
                c.gsif_mode = GsifMode::Extracted;
            else
                throw ConfigError("gsif.mode: expected exact or extracted, got '" + v + "'");
        };
        t["gsif.plateau_inner"] = dbl(&StudyConfig::plateau_inner, "gsif.plateau_inner");
        t["gsif.plateau_outer"] = dbl(&StudyConfig::plateau_outer, "gsif.plateau_outer");
        t["material.young"] = [](StudyConfig& c, const std::string& v) {
            c.material.young = parse_double("material.young", v);
        };
        t["material.poisson"] = [](StudyConfig& c, const std::string& v) {
            c.material.poisson = parse_double("material.poisson", v);
        };
        t["material.state"] = [](StudyConfig& c, const std::string& v) {
            if (v == "plane_strain")
                c.material.state = PlaneState::PlaneStrain;
            else if (v == "plane_stress")
                c.material.state = PlaneState::PlaneStress;
            else
                throw ConfigError("material.state: expected plane_strain or plane_stress, got '" + v + "'");
        };
        t["cylinder.inner_radius"] = dbl(&StudyConfig::inner_radius, "cylinder.inner_radius");
        t["cylinder.outer_radius"] = dbl(&StudyConfig::outer_radius, "cylinder.outer_radius");
        t["cylinder.pressure"] = dbl(&StudyConfig::pressure, "cylinder.pressure");
        t["lshape.grading"] = dbl(&StudyConfig::grading, "lshape.grading");
        t["lshape.k_I"] = dbl(&StudyConfig::k_I, "lshape.k_I");
        t["lshape.k_II"] = dbl(&StudyConfig::k_II, "lshape.k_II");
        t["lshape.half_size"] = dbl(&StudyConfig::half_size, "lshape.half_size");
        t["lshape.base_divisions"] = integer(&StudyConfig::base_divisions, "lshape.base_divisions");
        t["patch.divisions"] = integer(&StudyConfig::patch_divisions, "patch.divisions");
        t["quadrature.regular_order"] = integer(&StudyConfig::regular_order, "quadrature.regular_order");
        t["quadrature.singular_order"] = integer(&StudyConfig::singular_order, "quadrature.singular_order");
        return t;
    }();
    return table;
}

} // namespace

StudyConfig default_config(Benchmark b)
{
    StudyConfig c;
    c.benchmark = b;
    switch (b) {
    case Benchmark::Cylinder:
        break;
    case Benchmark::LShape:
        c.levels = {0, 1, 2, 3};
        c.material = {1000.0, 0.3, PlaneState::PlaneStrain};
        break;
    case Benchmark::Patch:
        c.levels = {0, 1};
        c.material = {1000.0, 0.25, PlaneState::PlaneStress};
        break;
    }
    return c;
}

KeyValues to_key_values(const StudyConfig& c)
{
    std::string levels;
    for (std::size_t i = 0; i < c.levels.size(); ++i)
        levels += (i ? "," : "") + std::to_string(c.levels[i]);
    return {
        {"study.name", c.name},
        {"study.benchmark", to_string(c.benchmark)},
        {"study.levels", levels},
        {"study.output", c.output},
        {"discretization.formulation", c.formulation.smoothed() ? "SFEM" : "FEM"},
        {"discretization.subcells", std::to_string(c.formulation.subcells)},
        {"recovery.variant", to_string(c.variant)},
        {"recovery.interior_degree", std::to_string(c.interior_degree)},
        {"recovery.boundary_degree", std::to_string(c.boundary_degree)},
        {"recovery.splitting_radius", number(c.splitting_radius)},
        {"gsif.mode", c.gsif_mode == GsifMode::Exact ? "exact" : "extracted"},
        {"gsif.plateau_inner", number(c.plateau_inner)},
        {"gsif.plateau_outer", number(c.plateau_outer)},
        {"material.young", number(c.material.young)},
        {"material.poisson", number(c.material.poisson)},
        {"material.state", c.material.state == PlaneState::PlaneStrain ? "plane_strain" : "plane_stress"},
        {"cylinder.inner_radius", number(c.inner_radius)},
        {"cylinder.outer_radius", number(c.outer_radius)},
        {"cylinder.pressure", number(c.pressure)},
        {"lshape.grading", number(c.grading)},
        {"lshape.k_I", number(c.k_I)},
        {"lshape.k_II", number(c.k_II)},
        {"lshape.half_size", number(c.half_size)},
        {"lshape.base_divisions", std::to_string(c.base_divisions)},
        {"patch.divisions", std::to_string(c.patch_divisions)},
        {"quadrature.regular_order", std::to_string(c.regular_order)},
        {"quadrature.singular_order", std::to_string(c.singular_order)},
    };
}

std::string to_ini(const StudyConfig& c)
{
    std::string out;
    std::string section;
    for (const auto& [key, value] : to_key_values(c)) {
        const auto dot = key.find('.');
        const std::string s = key.substr(0, dot);
        if (s != section) {
            out += (section.empty() ? "[" : "\n[") + s + "]\n";
            section = s;
        }
        out += key.substr(dot + 1) + " = " + value + "\n";
    }
    return out;
}

KeyValues parse_ini(const std::string& text)
{
    KeyValues out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        line = trim(comment == std::string::npos ? line : line.substr(0, comment));
        if (line.empty())
            continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where + "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + "expected key = value");
        if (section.empty())
            throw ConfigError(where + "key outside of a section");
        const std::string key = section + "." + trim(line.substr(0, eq));
        if (!setters().count(key))
            throw ConfigError(where + "unknown key '" + key + "'");
        out.emplace_back(key, trim(line.substr(eq + 1)));
    }
    return out;
}

std::pair<std::string, std::string> parse_override(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + text + "' is not of the form section.key=value");
    std::string key = trim(text.substr(0, eq));
    if (!setters().count(key))
        throw ConfigError("unknown key '" + key + "'");
    return {key, trim(text.substr(eq + 1))};
}

StudyConfig build_config(const KeyValues& assignments)
{
    Benchmark b = Benchmark::Cylinder;
    for (const auto& [key, value] : assignments)
        if (key == "study.benchmark")
            b = parse_benchmark(value);
    StudyConfig c = default_config(b);
    for (const auto& [key, value] : assignments) {
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError("unknown key '" + key + "'");
        it->second(c, value);
    }
    if (!c.formulation.smoothed())
        c.formulation.subcells = 1;
    validate(c);
    return c;
}

StudyConfig load_config(const std::string& path, const KeyValues& overrides)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    KeyValues all;
    try {
        all = parse_ini(ss.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    all.insert(all.end(), overrides.begin(), overrides.end());
    return build_config(all);
}

void validate(const StudyConfig& c)
{
    if (c.levels.empty())
        throw ConfigError("study.levels must not be empty");
    if (std::set<int>(c.levels.begin(), c.levels.end()).size() != c.levels.size())
        throw ConfigError("study.levels contains duplicate levels");
    for (int l : c.levels) {
        if (c.benchmark == Benchmark::Cylinder && (l < 1 || l > 12))
            throw ConfigError("cylinder levels must be in [1, 12]");
        if (c.benchmark != Benchmark::Cylinder && (l < 0 || l > 8))
            throw ConfigError("levels must be in [0, 8]");
    }
    if (c.formulation.smoothed() && !valid_subcell_count(c.formulation.subcells))
        throw ConfigError("discretization.subcells must be 1, 2, 4 or 8");
    if (c.interior_degree < 1 || c.interior_degree > 2 || c.boundary_degree < 1 || c.boundary_degree > 2)
        throw ConfigError("recovery degrees must be 1 or 2");
    if (c.splitting_radius < 0)
        throw ConfigError("recovery.splitting_radius must be non-negative");
    if (!(c.plateau_inner >= 0 && c.plateau_outer > c.plateau_inner))
        throw ConfigError("gsif plateau needs 0 <= plateau_inner < plateau_outer");
    if (!(c.material.young > 0) || !(c.material.poisson >= 0 && c.material.poisson < 0.5))
        throw ConfigError("material needs young > 0 and 0 <= poisson < 0.5");
    if (!(c.inner_radius > 0 && c.outer_radius > c.inner_radius))
        throw ConfigError("cylinder needs 0 < inner_radius < outer_radius");
    if (!(c.grading >= 1 && c.grading <= 20))
        throw ConfigError("lshape.grading must be in [1, 20]");
    if (!(c.half_size > 0) || c.base_divisions < 1)
        throw ConfigError("lshape.half_size and lshape.base_divisions must be positive");
    if (c.patch_divisions < 1)
        throw ConfigError("patch.divisions must be positive");
    if (c.regular_order < 1 || c.regular_order > 64 || c.singular_order < 1 || c.singular_order > 64)
        throw ConfigError("quadrature orders must be in [1, 64]");
}

} // namespace zzsfem
