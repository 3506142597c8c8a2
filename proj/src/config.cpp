#include "seisflat/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace seisflat {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

using Section = std::map<std::string, std::string>;
using Ini = std::map<std::string, Section>;

Ini parse_ini(const std::string& text) {
    static const std::set<std::string> known_sections = {"synth",   "filter",  "kernel",
                                                         "spectral", "flatten", "verify"};
    static const std::map<std::string, std::set<std::string>> known_keys = {
        {"synth", {"dims", "layers", "warp_amplitude", "warp_frequency", "noise_sigma", "seed"}},
        {"filter", {}},
        {"kernel", {"r", "R", "delta_floor", "dump_kernel"}},
        {"spectral", {"eigencount", "tol", "seed"}},
        {"flatten", {"slice_axis", "slice_index", "dump_w"}},
        {"verify", {"rect", "grid", "families", "amplitudes", "k", "samples", "tol"}},
    };

    Ini ini;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!known_sections.contains(section))
                throw config_error("unknown section [" + section + "]");
            ini[section];
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty())
            throw config_error("line " + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known_keys.at(section).contains(key))
            throw config_error("unknown key '" + key + "' in [" + section + "]");
        if (ini[section].contains(key))
            throw config_error("duplicate key '" + key + "' in [" + section + "]");
        ini[section][key] = value;
    }
    return ini;
}

[[noreturn]] void bad_value(const std::string& section, const std::string& key,
                            const std::string& value) {
    throw config_error("invalid value for [" + section + "] " + key + ": '" + value + "'");
}

double parse_double(const std::string& section, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) bad_value(section, key, v);
        return x;
    } catch (const config_error&) {
        throw;
    } catch (...) {
        bad_value(section, key, v);
    }
}

std::int64_t parse_int(const std::string& section, const std::string& key, const std::string& v) {
    std::int64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(section, key, v);
    return x;
}

std::uint64_t parse_u64(const std::string& section, const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(section, key, v);
    return x;
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad_value(section, key, v);
}

std::vector<std::string> split(const std::string& v, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!v.empty() && v.back() == sep) out.emplace_back();
    return out;
}

const std::string& require(const Ini& ini, const std::string& section, const std::string& key) {
    const auto sec = ini.find(section);
    if (sec == ini.end())
        throw config_error("[" + section + "] missing required key: " + key);
    const auto it = sec->second.find(key);
    if (it == sec->second.end())
        throw config_error("[" + section + "] missing required key: " + key);
    return it->second;
}

const std::string* lookup(const Ini& ini, const std::string& section, const std::string& key) {
    const auto sec = ini.find(section);
    if (sec == ini.end()) return nullptr;
    const auto it = sec->second.find(key);
    return it == sec->second.end() ? nullptr : &it->second;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    const Ini ini = parse_ini(text);
    RunConfig cfg;

    if (ini.contains("synth")) {
        SynthConfig sc;
        {
            const std::string& dims = require(ini, "synth", "dims");
            const auto parts = split(dims, 'x');
            if (parts.size() != 3) bad_value("synth", "dims", dims);
            sc.spec.m = static_cast<std::uint32_t>(parse_int("synth", "dims", parts[0]));
            sc.spec.n = static_cast<std::uint32_t>(parse_int("synth", "dims", parts[1]));
            sc.spec.l = static_cast<std::uint32_t>(parse_int("synth", "dims", parts[2]));
        }
        sc.spec.seed = parse_u64("synth", "seed", require(ini, "synth", "seed"));
        if (const auto* v = lookup(ini, "synth", "layers"); v && !v->empty()) {
            for (const std::string& pair : split(*v, ',')) {
                if (pair.empty()) continue;
                const auto fa = split(pair, ':');
                if (fa.size() != 2) bad_value("synth", "layers", *v);
                sc.spec.layers.push_back({parse_double("synth", "layers", fa[0]),
                                          parse_double("synth", "layers", fa[1])});
            }
        }
        if (const auto* v = lookup(ini, "synth", "warp_amplitude"))
            sc.spec.warp_amplitude = parse_double("synth", "warp_amplitude", *v);
        if (const auto* v = lookup(ini, "synth", "warp_frequency"))
            sc.spec.warp_frequency = parse_double("synth", "warp_frequency", *v);
        if (const auto* v = lookup(ini, "synth", "noise_sigma"))
            sc.spec.noise_sigma = parse_double("synth", "noise_sigma", *v);
        cfg.synth = std::move(sc);
    }

    if (const auto* v = lookup(ini, "kernel", "r"))
        cfg.kernel.spec.r = parse_double("kernel", "r", *v);
    if (const auto* v = lookup(ini, "kernel", "R"))
        cfg.kernel.spec.R = parse_double("kernel", "R", *v);
    if (const auto* v = lookup(ini, "kernel", "delta_floor"))
        cfg.kernel.spec.delta_floor = parse_double("kernel", "delta_floor", *v);
    if (const auto* v = lookup(ini, "kernel", "dump_kernel"))
        cfg.kernel.dump_kernel = parse_bool("kernel", "dump_kernel", *v);
    cfg.kernel.spec.validate();

    if (const auto* v = lookup(ini, "spectral", "eigencount")) {
        cfg.spectral.eigencount = static_cast<int>(parse_int("spectral", "eigencount", *v));
        if (cfg.spectral.eigencount < 1) bad_value("spectral", "eigencount", *v);
    }
    if (const auto* v = lookup(ini, "spectral", "tol")) {
        cfg.spectral.tol = parse_double("spectral", "tol", *v);
        if (!(cfg.spectral.tol > 0.0)) bad_value("spectral", "tol", *v);
    }
    if (const auto* v = lookup(ini, "spectral", "seed"))
        cfg.spectral.seed = parse_u64("spectral", "seed", *v);

    if (ini.contains("flatten")) {
        FlattenConfig fc;
        const std::string& axis = require(ini, "flatten", "slice_axis");
        if (axis == "2")
            fc.slice.axis = SliceAxis::i2;
        else if (axis == "3")
            fc.slice.axis = SliceAxis::i3;
        else
            bad_value("flatten", "slice_axis", axis);
        fc.slice.index = static_cast<std::uint32_t>(
            parse_int("flatten", "slice_index", require(ini, "flatten", "slice_index")));
        if (const auto* v = lookup(ini, "flatten", "dump_w"))
            fc.dump_w = parse_bool("flatten", "dump_w", *v);
        cfg.flatten = std::move(fc);
    }

    if (ini.contains("verify")) {
        VerifyConfig vc;
        {
            const std::string& rect = require(ini, "verify", "rect");
            const auto parts = split(rect, 'x');
            if (parts.size() != 2) bad_value("verify", "rect", rect);
            vc.rect.width = parse_double("verify", "rect", parts[0]);
            vc.rect.height = parse_double("verify", "rect", parts[1]);
        }
        {
            const std::string& grid = require(ini, "verify", "grid");
            const auto parts = split(grid, 'x');
            if (parts.size() != 2) bad_value("verify", "grid", grid);
            vc.rect.nx = static_cast<int>(parse_int("verify", "grid", parts[0]));
            vc.rect.ny = static_cast<int>(parse_int("verify", "grid", parts[1]));
        }
        vc.rect.validate();
        vc.families = split(require(ini, "verify", "families"), ',');
        if (vc.families.empty()) bad_value("verify", "families", "");
        for (const std::string& f : vc.families)
            (void)Deformation::parse(f, 0.0);  // validate names up front
        if (const auto* v = lookup(ini, "verify", "amplitudes"); v && !v->empty())
            for (const std::string& a : split(*v, ','))
                vc.amplitudes.push_back(parse_double("verify", "amplitudes", a));
        for (const std::string& k : split(require(ini, "verify", "k"), ','))
            vc.ks.push_back(static_cast<int>(parse_int("verify", "k", k)));
        if (vc.ks.empty()) bad_value("verify", "k", "");
        if (const auto* v = lookup(ini, "verify", "samples")) {
            vc.jacobian_samples = static_cast<int>(parse_int("verify", "samples", *v));
            if (vc.jacobian_samples < 32) bad_value("verify", "samples", *v);
        }
        if (const auto* v = lookup(ini, "verify", "tol")) {
            vc.tol = parse_double("verify", "tol", *v);
            if (!(vc.tol > 0.0)) bad_value("verify", "tol", *v);
        }
        const bool needs_amplitudes =
            std::any_of(vc.families.begin(), vc.families.end(),
                        [](const std::string& f) { return f != "identity"; });
        if (needs_amplitudes && vc.amplitudes.empty())
            throw config_error("[verify] missing required key: amplitudes");
        cfg.verify = std::move(vc);
    }

    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

}  // namespace seisflat
