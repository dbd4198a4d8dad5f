#include "hk/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hk {

using nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

DiscreteMeasure read_measure_json(std::istream& in, double merge_radius) {
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("measure JSON parse error: ") + e.what());
    }
    if (!j.contains("dim") || !j["dim"].is_number_integer())
        throw std::runtime_error("measure JSON: missing integer field \"dim\"");
    if (!j.contains("atoms") || !j["atoms"].is_array())
        throw std::runtime_error("measure JSON: missing array field \"atoms\"");
    const int dim = j["dim"].get<int>();
    if (dim <= 0) throw std::runtime_error("measure JSON: \"dim\" must be positive");

    DiscreteMeasure mu(dim);
    std::size_t idx = 0;
    for (const auto& atom : j["atoms"]) {
        if (!atom.contains("x") || !atom["x"].is_array() ||
            atom["x"].size() != static_cast<std::size_t>(dim))
            throw std::runtime_error("measure JSON: atom " + std::to_string(idx) +
                                     ": field \"x\" must be an array of length dim");
        if (!atom.contains("m") || !atom["m"].is_number())
            throw std::runtime_error("measure JSON: atom " + std::to_string(idx) +
                                     ": missing numeric field \"m\"");
        Vec x(dim);
        for (int k = 0; k < dim; ++k) x[k] = atom["x"][k].get<double>();
        const double m = atom["m"].get<double>();
        if (m < 0.0)
            throw std::runtime_error("measure JSON: atom " + std::to_string(idx) +
                                     ": mass must be >= 0");
        mu.add(std::move(x), m);
        ++idx;
    }
    return mu.merged(merge_radius);
}

DiscreteMeasure read_measure_json_file(const std::string& path, double merge_radius) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open measure file: " + path);
    return read_measure_json(in, merge_radius);
}

void write_measure_json(std::ostream& out, const DiscreteMeasure& mu) {
    ordered_json j;
    j["dim"]   = mu.dim;
    j["atoms"] = ordered_json::array();
    for (const auto& a : mu.atoms) {
        ordered_json atom;
        atom["x"] = a.x;
        atom["m"] = a.m;
        j["atoms"].push_back(std::move(atom));
    }
    out << j.dump(2) << '\n';
}

void write_measure_json_file(const std::string& path, const DiscreteMeasure& mu) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write measure file: " + path);
    write_measure_json(out, mu);
}

SolverConfig read_solver_config_json(std::istream& in) {
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("config JSON parse error: ") + e.what());
    }
    SolverConfig cfg;
    if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
    if (j.contains("eps_schedule"))
        cfg.eps_schedule = j["eps_schedule"].get<std::vector<double>>();
    if (j.contains("max_iter_scaling"))
        cfg.max_iter_scaling = j["max_iter_scaling"].get<int>();
    if (j.contains("max_iter_gradient"))
        cfg.max_iter_gradient = j["max_iter_gradient"].get<int>();
    if (cfg.tol <= 0.0) throw std::runtime_error("config JSON: tol must be positive");
    return cfg;
}

SolverConfig read_solver_config_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return read_solver_config_json(in);
}

std::string solver_config_to_json(const SolverConfig& cfg) {
    ordered_json j;
    j["tol"]               = cfg.tol;
    j["eps_schedule"]      = cfg.eps_schedule;
    j["max_iter_scaling"]  = cfg.max_iter_scaling;
    j["max_iter_gradient"] = cfg.max_iter_gradient;
    return j.dump(2);
}

void write_frames_csv(std::ostream& out, const GeodesicCurve& curve,
                      const std::vector<double>& frames) {
    int dim = curve.pure0.dim;
    if (dim == 0) dim = curve.pure1.dim;
    for (const auto& rec : curve.pairs)
        if (!rec.z0.is_tip()) dim = static_cast<int>(rec.z0.pos().size());
    out << "s";
    for (int k = 1; k <= dim; ++k) out << ",x_" << k;
    out << ",mass\n";
    for (double s : frames) {
        for (const auto& a : curve.eval(s).atoms) {
            out << format_double(s);
            for (double c : a.x) out << ',' << format_double(c);
            out << ',' << format_double(a.m) << '\n';
        }
    }
}

void write_char_frames_csv(std::ostream& out, const CharGeodesic& cg) {
    out << "s,y,density\n";
    for (const auto& f : cg.frames)
        out << format_double(f.s) << ',' << format_double(f.y) << ','
            << format_double(f.density) << '\n';
}

} // namespace hk
