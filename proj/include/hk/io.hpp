#pragma once

#include <iosfwd>
#include <string>

#include "hk/et.hpp"
#include "hk/geodesic.hpp"
#include "hk/measure.hpp"

namespace hk {

/// 17-significant-digit decimal formatting; round-trips exactly.
std::string format_double(double v);

/// Measure schema: {"dim": d, "atoms": [{"x": [..d..], "m": f}, ...]}.
/// Duplicate positions are merged on load. Throws std::runtime_error with a
/// field diagnostic on malformed input.
DiscreteMeasure read_measure_json(std::istream& in, double merge_radius = 1e-9);
DiscreteMeasure read_measure_json_file(const std::string& path,
                                       double merge_radius = 1e-9);
void write_measure_json(std::ostream& out, const DiscreteMeasure& mu);
void write_measure_json_file(const std::string& path, const DiscreteMeasure& mu);

/// SolverConfig schema: {"tol", "eps_schedule", "max_iter_scaling",
/// "max_iter_gradient"}; missing keys keep their defaults.
SolverConfig read_solver_config_json(std::istream& in);
SolverConfig read_solver_config_json_file(const std::string& path);
std::string solver_config_to_json(const SolverConfig& cfg);

/// Frame CSV: header s,x_1..x_d,mass; one row per atom per frame.
void write_frames_csv(std::ostream& out, const GeodesicCurve& curve,
                      const std::vector<double>& frames);

/// CharGeodesic CSV: header s,y,density.
void write_char_frames_csv(std::ostream& out, const CharGeodesic& cg);

} // namespace hk
