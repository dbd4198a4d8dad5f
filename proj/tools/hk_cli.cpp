#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hk/analysis.hpp"
#include "hk/cone_ot.hpp"
#include "hk/et.hpp"
#include "hk/geodesic.hpp"
#include "hk/io.hpp"
#include "hk/verify.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk        = 0;
constexpr int kExitInput     = 1;
constexpr int kExitNoConv    = 2;
constexpr int kExitVerifyBad = 3;

struct CommonOpts {
    double alpha = 1.0;
    double beta  = 4.0;
    double tol   = 1e-6;
    std::string output;
    std::string format = "json";
    std::string config;
};

void add_common(CLI::App* cmd, CommonOpts& opt) {
    cmd->add_option("--alpha", opt.alpha, "transport weight alpha > 0");
    cmd->add_option("--beta", opt.beta, "reaction weight beta > 0");
    cmd->add_option("--tol", opt.tol, "solver tolerance");
    cmd->add_option("--output", opt.output, "output path (default: stdout)");
    cmd->add_option("--format", opt.format, "json | csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--config", opt.config, "solver config JSON file");
}

hk::SolverConfig make_config(const CommonOpts& opt) {
    if (!(opt.tol > 0.0)) throw std::runtime_error("--tol must be positive");
    if (!(opt.alpha > 0.0) || !(opt.beta > 0.0))
        throw std::runtime_error("--alpha and --beta must be positive");
    hk::SolverConfig cfg;
    if (!opt.config.empty()) cfg = hk::read_solver_config_json_file(opt.config);
    cfg.tol = opt.tol;
    return cfg;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

ordered_json report_json(const hk::HkResult& res) {
    ordered_json j;
    j["hk"]       = res.hk;
    j["hk_sq"]    = res.hk_sq;
    j["eta_mass"] = res.report.eta.total();
    j["kkt"]      = {{"support_length", res.report.kkt.support_length},
                     {"inequality", res.report.kkt.inequality},
                     {"complementarity", res.report.kkt.complementarity}};
    j["iterations"]                = res.report.iterations;
    j["converged"]                 = res.report.converged;
    j["mass_identity_discrepancy"] = res.mass_identity_discrepancy;
    return j;
}

int cmd_dist(const std::string& m0_path, const std::string& m1_path,
             const CommonOpts& opt) {
    hk::DiscreteMeasure mu0, mu1;
    try {
        mu0 = hk::read_measure_json_file(m0_path);
        mu1 = hk::read_measure_json_file(m1_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    const hk::HkResult res =
        hk::hk_distance(mu0, mu1, {opt.alpha, opt.beta}, make_config(opt));
    std::string payload;
    if (opt.format == "csv") {
        payload = "hk,hk_sq,eta_mass,converged\n" + hk::format_double(res.hk) + ',' +
                  hk::format_double(res.hk_sq) + ',' +
                  hk::format_double(res.report.eta.total()) + ',' +
                  (res.report.converged ? "1" : "0") + '\n';
    } else {
        payload = report_json(res).dump(2) + '\n';
    }
    if (opt.output.empty()) {
        std::cout << payload;
    } else {
        open_out(opt.output) << payload;
    }
    return res.report.converged ? kExitOk : kExitNoConv;
}

std::vector<double> default_frames() {
    std::vector<double> s;
    for (int k = 0; k <= 20; ++k) s.push_back(k / 20.0);
    return s;
}

int cmd_char_geodesic(const CommonOpts& opt, const std::vector<double>& frames) {
    hk::CharFnConfig cfg;
    cfg.frame_s           = frames;
    const hk::CharGeodesic cg = hk::char_function_geodesic(cfg);
    ordered_json sidecar;
    sidecar["w_star"]            = cg.w_star;
    sidecar["c_star"]            = cg.c_star;
    sidecar["marginal_mismatch"] = cg.marginal_mismatch;
    if (opt.output.empty()) {
        hk::write_char_frames_csv(std::cout, cg);
        std::cout << sidecar.dump(2) << '\n';
    } else {
        auto csv = open_out(opt.output);
        hk::write_char_frames_csv(csv, cg);
        std::string side = opt.output;
        if (const auto dot = side.rfind('.'); dot != std::string::npos)
            side.resize(dot);
        open_out(side + ".json") << sidecar.dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_geodesic(const std::string& m0_path, const std::string& m1_path,
                 const CommonOpts& opt, std::vector<double> frames,
                 const std::string& family, const std::string& center) {
    if (family == "charfn") return cmd_char_geodesic(opt, frames);
    hk::DiscreteMeasure mu0, mu1;
    hk::Vec y0;
    try {
        mu1 = hk::read_measure_json_file(m1_path);
        if (family == "dilation") {
            std::stringstream ss(center);
            std::string item;
            while (std::getline(ss, item, ',')) y0.push_back(std::stod(item));
            if (static_cast<int>(y0.size()) != mu1.dim)
                throw std::runtime_error("--center dimension does not match measure");
        } else {
            mu0 = hk::read_measure_json_file(m0_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    if (frames.empty()) frames = default_frames();

    const hk::Params p{opt.alpha, opt.beta};
    hk::GeodesicCurve curve;
    bool converged = true;
    if (family == "dilation") {
        curve = hk::dilation_geodesic(mu1, y0, p);
    } else {
        const hk::EtReport rep = hk::solve_et(mu0, mu1, p, make_config(opt));
        converged              = rep.converged;
        curve = hk::geodesic_from_plan(hk::hk_via_lifts(mu0, mu1, rep, p).plan, p);
    }

    const hk::MassProfile prof = hk::mass_profile(curve);
    ordered_json sidecar;
    sidecar["m0"]                    = prof.m0;
    sidecar["m1"]                    = prof.m1;
    sidecar["m_star"]                = prof.m_star;
    sidecar["hk_sq"]                 = prof.hk_sq;
    sidecar["mass_identity_residual"] = prof.worst_deviation;
    sidecar["converged"]             = converged;

    if (opt.output.empty()) {
        hk::write_frames_csv(std::cout, curve, frames);
        std::cout << sidecar.dump(2) << '\n';
    } else {
        auto csv = open_out(opt.output);
        hk::write_frames_csv(csv, curve, frames);
        std::string side = opt.output;
        if (const auto dot = side.rfind('.'); dot != std::string::npos)
            side.resize(dot);
        open_out(side + ".json") << sidecar.dump(2) << '\n';
    }
    return converged ? kExitOk : kExitNoConv;
}

int cmd_verify(const std::string& suite, std::uint64_t seed) {
    std::vector<hk::SuiteResult> results;
    if (suite == "all") {
        results = hk::run_all_suites(seed);
    } else {
        results.push_back(hk::run_suite(suite, seed));
    }
    bool ok = true;
    for (const auto& sr : results) {
        for (const auto& row : sr.rows) {
            std::printf("%-4s  %-13s %-40s worst=%-12.4g tol=%-10.4g\n",
                        row.pass ? "PASS" : "FAIL", sr.suite.c_str(), row.name.c_str(),
                        row.worst, row.tol);
            ok = ok && row.pass;
        }
    }
    return ok ? kExitOk : kExitVerifyBad;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hellinger-Kantorovich distances, geodesics and checks"};
    app.require_subcommand(1);

    CommonOpts opt;
    std::string m0_path, m1_path;

    auto* dist = app.add_subcommand("dist", "HK distance between two measure files");
    dist->add_option("m0", m0_path, "measure JSON")->required();
    dist->add_option("m1", m1_path, "measure JSON")->required();
    add_common(dist, opt);

    std::vector<double> frames;
    std::string family, center;
    auto* geo = app.add_subcommand("geodesic", "geodesic frames between two measures");
    geo->add_option("m0", m0_path, "measure JSON (ignored with --family)");
    geo->add_option("m1", m1_path, "measure JSON (ignored with --family charfn)");
    geo->add_option("--frames", frames, "s values in [0,1]")->delimiter(',');
    geo->add_option("--family", family, "explicit family: dilation | charfn")
        ->check(CLI::IsMember({"dilation", "charfn"}));
    geo->add_option("--center", center, "dilation center, comma-separated");
    add_common(geo, opt);

    std::string suite;
    std::uint64_t seed = 0;
    auto* verify       = app.add_subcommand("verify", "run a property suite");
    {
        std::vector<std::string> names = hk::verify_suite_names();
        names.push_back("all");
        verify->add_option("suite", suite, "suite name")
            ->required()
            ->check(CLI::IsMember(names));
    }
    verify->add_option("--seed", seed, "RNG seed (default 0)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (dist->parsed()) return cmd_dist(m0_path, m1_path, opt);
        if (geo->parsed()) {
            if (family.empty() && (m0_path.empty() || m1_path.empty())) {
                std::cerr << "error: m0 and m1 are required unless --family is given\n";
                return kExitInput;
            }
            if (family == "dilation" && m1_path.empty()) {
                std::cerr << "error: m1 is required with --family dilation\n";
                return kExitInput;
            }
            return cmd_geodesic(m0_path, m1_path, opt, frames, family, center);
        }
        if (verify->parsed()) return cmd_verify(suite, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}
