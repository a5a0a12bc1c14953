#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "app.hpp"
#include "qgpatch/errors.hpp"
#include "qgpatch/parallel.hpp"

using nlohmann::json;
namespace app = qgpatch::app;

namespace {

const std::map<std::string, std::string> descriptions = {
    {"check-hypotheses", "check profile regularity, nesting and the spectral window condition"},
    {"omega-window", "compute the admissible angular velocity window"},
    {"eigen-sweep", "largest eigenvalues over a grid of modes and window points"},
    {"find-bifurcation", "solve lambda_m(Omega) = 1 for one mode"},
    {"omega-sequence", "bifurcation points over a mode range"},
    {"residual-check", "convergence order of the functional along the kernel direction"},
    {"linearization-check", "finite differences against the analytic linearization"},
    {"validate-closed-form", "compare quadrature against ellipsoid-sphere closed forms"},
};

// "5" or "3:20"
void parse_modes(const std::string& s, app::CommandParams& p) {
    const auto colon = s.find(':');
    try {
        std::size_t used = 0;
        if (colon == std::string::npos) {
            p.m = std::stoi(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            p.m_min = p.m_max = p.m;
            return;
        }
        p.m_min = std::stoi(s.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(s);
        const std::string hi = s.substr(colon + 1);
        p.m_max = std::stoi(hi, &used);
        if (used != hi.size()) throw std::invalid_argument(s);
        p.m = p.m_min;
    } catch (const std::logic_error&) {
        throw app::ConfigError("--m expects an integer or a range lo:hi, got '" + s + "'");
    }
    if (p.m_min < 1 || p.m_max < p.m_min) throw app::ConfigError("--m range must satisfy 1 <= lo <= hi");
}

int fail(int code, const std::string& kind, const std::string& msg) {
    json j = {{"error", kind}, {"message", msg}};
    std::cout << j.dump(2) << "\n";
    std::cerr << "qgpatch: " << msg << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Spectral and bifurcation computations for rotating doubly connected QG patches"};
    cli.require_subcommand(1);
    std::string config_path, out_dir = ".", modes;
    double s = -1.0;
    int N = 0, omega_points = 0;
    std::string n_range;
    for (const auto& name : app::commands) {
        auto* sub = cli.add_subcommand(name, descriptions.at(name));
        sub->add_option("-c,--config", config_path, "JSON run configuration {geometry, numerics, command}");
        sub->add_option("-o,--out", out_dir, "directory for CSV artifacts");
        sub->add_option("--N", N, "grid size override");
        if (name == "find-bifurcation" || name == "omega-sequence" || name == "residual-check" ||
            name == "linearization-check")
            sub->add_option("--m", modes, "mode m, or lo:hi for omega-sequence");
        if (name == "eigen-sweep") {
            sub->add_option("--modes", n_range, "mode range lo:hi");
            sub->add_option("--omega-points", omega_points, "interior window points");
        }
        if (name == "residual-check") sub->add_option("--s", s, "largest amplitude");
    }
    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli.exit(e);
        return rc == 0 ? 0 : 2;
    }
    const std::string command = cli.get_subcommands().front()->get_name();

    app::RunConfig cfg;
    app::RunResult res;
    try {
        if (!config_path.empty()) cfg = app::load_config(config_path);
        if (!modes.empty()) parse_modes(modes, cfg.command);
        if (s > 0.0) cfg.command.s = s;
        if (omega_points > 0) cfg.command.omega_points = omega_points;
        if (!n_range.empty()) {
            app::CommandParams tmp;
            parse_modes(n_range, tmp);
            cfg.command.n_min = tmp.m_min;
            cfg.command.n_max = tmp.m_max;
        }
        if (N > 0) {
            json j = app::to_json(cfg);
            j["numerics"]["N"] = N;
            cfg = app::parse_config(j);
        }
        res = app::run(command, cfg);
    } catch (const app::ConfigError& e) {
        return fail(2, "config", e.what());
    } catch (const qgpatch::HypothesisViolation& e) {
        return fail(2, "hypothesis-violation", e.what());
    } catch (const qgpatch::DomainError& e) {
        return fail(2, "domain", e.what());
    } catch (const qgpatch::NotBracketed& e) {
        std::cout << json{{"error", "not-bracketed"},
                          {"message", e.what()},
                          {"deficit", e.deficit},
                          {"below_threshold", e.below_threshold}}
                         .dump(2)
                  << "\n";
        std::cerr << "qgpatch: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        return fail(1, "numerical", e.what());
    }

    json files = json::array();
    try {
        if (!res.files.empty()) std::filesystem::create_directories(out_dir);
        for (const auto& [name, body] : res.files) {
            const auto path = std::filesystem::path(out_dir) / name;
            std::ofstream f(path, std::ios::binary);
            f << body;
            if (!f) throw std::runtime_error("cannot write " + path.string());
            files.push_back(path.string());
        }
    } catch (const std::exception& e) {
        return fail(2, "output", e.what());
    }
    json out = {{"command", command},
                {"config", app::to_json(cfg)},
                {"threads", qgpatch::worker_count()},
                {"result", res.summary},
                {"files", files},
                {"status", res.status}};
    std::cout << out.dump(2) << "\n";
    return res.status;
}
