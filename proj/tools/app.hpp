#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgpatch/profiles.hpp"

namespace qgpatch::app {

// Malformed or inconsistent run configuration (exit status 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Geometry {
    std::string preset = "ellipsoid-sphere";  // or "tabulated"
    double a = 1.5;
    double d1 = 2.0;
    double d2 = 1.0;
    std::string outer_csv, inner_csv;  // (phi, r) tables for "tabulated"
};

struct Numerics {
    int N = 160;
    double grading = 2.0;
    int de_level = 5;          // product-integration level of the near panels
    int n_theta = 0;           // 0: 8 * max populated mode
    int self_level = 4;
    int cross_level = 5;
    int n_eta = 128;
    double tol = 1e-10;        // |lambda - 1| at a bifurcation point
    int max_iterations = 200;
};

struct CommandParams {
    int n_min = 2, n_max = 25;
    int omega_points = 11;      // interior window points t = i / (omega_points + 1)
    std::vector<double> omega;  // explicit Omega list overrides omega_points
    int m = 0;                  // 0: smallest bracketing mode
    int m_min = 0, m_max = 0;   // 0: m0 .. m0 + 6
    double s = 1e-2;            // largest residual amplitude; halved twice
    int s_count = 3;
    int directions = 3;
    std::uint64_t seed = 20240611;
    double fd_step = 1e-5;
    int compare_N = 0;          // omega-sequence: second grid for the resolution check (0: off)
};

struct RunConfig {
    Geometry geometry;
    Numerics numerics;
    CommandParams command;
};

// Unknown keys and ill-typed values throw ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

profiles::PatchPairConfig build_geometry(const Geometry& g);

extern const std::vector<std::string> commands;

struct RunResult {
    int status = 0;  // 0 ok, 1 failed assertion
    nlohmann::json summary;
    std::vector<std::pair<std::string, std::string>> files;  // (name, contents)
};

// Throws ConfigError, HypothesisViolation, DomainError for bad input.
RunResult run(const std::string& command, const RunConfig& config);

}  // namespace qgpatch::app
