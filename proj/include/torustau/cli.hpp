#pragma once

#include <map>
#include <optional>
#include <string>

#include "torustau/types.hpp"

namespace torustau::cli {

enum exit_code : int {
    exit_pass = 0,
    exit_tolerance = 2,
    exit_domain = 3,
    exit_config = 4
};

struct run_config {
    cplx a{0.31, 0}, m{0.17, 0}, nu{0.23, 0}, rho{0.11, 0}, tau{0.1, 0.9};
    int max_boxes = 8;
    int max_charge = 4;
    int modes = 12;
    int quad_points = 64;
    int steps = 8;
    std::optional<double> tol;
    double dtau = 1e-3;
    double radius_first = 0.3;
    double radius_second = 0.2;
    cplx tau_start{0, 0.8}, tau_end{0, 1.2};
    std::string format;  // json or csv; empty selects the command default
    std::string out;
};

/* "re,im" or "re" */
cplx parse_complex(const std::string& text);

/* key=value lines, '#' comments, keys with '-' or '_'; throws error(errc::config) */
std::map<std::string, std::string> parse_config_text(const std::string& text);

/* applies one key; unknown keys and malformed values throw error(errc::config) */
void apply_setting(run_config& cfg, const std::string& key, const std::string& value);

void apply_preset(run_config& cfg, const std::string& name);

/* Im tau >= 0.3 and nonnegative truncations; throws error(errc::domain) */
void validate(const run_config& cfg);

int run(int argc, char** argv);

} // namespace torustau::cli
