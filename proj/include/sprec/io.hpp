#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sprec/config.hpp"
#include "sprec/simulation.hpp"

namespace sprec {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kOutDirEnv = "SPREC_OUT_DIR";

// Write via a temp file in the same directory plus rename, so readers never
// observe a partially-written file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    const auto dir = path.parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
        os << content;
        if (!os) throw std::runtime_error("atomic_write: short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("read_file: cannot open " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

inline std::string metric_to_csv(const MetricSeries& m) {
    std::ostringstream os;
    os.precision(17);
    os << "x,y,numerator,denominator\n";
    for (size_t i = 0; i < m.x.size(); ++i)
        os << m.x[i] << "," << m.y[i] << "," << m.numerator[i] << "," << m.denominator[i]
           << "\n";
    return os.str();
}

inline nlohmann::json metric_to_json(const MetricSeries& m) {
    return {{"kind", m.kind},
            {"x", m.x},
            {"y", m.y},
            {"numerator", m.numerator},
            {"denominator", m.denominator},
            {"n_design_failures", m.n_design_failures}};
}

inline nlohmann::json make_manifest(const ExperimentConfig& cfg, std::uint64_t seed,
                                    double duration_s,
                                    const std::vector<std::string>& outputs) {
    return {{"version", kVersion},
            {"seed", seed},
            {"duration_s", duration_s},
            {"config", serialize_config(cfg)},
            {"outputs", outputs}};
}

} // namespace sprec
