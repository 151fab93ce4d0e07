#pragma once

// Flat `key = value` configuration covering every tunable in the pipeline.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "moodpipe/error.hpp"
#include "moodpipe/facedetect.hpp"
#include "moodpipe/featextract.hpp"
#include "moodpipe/svm.hpp"

namespace moodpipe {

struct PipelineConfig {
    DetectConfig detect;  // carries the skin thresholds
    AnthropometricModel anthro;
    BandParams band;
    KernelSpec kernel;
    TrainConfig train;
    std::uint64_t seed = 0;

    void validate() const {
        detect.validate();
        anthro.validate();
        band.validate();
        try {
            kernel.validate();
            train.validate();
        } catch (const Error& e) {
            throw Error(ErrorKind::ConfigError, e.what());
        }
    }
};

namespace detail {

// shortest text that reads back to the same double
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw Error(ErrorKind::ConfigError, "'" + key + "' expects a number, got '" + s + "'");
    }
    return v;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& s) {
    Int v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw Error(ErrorKind::ConfigError, "'" + key + "' expects an integer, got '" + s + "'");
    }
    return v;
}

struct ConfigKey {
    std::string name;
    std::function<std::string(const PipelineConfig&)> get;
    std::function<void(PipelineConfig&, const std::string&)> set;
};

inline ConfigKey real_key(std::string name, std::function<double&(PipelineConfig&)> field) {
    return {name,
            [field](PipelineConfig c) { return format_double(field(c)); },
            [field, name](PipelineConfig& c, const std::string& v) { field(c) = parse_double(name, v); }};
}

inline ConfigKey int_key(std::string name, std::function<int&(PipelineConfig&)> field) {
    return {name,
            [field](PipelineConfig c) { return std::to_string(field(c)); },
            [field, name](PipelineConfig& c, const std::string& v) { field(c) = parse_int<int>(name, v); }};
}

inline void add_box_keys(std::vector<ConfigKey>& keys, const std::string& prefix,
                         FractionalBox AnthropometricModel::*member) {
    keys.push_back(real_key(prefix + ".x1", [member](PipelineConfig& c) -> double& { return (c.anthro.*member).x1f; }));
    keys.push_back(real_key(prefix + ".y1", [member](PipelineConfig& c) -> double& { return (c.anthro.*member).y1f; }));
    keys.push_back(real_key(prefix + ".x2", [member](PipelineConfig& c) -> double& { return (c.anthro.*member).x2f; }));
    keys.push_back(real_key(prefix + ".y2", [member](PipelineConfig& c) -> double& { return (c.anthro.*member).y2f; }));
    keys.push_back(
        real_key(prefix + ".prior", [member](PipelineConfig& c) -> double& { return (c.anthro.*member).prior_yf; }));
}

inline const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> k;
        k.push_back(real_key("skin.hue_min", [](PipelineConfig& c) -> double& { return c.detect.thresholds.hue_min; }));
        k.push_back(real_key("skin.hue_max", [](PipelineConfig& c) -> double& { return c.detect.thresholds.hue_max; }));
        k.push_back(real_key("skin.sat_min", [](PipelineConfig& c) -> double& { return c.detect.thresholds.sat_min; }));
        k.push_back(real_key("skin.sat_max", [](PipelineConfig& c) -> double& { return c.detect.thresholds.sat_max; }));
        k.push_back(real_key("detect.min_region_area", [](PipelineConfig& c) -> double& { return c.detect.min_region_area; }));
        k.push_back(real_key("detect.r_min_frac", [](PipelineConfig& c) -> double& { return c.detect.r_min_frac; }));
        k.push_back(real_key("detect.r_max_frac", [](PipelineConfig& c) -> double& { return c.detect.r_max_frac; }));
        k.push_back(real_key("detect.confidence_floor", [](PipelineConfig& c) -> double& { return c.detect.confidence_floor; }));
        k.push_back(int_key("detect.max_faces", [](PipelineConfig& c) -> int& { return c.detect.max_faces; }));
        k.push_back(int_key("detect.median_window", [](PipelineConfig& c) -> int& { return c.detect.median_window; }));
        k.push_back(real_key("detect.vote_fraction", [](PipelineConfig& c) -> double& { return c.detect.vote_fraction; }));
        k.push_back(real_key("detect.max_aspect", [](PipelineConfig& c) -> double& { return c.detect.max_aspect; }));
        add_box_keys(k, "anthro.left_eyebrow", &AnthropometricModel::left_eyebrow);
        add_box_keys(k, "anthro.right_eyebrow", &AnthropometricModel::right_eyebrow);
        add_box_keys(k, "anthro.lip", &AnthropometricModel::lip);
        add_box_keys(k, "anthro.nose", &AnthropometricModel::nose);
        k.push_back(int_key("band.n_regions", [](PipelineConfig& c) -> int& { return c.band.n_regions; }));
        k.push_back({"band.weighting",
                     [](const PipelineConfig& c) {
                         return std::string(c.band.weighting == BandWeighting::Uniform ? "uniform" : "gaussian");
                     },
                     [](PipelineConfig& c, const std::string& v) {
                         if (v == "uniform") {
                             c.band.weighting = BandWeighting::Uniform;
                         } else if (v == "gaussian") {
                             c.band.weighting = BandWeighting::Gaussian;
                         } else {
                             throw Error(ErrorKind::ConfigError, "band.weighting must be uniform or gaussian");
                         }
                     }});
        k.push_back(int_key("band.median_window", [](PipelineConfig& c) -> int& { return c.band.median_window; }));
        k.push_back(real_key("band.smooth_sigma", [](PipelineConfig& c) -> double& { return c.band.smooth_sigma; }));
        k.push_back(real_key("band.log_sigma", [](PipelineConfig& c) -> double& { return c.band.log_sigma; }));
        k.push_back(int_key("band.brow_se_a", [](PipelineConfig& c) -> int& { return c.band.brow_se_a; }));
        k.push_back(int_key("band.brow_se_b", [](PipelineConfig& c) -> int& { return c.band.brow_se_b; }));
        k.push_back(int_key("band.lip_se_a", [](PipelineConfig& c) -> int& { return c.band.lip_se_a; }));
        k.push_back(int_key("band.lip_se_b", [](PipelineConfig& c) -> int& { return c.band.lip_se_b; }));
        k.push_back(int_key("band.face_size", [](PipelineConfig& c) -> int& { return c.band.face_size; }));
        k.push_back({"svm.kernel",
                     [](const PipelineConfig& c) {
                         switch (c.kernel.kind) {
                             case KernelKind::Linear: return std::string("linear");
                             case KernelKind::Polynomial: return std::string("polynomial");
                             case KernelKind::Rbf: return std::string("rbf");
                         }
                         return std::string("rbf");
                     },
                     [](PipelineConfig& c, const std::string& v) {
                         if (v == "linear") {
                             c.kernel.kind = KernelKind::Linear;
                         } else if (v == "polynomial") {
                             c.kernel.kind = KernelKind::Polynomial;
                         } else if (v == "rbf") {
                             c.kernel.kind = KernelKind::Rbf;
                         } else {
                             throw Error(ErrorKind::ConfigError, "svm.kernel must be linear, polynomial or rbf");
                         }
                     }});
        k.push_back(int_key("svm.degree", [](PipelineConfig& c) -> int& { return c.kernel.degree; }));
        k.push_back(real_key("svm.coef0", [](PipelineConfig& c) -> double& { return c.kernel.coef0; }));
        k.push_back(real_key("svm.gamma", [](PipelineConfig& c) -> double& { return c.kernel.gamma; }));
        k.push_back(real_key("svm.C", [](PipelineConfig& c) -> double& { return c.train.C; }));
        k.push_back(real_key("svm.kkt_tol", [](PipelineConfig& c) -> double& { return c.train.kkt_tol; }));
        k.push_back(int_key("svm.max_passes", [](PipelineConfig& c) -> int& { return c.train.max_passes; }));
        k.push_back({"seed", [](const PipelineConfig& c) { return std::to_string(c.seed); },
                     [](PipelineConfig& c, const std::string& v) {
                         c.seed = parse_int<std::uint64_t>("seed", v);
                         c.train.seed = c.seed;
                     }});
        return k;
    }();
    return keys;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline std::vector<std::string> config_key_names() {
    std::vector<std::string> out;
    for (const auto& k : detail::config_keys()) out.push_back(k.name);
    return out;
}

inline void set_config_value(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& k : detail::config_keys()) {
        if (k.name == key) {
            k.set(cfg, value);
            return;
        }
    }
    throw Error(ErrorKind::ConfigError, "unknown config key '" + key + "'");
}

inline std::string get_config_value(const PipelineConfig& cfg, const std::string& key) {
    for (const auto& k : detail::config_keys()) {
        if (k.name == key) return k.get(cfg);
    }
    throw Error(ErrorKind::ConfigError, "unknown config key '" + key + "'");
}

/// Writes every key, in a fixed order, so the output doubles as a template.
inline void write_config(std::ostream& os, const PipelineConfig& cfg) {
    os << "# moodpipe configuration\n";
    std::string section;
    for (const auto& k : detail::config_keys()) {
        const auto dot = k.name.find('.');
        const std::string s = dot == std::string::npos ? "" : k.name.substr(0, dot);
        if (s != section) {
            os << '\n';
            section = s;
        }
        os << k.name << " = " << k.get(cfg) << '\n';
    }
}

/// Applies `key = value` lines on top of `base`. Blank lines and `#`
/// comments are skipped; unknown or repeated keys are errors.
inline PipelineConfig read_config(std::istream& in, PipelineConfig base = {}) {
    std::string line;
    std::set<std::string> seen;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::ConfigError, "line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (!seen.insert(key).second) throw Error(ErrorKind::ConfigError, "duplicate key '" + key + "'");
        set_config_value(base, key, value);
    }
    base.validate();
    return base;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot read config " + path.string());
    return read_config(in);
}

}  // namespace moodpipe
