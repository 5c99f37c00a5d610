#include "platoon/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "platoon/error.hpp"

namespace platoon {

namespace {

std::string where(const YAML::Node& node, const std::string& field) {
    const auto mark = node.Mark();
    if (mark.line >= 0) return fmt::format("line {}: field '{}'", mark.line + 1, field);
    return fmt::format("field '{}'", field);
}

void reject_unknown(const YAML::Node& node, const std::string& prefix,
                    const std::set<std::string>& allowed) {
    if (!node.IsMap()) {
        throw Error(ErrorCode::ParseError, where(node, prefix) + " must be a mapping");
    }
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) {
            const std::string full = prefix.empty() ? key : prefix + "." + key;
            throw Error(ErrorCode::UnknownKey, where(kv.first, full) + " is not a recognised key");
        }
    }
}

template <typename T>
T read(const YAML::Node& node, const std::string& field) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw Error(ErrorCode::ParseError, where(node, field) + " has the wrong type");
    }
}

template <typename T>
T read_or(const YAML::Node& parent, const char* key, const std::string& prefix, T fallback) {
    const YAML::Node node = parent[key];
    if (!node) return fallback;
    return read<T>(node, prefix + "." + key);
}

std::size_t read_count(const YAML::Node& parent, const char* key, const std::string& prefix,
                       std::size_t fallback) {
    const YAML::Node node = parent[key];
    if (!node) return fallback;
    const auto value = read<long long>(node, prefix + "." + key);
    if (value < 0) throw Error(ErrorCode::ParseError, where(node, prefix + "." + key) + " must be >= 0");
    return static_cast<std::size_t>(value);
}

void set_path(YAML::Node node, const std::vector<std::string>& path, std::size_t depth,
              const YAML::Node& value, const std::string& key) {
    const std::string& part = path[depth];
    const bool last = depth + 1 == path.size();
    if (node.IsSequence()) {
        std::size_t idx = 0;
        try {
            std::size_t used = 0;
            idx = std::stoul(part, &used);
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::UnknownKey, fmt::format("override '{}': '{}' is not an index", key, part));
        }
        if (idx >= node.size()) {
            throw Error(ErrorCode::UnknownKey,
                        fmt::format("override '{}': index {} out of range", key, idx));
        }
        if (last) {
            node[idx] = value;
        } else {
            set_path(node[idx], path, depth + 1, value, key);
        }
        return;
    }
    if (node.IsScalar()) {
        throw Error(ErrorCode::UnknownKey, fmt::format("override '{}': '{}' is not a section", key, part));
    }
    if (last) {
        node[part] = value;
    } else {
        YAML::Node child = node[part];
        if (!child.IsDefined() || child.IsNull()) {
            node[part] = YAML::Node(YAML::NodeType::Map);
        }
        set_path(node[part], path, depth + 1, value, key);
    }
}

void apply_override(YAML::Node& root, const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorCode::ParseError, fmt::format("override '{}' must look like key=value", text));
    }
    const std::string key = text.substr(0, eq);
    std::vector<std::string> path;
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, '.');) {
        if (part.empty()) throw Error(ErrorCode::UnknownKey, fmt::format("override '{}' has an empty key", text));
        path.push_back(part);
    }
    YAML::Node value;
    try {
        value = YAML::Load(text.substr(eq + 1));
    } catch (const YAML::Exception& e) {
        throw Error(ErrorCode::ParseError, fmt::format("override '{}': {}", text, e.msg));
    }
    if (!root.IsDefined() || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
    set_path(root, path, 0, value, key);
}

LeaderProfile read_profile(const YAML::Node& node, const std::filesystem::path& base_dir,
                           double fallback_speed) {
    if (!node || node.IsNull()) return LeaderProfile::constant(fallback_speed);
    reject_unknown(node, "leader.profile", {"knots", "csv"});
    if (node["knots"] && node["csv"]) {
        throw Error(ErrorCode::ParseError, where(node, "leader.profile") + " sets both knots and csv");
    }
    if (node["csv"]) {
        std::filesystem::path path = read<std::string>(node["csv"], "leader.profile.csv");
        if (path.is_relative()) path = base_dir / path;
        return load_leader_csv(path);
    }
    if (node["knots"]) {
        const auto knots = read<std::vector<std::vector<double>>>(node["knots"], "leader.profile.knots");
        std::vector<std::pair<double, double>> pairs;
        for (const auto& kv : knots) {
            if (kv.size() != 2) {
                throw Error(ErrorCode::ParseError,
                            where(node["knots"], "leader.profile.knots") + " entries must be [t, v]");
            }
            pairs.emplace_back(kv[0], kv[1]);
        }
        return LeaderProfile::piecewise(std::move(pairs));
    }
    throw Error(ErrorCode::ParseError, where(node, "leader.profile") + " needs knots or csv");
}

ValidatedConfig read_platoon(const YAML::Node& root, const std::filesystem::path& base_dir,
                             std::vector<VehicleParams>& declared) {
    PlatoonConfig cfg;
    const YAML::Node platoon = root["platoon"];
    bool clip_depth = false;
    if (platoon) {
        reject_unknown(platoon, "platoon", {"Ts", "D", "T", "clip_depth"});
        clip_depth = read_or(platoon, "clip_depth", "platoon", false);
        cfg.sample_time = read_or(platoon, "Ts", "platoon", 0.01);
        cfg.actuation_delay = read_or(platoon, "D", "platoon", 0.7);
        cfg.horizon = read_or(platoon, "T", "platoon", 120.0);
    }

    VehicleParams defaults;
    const YAML::Node dnode = root["defaults"];
    if (dnode) {
        reject_unknown(dnode, "defaults", {"alpha", "b", "c", "length"});
        defaults.alpha = read_or(dnode, "alpha", "defaults", defaults.alpha);
        defaults.b = read_or(dnode, "b", "defaults", defaults.b);
        defaults.c = read_or(dnode, "c", "defaults", defaults.c);
        defaults.length = read_or(dnode, "length", "defaults", defaults.length);
    }

    std::string mode = "offset";
    double follower_speed = 15.0;
    std::optional<double> leader_speed;
    const YAML::Node init = root["initial"];
    if (init) {
        reject_unknown(init, "initial", {"mode", "follower_speed", "leader_speed"});
        mode = read_or<std::string>(init, "mode", "initial", mode);
        if (mode != "offset" && mode != "equilibrium") {
            throw Error(ErrorCode::ParseError,
                        where(init["mode"], "initial.mode") + " must be 'offset' or 'equilibrium'");
        }
        follower_speed = read_or(init, "follower_speed", "initial", follower_speed);
        if (init["leader_speed"]) leader_speed = read<double>(init["leader_speed"], "initial.leader_speed");
    }

    const YAML::Node leader = root["leader"];
    YAML::Node profile_node;
    if (leader) {
        reject_unknown(leader, "leader", {"profile"});
        profile_node = leader["profile"];
    }
    cfg.leader_profile = read_profile(profile_node, base_dir, leader_speed.value_or(14.0));
    const double v_lead = leader_speed.value_or(cfg.leader_profile.speed_at(0.0));

    const YAML::Node vehicles = root["vehicles"];
    if (!vehicles || !vehicles.IsSequence() || vehicles.size() == 0) {
        throw Error(ErrorCode::EmptyPlatoon, "configuration lists no vehicles");
    }
    struct StateOverride {
        std::optional<double> s0, v0, a0;
    };
    std::vector<StateOverride> state_overrides;
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
        const YAML::Node vn = vehicles[i];
        const std::string prefix = fmt::format("vehicles.{}", i);
        reject_unknown(vn, prefix,
                       {"tau", "h", "dc", "m", "alpha", "b", "c", "length", "s0", "v0", "a0"});
        VehicleParams p = defaults;
        p.index = i;
        if (!vn["tau"]) throw Error(ErrorCode::ParseError, where(vn, prefix + ".tau") + " is required");
        p.tau = read<double>(vn["tau"], prefix + ".tau");
        p.h = read_or(vn, "h", prefix, i == 0 ? 1.0 : p.h);
        if (i > 0 && !vn["h"]) throw Error(ErrorCode::ParseError, where(vn, prefix + ".h") + " is required");
        p.dc = read_or(vn, "dc", prefix, 0.0);
        p.m = read_count(vn, "m", prefix, i == 0 ? 0 : 1);
        p.alpha = read_or(vn, "alpha", prefix, p.alpha);
        p.b = read_or(vn, "b", prefix, p.b);
        p.c = read_or(vn, "c", prefix, p.c);
        p.length = read_or(vn, "length", prefix, p.length);
        StateOverride so;
        if (vn["s0"]) so.s0 = read<double>(vn["s0"], prefix + ".s0");
        if (vn["v0"]) so.v0 = read<double>(vn["v0"], prefix + ".v0");
        if (vn["a0"]) so.a0 = read<double>(vn["a0"], prefix + ".a0");
        state_overrides.push_back(so);
        cfg.vehicles.push_back(p);
    }

    declared = cfg.vehicles;
    if (clip_depth) {
        for (std::size_t i = 1; i < cfg.vehicles.size(); ++i) {
            cfg.vehicles[i].m = std::min(cfg.vehicles[i].m, i);
        }
    }

    cfg.initial_state = mode == "equilibrium" ? equilibrium_state(cfg.vehicles, v_lead)
                                              : default_initial_state(cfg.vehicles, v_lead, follower_speed);
    for (std::size_t i = 0; i < cfg.vehicles.size(); ++i) {
        auto& st = cfg.initial_state[i];
        const auto& so = state_overrides[i];
        if (so.v0) {
            st.v = *so.v0;
            if (i > 0) st.s = cfg.vehicles[i].h * st.v;
        }
        if (so.s0) st.s = *so.s0;
        if (so.a0) st.a = *so.a0;
    }
    return validate_platoon(std::move(cfg));
}

RegionTemplate read_analysis(const YAML::Node& node) {
    reject_unknown(node, "analysis", {"tau", "alpha", "b", "c", "h", "dc", "D", "p"});
    RegionTemplate t;
    t.tau = read_or(node, "tau", "analysis", t.tau);
    t.alpha = read_or(node, "alpha", "analysis", t.alpha);
    t.b = read_or(node, "b", "analysis", t.b);
    t.c = read_or(node, "c", "analysis", t.c);
    t.h = read_or(node, "h", "analysis", t.h);
    t.comm_delay = read_or(node, "dc", "analysis", t.comm_delay);
    t.actuation_delay = read_or(node, "D", "analysis", t.actuation_delay);
    if (node["p"]) {
        t.pole = read<double>(node["p"], "analysis.p");
        t.pole_placement = true;
    }
    if (!(t.tau > 0.0)) throw Error(ErrorCode::NonPositiveLag, "analysis.tau must be positive");
    if (!(t.h > 0.0) || t.comm_delay < 0.0 || t.actuation_delay < 0.0) {
        throw Error(ErrorCode::InvalidParameter, "analysis needs h > 0, dc >= 0, D >= 0");
    }
    return t;
}

}  // namespace

LoadedConfig parse_config_text(std::string_view text, const std::vector<std::string>& overrides,
                               const std::filesystem::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw Error(ErrorCode::ParseError, fmt::format("line {}: {}", e.mark.line + 1, e.msg));
    }
    for (const auto& ov : overrides) apply_override(root, ov);
    if (!root.IsMap()) throw Error(ErrorCode::ParseError, "configuration must be a mapping");
    reject_unknown(root, "",
                   {"platoon", "defaults", "initial", "leader", "vehicles", "analysis"});

    LoadedConfig out;
    if (root["vehicles"]) out.platoon.emplace(read_platoon(root, base_dir, out.declared_vehicles));
    if (root["analysis"]) out.analysis = read_analysis(root["analysis"]);
    if (!out.platoon && !out.analysis) {
        throw Error(ErrorCode::ParseError, "configuration needs a vehicles list or an analysis section");
    }
    return out;
}

LoadedConfig parse_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open config '{}'", path.string()));
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), overrides, path.parent_path());
}

}  // namespace platoon
