#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bubble/error.hpp"
#include "bubble/scenario.hpp"

namespace bubble {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::ParseError, "field '" + field + "': " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) {
        fail(path.empty() ? "<root>" : path, "expected an object");
    }
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    require_object(j, path);
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            fail(join(path, key), "unknown key");
        }
    }
}

void read(const json& j, const std::string& path, const char* key, double& out) {
    if (!j.contains(key)) {
        return;
    }
    const json& v = j.at(key);
    if (!v.is_number()) {
        fail(join(path, key), "expected a number, got " + v.dump());
    }
    out = v.get<double>();
}

void read(const json& j, const std::string& path, const char* key, bool& out) {
    if (!j.contains(key)) {
        return;
    }
    const json& v = j.at(key);
    if (!v.is_boolean()) {
        fail(join(path, key), "expected true or false, got " + v.dump());
    }
    out = v.get<bool>();
}

void read(const json& j, const std::string& path, const char* key, std::uint64_t& out) {
    if (!j.contains(key)) {
        return;
    }
    const json& v = j.at(key);
    if (v.is_number_unsigned()) {
        out = v.get<std::uint64_t>();
    } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        out = static_cast<std::uint64_t>(v.get<std::int64_t>());
    } else {
        fail(join(path, key), "expected a non-negative integer, got " + v.dump());
    }
}

void read(const json& j, const std::string& path, const char* key, int& out) {
    if (!j.contains(key)) {
        return;
    }
    const json& v = j.at(key);
    if (!v.is_number_integer()) {
        fail(join(path, key), "expected an integer, got " + v.dump());
    }
    out = v.get<int>();
}

std::string read_tag(const json& j, const std::string& path, const char* key, std::string fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_string()) {
        fail(join(path, key), "expected a string, got " + v.dump());
    }
    return v.get<std::string>();
}

std::string schedule_tag(const FundamentalSchedule& s) {
    if (std::holds_alternative<ConstantFundamental>(s)) return "constant";
    if (std::holds_alternative<JumpFundamental>(s)) return "jump";
    return "random_walk";
}

std::string history_tag(const InitialHistory& h) {
    if (std::holds_alternative<ConstantHistory>(h)) return "constant";
    if (std::holds_alternative<LinearHistory>(h)) return "linear";
    return "sampled";
}

void apply_fundamental(const json& j, FundamentalSchedule& schedule) {
    const std::string path = "fundamental";
    require_object(j, path);
    const std::string type = read_tag(j, path, "type", schedule_tag(schedule));
    if (type == "constant") {
        check_keys(j, path, {"type", "p0"});
        ConstantFundamental c = std::holds_alternative<ConstantFundamental>(schedule)
                                    ? std::get<ConstantFundamental>(schedule)
                                    : ConstantFundamental{};
        read(j, path, "p0", c.p0);
        schedule = c;
    } else if (type == "jump") {
        check_keys(j, path, {"type", "p_minus", "p_plus", "t_jump"});
        JumpFundamental c =
            std::holds_alternative<JumpFundamental>(schedule) ? std::get<JumpFundamental>(schedule) : JumpFundamental{};
        read(j, path, "p_minus", c.p_minus);
        read(j, path, "p_plus", c.p_plus);
        read(j, path, "t_jump", c.t_jump);
        schedule = c;
    } else if (type == "random_walk") {
        check_keys(j, path, {"type", "p_start", "drift", "vol", "seed"});
        RandomWalkFundamental c = std::holds_alternative<RandomWalkFundamental>(schedule)
                                      ? std::get<RandomWalkFundamental>(schedule)
                                      : RandomWalkFundamental{};
        read(j, path, "p_start", c.p_start);
        read(j, path, "drift", c.drift);
        read(j, path, "vol", c.vol);
        read(j, path, "seed", c.seed);
        schedule = c;
    } else {
        fail("fundamental.type", "expected constant, jump or random_walk, got \"" + type + "\"");
    }
}

void apply_history(const json& j, InitialHistory& history) {
    const std::string path = "simulation.history";
    require_object(j, path);
    const std::string type = read_tag(j, path, "type", history_tag(history));
    if (type == "constant") {
        check_keys(j, path, {"type", "p_init"});
        ConstantHistory c =
            std::holds_alternative<ConstantHistory>(history) ? std::get<ConstantHistory>(history) : ConstantHistory{};
        read(j, path, "p_init", c.p_init);
        history = c;
    } else if (type == "linear") {
        check_keys(j, path, {"type", "p_end", "slope"});
        LinearHistory c =
            std::holds_alternative<LinearHistory>(history) ? std::get<LinearHistory>(history) : LinearHistory{};
        read(j, path, "p_end", c.p_end);
        read(j, path, "slope", c.slope);
        history = c;
    } else if (type == "sampled") {
        check_keys(j, path, {"type", "values"});
        SampledHistory c;
        if (!j.contains("values") || !j.at("values").is_array()) {
            fail(join(path, "values"), "expected an array of numbers");
        }
        for (const auto& v : j.at("values")) {
            if (!v.is_number()) {
                fail(join(path, "values"), "expected an array of numbers, found " + v.dump());
            }
            c.values.push_back(v.get<double>());
        }
        history = c;
    } else {
        fail(join(path, "type"), "expected constant, linear or sampled, got \"" + type + "\"");
    }
}

NoiseFamily parse_family(const std::string& field, const std::string& tag) {
    if (tag == "gaussian") return NoiseFamily::Gaussian;
    if (tag == "uniform") return NoiseFamily::UniformCentered;
    fail(field, "expected gaussian or uniform, got \"" + tag + "\"");
}

std::string family_tag(NoiseFamily f) { return f == NoiseFamily::Gaussian ? "gaussian" : "uniform"; }

void apply_overrides(const json& root, ScenarioBundle& b) {
    check_keys(root, "", {"preset", "name", "model", "response", "fundamental", "simulation", "analysis", "mc",
                          "paired_ou"});
    if (root.contains("name")) {
        b.name = read_tag(root, "", "name", b.name);
    }
    if (root.contains("model")) {
        const json& j = root.at("model");
        check_keys(j, "model", {"mu", "sigma", "nu"});
        read(j, "model", "mu", b.params.mu);
        read(j, "model", "sigma", b.params.sigma);
        read(j, "model", "nu", b.params.nu);
    }
    if (root.contains("response")) {
        const json& j = root.at("response");
        check_keys(j, "response", {"family", "d", "n", "normalized"});
        const std::string family = read_tag(j, "response", "family", "arctan-poly");
        if (family != "arctan-poly") {
            fail("response.family", "only arctan-poly is supported");
        }
        read(j, "response", "d", b.spec.d);
        read(j, "response", "n", b.spec.n);
        read(j, "response", "normalized", b.spec.normalized);
    }
    if (root.contains("fundamental")) {
        apply_fundamental(root.at("fundamental"), b.schedule);
    }
    if (root.contains("simulation")) {
        const json& j = root.at("simulation");
        check_keys(j, "simulation", {"dt", "horizon", "seed", "noise", "record_stride", "history"});
        read(j, "simulation", "dt", b.sim.dt);
        read(j, "simulation", "horizon", b.sim.horizon);
        read(j, "simulation", "seed", b.sim.noise.seed);
        read(j, "simulation", "record_stride", b.sim.record_stride);
        if (j.contains("noise")) {
            b.sim.noise.family = parse_family("simulation.noise", read_tag(j, "simulation", "noise", ""));
        }
        if (j.contains("history")) {
            apply_history(j.at("history"), b.sim.history);
        }
    }
    if (root.contains("analysis")) {
        const json& j = root.at("analysis");
        check_keys(j, "analysis", {"c_m"});
        read(j, "analysis", "c_m", b.c_m);
    }
    if (root.contains("mc")) {
        const json& j = root.at("mc");
        check_keys(j, "mc", {"replicates", "base_seed", "dt", "K", "noise", "history", "bubble_start_offset",
                             "collapse_start_offset", "max_attempts"});
        read(j, "mc", "replicates", b.mc.replicates);
        read(j, "mc", "base_seed", b.mc.base_seed);
        read(j, "mc", "dt", b.mc.dt);
        read(j, "mc", "K", b.mc.K);
        read(j, "mc", "bubble_start_offset", b.mc.bubble_start_offset);
        read(j, "mc", "collapse_start_offset", b.mc.collapse_start_offset);
        read(j, "mc", "max_attempts", b.mc.max_attempts);
        if (j.contains("noise")) {
            b.mc.noise = parse_family("mc.noise", read_tag(j, "mc", "noise", ""));
        }
        if (j.contains("history")) {
            const std::string tag = read_tag(j, "mc", "history", "");
            if (tag == "deterministic") {
                b.mc.history = HistoryMode::Deterministic;
            } else if (tag == "rejection") {
                b.mc.history = HistoryMode::Rejection;
            } else {
                fail("mc.history", "expected deterministic or rejection, got \"" + tag + "\"");
            }
        }
    }
    read(root, "", "paired_ou", b.paired_ou);
}

}  // namespace

ScenarioBundle parse_config_text(std::string_view text, const ScenarioBundle& base) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
        std::ostringstream msg;
        msg << "line " << line << ": " << e.what();
        throw Error(ErrorCode::ParseError, msg.str());
    }
    require_object(root, "");
    ScenarioBundle b = base;
    if (root.contains("preset")) {
        const std::string preset = read_tag(root, "", "preset", "");
        try {
            b = make_preset(preset);
        } catch (const Error&) {
            fail("preset", "unknown preset \"" + preset + "\"");
        }
    }
    apply_overrides(root, b);
    b.params.validate();
    b.spec.validate();
    b.sim.validate();
    b.mc.validate();
    validate_schedule(b.schedule, b.params, b.sim.horizon);
    if (!(b.c_m > 0.0)) {
        throw Error(ErrorCode::ConfigInvalid, "analysis.c_m must be positive");
    }
    return b;
}

ScenarioBundle parse_config(const std::filesystem::path& path, const ScenarioBundle& base) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw Error(ErrorCode::IoError, "cannot read " + path.string());
    }
    std::ostringstream text;
    text << f.rdbuf();
    return parse_config_text(text.str(), base);
}

std::string bundle_to_json(const ScenarioBundle& b) {
    ordered_json fundamental;
    if (const auto* c = std::get_if<ConstantFundamental>(&b.schedule)) {
        fundamental = {{"type", "constant"}, {"p0", c->p0}};
    } else if (const auto* jmp = std::get_if<JumpFundamental>(&b.schedule)) {
        fundamental = {{"type", "jump"}, {"p_minus", jmp->p_minus}, {"p_plus", jmp->p_plus}, {"t_jump", jmp->t_jump}};
    } else {
        const auto& r = std::get<RandomWalkFundamental>(b.schedule);
        fundamental = {{"type", "random_walk"}, {"p_start", r.p_start}, {"drift", r.drift}, {"vol", r.vol},
                       {"seed", r.seed}};
    }
    ordered_json history;
    if (const auto* c = std::get_if<ConstantHistory>(&b.sim.history)) {
        history = {{"type", "constant"}, {"p_init", c->p_init}};
    } else if (const auto* l = std::get_if<LinearHistory>(&b.sim.history)) {
        history = {{"type", "linear"}, {"p_end", l->p_end}, {"slope", l->slope}};
    } else {
        history = {{"type", "sampled"}, {"values", std::get<SampledHistory>(b.sim.history).values}};
    }
    ordered_json j = {
        {"name", b.name},
        {"model", {{"mu", b.params.mu}, {"sigma", b.params.sigma}, {"nu", b.params.nu}}},
        {"response", {{"family", "arctan-poly"}, {"d", b.spec.d}, {"n", b.spec.n}, {"normalized", b.spec.normalized}}},
        {"fundamental", fundamental},
        {"simulation",
         {{"dt", b.sim.dt},
          {"horizon", b.sim.horizon},
          {"seed", b.sim.noise.seed},
          {"noise", family_tag(b.sim.noise.family)},
          {"record_stride", b.sim.record_stride},
          {"history", history}}},
        {"analysis", {{"c_m", b.c_m}}},
        {"mc",
         {{"replicates", b.mc.replicates},
          {"base_seed", b.mc.base_seed},
          {"dt", b.mc.dt},
          {"K", b.mc.K},
          {"noise", family_tag(b.mc.noise)},
          {"history", b.mc.history == HistoryMode::Deterministic ? "deterministic" : "rejection"},
          {"bubble_start_offset", b.mc.bubble_start_offset},
          {"collapse_start_offset", b.mc.collapse_start_offset},
          {"max_attempts", b.mc.max_attempts}}},
        {"paired_ou", b.paired_ou},
    };
    return j.dump(2) + "\n";
}

}  // namespace bubble
