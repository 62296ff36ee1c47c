#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "bubble/error.hpp"
#include "bubble/scenario.hpp"

using namespace bubble;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::IoError;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Presets, ParameterValues) {
    const ScenarioBundle r1 = make_preset("regime1");
    EXPECT_EQ(r1.params, (ModelParams{4.0, 3.0, 5.0}));
    EXPECT_EQ(r1.spec, (ResponseSpec{0.4, 1, false}));
    EXPECT_EQ(r1.sim.horizon, 500.0);

    const ScenarioBundle r2 = make_preset("regime2");
    EXPECT_EQ(r2.params, (ModelParams{0.2, 20.0, 0.6}));
    EXPECT_EQ(r2.spec, (ResponseSpec{90.0, 2, false}));
    EXPECT_EQ(r2.sim.horizon, 200.0);
    EXPECT_TRUE(r2.paired_ou);

    const ScenarioBundle r3a = make_preset("regime3-a");
    EXPECT_EQ(r3a.params, (ModelParams{0.23, 2.0, 0.6}));
    EXPECT_EQ(r3a.spec, (ResponseSpec{90.0, 2, false}));

    const ScenarioBundle r3b = make_preset("regime3-b");
    EXPECT_EQ(r3b.params, (ModelParams{0.15, 2.0, 0.42}));
    EXPECT_EQ(r3b.spec, (ResponseSpec{90.0, 1, false}));

    EXPECT_GE(make_preset("regime1-serial").sim.horizon, 2000.0);
    EXPECT_TRUE(std::holds_alternative<JumpFundamental>(make_preset("jump-small").schedule));
    EXPECT_TRUE(std::holds_alternative<RandomWalkFundamental>(make_preset("varying-p0").schedule));
    EXPECT_EQ(make_preset("deterministic-suite").params.sigma, 0.0);
}

TEST(Presets, AllNamedPresetsBuildAndValidate) {
    EXPECT_EQ(preset_names().size(), 9u);
    for (const auto& name : preset_names()) {
        const ScenarioBundle b = make_preset(name);
        EXPECT_EQ(b.name, name);
        EXPECT_NO_THROW(b.sim.validate());
        EXPECT_NO_THROW(b.mc.validate());
    }
    EXPECT_EQ(code_of([] { make_preset("nope"); }), ErrorCode::ConfigInvalid);
}

TEST(Parse, EmptyOverridesKeepPreset) {
    const ScenarioBundle base = make_preset("regime3-a");
    EXPECT_EQ(parse_config_text("{}", base), base);
    EXPECT_EQ(parse_config_text("{\"preset\": \"regime3-a\"}", make_preset("regime1")), base);
}

TEST(Parse, OverridesApply) {
    const ScenarioBundle b = parse_config_text(R"({
        "model": {"sigma": 0.0},
        "simulation": {"horizon": 40, "seed": 5, "noise": "uniform",
                       "history": {"type": "linear", "p_end": 1.0, "slope": 2.5}},
        "fundamental": {"type": "jump", "p_minus": 0.0, "p_plus": 0.4, "t_jump": 10},
        "mc": {"replicates": 500, "history": "rejection", "K": 2.0},
        "analysis": {"c_m": 0.05}
    })",
                                               make_preset("regime1"));
    EXPECT_EQ(b.params.sigma, 0.0);
    EXPECT_EQ(b.params.mu, 4.0);
    EXPECT_EQ(b.sim.horizon, 40.0);
    EXPECT_EQ(b.sim.noise.seed, 5u);
    EXPECT_EQ(b.sim.noise.family, NoiseFamily::UniformCentered);
    EXPECT_EQ(std::get<LinearHistory>(b.sim.history), (LinearHistory{1.0, 2.5}));
    EXPECT_EQ(std::get<JumpFundamental>(b.schedule), (JumpFundamental{0.0, 0.4, 10.0}));
    EXPECT_EQ(b.mc.replicates, 500u);
    EXPECT_EQ(b.mc.history, HistoryMode::Rejection);
    EXPECT_EQ(b.mc.K, 2.0);
    EXPECT_EQ(b.c_m, 0.05);
}

TEST(Parse, UnknownKeysRejected) {
    const ScenarioBundle base = make_preset("regime1");
    EXPECT_EQ(code_of([&] { parse_config_text(R"({"modle": {}})", base); }), ErrorCode::ParseError);
    const std::string msg = message_of([&] { parse_config_text(R"({"model": {"sigmaa": 1}})", base); });
    EXPECT_NE(msg.find("model.sigmaa"), std::string::npos) << msg;
}

TEST(Parse, MalformedNumberNamesField) {
    const ScenarioBundle base = make_preset("regime1");
    const std::string msg = message_of([&] { parse_config_text(R"({"model": {"mu": "four"}})", base); });
    EXPECT_NE(msg.find("model.mu"), std::string::npos) << msg;
    EXPECT_EQ(code_of([&] { parse_config_text(R"({"model": {"mu": "four"}})", base); }), ErrorCode::ParseError);
}

TEST(Parse, SyntaxErrorNamesLine) {
    const std::string msg = message_of([] { parse_config_text("{\n  \"model\": {\n    \"mu\": 4,,\n  }\n}", {}); });
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(Parse, SemanticValidation) {
    const ScenarioBundle base = make_preset("regime1");
    EXPECT_EQ(code_of([&] { parse_config_text(R"({"model": {"mu": -1}})", base); }), ErrorCode::ConfigInvalid);
    EXPECT_EQ(code_of([&] { parse_config_text(R"({"simulation": {"dt": 0.3}})", base); }), ErrorCode::ConfigInvalid);
    EXPECT_EQ(code_of([&] { parse_config_text(R"({"mc": {"replicates": 10}})", base); }), ErrorCode::ConfigInvalid);
}

TEST(Parse, RoundTripThroughCanonicalJson) {
    for (const auto& name : preset_names()) {
        ScenarioBundle b = make_preset(name);
        set_seed(b, 31337);
        const std::string text = bundle_to_json(b);
        EXPECT_EQ(parse_config_text(text, ScenarioBundle{}), b) << name;
        EXPECT_EQ(bundle_to_json(parse_config_text(text, ScenarioBundle{})), text);
    }
}

TEST(Parse, FromFile) {
    const auto path = std::filesystem::temp_directory_path() / "bubble_test_config.json";
    {
        std::ofstream f(path);
        f << R"({"preset": "regime2", "simulation": {"horizon": 12}})";
    }
    const ScenarioBundle b = parse_config(path, ScenarioBundle{});
    EXPECT_EQ(b.name, "regime2");
    EXPECT_EQ(b.sim.horizon, 12.0);
    std::filesystem::remove(path);
    EXPECT_EQ(code_of([&] { parse_config(path, ScenarioBundle{}); }), ErrorCode::IoError);
}

TEST(Seed, SetSeedTouchesEveryStream) {
    ScenarioBundle b = make_preset("varying-p0");
    set_seed(b, 99);
    EXPECT_EQ(b.sim.noise.seed, 99u);
    EXPECT_EQ(b.mc.base_seed, 99u);
    EXPECT_EQ(std::get<RandomWalkFundamental>(b.schedule).seed, 99u);
}
