#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "aerialnet/config.hpp"

using namespace aerialnet;

namespace {

std::string config_path(const char* name) { return std::string(AERIALNET_CONFIG_DIR) + "/" + name; }

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    return {std::istreambuf_iterator<char>(f), {}};
}

std::string remove_key(const std::string& text, const std::string& key) {
    std::string out, line;
    std::istringstream in(text);
    while (std::getline(in, line))
        if (line.rfind(key + " ", 0) != 0 && line.rfind(key + "=", 0) != 0) out += line + "\n";
    return out;
}

} // namespace

TEST(ShippedConfigs, UrbanMatchesBuiltIn) {
    const NetworkConfig c = load_config(config_path("urban.cfg"));
    EXPECT_EQ(format_config(c), format_config(urban_config()));
    EXPECT_NEAR(c.dedicated_density() / per_km2, 1.6, 1e-12);
}

TEST(ShippedConfigs, RuralMatchesBuiltIn) {
    const NetworkConfig c = load_config(config_path("rural.cfg"));
    EXPECT_EQ(format_config(c), format_config(rural_config()));
    EXPECT_NEAR(c.channel.a, 4.88, 1e-12);
    EXPECT_NEAR(c.lambda_tb / per_km2, 0.1, 1e-12);
}

TEST(ParseConfig, MissingKeyNamed) {
    const std::string text = remove_key(read_file(config_path("urban.cfg")), "z_db_m");
    try {
        parse_config(text);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "z_db_m");
    }
}

TEST(ParseConfig, UnknownKeyNamed) {
    const std::string text = read_file(config_path("urban.cfg")) + "lambda_x = 3\n";
    try {
        parse_config(text);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "lambda_x");
    }
}

TEST(ParseConfig, DuplicateKeyNamed) {
    const std::string text = read_file(config_path("urban.cfg")) + "a = 12\n";
    try {
        parse_config(text);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "a");
    }
}

TEST(ParseConfig, NonNumericValue) {
    const std::string text = remove_key(read_file(config_path("urban.cfg")), "v_mps") + "v_mps = fast\n";
    EXPECT_THROW(parse_config(text), ConfigError);
}

TEST(ParseConfig, DecibelConversion) {
    const std::string text = remove_key(read_file(config_path("urban.cfg")), "g_s_db") + "g_s_db = 0\n";
    EXPECT_DOUBLE_EQ(parse_config(text).channel.g_s, 1.0);
}

TEST(ParseConfig, NonIntegerShapeRejected) {
    const std::string text = remove_key(read_file(config_path("urban.cfg")), "m_l") + "m_l = 2.5\n";
    try {
        parse_config(text);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "m_l");
    }
}

TEST(ParseConfig, CommentsAndBlankLines) {
    const std::string text = "# header\n\n" + read_file(config_path("urban.cfg")) + "   # trailing\n";
    EXPECT_NO_THROW(parse_config(text));
}

TEST(ParseConfig, NegativeDensityRejected) {
    const std::string text = remove_key(read_file(config_path("urban.cfg")), "lambda_p_per_km") + "lambda_p_per_km = -1\n";
    EXPECT_THROW(parse_config(text), ConfigError);
}

TEST(LoadConfig, MissingFile) { EXPECT_THROW(load_config(config_path("nope.cfg")), ConfigError); }

TEST(ConfigValues, RoundTripThroughKeys) {
    NetworkConfig c = urban_config();
    set_config_value(c, "lambda_p_per_km", 1.25);
    EXPECT_NEAR(c.lambda_p, 1.25e-3, 1e-18);
    EXPECT_NEAR(get_config_value(c, "lambda_p_per_km"), 1.25, 1e-12);
    EXPECT_THROW(set_config_value(c, "bogus", 1.0), ConfigError);
}

TEST(ConfigHash, StableAndSensitive) {
    NetworkConfig a = urban_config(), b = urban_config();
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.lambda_p *= 2.0;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash_hex(a).size(), 16u);
}
