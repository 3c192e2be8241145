#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"

using namespace sdp;

TEST(ModelConfig, ParsesKeyValueFile) {
  std::istringstream in("# comment\nencoder_size = 12\nlearning_rate=0.01  # inline\n\nseed = 99\n");
  const auto c = parse_model_config(in);
  EXPECT_EQ(c.encoder_size, 12);
  EXPECT_EQ(c.learning_rate, 0.01);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.decoder_size, ModelConfig{}.decoder_size);
}

TEST(ModelConfig, RejectsBadInput) {
  std::istringstream unknown("encoder_sise = 12\n");
  EXPECT_THROW(parse_model_config(unknown), ConfigError);
  std::istringstream bad("encoder_size = twelve\n");
  EXPECT_THROW(parse_model_config(bad), ConfigError);
  std::istringstream no_eq("encoder_size 12\n");
  EXPECT_THROW(parse_model_config(no_eq), ConfigError);
  std::istringstream invalid("lstm_dropout = 1.5\n");
  EXPECT_THROW(parse_model_config(invalid), ConfigError);
  std::istringstream even("cnn_window = 4\n");
  EXPECT_THROW(parse_model_config(even), ConfigError);
}

TEST(ModelConfig, WriteParseRoundTrip) {
  ModelConfig c;
  c.word_dim = 100;
  c.beta2 = 0.9;
  c.adam_epsilon = 1e-8;
  std::stringstream buf;
  write_model_config(c, buf);
  const auto back = parse_model_config(buf);
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(model_config_from_json(to_json(c)).word_dim, 100);
}

TEST(ModelConfig, ShippedConfigsLoad) {
  const std::string dir = std::string(SDP_DATA_DIR) + "/../configs/";
  const auto desk = load_model_config(dir + "desk.cfg");
  EXPECT_EQ(desk.epochs, 200);
  const auto full = load_model_config(dir + "full_scale.cfg");
  EXPECT_EQ(full.encoder_layers, 3);
  EXPECT_EQ(full.encoder_size, 512);
  EXPECT_EQ(full.decoder_size, 512);
  EXPECT_EQ(full.arc_mlp_size, 512);
  EXPECT_EQ(full.label_mlp_size, 128);
  EXPECT_EQ(full.batch_size, 32);
  EXPECT_EQ(full.beam_size, 5);
}
