#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "mlpf/config.hpp"

using namespace mlpf;

TEST(ParseConfig, MinimalCtlGetsDefaults) {
  const auto c = parse_config("problem = ctl\nmethod = mlpf\n");
  EXPECT_EQ(c.kernel, KernelKind::square);
  EXPECT_EQ(c.initial, "m7m5");
  EXPECT_EQ(c.eta, 1e-3);
  EXPECT_EQ(c.method, Method::mlpf);
  EXPECT_FALSE(c.use_kdl);
}

TEST(ParseConfig, CommentsAndBlankLines) {
  const auto c = parse_config("# header\n\n  problem = dvg02   # trailing\neta=2e-15\n");
  EXPECT_EQ(c.problem, "dvg02");
  EXPECT_EQ(c.eta, 2e-15);
}

TEST(ParseConfig, NegativeEtaNamesField) {
  try {
    parse_config("problem = ctl\neta = -1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "eta");
    EXPECT_NE(std::string(e.what()).find("eta"), std::string::npos);
  }
}

TEST(ParseConfig, UnknownKeyRejectedWithLine) {
  try {
    parse_config("problem = ctl\n\nlearning_rate = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.field(), "learning_rate");
  }
}

TEST(ParseConfig, SyntaxErrorsCarryLine) {
  try {
    parse_config("problem = ctl\nkernel square\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  try {
    parse_config("max_steps = 1.5\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.field(), "max_steps");
  }
  EXPECT_THROW(parse_config("eta = 1\neta = 2\n"), ConfigError);
  EXPECT_THROW(parse_config("kernel = hinge\n"), ConfigError);
  EXPECT_THROW(parse_config("use_kdl = maybe\n"), ConfigError);
}

TEST(ParseConfig, UnresolvedNamesRejected) {
  EXPECT_THROW(parse_config("problem = rosenbrock\n"), ConfigError);
  EXPECT_THROW(parse_config("problem = ctl\ninitial = nowhere\n"), ConfigError);
  EXPECT_THROW(parse_config("problem = ctl\nx0 = 1, 2, 3\n"), ConfigError);
}

TEST(ParseConfig, KdlOffsetMustClearTarget) {
  try {
    parse_config("problem = ctl\nuse_kdl = true\nkdl_offset = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "kdl_offset");
  }
  EXPECT_NO_THROW(parse_config("problem = ctl\nuse_kdl = true\nkdl_offset = 1.5\n"));
}

TEST(ParseConfig, ExplicitVector) {
  const auto c = parse_config("problem = ctl\nx0 = -7.5, +2\n");
  EXPECT_EQ(c.x0, (std::vector<double>{-7.5, 2.0}));
}

TEST(ParseConfig, IntegersWrittenAsFloats) {
  EXPECT_EQ(parse_config("max_steps = 1e5\n").max_steps, 100000u);
}

TEST(EmitConfig, FullLjSigmoidKdlRoundTrips) {
  RunConfig c = defaults_for("lj13");
  c.kernel = KernelKind::sigmoid_convex;
  c.use_kdl = true;
  c.kdl_offset = 50;
  c.eta = 3.0000000000000004e-4;
  c.alpha = 0.1;
  c.beta = -0.7;
  c.factorized = true;
  c.lj_seed = 17;
  c.rng_seed = 99;
  c.cost_tol = 1e-13;
  c.output = "out/lj.json";
  c.format = TraceFormat::json;
  c.full_resolution = true;
  const auto text = emit_config(c);
  const auto back = parse_config(text);
  EXPECT_EQ(emit_config(back), text);
  EXPECT_EQ(back.eta, c.eta);
  EXPECT_EQ(back.alpha, c.alpha);
  EXPECT_EQ(back.beta, c.beta);
  EXPECT_EQ(back.kernel, c.kernel);
  EXPECT_EQ(back.lj_seed, 17u);
  EXPECT_EQ(back.format, TraceFormat::json);
}

TEST(EmitConfig, CoversEveryKey) {
  const auto text = emit_config(defaults_for("dvg02"));
  for (const auto& k : config_keys()) EXPECT_NE(text.find(k + " = "), std::string::npos) << k;
}

TEST(ShippedConfigs, ParseAndMatchFrozenDefaults) {
  const std::filesystem::path dir = MLPF_SOURCE_DIR "/configs";
  ASSERT_TRUE(std::filesystem::exists(dir));
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".cfg") continue;
    SCOPED_TRACE(entry.path().string());
    EXPECT_NO_THROW(load_config(entry.path().string()));
    ++n;
  }
  EXPECT_GE(n, 3);
  for (const std::string p : {"ctl", "dvg02", "lj13"}) {
    const auto shipped = load_config((dir / (p + ".cfg")).string());
    const auto d = defaults_for(p);
    EXPECT_EQ(shipped.eta, d.eta) << p;
    EXPECT_EQ(shipped.kdl_offset, d.kdl_offset) << p;
    EXPECT_EQ(shipped.use_kdl, d.use_kdl) << p;
  }
}
