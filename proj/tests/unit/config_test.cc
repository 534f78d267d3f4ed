#include "bandit/config.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace bandit {
namespace {

using testing::code_of;

TEST(ConfigTest, EmptyFileRunsDefaultReproduction) {
  const ExperimentConfig cfg = parse_config("# nothing\n");
  EXPECT_EQ(cfg.env.kind, EnvKind::kSynthetic);
  EXPECT_EQ(cfg.env.d, 16);
  EXPECT_EQ(cfg.env.n, 100);
  EXPECT_EQ(cfg.env.zeta, 0.02);
  EXPECT_EQ(cfg.horizon, 10000u);
  EXPECT_EQ(cfg.trials, 8u);
  ASSERT_EQ(cfg.policies.size(), 6u);
  for (const auto& p : cfg.policies) {
    EXPECT_EQ(p.beta.size() * p.lambda.size(), 9u) << p.name;
  }
}

TEST(ConfigTest, ParsesKeysAndLists) {
  const ExperimentConfig cfg = parse_config(R"(
env.kind = synthetic   # trailing comment
env.d = 8
env.zeta = 0.1
horizon = 50
trials = 2
base_seed = 9
audits = off
audits.coverage = on
theory.delta = 0.05
policy.a.kind = ds_oful
policy.a.gamma = 0.01, 0.02
policy.a.beta = 1,3
policy.a.mode = heuristic
policy.b.kind = suplinucb
policy.b.level_beta = constant
)");
  EXPECT_EQ(cfg.env.d, 8);
  EXPECT_EQ(cfg.horizon, 50u);
  EXPECT_EQ(cfg.base_seed, 9u);
  EXPECT_FALSE(cfg.audits.selection_cap);
  EXPECT_TRUE(cfg.audits.coverage);
  EXPECT_EQ(cfg.failure_prob, 0.05);
  ASSERT_EQ(cfg.policies.size(), 2u);
  EXPECT_EQ(cfg.policies[0].name, "a");
  EXPECT_EQ(cfg.policies[0].gamma, (std::vector<double>{0.01, 0.02}));
  EXPECT_EQ(cfg.policies[0].mode, ParamMode::kHeuristic);
  EXPECT_EQ(cfg.policies[1].kind, PolicyKind::kSupLinUcb);
  EXPECT_EQ(cfg.policies[1].level_beta, LevelBeta::kConstant);
}

TEST(ConfigTest, PolicyNamesMayContainDots) {
  const ExperimentConfig cfg = parse_config("policy.ds_0.05.kind = ds_oful\npolicy.ds_0.05.gamma = 0.05\n");
  ASSERT_EQ(cfg.policies.size(), 1u);
  EXPECT_EQ(cfg.policies[0].name, "ds_0.05");
}

TEST(ConfigTest, DatasetFilterAcceptsInfinity) {
  const ExperimentConfig cfg = parse_config("env.kind = dataset\nenv.path = x.txt\nenv.zeta = inf\n");
  EXPECT_TRUE(std::isinf(cfg.env.zeta));
}

TEST(ConfigTest, RejectsBrokenInput) {
  for (const char* text : {"horizon = 0\n", "trials = 0\n", "bogus = 1\n", "horizon\n", "env.d = x\n",
                           "env.kind = cloud\n", "policy.a.kind = nope\n", "policy.a.lambda = 0\n",
                           "policy.a.colour = red\n", "env.kind = dataset\n", "audits = maybe\n",
                           "theory.delta = 1\n"}) {
    EXPECT_EQ(code_of([&] { parse_config(text); }), ErrorCode::kInvalidConfig) << text;
  }
}

TEST(ConfigTest, MissingFile) {
  EXPECT_EQ(code_of([] { load_config("/nonexistent/bandit.conf"); }), ErrorCode::kInvalidConfig);
}

}  // namespace
}  // namespace bandit
