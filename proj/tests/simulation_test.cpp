#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "agri/error.hpp"
#include "agri/simulation.hpp"
#include "support.hpp"

using namespace agri;

namespace {

SimConfig five_nodes(std::uint64_t seed) {
  SimConfig c;
  c.node_count = 5;
  c.hash_power = {1, 1, 1, 1, 1};
  c.rounds = 60;
  c.seed = seed;
  c.partitions = {{10, 20, {{0, 1}, {2, 3, 4}}}};
  return c;
}

void expect_invalid(const SimConfig& c) {
  try {
    validate(c);
    FAIL() << "accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}

}  // namespace

TEST(SimConfig, Validation) {
  SimConfig ok;
  ok.hash_power = {1};
  EXPECT_NO_THROW(validate(ok));

  auto c = ok;
  c.node_count = 0;
  c.hash_power = {};
  expect_invalid(c);
  c = ok;
  c.hash_power = {1, 1};
  expect_invalid(c);
  c = ok;
  c.hash_power = {0};
  expect_invalid(c);
  c = ok;
  c.latency_rounds = 0;
  expect_invalid(c);
  c = ok;
  c.drop_rate = 1'000'001;
  expect_invalid(c);
  c = ok;
  c.block_rate = 1'000'001;
  expect_invalid(c);
  c = ok;
  c.partitions = {{5, 2, {{0}}}};
  expect_invalid(c);
  c = ok;
  c.partitions = {{0, 2, {{3}}}};
  expect_invalid(c);
  c = ok;
  c.adversary = AdversarySpec{4, 0, 1};
  expect_invalid(c);
}

TEST(Simulation, SingleNodeMinesEveryRound) {
  SimConfig c;
  c.hash_power = {1};
  c.rounds = 10;
  c.mining_rounds = 10;
  auto r = run_simulation(c);
  EXPECT_EQ(r.blocks_mined, 10u);
  EXPECT_EQ(r.nodes[0].tip.height, 10u);
  EXPECT_TRUE(r.converged());
  EXPECT_EQ(r.metrics.size(), 10u);
}

TEST(Simulation, QuietTailDefault) {
  SimConfig c;
  c.hash_power = {1};
  c.rounds = 30;
  c.latency_rounds = 2;
  EXPECT_EQ(c.quiet_tail(), 10u);
  EXPECT_EQ(c.mining_end(), 20u);
  c.mining_rounds = 25;
  EXPECT_EQ(c.mining_end(), 25u);
}

TEST(Simulation, SameSeedSameRun) {
  auto c = five_nodes(7);
  c.drop_rate = 50'000;
  auto a = run_simulation(c), b = run_simulation(c);
  EXPECT_EQ(metrics_csv(a), metrics_csv(b));
  EXPECT_EQ(a.messages_dropped, b.messages_dropped);
  c.seed = 8;
  EXPECT_NE(metrics_csv(run_simulation(c)), metrics_csv(a));
}

TEST(Simulation, PartitionHealsIntoOneChain) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto r = run_simulation(five_nodes(seed));
    EXPECT_TRUE(r.converged()) << "seed " << seed;
    for (const auto& n : r.nodes) EXPECT_EQ(n.state_digest, r.nodes[0].state_digest);
  }
}

TEST(Simulation, PartitionSplitsViewsWhileActive) {
  auto c = five_nodes(3);
  c.partitions = {{0, 30, {{0, 1}, {2, 3, 4}}}};
  c.rounds = 30;
  c.mining_rounds = 20;
  Simulation sim(c);
  while (!sim.finished()) sim.step();
  // both sides kept mining on their own fork
  EXPECT_NE(sim.node(0).tip(), sim.node(2).tip());
  EXPECT_EQ(sim.node(0).tip(), sim.node(1).tip());
  EXPECT_EQ(sim.node(2).tip(), sim.node(4).tip());
}

TEST(Simulation, LossyNetworkAgreesAfterMiningStops) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto c = five_nodes(seed);
    c.drop_rate = 100'000;
    c.latency_rounds = 2;
    c.mining_rounds = 30;
    c.rounds = 30 + 4 * c.latency_rounds;
    Simulation sim(c);
    while (!sim.finished()) sim.step();
    EXPECT_TRUE(sim.tips_agree()) << "seed " << seed;
  }
}

TEST(Simulation, AdoptedChainsAreValid) {
  auto c = five_nodes(11);
  c.tx_per_round = 3;
  Simulation sim(c);
  while (!sim.finished()) sim.step();
  for (std::size_t i = 0; i < sim.node_count(); ++i) {
    const auto& node = sim.node(i);
    auto chain = node.main_chain();
    ASSERT_TRUE(validate_chain(chain, node.genesis_digest()).ok());
    EXPECT_EQ(state_digest(replay(chain, c.chain_params())), state_digest(*node.tip_state()));
    // Mempool holds only transactions that are not on the chain and still apply.
    std::set<Digest> on_chain;
    for (const auto& b : chain)
      for (const auto& t : b.transactions) on_chain.insert(t.id());
    auto state = *node.tip_state();
    for (const auto& t : node.mempool()) {
      EXPECT_FALSE(on_chain.contains(t.id()));
      auto status = validate_transaction(state, t, node.admission_time(), c.chain_params());
      EXPECT_TRUE(status.ok()) << status.message;
      apply_transaction_in_place(state, t, node.admission_time(), c.chain_params());
    }
  }
}

TEST(Simulation, WorkloadReachesTheChain) {
  auto c = five_nodes(2);
  c.partitions.clear();
  auto r = run_simulation(c);
  Simulation sim(c);
  while (!sim.finished()) sim.step();
  auto state = sim.node(0).tip_state();
  EXPECT_GT(state->lots.size(), 10u);
  EXPECT_GT(r.messages_sent, 0u);
}

TEST(Simulation, MetricsCsv) {
  SimConfig c;
  c.node_count = 2;
  c.hash_power = {1, 3};
  c.rounds = 4;
  auto r = run_simulation(c);
  auto csv = metrics_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "round,node,height,mempool_size,tip_digest");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
  }
  EXPECT_EQ(rows, 8u);
  EXPECT_EQ(r.metrics.back().round, 3u);
  EXPECT_EQ(r.metrics.back().node, 1u);
}

TEST(Simulation, WeakWithholderUsuallyFails) {
  int succeeded = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto c = five_nodes(seed);
    c.partitions.clear();
    c.hash_power = {12, 7, 7, 7, 7};
    c.rounds = 50;
    c.adversary = AdversarySpec{0, 5, 30};
    auto r = run_simulation(c);
    ASSERT_TRUE(r.released_tip);
    EXPECT_GT(r.withheld_blocks, 0u);
    succeeded += r.rewrite_succeeded;
  }
  EXPECT_LE(succeeded, 1);
}

TEST(Simulation, StrongWithholderRewritesHistory) {
  int succeeded = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto c = five_nodes(seed);
    c.partitions.clear();
    c.hash_power = {28, 3, 3, 3, 3};
    c.rounds = 50;
    c.adversary = AdversarySpec{0, 5, 30};
    auto r = run_simulation(c);
    succeeded += r.rewrite_succeeded;
    if (r.rewrite_succeeded) EXPECT_TRUE(r.converged());
  }
  EXPECT_GE(succeeded, 4);
}
