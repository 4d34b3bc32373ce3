#include <gtest/gtest.h>

#include <random>

#include "exactcache/bench.hpp"
#include "exactcache/classify.hpp"
#include "support.hpp"

using namespace exactcache;

namespace {

const char* kLoopProgram = R"({"name": "loop", "entry": "a", "vertices": ["a", "b", "c", "d", "exit"],
  "edges": [{"from": "a", "to": "b", "access": null}, {"from": "b", "to": "c", "access": 0},
            {"from": "c", "to": "d", "access": 8}, {"from": "d", "to": "b", "access": null},
            {"from": "d", "to": "exit", "access": null}]})";

ClassifyOptions with_mode(Mode m, InitMode init = InitMode::Empty) {
  ClassifyOptions o;
  o.mode = m;
  o.init = init;
  return o;
}

std::vector<Verdict> verdicts_of(const ClassifyResult& r) {
  std::vector<Verdict> out;
  for (const auto& fv : r.verdicts) out.push_back(fv.verdict);
  return out;
}

std::size_t provenance_total(const PhaseStats& s) {
  std::size_t t = 0;
  for (auto c : s.by_provenance) t += c;
  return t;
}

struct Program {
  Cfg g;
  CacheConfig config;
  InitMode init;
};

std::vector<Program> corpus(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<Program> out;
  for (int i = 0; i < count; ++i) {
    const std::size_t vertices = 2 + rng() % 8;
    const CacheConfig config{static_cast<unsigned>(1 + rng() % 3), std::uint64_t{1} << (rng() % 2), 8};
    out.push_back({exactcache::testing::random_cfg(rng, vertices, 1 + rng() % 5, vertices + rng() % 7, 0.7),
                   config, rng() % 2 ? InitMode::Unknown : InitMode::Empty});
  }
  for (int i = 0; i < count; ++i) {
    GenSpec spec;
    spec.seed = seed * 7919 + static_cast<std::uint64_t>(i);
    spec.blocks = 1 + i % 5;
    spec.block_size = 8;
    spec.loops = i % 3;
    spec.max_depth = 1 + i % 2;
    const CacheConfig config{static_cast<unsigned>(1 + i % 4), 1, 8};
    out.push_back({generate(spec), config, i % 2 ? InitMode::Unknown : InitMode::Empty});
  }
  return out;
}

}  // namespace

TEST(Modes, NamesRoundTrip) {
  for (Mode m : {Mode::AiOnly, Mode::AiMc, Mode::McOnly, Mode::AiMcNoDu}) EXPECT_EQ(parse_mode(to_string(m)), m);
  EXPECT_THROW(parse_mode("fast"), std::invalid_argument);
  EXPECT_EQ(to_string(Provenance::EhEm), "eh+em");
}

TEST(ClassifyAll, LoopProgramNeedsNoModelChecking) {
  for (unsigned k : {2u, 4u}) {
    const CacheConfig config{k, 1, 8};
    const auto r = classify_all(parse_cfg(kLoopProgram, config), config, with_mode(Mode::AiMc));
    ASSERT_EQ(r.verdicts.size(), 2u);
    for (const auto& fv : r.verdicts) {
      EXPECT_EQ(fv.verdict, Verdict::DefinitelyUnknown);
      EXPECT_EQ(fv.provenance, Provenance::EhEm);
    }
    EXPECT_EQ(r.stats.focused_runs, 0u);
    EXPECT_EQ(r.stats.count(Provenance::EhEm), 2u);
  }
}

TEST(ClassifyAll, LoopProgramAiOnlyLeavesFlaggedResiduals) {
  const CacheConfig config{2, 1, 8};
  const auto r = classify_all(parse_cfg(kLoopProgram, config), config, with_mode(Mode::AiOnly));
  for (const auto& fv : r.verdicts) {
    EXPECT_EQ(fv.verdict, Verdict::Unknown);
    EXPECT_EQ(fv.provenance, Provenance::Unresolved);
    EXPECT_TRUE(fv.exists_hit);
    EXPECT_TRUE(fv.exists_miss);
  }
  EXPECT_EQ(r.stats.focused_runs, 0u);
}

TEST(ClassifyAll, LoopProgramWithoutDuCallsTheModelChecker) {
  const CacheConfig config{2, 1, 8};
  const auto r = classify_all(parse_cfg(kLoopProgram, config), config, with_mode(Mode::AiMcNoDu));
  EXPECT_EQ(r.stats.focused_runs, 2u);
  for (const auto& fv : r.verdicts) {
    EXPECT_EQ(fv.verdict, Verdict::DefinitelyUnknown);
    EXPECT_EQ(fv.provenance, Provenance::McRefutedBoth);
    EXPECT_TRUE(fv.checked_always_hit && fv.checked_always_miss);
  }
}

TEST(ClassifyAll, RepeatedAccessHitsByMust) {
  const CacheConfig config{2, 1, 8};
  const Cfg g = parse_cfg(R"({"entry": "s", "vertices": ["s", "m", "t"],
    "edges": [{"from": "s", "to": "m", "access": 0}, {"from": "m", "to": "t", "access": 4}]})",
                          config);
  const auto r = classify_all(g, config, with_mode(Mode::AiMc));
  ASSERT_EQ(r.verdicts.size(), 2u);
  EXPECT_EQ(r.verdicts[0].verdict, Verdict::AlwaysMiss);
  EXPECT_EQ(r.verdicts[0].provenance, Provenance::May);
  EXPECT_EQ(r.verdicts[1].verdict, Verdict::AlwaysHit);
  EXPECT_EQ(r.verdicts[1].provenance, Provenance::Must);
  EXPECT_EQ(r.stats.focused_runs, 0u);
}

TEST(ClassifyAll, EmptyGraphGivesEmptyResult) {
  const CacheConfig config{2, 1, 8};
  const Cfg g = parse_cfg(R"({"entry": "s", "vertices": ["s"], "edges": []})", config);
  const auto r = classify_all(g, config, with_mode(Mode::AiMc));
  EXPECT_TRUE(r.verdicts.empty());
  EXPECT_EQ(r.stats.accesses, 0u);
  EXPECT_TRUE(verify_against_oracle(g, config, with_mode(Mode::AiMc)).entries.empty());
}

TEST(ClassifyAll, MatchesIndependentSimulation) {
  for (const auto& p : corpus(21, 120)) {
    const auto expected = exactcache::testing::brute_force_verdicts(p.g, p.config, p.init);
    for (Mode m : {Mode::AiMc, Mode::McOnly, Mode::AiMcNoDu}) {
      const auto r = classify_all(p.g, p.config, with_mode(m, p.init));
      ASSERT_TRUE(r.errors.empty());
      ASSERT_EQ(r.verdicts.size(), expected.size());
      for (const auto& fv : r.verdicts)
        ASSERT_EQ(fv.verdict, expected.at(fv.access))
            << to_string(fv.access, p.g.vertex_names()) << " mode " << to_string(m) << "\n"
            << serialize_cfg(p.g);
    }
  }
}

TEST(ClassifyAll, AiVerdictsAreSoundAndKeptByModelChecking) {
  for (const auto& p : corpus(22, 100)) {
    const auto expected = exactcache::testing::brute_force_verdicts(p.g, p.config, p.init);
    const auto ai = classify_all(p.g, p.config, with_mode(Mode::AiOnly, p.init));
    const auto full = classify_all(p.g, p.config, with_mode(Mode::AiMc, p.init));
    ASSERT_EQ(ai.verdicts.size(), full.verdicts.size());
    for (std::size_t i = 0; i < ai.verdicts.size(); ++i) {
      const auto& a = ai.verdicts[i];
      const Verdict truth = expected.at(a.access);
      if (a.verdict != Verdict::Unknown) {
        EXPECT_EQ(a.verdict, truth);
        EXPECT_EQ(full.verdicts[i].verdict, a.verdict);
        EXPECT_EQ(full.verdicts[i].provenance, a.provenance);
      }
      if (a.exists_hit) {
        EXPECT_NE(truth, Verdict::AlwaysMiss);
      }
      if (a.exists_miss) {
        EXPECT_NE(truth, Verdict::AlwaysHit);
      }
      if (full.verdicts[i].provenance == Provenance::EhEm) {
        EXPECT_EQ(truth, Verdict::DefinitelyUnknown);
      }
    }
  }
}

TEST(ClassifyAll, ConservationAndFocusedRunOrdering) {
  for (const auto& p : corpus(23, 100)) {
    std::size_t runs[4] = {};
    for (Mode m : {Mode::AiOnly, Mode::AiMc, Mode::McOnly, Mode::AiMcNoDu}) {
      const auto r = classify_all(p.g, p.config, with_mode(m, p.init));
      EXPECT_EQ(provenance_total(r.stats), r.stats.accesses);
      EXPECT_EQ(r.stats.accesses, r.verdicts.size());
      runs[static_cast<int>(m)] = r.stats.focused_runs;
    }
    EXPECT_EQ(runs[static_cast<int>(Mode::AiOnly)], 0u);
    EXPECT_LE(runs[static_cast<int>(Mode::AiMc)], runs[static_cast<int>(Mode::AiMcNoDu)]);
    EXPECT_LE(runs[static_cast<int>(Mode::AiMcNoDu)], runs[static_cast<int>(Mode::McOnly)]);
  }
}

TEST(ClassifyAll, OptionsNeverChangeVerdicts) {
  for (const auto& p : corpus(24, 80)) {
    for (Mode m : {Mode::AiMc, Mode::AiMcNoDu, Mode::McOnly}) {
      const auto base = classify_all(p.g, p.config, with_mode(m, p.init));
      for (int variant = 0; variant < 3; ++variant) {
        ClassifyOptions o = with_mode(m, p.init);
        o.simplify = variant != 0;
        o.early_exit = variant != 1;
        o.jobs = variant == 2 ? 3 : 1;
        EXPECT_EQ(verdicts_of(classify_all(p.g, p.config, o)), verdicts_of(base));
      }
    }
  }
}

TEST(ClassifyAll, SingleSidedCheckFromTheGenerator) {
  // Look for an access where the EH analysis proves a hit path but the EM
  // analysis proves nothing: only the always-hit question should be asked.
  bool found_hit_only = false, found_miss_only = false;
  for (std::uint64_t seed = 1; seed <= 3000 && !(found_hit_only && found_miss_only); ++seed) {
    GenSpec spec;
    spec.seed = seed;
    spec.blocks = 2 + seed % 4;
    spec.block_size = 8;
    spec.loops = 1 + seed % 2;
    spec.max_depth = 1 + seed % 2;
    spec.branch_probability = 0.5;
    const Cfg g = generate(spec);
    for (unsigned k : {2u, 3u}) {
      const CacheConfig config{k, 1, 8};
      const auto r = classify_all(g, config, with_mode(Mode::AiMc));
      const auto truth = exactcache::testing::brute_force_verdicts(g, config, InitMode::Empty);
      for (const auto& fv : r.verdicts) {
        if (fv.exists_hit != fv.exists_miss) {
          EXPECT_EQ(fv.verdict, truth.at(fv.access));
          EXPECT_EQ(fv.checked_always_hit, fv.exists_hit);
          EXPECT_EQ(fv.checked_always_miss, fv.exists_miss);
          (fv.exists_hit ? found_hit_only : found_miss_only) = true;
        }
      }
    }
  }
  EXPECT_TRUE(found_hit_only);
  EXPECT_TRUE(found_miss_only);
}

TEST(ClassifyAll, BudgetErrorsKeepOtherResults) {
  const CacheConfig config{2, 2, 8};
  const Cfg g = parse_cfg(R"({"entry": "a", "vertices": ["a", "b", "c", "d", "e", "x", "y"],
    "edges": [{"from": "a", "to": "b", "access": null}, {"from": "b", "to": "c", "access": 0},
              {"from": "c", "to": "d", "access": 16}, {"from": "d", "to": "b", "access": null},
              {"from": "d", "to": "e", "access": null},
              {"from": "a", "to": "x", "access": 8}, {"from": "x", "to": "y", "access": 8}]})",
                          config);
  // Set 1 reaches 7 (vertex, state) pairs, both focused runs of set 0 need more.
  ClassifyOptions o = with_mode(Mode::McOnly);
  o.mc_budget = 7;
  o.early_exit = false;
  const auto r = classify_all(g, config, o);
  EXPECT_FALSE(r.errors.empty());
  EXPECT_EQ(provenance_total(r.stats), r.stats.accesses);
  EXPECT_GT(r.stats.count(Provenance::Unresolved), 0u);
  bool set_one_resolved = false;
  for (const auto& fv : r.verdicts)
    if (fv.set_index == 1) set_one_resolved = fv.provenance != Provenance::Unresolved || set_one_resolved;
  EXPECT_TRUE(set_one_resolved);
}

TEST(ClassifyAll, ResultsAreIndependentOfThreadCount) {
  const CacheConfig config{2, 4, 8};
  std::mt19937_64 rng(5);
  const Cfg g = exactcache::testing::random_cfg(rng, 9, 8, 16, 0.9);
  ClassifyOptions one = with_mode(Mode::AiMc), four = one;
  four.jobs = 4;
  const auto a = classify_all(g, config, one), b = classify_all(g, config, four);
  ASSERT_EQ(a.verdicts.size(), b.verdicts.size());
  for (std::size_t i = 0; i < a.verdicts.size(); ++i) {
    EXPECT_EQ(a.verdicts[i].access, b.verdicts[i].access);
    EXPECT_EQ(a.verdicts[i].verdict, b.verdicts[i].verdict);
    EXPECT_EQ(a.verdicts[i].provenance, b.verdicts[i].provenance);
  }
  EXPECT_EQ(a.stats.states_explored, b.stats.states_explored);
}

TEST(VerifyAgainstOracle, AgreesAndCountsModelCheckedResiduals) {
  const CacheConfig config{2, 1, 8};
  const auto loop = verify_against_oracle(parse_cfg(kLoopProgram, config), config, with_mode(Mode::AiMc));
  EXPECT_EQ(loop.disagreements, 0u);
  EXPECT_EQ(loop.mc_resolved, 0u);
  EXPECT_EQ(loop.entries.size(), 2u);
  const auto no_du = verify_against_oracle(parse_cfg(kLoopProgram, config), config, with_mode(Mode::AiMcNoDu));
  EXPECT_EQ(no_du.disagreements, 0u);
  EXPECT_EQ(no_du.mc_resolved, 2u);
}

TEST(VerifyAgainstOracle, CapacityError) {
  const CacheConfig config{4, 1, 8};
  std::mt19937_64 rng(3);
  const Cfg g = exactcache::testing::random_cfg(rng, 8, 6, 14, 0.9);
  try {
    verify_against_oracle(g, config, with_mode(Mode::AiMc, InitMode::Unknown), 50);
    FAIL() << "expected a budget error";
  } catch (const BudgetError& e) {
    EXPECT_EQ(e.which(), BudgetError::Which::Oracle);
  }
}

TEST(ResidualBlocks, ListsModelCheckedBlocks) {
  const CacheConfig config{2, 1, 8};
  const Cfg g = parse_cfg(kLoopProgram, config);
  EXPECT_TRUE(residual_blocks(classify_all(g, config, with_mode(Mode::AiMc))).empty());
  const auto blocks = residual_blocks(classify_all(g, config, with_mode(Mode::AiMcNoDu)));
  ASSERT_EQ(blocks.size(), 2u);
  EXPECT_EQ(blocks[0].second, MemoryBlock{0});
  EXPECT_EQ(blocks[1].second, MemoryBlock{1});
}
