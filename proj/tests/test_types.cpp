#include <doctest.h>

#include <cmath>

#include "hymem/types.hpp"
#include "test_util.hpp"

using namespace hymem;

TEST_CASE("semantic vector validation checks dims and norms") {
  SemanticVector v;
  v.text_part = {1.0f, 0.0f};
  v.image_part = {0.0f, 1.0f};
  CHECK_NOTHROW(v.validate(2, 2));
  CHECK_THROWS_AS(v.validate(3, 2), DimMismatch);

  v.text_part = {0.9f, 0.0f};
  CHECK_THROWS_AS(v.validate(2, 2), ZeroVector);
}

TEST_CASE("cosine over the concatenation matches the closed form for unit halves") {
  SemanticVector a{{1.0f, 0.0f}, {0.0f, 1.0f}};
  SemanticVector b{{0.0f, 1.0f}, {0.0f, 1.0f}};
  // dot = 0 + 1, norms are sqrt(2) each
  CHECK(a.cosine(b) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(a.cosine(a) == doctest::Approx(1.0).epsilon(1e-12));

  SemanticVector c{{1.0f}, {1.0f}};
  CHECK_THROWS_AS(a.cosine(c), DimMismatch);
}

TEST_CASE("embedding block validation") {
  EmbeddingBlock block;
  block.vectors = {{1.0f, 2.0f}, {3.0f, 4.0f}};
  CHECK_NOTHROW(block.validate(2, 2));
  CHECK_THROWS_AS(block.validate(2, 3), DimMismatch);
  CHECK_THROWS_AS(block.validate(3, 2), DimMismatch);
}

TEST_CASE("trajectory validation needs an id and a first observation") {
  TrajectoryRecord traj = test::make_trajectory("t1", "find things", "mem://s.png");
  CHECK_NOTHROW(traj.validate());

  traj.observations.clear();
  CHECK_THROWS_AS(traj.validate(), InvalidTrajectory);

  TrajectoryRecord unnamed = test::make_trajectory("  ", "find things", "mem://s.png");
  CHECK_THROWS_AS(unnamed.validate(), InvalidTrajectory);
}

TEST_CASE("trajectory source round-trips through strings") {
  for (auto source : {TrajectorySource::human_demo, TrajectorySource::agent_rollout,
                      TrajectorySource::external_dataset}) {
    CHECK(trajectory_source_from_string(to_string(source)) == source);
  }
  CHECK_THROWS_AS(trajectory_source_from_string("telepathy"), InvalidTrajectory);
}

TEST_CASE("evolution decision factories enforce conditional fields") {
  CHECK_NOTHROW(EvolutionDecision::make_add("fresh"));

  CHECK_THROWS_AS(EvolutionDecision::make_merge("", "", "takeaway", {normalize_tag("a")}),
                  MalformedDecision);
  CHECK_THROWS_AS(EvolutionDecision::make_merge("", "n1", "  ", {normalize_tag("a")}),
                  MalformedDecision);
  CHECK_THROWS_AS(EvolutionDecision::make_merge("", "n1", "takeaway", {}), MalformedDecision);
  CHECK_NOTHROW(EvolutionDecision::make_merge("", "n1", "takeaway", {normalize_tag("a")}));

  CHECK_THROWS_AS(EvolutionDecision::make_replace("", ""), MalformedDecision);
  CHECK_NOTHROW(EvolutionDecision::make_replace("", "n9"));

  try {
    EvolutionDecision::make_replace("", "");
  } catch (const MalformedDecision& e) {
    CHECK(e.field() == "old_id");
  }
}

TEST_CASE("memory node invariants") {
  StoreParams params{4, 4, 2, 2};
  MockEncoder enc(11, params);
  MemoryNode node = test::make_node(enc, "n1", {"#a"});
  CHECK_NOTHROW(node.validate(params));

  SUBCASE("attributes must be non-empty") {
    node.attributes.clear();
    CHECK_THROWS_AS(node.validate(params), EmptyTag);
  }
  SUBCASE("merge_count > 0 needs at least two sources") {
    node.merge_count = 1;
    CHECK_THROWS_AS(node.validate(params), InvalidTrajectory);
    node.source_trajectory_ids.push_back("traj-2");
    CHECK_NOTHROW(node.validate(params));
  }
  SUBCASE("strategy must be non-empty") {
    node.strategy = " ";
    CHECK_THROWS_AS(node.validate(params), EmptyStrategy);
  }
}

TEST_CASE("takeaway prefix stripping") {
  CHECK(strip_takeaway_prefix("takeaway: use price filter low-to-high") ==
        "use price filter low-to-high");
  CHECK(strip_takeaway_prefix("TAKEAWAY:   shout less") == "shout less");
  CHECK(strip_takeaway_prefix("no prefix here") == "no prefix here");
  CHECK(strip_takeaway_prefix("  takeaway:") == "");
}
