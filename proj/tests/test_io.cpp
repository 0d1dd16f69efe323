#include <catch2/catch_amalgamated.hpp>

#include <cstdio>

#include "sgi/task_io.hpp"
#include "support/oracles.hpp"

using namespace sgi;

namespace {

int line_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ParseError& e) {
    return e.line;
  }
  return -1;
}

const char* kSampleTask =
    "# a commented header\n"
    "task demo\n"
    "episode_length 6\n"
    "\n"
    "subtask 0 name=open kind=normal mu=0 sigma=0 page=0\n"
    "subtask 1 name=fill kind=normal mu=0.25 sigma=0.5 page=0\n"
    "subtask 2 name=skip kind=noop mu=0 sigma=0 page=0\n"
    "subtask 3 name=send kind=goal mu=5 sigma=0 page=1\n"
    "subtask 4 name=quit kind=failure mu=-1 sigma=0 page=1\n"
    "precond 1 := 0          # trailing comment\n"
    "precond 3 := 0 & 1 | 1 & !2\n"
    "precond 4 := never\n";

}  // namespace

TEST_CASE("parse_task reads the documented directive grammar") {
  TaskConfig cfg = parse_task(kSampleTask, /*runnable=*/false);
  CHECK(cfg.name == "demo");
  CHECK(cfg.episode_length == 6);
  REQUIRE(cfg.size() == 5);
  CHECK(cfg.graph.subtasks[1].mu == 0.25);
  CHECK(cfg.graph.subtasks[1].sigma == 0.5);
  CHECK(cfg.graph.subtasks[2].kind == SubtaskKind::NoopDistractor);
  CHECK(cfg.graph.subtasks[3].kind == SubtaskKind::Goal);
  CHECK(cfg.graph.subtasks[4].kind == SubtaskKind::FailureDistractor);
  CHECK(cfg.graph.subtasks[3].page == 1);
  CHECK(cfg.n_pages == 2);

  CHECK(cfg.graph.preconds[0].always_true());
  REQUIRE(cfg.graph.preconds[3].clauses.size() == 2);
  CHECK(cfg.graph.preconds[3].clauses[1] ==
        (Clause{Literal{1, false}, Literal{2, true}}));
  CHECK(cfg.graph.preconds[4].never);
}

TEST_CASE("serialize_task / parse_task round-trip") {
  TaskConfig cfg = parse_task(kSampleTask, false);
  std::string text = serialize_task(cfg);
  TaskConfig back = parse_task(text, false);
  CHECK(back.name == cfg.name);
  CHECK(back.episode_length == cfg.episode_length);
  CHECK(back.graph == cfg.graph);
  CHECK(back.n_pages == cfg.n_pages);
  CHECK(serialize_task(back) == text);  // serialization is a fixed point
}

TEST_CASE("round-trip preserves randomly generated graphs exactly") {
  for (std::uint32_t seed = 0; seed < 25; ++seed) {
    TaskConfig cfg;
    cfg.name = "rt_" + std::to_string(seed);
    cfg.episode_length = 9;
    cfg.graph = oracle::random_layered_graph(2 + int(seed % 9), 2, 3, 0.3,
                                             seed + 5000);
    cfg.finalize(false);
    TaskConfig back = parse_task(serialize_task(cfg), false);
    REQUIRE(back.graph == cfg.graph);
  }
}

TEST_CASE("parse_task reports 1-based line numbers on malformed input") {
  auto bad = [](const std::string& text) {
    return line_of([text] { (void)parse_task(text, false); });
  };

  CHECK(bad("task t\nsubtask 0 name=a kind=bogus mu=0 sigma=0 page=0\n") == 2);
  CHECK(bad("task t\nsubtask 0 name=a kind=normal mu=zz sigma=0 page=0\n") ==
        2);
  CHECK(bad("task t\n\nsubtask 0 name=a kind=normal mu=0 sigma=0\n") == 3);
  CHECK(bad("task t\nsubtask 0 name=a kind=normal mu=0 sigma=0 page=0\n"
            "subtask 0 name=b kind=normal mu=0 sigma=0 page=0\n") == 3);
  CHECK_THROWS_AS(  // self-reference fails structural validation
      parse_task("task t\nsubtask 0 name=a kind=normal mu=0 sigma=0 page=0\n"
                 "precond 0 := 0\n",
                 false),
      StructuralError);
  CHECK(bad("task t\nsubtask 0 name=a kind=normal mu=0 sigma=0 page=0\n"
            "precond 0 = 0\n") == 3);
  CHECK(bad("task t\nsubtask 0 name=a kind=normal mu=0 sigma=0 page=0\n"
            "precond 1 := 0\n") == 3);
  CHECK(bad("task t\nsubtask 0 name=a kind=normal mu=0 sigma=0 page=0\n"
            "precond -1 := 0\n") == 3);
  CHECK(bad("task t\nsubtask 0 name=a kind=normal mu=0 sigma=0 page=0\n"
            "subtask 1 name=b kind=normal mu=0 sigma=0 page=0\n"
            "precond 1 := 7\n") == 4);
  CHECK(bad("task t\nsubtask 0 name=a kind=normal mu=0 sigma=0 page=0\n"
            "precond 0 := 0 &\n") == 3);
  CHECK(bad("subtask 0 name=a kind=normal mu=0 sigma=0 page=0\n") == 1);
  CHECK(bad("task t\nsubtask 1 name=b kind=normal mu=0 sigma=0 page=0\n") >
        0);  // gap: index 0 never declared
  CHECK(bad("task t\nepisode_length 5\nepisode_length 6\n"
            "subtask 0 name=a kind=normal mu=0 sigma=0 page=0\n") == 3);
  CHECK(bad("task t\nsubtask 0 name=a kind=normal mu=0 sigma=0 page=0\n"
            "words that are not a directive\n") == 3);
}

TEST_CASE("parse_task rejects a second task block") {
  std::string two =
      "task one\nsubtask 0 name=a kind=normal mu=0 sigma=0 page=0\n"
      "task two\nsubtask 0 name=a kind=normal mu=0 sigma=0 page=0\n";
  CHECK_THROWS_AS(parse_task(two, false), ParseError);
}

TEST_CASE("trajectory serialization round-trips exactly") {
  Trajectory traj;
  traj.push_back(StepRecord{BitVec{0, 0, 0}, BitVec{1, 0, 1}, 0, 0.125, false});
  traj.push_back(
      StepRecord{BitVec{1, 0, 0}, BitVec{1, 1, 1}, 2, -1.0 / 3.0, false});
  traj.push_back(StepRecord{BitVec{1, 0, 1}, BitVec{1, 1, 1}, 1, 5.0, true});

  std::string text = serialize_trajectory(traj);
  Trajectory back = parse_trajectory(text);
  REQUIRE(back.size() == traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) REQUIRE(back[i] == traj[i]);
  CHECK(serialize_trajectory(back) == text);
}

TEST_CASE("parse_trajectory enforces the record grammar") {
  auto bad = [](const std::string& text) {
    return line_of([text] { (void)parse_trajectory(text); });
  };
  CHECK(bad("x=10 e=11 o=0 r=0\n") == 1);                 // missing field
  CHECK(bad("x=1x e=11 o=0 r=0 d=0\n") == 1);             // bad bit
  CHECK(bad("x=10 e=111 o=0 r=0 d=0\n") == 1);            // x/e mismatch
  CHECK(bad("x=10 e=11 o=2 r=0 d=0\n") == 1);             // option range
  CHECK(bad("x=10 e=11 o=0 r=0 d=2\n") == 1);             // d flag
  CHECK(bad("x=10 e=11 o=0 r=0 d=0\nx=101 e=111 o=0 r=0 d=0\n") == 2);
  CHECK(parse_trajectory("").empty());
}

TEST_CASE("file helpers raise IoError on unusable paths") {
  CHECK_THROWS_AS(read_file("/nonexistent/dir/task.txt"), IoError);
  CHECK_THROWS_AS(write_file("/nonexistent/dir/task.txt", "x"), IoError);

  std::string path = "io_roundtrip_tmp.task";
  TaskConfig cfg = parse_task(kSampleTask, false);
  write_file(path, serialize_task(cfg));
  TaskConfig back = load_task(path, false);
  CHECK(back.graph == cfg.graph);
  std::remove(path.c_str());
}

TEST_CASE("load_task reports the file's line numbers once") {
  std::string path = "io_badtask_tmp.task";
  write_file(path, "task t\nsubtask 0 name=a kind=wat mu=0 sigma=0 page=0\n");
  try {
    (void)load_task(path, false);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    std::string msg = e.what();
    CHECK(msg.find("line 2:") != std::string::npos);
    CHECK(msg.find("line 2: line 2:") == std::string::npos);
  }
  std::remove(path.c_str());
}
