#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sgi/common.hpp"
#include "sgi/env.hpp"
#include "sgi/graph.hpp"

namespace sgi {

// ---------------------------------------------------------------------------
// Line plumbing

namespace detail {

struct Line {
  int no = 0;          // 1-based line number in the source text
  std::string text;    // comment-stripped, trimmed
};

inline std::vector<Line> split_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream is(text);
  std::string raw;
  int no = 0;
  while (std::getline(is, raw)) {
    ++no;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::size_t b = raw.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = raw.find_last_not_of(" \t\r");
    out.push_back(Line{no, raw.substr(b, e - b + 1)});
  }
  return out;
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> toks;
  std::istringstream is(s);
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

inline std::string take_kv(const std::string& tok, const std::string& key,
                           int line_no) {
  std::string prefix = key + "=";
  if (tok.rfind(prefix, 0) != 0)
    throw ParseError("expected " + prefix + "..., got '" + tok + "'", line_no);
  std::string v = tok.substr(prefix.size());
  if (v.empty()) throw ParseError("empty value for " + key, line_no);
  return v;
}

// Character-level tokens of a precondition expression: indices, '!', '&', '|'.
inline std::vector<std::string> expr_tokens(const std::string& s, int line_no) {
  std::vector<std::string> toks;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == ' ' || c == '\t') { ++i; continue; }
    if (c == '!' || c == '&' || c == '|') {
      toks.emplace_back(1, c);
      ++i;
      continue;
    }
    if (c >= '0' && c <= '9') {
      std::size_t j = i;
      while (j < s.size() && s[j] >= '0' && s[j] <= '9') ++j;
      toks.push_back(s.substr(i, j - i));
      i = j;
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c +
                     "' in precondition", line_no);
  }
  return toks;
}

inline Precondition parse_precond_expr(const std::string& text, int line_no) {
  Precondition pre;
  std::string trimmed = text;
  {
    std::size_t b = trimmed.find_first_not_of(" \t");
    std::size_t e = trimmed.find_last_not_of(" \t");
    if (b == std::string::npos)
      throw ParseError("empty precondition expression", line_no);
    trimmed = trimmed.substr(b, e - b + 1);
  }
  if (trimmed == "never") {
    pre.never = true;
    return pre;
  }
  std::vector<std::string> toks = expr_tokens(trimmed, line_no);
  Clause cur;
  bool expect_lit = true;
  bool pending_neg = false;
  for (const std::string& t : toks) {
    if (t == "!") {
      if (!expect_lit || pending_neg)
        throw ParseError("misplaced '!'", line_no);
      pending_neg = true;
    } else if (t == "&" || t == "|") {
      if (expect_lit) throw ParseError("expected literal before '" + t + "'",
                                       line_no);
      if (t == "|") {
        pre.clauses.push_back(cur);
        cur.clear();
      }
      expect_lit = true;
    } else {
      if (!expect_lit) throw ParseError("expected '&' or '|' before '" + t +
                                        "'", line_no);
      cur.push_back(Literal{int(parse_int(t, line_no)), pending_neg});
      pending_neg = false;
      expect_lit = false;
    }
  }
  if (expect_lit) throw ParseError("dangling operator in precondition", line_no);
  pre.clauses.push_back(cur);
  return pre;
}

inline std::string precond_to_string(const Precondition& pre) {
  if (pre.never) return "never";
  std::ostringstream os;
  for (std::size_t c = 0; c < pre.clauses.size(); ++c) {
    if (c) os << " | ";
    for (std::size_t k = 0; k < pre.clauses[c].size(); ++k) {
      if (k) os << " & ";
      if (pre.clauses[c][k].negated) os << '!';
      os << pre.clauses[c][k].index;
    }
  }
  return os.str();
}

inline bool is_task_directive(const std::string& line) {
  std::istringstream is(line);
  std::string head;
  is >> head;
  return head == "task" || head == "episode_length" || head == "subtask" ||
         head == "precond";
}

// Parses task/episode_length/subtask/precond lines starting at `pos`; stops at
// the first non-directive line. episode_length may be absent for graph-only
// blocks (inferred graphs); `runnable` controls finalize strictness.
inline TaskConfig parse_task_block(const std::vector<Line>& lines,
                                   std::size_t& pos, bool runnable) {
  TaskConfig cfg;
  bool saw_task = false, saw_len = false;
  std::vector<int> subtask_line;   // declaration line per index
  std::vector<int> precond_line;
  std::vector<std::pair<int, Precondition>> pending;  // index -> precondition

  for (; pos < lines.size(); ++pos) {
    const Line& ln = lines[pos];
    if (!is_task_directive(ln.text)) break;
    std::vector<std::string> toks = split_ws(ln.text);
    const std::string& head = toks[0];
    if (head == "task") {
      if (saw_task) break;  // next block begins
      if (toks.size() != 2) throw ParseError("expected: task <name>", ln.no);
      cfg.name = toks[1];
      saw_task = true;
    } else if (head == "episode_length") {
      if (!saw_task) throw ParseError("episode_length before task line", ln.no);
      if (saw_len) throw ParseError("duplicate episode_length", ln.no);
      if (toks.size() != 2)
        throw ParseError("expected: episode_length <int>", ln.no);
      cfg.episode_length = int(parse_int(toks[1], ln.no));
      saw_len = true;
    } else if (head == "subtask") {
      if (!saw_task) throw ParseError("subtask before task line", ln.no);
      if (toks.size() != 7)
        throw ParseError(
            "expected: subtask <index> name=... kind=... mu=... sigma=... "
            "page=...",
            ln.no);
      int idx = int(parse_int(toks[1], ln.no));
      if (idx < 0) throw ParseError("negative subtask index", ln.no);
      SubtaskSpec sp;
      sp.name = take_kv(toks[2], "name", ln.no);
      sp.kind = kind_from_string(take_kv(toks[3], "kind", ln.no), ln.no);
      sp.mu = parse_real(take_kv(toks[4], "mu", ln.no), ln.no);
      sp.sigma = parse_real(take_kv(toks[5], "sigma", ln.no), ln.no);
      sp.page = int(parse_int(take_kv(toks[6], "page", ln.no), ln.no));
      if (idx >= int(cfg.graph.subtasks.size())) {
        cfg.graph.subtasks.resize(std::size_t(idx) + 1);
        subtask_line.resize(std::size_t(idx) + 1, 0);
      }
      if (subtask_line[std::size_t(idx)] != 0)
        throw ParseError("duplicate subtask index " + std::to_string(idx),
                         ln.no);
      cfg.graph.subtasks[std::size_t(idx)] = sp;
      subtask_line[std::size_t(idx)] = ln.no;
    } else {  // precond
      if (!saw_task) throw ParseError("precond before task line", ln.no);
      std::size_t sep = ln.text.find(":=");
      if (sep == std::string::npos)
        throw ParseError("expected: precond <index> := <expr>", ln.no);
      std::vector<std::string> lhs = split_ws(ln.text.substr(0, sep));
      if (lhs.size() != 2)
        throw ParseError("expected: precond <index> := <expr>", ln.no);
      int idx = int(parse_int(lhs[1], ln.no));
      if (idx < 0) throw ParseError("negative precond index", ln.no);
      pending.emplace_back(idx, parse_precond_expr(ln.text.substr(sep + 2),
                                                   ln.no));
      if (idx >= int(precond_line.size()))
        precond_line.resize(std::size_t(idx) + 1, 0);
      if (precond_line[std::size_t(idx)] != 0)
        throw ParseError("duplicate precond for subtask " + std::to_string(idx),
                         ln.no);
      precond_line[std::size_t(idx)] = ln.no;
    }
  }

  if (!saw_task) throw ParseError("missing task line",
                                  pos < lines.size() ? lines[pos].no : 0);
  int n = int(cfg.graph.subtasks.size());
  if (n == 0) throw ParseError("task '" + cfg.name + "' declares no subtasks",
                               lines[pos - 1].no);
  for (int i = 0; i < n; ++i)
    if (subtask_line[std::size_t(i)] == 0)
      throw ParseError("missing subtask index " + std::to_string(i),
                       lines[pos - 1].no);
  cfg.graph.preconds.assign(std::size_t(n), Precondition{});
  for (auto& [idx, pre] : pending) {
    if (idx >= n)
      throw ParseError("precond for undeclared subtask " + std::to_string(idx),
                       precond_line[std::size_t(idx)]);
    for (const Clause& c : pre.clauses)
      for (const Literal& l : c)
        if (l.index < 0 || l.index >= n)
          throw ParseError("literal " + std::to_string(l.index) +
                               " out of range in precond " +
                               std::to_string(idx),
                           precond_line[std::size_t(idx)]);
    cfg.graph.preconds[std::size_t(idx)] = std::move(pre);
  }
  cfg.finalize(runnable);
  return cfg;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Task files

inline TaskConfig parse_task(const std::string& text, bool runnable = true) {
  std::vector<detail::Line> lines = detail::split_lines(text);
  std::size_t pos = 0;
  TaskConfig cfg = detail::parse_task_block(lines, pos, runnable);
  if (pos != lines.size())
    throw ParseError("unexpected directive '" + lines[pos].text + "'",
                     lines[pos].no);
  return cfg;
}

inline std::string serialize_task(const TaskConfig& cfg) {
  std::ostringstream os;
  os << "task " << cfg.name << "\n";
  if (cfg.episode_length > 0)
    os << "episode_length " << cfg.episode_length << "\n";
  for (int i = 0; i < cfg.size(); ++i) {
    const SubtaskSpec& s = cfg.graph.subtasks[std::size_t(i)];
    os << "subtask " << i << " name=" << s.name << " kind="
       << kind_to_string(s.kind) << " mu=" << format_real(s.mu)
       << " sigma=" << format_real(s.sigma) << " page=" << s.page << "\n";
  }
  for (int i = 0; i < cfg.size(); ++i) {
    const Precondition& pre = cfg.graph.preconds[std::size_t(i)];
    if (pre.always_true()) continue;
    os << "precond " << i << " := " << detail::precond_to_string(pre) << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Trajectory files: one step per line, `x=<bits> e=<bits> o=<idx> r=<real>
// d=<0|1>`, states recorded before the action. '#' lines are ignored.

inline std::string serialize_trajectory(const Trajectory& traj) {
  std::ostringstream os;
  for (const StepRecord& r : traj) {
    os << "x=";
    for (std::uint8_t b : r.x) os << (b ? '1' : '0');
    os << " e=";
    for (std::uint8_t b : r.e) os << (b ? '1' : '0');
    os << " o=" << r.option << " r=" << format_real(r.reward)
       << " d=" << (r.done ? 1 : 0) << "\n";
  }
  return os.str();
}

namespace detail {

inline BitVec parse_bits(const std::string& s, int line_no) {
  BitVec v;
  v.reserve(s.size());
  for (char c : s) {
    if (c != '0' && c != '1')
      throw ParseError("bad bit vector '" + s + "'", line_no);
    v.push_back(c == '1');
  }
  if (v.empty()) throw ParseError("empty bit vector", line_no);
  return v;
}

}  // namespace detail

inline Trajectory parse_trajectory(const std::string& text) {
  Trajectory traj;
  for (const detail::Line& ln : detail::split_lines(text)) {
    std::vector<std::string> toks = detail::split_ws(ln.text);
    if (toks.size() != 5)
      throw ParseError("expected: x=... e=... o=... r=... d=...", ln.no);
    StepRecord r;
    r.x = detail::parse_bits(detail::take_kv(toks[0], "x", ln.no), ln.no);
    r.e = detail::parse_bits(detail::take_kv(toks[1], "e", ln.no), ln.no);
    r.option = int(parse_int(detail::take_kv(toks[2], "o", ln.no), ln.no));
    r.reward = parse_real(detail::take_kv(toks[3], "r", ln.no), ln.no);
    long d = parse_int(detail::take_kv(toks[4], "d", ln.no), ln.no);
    if (d != 0 && d != 1) throw ParseError("d must be 0 or 1", ln.no);
    r.done = d == 1;
    if (r.x.size() != r.e.size())
      throw ParseError("x/e length mismatch", ln.no);
    if (!traj.empty() && traj.front().x.size() != r.x.size())
      throw ParseError("inconsistent bit-vector length", ln.no);
    if (r.option < 0 || r.option >= int(r.x.size()))
      throw ParseError("option index out of range", ln.no);
    traj.push_back(std::move(r));
  }
  return traj;
}

// ---------------------------------------------------------------------------
// Whole-file helpers

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline TaskConfig load_task(const std::string& path, bool runnable = true) {
  try {
    return parse_task(read_file(path), runnable);
  } catch (const ParseError& e) {
    throw ParseError(ParseError::Raw{}, path + ": " + e.what(), e.line);
  }
}

}  // namespace sgi
