#pragma once

// Bin packing instances with a conflict graph: data model, text I/O,
// seeded conflict generation and capacity scaling.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bppc/rng.hpp"

namespace bppc {

using Weight = std::int64_t;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class InfeasibleItemError : public std::runtime_error {
 public:
  InfeasibleItemError(int item, Weight weight, Weight capacity)
      : std::runtime_error("item " + std::to_string(item) + " has weight " + std::to_string(weight) +
                           " > capacity " + std::to_string(capacity)),
        item_(item) {}
  int item() const { return item_; }

 private:
  int item_;
};

// Undirected simple graph stored as sorted, duplicate-free adjacency lists.
class ConflictGraph {
 public:
  ConflictGraph() = default;
  explicit ConflictGraph(int n) : adj_(static_cast<std::size_t>(n)) {}

  static ConflictGraph from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    ConflictGraph g(n);
    for (auto [i, j] : edges) {
      if (i < 0 || j < 0 || i >= n || j >= n || i == j)
        throw std::invalid_argument("bad conflict edge (" + std::to_string(i) + "," + std::to_string(j) + ")");
      g.adj_[i].push_back(j);
      g.adj_[j].push_back(i);
    }
    g.normalize();
    return g;
  }

  int size() const { return static_cast<int>(adj_.size()); }
  std::size_t edge_count() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }

  bool adjacent(int i, int j) const {
    const auto& a = adj_[i].size() <= adj_[j].size() ? adj_[i] : adj_[j];
    const int other = adj_[i].size() <= adj_[j].size() ? j : i;
    return std::binary_search(a.begin(), a.end(), other);
  }

  // Edges (i, j) with i < j in lexicographic order.
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edges_);
    for (int i = 0; i < size(); ++i)
      for (int j : adj_[i])
        if (i < j) out.emplace_back(i, j);
    return out;
  }

  void add_edge(int i, int j) {
    if (i == j || adjacent(i, j)) return;
    adj_[i].insert(std::lower_bound(adj_[i].begin(), adj_[i].end(), j), j);
    adj_[j].insert(std::lower_bound(adj_[j].begin(), adj_[j].end(), i), i);
    ++edges_;
  }

  friend bool operator==(const ConflictGraph&, const ConflictGraph&) = default;

 private:
  void normalize() {
    edges_ = 0;
    for (auto& a : adj_) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
      edges_ += a.size();
    }
    edges_ /= 2;
  }

  std::vector<std::vector<int>> adj_;
  std::size_t edges_ = 0;
};

struct Instance {
  std::string name;
  Weight capacity = 0;
  std::vector<Weight> weights;
  ConflictGraph conflicts;

  int n_items() const { return static_cast<int>(weights.size()); }
  Weight total_weight() const { return std::accumulate(weights.begin(), weights.end(), Weight{0}); }

  friend bool operator==(const Instance&, const Instance&) = default;
};

struct GenConfig {
  double density = 0.5;
  std::uint64_t seed = 0;
  Weight capacity_multiplier = 1;
};

namespace detail {

inline bool next_content_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

inline Weight parse_integer(const std::string& token, int line_no) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(token, &used);
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + token + "'", line_no);
  }
  if (used != token.size()) throw ParseError("expected an integer, got '" + token + "'", line_no);
  return v;
}

inline std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

inline Weight single_integer_line(std::istream& in, int& line_no, const char* what) {
  std::string line;
  if (!next_content_line(in, line, line_no)) throw ParseError(std::string("unexpected end of input, expected ") + what, line_no + 1);
  const auto toks = tokens_of(line);
  if (toks.size() != 1) throw ParseError(std::string("expected a single integer for ") + what, line_no);
  return parse_integer(toks[0], line_no);
}

}  // namespace detail

// Parses an edge list "i j" (0-based) over n vertices.
inline ConflictGraph parse_conflicts(std::istream& in, int n) {
  std::vector<std::pair<int, int>> edges;
  std::string line;
  int line_no = 0;
  while (detail::next_content_line(in, line, line_no)) {
    const auto toks = detail::tokens_of(line);
    if (toks.size() != 2) throw ParseError("expected 'i j'", line_no);
    const Weight i = detail::parse_integer(toks[0], line_no);
    const Weight j = detail::parse_integer(toks[1], line_no);
    if (i < 0 || j < 0 || i >= n || j >= n) throw ParseError("edge index out of range", line_no);
    if (i == j) throw ParseError("self-loop in conflict list", line_no);
    edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
  }
  return ConflictGraph::from_edges(n, edges);
}

// Instance text format: n_items, capacity, then one weight per line.
// Blank lines and lines starting with '#' are ignored.
inline Instance parse_instance(std::istream& text, std::istream* conflict_text = nullptr, std::string name = "") {
  int line_no = 0;
  const Weight n = detail::single_integer_line(text, line_no, "item count");
  if (n < 0) throw ParseError("negative item count", line_no);
  const Weight cap = detail::single_integer_line(text, line_no, "capacity");
  if (cap <= 0) throw ParseError("capacity must be positive", line_no);
  Instance inst;
  inst.name = std::move(name);
  inst.capacity = cap;
  inst.weights.reserve(static_cast<std::size_t>(n));
  for (Weight i = 0; i < n; ++i) {
    const Weight w = detail::single_integer_line(text, line_no, "item weight");
    if (w <= 0) throw ParseError("weights must be positive", line_no);
    inst.weights.push_back(w);
  }
  std::string rest;
  if (detail::next_content_line(text, rest, line_no)) throw ParseError("trailing data after " + std::to_string(n) + " weights", line_no);
  for (int i = 0; i < inst.n_items(); ++i)
    if (inst.weights[i] > cap) throw InfeasibleItemError(i, inst.weights[i], cap);
  inst.conflicts = conflict_text ? parse_conflicts(*conflict_text, inst.n_items()) : ConflictGraph(inst.n_items());
  return inst;
}

inline Instance parse_instance(const std::string& text, const std::string& conflict_text = {}) {
  std::istringstream a(text), b(conflict_text);
  return parse_instance(a, &b);
}

inline void write_instance(std::ostream& out, const Instance& inst) {
  out << inst.n_items() << '\n' << inst.capacity << '\n';
  for (Weight w : inst.weights) out << w << '\n';
}

inline void write_conflicts(std::ostream& out, const ConflictGraph& g) {
  for (auto [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

// G(n, p): each pair i < j, visited in lexicographic order, becomes an edge
// when the next unit draw from Rng(cfg.seed) is below cfg.density.
inline Instance generate_conflicts(const Instance& inst, const GenConfig& cfg) {
  if (!(cfg.density >= 0.0 && cfg.density <= 1.0)) throw std::invalid_argument("density must be in [0,1]");
  Rng rng(cfg.seed);
  std::vector<std::pair<int, int>> edges;
  const int n = inst.n_items();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < cfg.density) edges.emplace_back(i, j);
  Instance out = inst;
  out.conflicts = ConflictGraph::from_edges(n, edges);
  return out;
}

inline Instance apply_capacity_multiplier(const Instance& inst, Weight m) {
  if (m < 1) throw std::invalid_argument("capacity multiplier must be >= 1");
  Instance out = inst;
  out.capacity = inst.capacity * m;
  return out;
}

// Uniform integer weights in [lo, hi]; no conflicts.
inline Instance generate_uniform_instance(int n, Weight capacity, Weight lo, Weight hi, std::uint64_t seed,
                                          std::string name = "") {
  if (lo < 1 || hi < lo || hi > capacity) throw std::invalid_argument("need 1 <= lo <= hi <= capacity");
  Rng rng(seed);
  Instance inst;
  inst.name = std::move(name);
  inst.capacity = capacity;
  inst.weights.resize(static_cast<std::size_t>(n));
  for (auto& w : inst.weights) w = rng.between(lo, hi);
  inst.conflicts = ConflictGraph(n);
  return inst;
}

struct PatternViolation {
  enum class Kind { Capacity, Conflict } kind;
  Weight load = 0;  // Capacity only
  int i = -1, j = -1;  // Conflict only
};

struct PatternReport {
  bool feasible = true;
  Weight load = 0;
  std::vector<PatternViolation> violations;
};

inline PatternReport validate_pattern(const Instance& inst, const std::vector<int>& items) {
  PatternReport r;
  for (int i : items) {
    if (i < 0 || i >= inst.n_items()) throw ParseError("item index " + std::to_string(i) + " out of range");
    r.load += inst.weights[i];
  }
  if (r.load > inst.capacity) r.violations.push_back({PatternViolation::Kind::Capacity, r.load});
  for (std::size_t a = 0; a < items.size(); ++a)
    for (std::size_t b = a + 1; b < items.size(); ++b)
      if (inst.conflicts.adjacent(items[a], items[b]))
        r.violations.push_back({PatternViolation::Kind::Conflict, 0, std::min(items[a], items[b]),
                                std::max(items[a], items[b])});
  r.feasible = r.violations.empty();
  return r;
}

inline bool is_feasible_pattern(const Instance& inst, const std::vector<int>& items) {
  return validate_pattern(inst, items).feasible;
}

}  // namespace bppc
