#pragma once

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pbrsim/calibration.hpp"
#include "pbrsim/circuit.hpp"
#include "pbrsim/errors.hpp"

namespace pbrsim {

/// Undirected qubit connectivity graph.
class CouplingMap {
 public:
  CouplingMap() = default;
  CouplingMap(int n_vertices, std::vector<std::pair<int, int>> edges)
      : n_(n_vertices), edges_(std::move(edges)), adj_(n_vertices < 0 ? 0 : n_vertices) {
    if (n_vertices < 1) throw ValidationError("coupling map needs at least one vertex");
    std::set<std::pair<int, int>> seen;
    for (auto [a, b] : edges_) {
      if (a == b) throw ValidationError("coupling map edge is a self-loop at " + std::to_string(a));
      if (a < 0 || b < 0 || a >= n_ || b >= n_) {
        throw ValidationError("coupling map edge (" + std::to_string(a) + ", " + std::to_string(b) +
                              ") references an unknown vertex");
      }
      if (!seen.insert(std::minmax(a, b)).second) continue;
      adj_[a].push_back(b);
      adj_[b].push_back(a);
    }
    for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
  }

  int n_vertices() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const {
    check_vertex(v);
    return adj_[v];
  }

  bool adjacent(int a, int b) const {
    check_vertex(a);
    check_vertex(b);
    return std::binary_search(adj_[a].begin(), adj_[a].end(), b);
  }

  /// BFS hop counts from `source`; -1 for unreachable vertices.
  std::vector<int> distances_from(int source) const {
    check_vertex(source);
    std::vector<int> dist(n_, -1);
    std::deque<int> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int w : adj_[v]) {
        if (dist[w] >= 0) continue;
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
    return dist;
  }

  /// Vertex sequence of a shortest path; ties broken toward smaller ids.
  std::vector<int> shortest_path(int a, int b) const {
    const auto dist = distances_from(b);
    if (dist[a] < 0) {
      throw PathError("qubits " + std::to_string(a) + " and " + std::to_string(b) + " are not connected");
    }
    std::vector<int> path{a};
    int v = a;
    while (v != b) {
      for (int w : adj_[v]) {
        if (dist[w] == dist[v] - 1) {
          v = w;
          break;
        }
      }
      path.push_back(v);
    }
    return path;
  }

 private:
  void check_vertex(int v) const {
    if (v < 0 || v >= n_) throw PathError("qubit " + std::to_string(v) + " is not in the coupling map");
  }

  int n_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adj_;
};

/// Shortest-path edge count between two qubits.
inline int span_distance(const CouplingMap& map, int a, int b) {
  return static_cast<int>(map.shortest_path(a, b).size()) - 1;
}

inline CouplingMap chain_map(int n_vertices) {
  std::vector<std::pair<int, int>> e;
  for (int v = 0; v + 1 < n_vertices; ++v) e.emplace_back(v, v + 1);
  return {n_vertices, std::move(e)};
}

/// Heavy-hex-style lattice: horizontal rows of `row_length` qubits joined by
/// single bridge qubits on alternating columns. With the defaults this gives
/// 156 qubits. It approximates, and is not, any particular device layout.
inline CouplingMap heavy_hex_like(int rows = 8, int row_length = 16, int bridge_stride = 4) {
  std::vector<std::pair<int, int>> e;
  std::vector<std::pair<int, int>> pending;  // (bridge id, column) awaiting the next row
  int next = 0;
  for (int r = 0; r < rows; ++r) {
    const int start = next;
    for (int c = 0; c + 1 < row_length; ++c) e.emplace_back(start + c, start + c + 1);
    next += row_length;
    for (auto [bridge, col] : pending) e.emplace_back(bridge, start + col);
    pending.clear();
    if (r + 1 == rows) break;
    // Bridge columns alternate by half a stride between rows.
    for (int c = (r % 2 == 0) ? 0 : bridge_stride / 2; c < row_length; c += bridge_stride) {
      e.emplace_back(start + c, next);
      pending.emplace_back(next++, c);
    }
  }
  return {next, std::move(e)};
}

inline nlohmann::json coupling_map_to_json(const CouplingMap& map) {
  nlohmann::json doc;
  doc["n_qubits"] = map.n_vertices();
  doc["edges"] = nlohmann::json::array();
  for (auto [a, b] : map.edges()) doc["edges"].push_back({a, b});
  return doc;
}

inline CouplingMap parse_coupling_map(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("coupling map: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("coupling map: top level must be an object");
  detail::reject_unknown_keys(doc, {"n_qubits", "edges"}, "coupling map");
  const int n = detail::int_field(doc, "n_qubits", "coupling map");
  if (!doc.contains("edges") || !doc["edges"].is_array()) throw FormatError("coupling map: 'edges' must be a list");
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
      throw FormatError("coupling map: each edge must be a pair of integers");
    }
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return {n, std::move(edges)};
}

inline CouplingMap load_coupling_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open coupling map file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_coupling_map(ss.str());
}

/// A 2-logical-qubit circuit placed on a shortest path of the coupling map.
/// The circuit acts on local indices 0..span; physical_qubits[i] is the
/// device id of local index i.
struct RoutedCircuit {
  Circuit circuit{1};
  std::vector<int> physical_qubits;
  // Logical qubit -> local index at measurement time.
  std::vector<int> final_layout;
  int swap_count = 0;
  int span = 0;

  std::vector<int> final_physical_layout() const {
    std::vector<int> out;
    for (int l : final_layout) out.push_back(physical_qubits[l]);
    return out;
  }
};

/// Extra (G1, G2) from s - 1 decomposed SWAPs.
inline GateCounts routed_gate_overhead(int span) {
  if (span < 1) throw RangeError("span must be >= 1");
  return {(span - 1) * 6, (span - 1) * 3};
}

/// Moves logical qubit 0 along the shortest path toward logical qubit 1 until
/// adjacent, inserting decomposed SWAPs before the first two-qubit gate.
/// Measurement bits are read at the final layout instead of swapping back.
inline RoutedCircuit route_linear(const Circuit& c, const CouplingMap& map, std::pair<int, int> placement) {
  if (c.n_qubits() != 2) throw ValidationError("route_linear handles exactly two logical qubits");
  const auto [qa, qb] = placement;
  if (qa == qb) throw ValidationError("placement qubits must differ");
  RoutedCircuit r;
  r.physical_qubits = map.shortest_path(qa, qb);
  r.span = static_cast<int>(r.physical_qubits.size()) - 1;
  r.circuit = Circuit(r.span + 1);
  std::vector<int> layout{0, r.span};
  bool swapped = false;
  for (const auto& g : c.gates()) {
    const bool two_qubit = is_unitary_kind(g.kind) && g.arity() >= 2;
    if (two_qubit && !swapped) {
      for (int i = 0; i + 1 < r.span; ++i) {
        for (auto& sg : decompose_swap(i, i + 1)) r.circuit.add(std::move(sg));
        ++r.swap_count;
      }
      layout[0] = r.span - 1;
      swapped = true;
    }
    Gate mapped = g;
    for (auto& q : mapped.qubits) q = layout[q];
    r.circuit.add(std::move(mapped));
  }
  r.final_layout = layout;
  return r;
}

/// True when every multi-qubit unitary acts on coupled physical qubits.
inline bool gates_on_edges(const RoutedCircuit& r, const CouplingMap& map) {
  for (const auto& g : r.circuit.gates()) {
    if (!is_unitary_kind(g.kind) || g.arity() < 2) continue;
    for (std::size_t i = 0; i < g.qubits.size(); ++i)
      for (std::size_t j = i + 1; j < g.qubits.size(); ++j)
        if (!map.adjacent(r.physical_qubits[g.qubits[i]], r.physical_qubits[g.qubits[j]])) return false;
  }
  return true;
}

}  // namespace pbrsim
