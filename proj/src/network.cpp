#include "nca/network.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <queue>
#include <set>

#include <json.hpp>

#include "nca/rng.hpp"

namespace nca::net {

Network::Network(std::vector<std::string> nodes,
                 std::vector<std::pair<int, int>> edges,
                 std::array<Session, 3> sessions, gf::Elem field_prime)
    : nodes_(std::move(nodes)),
      edges_(std::move(edges)),
      sessions_(sessions),
      field_prime_(field_prime) {
  validate();
}

int Network::node_id(const std::string& name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i] == name) return static_cast<int>(i);
  throw ValidationError("unknown node: " + name);
}

void Network::validate() {
  (void)gf::FieldContext(field_prime_);  // prime, >2, <2^32

  const int n = static_cast<int>(nodes_.size());
  if (n == 0) throw ValidationError("node list is empty");
  {
    std::set<std::string> seen(nodes_.begin(), nodes_.end());
    if (static_cast<int>(seen.size()) != n)
      throw ValidationError("duplicate node names");
  }

  in_edges_.assign(n, {});
  out_edges_.assign(n, {});
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    auto [tail, head] = edges_[e];
    if (tail < 0 || tail >= n || head < 0 || head >= n)
      throw ValidationError("edge endpoint out of range");
    out_edges_[tail].push_back(static_cast<int>(e));
    in_edges_[head].push_back(static_cast<int>(e));
  }

  source_of_.assign(n, 0);
  dest_of_.assign(n, 0);
  std::set<int> endpoints;
  for (int i = 0; i < 3; ++i) {
    const auto& s = sessions_[i];
    if (s.source < 0 || s.source >= n || s.destination < 0 ||
        s.destination >= n)
      throw ValidationError("session endpoint out of range");
    endpoints.insert(s.source);
    endpoints.insert(s.destination);
    source_of_[s.source] = i + 1;
    dest_of_[s.destination] = i + 1;
  }
  if (endpoints.size() != 6)
    throw ValidationError("the six session endpoints must be distinct nodes");
  for (int i = 0; i < 3; ++i) {
    if (!in_edges_[sessions_[i].source].empty())
      throw ValidationError("source node " + nodes_[sessions_[i].source] +
                            " has incoming edges");
    if (!out_edges_[sessions_[i].destination].empty())
      throw ValidationError("destination node " +
                            nodes_[sessions_[i].destination] +
                            " has outgoing edges");
  }

  // Kahn's algorithm, smallest node index first, so the order is a pure
  // function of the document.
  std::vector<int> indegree(n, 0);
  for (const auto& e : edges_) ++indegree[e.second];
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < n; ++v)
    if (indegree[v] == 0) ready.push(v);
  topo_order_.clear();
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    topo_order_.push_back(v);
    for (int e : out_edges_[v])
      if (--indegree[edges_[e].second] == 0) ready.push(edges_[e].second);
  }
  if (static_cast<int>(topo_order_.size()) != n)
    throw ValidationError("graph contains a cycle");
}

Network parse_network(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object()) throw ParseError("top level must be an object");
    for (const char* key : {"field_prime", "nodes", "edges", "sessions"})
      if (!doc.contains(key))
        throw ParseError(std::string("missing key: ") + key);

    if (!doc["field_prime"].is_number_unsigned())
      throw ParseError("field_prime must be a positive integer");
    gf::Elem p = doc["field_prime"].get<std::uint64_t>();

    std::vector<std::string> nodes;
    for (const auto& v : doc["nodes"]) {
      if (!v.is_string()) throw ParseError("nodes must be strings");
      nodes.push_back(v.get<std::string>());
    }
    std::map<std::string, int> ids;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      ids[nodes[i]] = static_cast<int>(i);

    auto lookup = [&](const std::string& name) {
      auto it = ids.find(name);
      if (it == ids.end())
        throw ValidationError("edge or session references unknown node: " +
                              name);
      return it->second;
    };

    std::vector<std::pair<int, int>> edges;
    for (const auto& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() ||
          !e[1].is_string())
        throw ParseError("each edge must be a [tail, head] string pair");
      edges.emplace_back(lookup(e[0].get<std::string>()),
                         lookup(e[1].get<std::string>()));
    }

    if (!doc["sessions"].is_array() || doc["sessions"].size() != 3)
      throw ValidationError("exactly 3 sessions required");
    std::array<Session, 3> sessions{};
    for (int i = 0; i < 3; ++i) {
      const auto& s = doc["sessions"][i];
      if (!s.is_object() || !s.contains("source") ||
          !s.contains("destination"))
        throw ParseError("each session needs source and destination");
      sessions[i] = Session{lookup(s["source"].get<std::string>()),
                            lookup(s["destination"].get<std::string>())};
    }
    return Network(std::move(nodes), std::move(edges), sessions, p);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed network document: ") + e.what());
  }
}

std::string serialize(const Network& net) {
  nlohmann::json doc;  // std::map-backed: keys come out sorted
  doc["field_prime"] = net.field_prime();
  doc["nodes"] = net.nodes();
  auto edges = nlohmann::json::array();
  for (const auto& [tail, head] : net.edges())
    edges.push_back({net.nodes()[tail], net.nodes()[head]});
  doc["edges"] = edges;
  auto sessions = nlohmann::json::array();
  for (const auto& s : net.sessions())
    sessions.push_back({{"source", net.nodes()[s.source]},
                        {"destination", net.nodes()[s.destination]}});
  doc["sessions"] = sessions;
  return doc.dump();
}

std::string content_digest(const Network& net) {
  std::uint64_t h = rng::label(serialize(net));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

int edge_disjoint_paths(int node_count,
                        const std::vector<std::pair<int, int>>& edges, int s,
                        int t) {
  if (s == t) return 0;
  const int m = static_cast<int>(edges.size());
  // Residual capacities: forward per edge id, backward accumulated.
  std::vector<int> cap(m, 1), back(m, 0);
  std::vector<std::vector<int>> out(node_count), in(node_count);
  for (int e = 0; e < m; ++e) {
    out[edges[e].first].push_back(e);
    in[edges[e].second].push_back(e);
  }
  int flow = 0;
  while (true) {
    // BFS over residual edges; parent stores (edge, forward?).
    std::vector<std::pair<int, bool>> parent(node_count, {-1, false});
    std::vector<bool> seen(node_count, false);
    std::queue<int> q;
    q.push(s);
    seen[s] = true;
    while (!q.empty() && !seen[t]) {
      int v = q.front();
      q.pop();
      for (int e : out[v]) {
        int w = edges[e].second;
        if (cap[e] > 0 && !seen[w]) {
          seen[w] = true;
          parent[w] = {e, true};
          q.push(w);
        }
      }
      for (int e : in[v]) {
        int w = edges[e].first;
        if (back[e] > 0 && !seen[w]) {
          seen[w] = true;
          parent[w] = {e, false};
          q.push(w);
        }
      }
    }
    if (!seen[t]) break;
    for (int v = t; v != s;) {
      auto [e, fwd] = parent[v];
      if (fwd) {
        --cap[e];
        ++back[e];
        v = edges[e].first;
      } else {
        ++cap[e];
        --back[e];
        v = edges[e].second;
      }
    }
    ++flow;
  }
  return flow;
}

int mincut(const Network& net, int session) {
  if (session < 1 || session > 3)
    throw ValidationError("session index must be 1..3");
  const auto& s = net.sessions()[session - 1];
  return edge_disjoint_paths(static_cast<int>(net.node_count()), net.edges(),
                             s.source, s.destination);
}

CoefficientIndex::CoefficientIndex(const Network& net) {
  const int n = static_cast<int>(net.node_count());
  node_base_.assign(n, 0);
  node_in_slots_.assign(n, {});
  node_out_slots_.assign(n, {});
  for (int node : net.topo_order()) {
    std::vector<int>& ins = node_in_slots_[node];
    std::vector<int>& outs = node_out_slots_[node];
    if (net.source_session(node) != 0)
      ins.push_back(kInjectSlot);
    else
      ins = net.in_edges(node);
    if (net.destination_session(node) != 0)
      outs.push_back(kCombineSlot);
    else
      outs = net.out_edges(node);
    node_base_[node] = entries_.size();
    for (int in : ins)
      for (int ot : outs) entries_.push_back(CoeffEntry{node, in, ot});
  }
}

std::size_t CoefficientIndex::index_of(int node, int in_slot,
                                       int out_slot) const {
  const auto& ins = node_in_slots_[node];
  const auto& outs = node_out_slots_[node];
  auto it_in = std::find(ins.begin(), ins.end(), in_slot);
  auto it_out = std::find(outs.begin(), outs.end(), out_slot);
  if (it_in == ins.end() || it_out == outs.end())
    throw ValidationError("no such coefficient slot at node");
  return node_base_[node] +
         static_cast<std::size_t>(it_in - ins.begin()) * outs.size() +
         static_cast<std::size_t>(it_out - outs.begin());
}

CoefficientIndex coefficient_index(const Network& net) {
  return CoefficientIndex(net);
}

PropagationPlan::PropagationPlan(const Network& net,
                                 const CoefficientIndex& index) {
  for (int node : net.topo_order()) {
    NodeStep step;
    step.node = node;
    step.in_slots = index.node_in_slots_[node];
    step.out_slots = index.node_out_slots_[node];
    step.coeff_base = index.node_base_[node];
    steps.push_back(std::move(step));
  }
  coeff_count = index.size();
}

}  // namespace nca::net
