#include "dsim/net/topology.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "dsim/core/error.hpp"

namespace dsim {

NodeId Topology::add_node(std::string name, NodeKind kind) {
  if (find(name)) throw BadParam("duplicate node name '" + name + "'");
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{id, std::move(name), kind});
  return id;
}

LinkIndex Topology::add_link(NodeId from, NodeId to, std::uint64_t rate_bps, SimTime prop_delay) {
  if (from >= nodes_.size() || to >= nodes_.size() || from == to) {
    throw BadParam("link endpoints invalid: " + std::to_string(from) + "->" + std::to_string(to));
  }
  if (rate_bps == 0) throw BadParam("link rate must be positive");
  if (link_index_.count({from, to})) throw BadParam("duplicate link");
  const LinkIndex idx = links_.size();
  links_.push_back(Link{from, to, rate_bps, prop_delay, SimTime{}});
  link_index_[{from, to}] = idx;
  return idx;
}

void Topology::add_duplex(NodeId a, NodeId b, std::uint64_t rate_bps, SimTime prop_delay) {
  add_link(a, b, rate_bps, prop_delay);
  add_link(b, a, rate_bps, prop_delay);
}

std::optional<NodeId> Topology::find(std::string_view name) const {
  for (const auto& n : nodes_) {
    if (n.name == name) return n.id;
  }
  return std::nullopt;
}

NodeId Topology::id_of(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw BadParam("undefined node '" + std::string(name) + "'");
}

std::optional<LinkIndex> Topology::link_between(NodeId from, NodeId to) const {
  auto it = link_index_.find({from, to});
  if (it == link_index_.end()) return std::nullopt;
  return it->second;
}

void Topology::set_route(NodeId src, NodeId dst, Path path) {
  if (path.size() < 2 || path.front() != src || path.back() != dst) {
    throw BadParam("route must start at its source and end at its destination");
  }
  std::set<NodeId> seen;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!seen.insert(path[i]).second) throw BadParam("route contains a loop");
    if (i + 1 < path.size() && !link_between(path[i], path[i + 1])) {
      throw BadParam("route uses missing link " + node(path[i]).name + "->" + node(path[i + 1]).name);
    }
  }
  routes_[{src, dst}] = std::move(path);
}

void Topology::compute_routes() {
  std::vector<std::vector<NodeId>> adj(nodes_.size());
  for (const auto& l : links_) adj[l.from].push_back(l.to);
  for (auto& a : adj) std::sort(a.begin(), a.end());

  for (const auto& s : nodes_) {
    if (s.kind != NodeKind::host) continue;
    std::vector<std::optional<NodeId>> parent(nodes_.size());
    std::vector<bool> visited(nodes_.size(), false);
    std::deque<NodeId> frontier{s.id};
    visited[s.id] = true;
    while (!frontier.empty()) {
      const NodeId u = frontier.front();
      frontier.pop_front();
      for (NodeId v : adj[u]) {
        if (visited[v]) continue;
        visited[v] = true;
        parent[v] = u;
        // hosts do not forward transit traffic
        if (nodes_[v].kind == NodeKind::router) frontier.push_back(v);
      }
    }
    for (const auto& d : nodes_) {
      if (d.kind != NodeKind::host || d.id == s.id || !visited[d.id]) continue;
      if (routes_.count({s.id, d.id})) continue;
      Path p{d.id};
      for (NodeId cur = d.id; cur != s.id;) {
        cur = *parent[cur];
        p.push_back(cur);
      }
      std::reverse(p.begin(), p.end());
      routes_[{s.id, d.id}] = std::move(p);
    }
  }
}

const Path& Topology::route(NodeId src, NodeId dst) const {
  auto it = routes_.find({src, dst});
  if (it == routes_.end()) {
    throw BadParam("no route " + node(src).name + "->" + node(dst).name);
  }
  return it->second;
}

Topology build_testbed_topology(const TopologyOverrides& cfg) {
  const auto lan_rate = cfg.lan_rate_bps;
  const auto lan_delay = cfg.lan_delay;
  const auto man_rate = cfg.man_rate_bps;
  const auto man_delay = cfg.man_delay;
  if (lan_rate == 0 || man_rate == 0) throw BadParam("link rates must be positive");

  Topology t;
  std::vector<NodeId> srcs;
  std::vector<NodeId> dsts;
  for (int i = 0; i < kTestbedHostPairs; ++i) srcs.push_back(t.add_node("S" + std::to_string(i), NodeKind::host));
  const NodeId e1 = t.add_node("e1", NodeKind::router);
  const NodeId core = t.add_node("core", NodeKind::router);
  const NodeId e2 = t.add_node("e2", NodeKind::router);
  for (int i = 0; i < kTestbedHostPairs; ++i) dsts.push_back(t.add_node("D" + std::to_string(i), NodeKind::host));

  for (NodeId s : srcs) t.add_duplex(s, e1, lan_rate, lan_delay);
  t.add_duplex(e1, core, man_rate, man_delay);
  t.add_duplex(core, e2, man_rate, man_delay);
  for (NodeId d : dsts) t.add_duplex(e2, d, lan_rate, lan_delay);
  t.compute_routes();
  t.edge_router = e1;
  t.bottleneck = t.link_between(e1, core);
  return t;
}

}  // namespace dsim
