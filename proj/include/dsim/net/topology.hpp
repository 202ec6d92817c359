#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dsim/core/sim_time.hpp"
#include "dsim/net/link.hpp"

namespace dsim {

enum class NodeKind : std::uint8_t { host, router };

struct Node {
  NodeId id = 0;
  std::string name;
  NodeKind kind = NodeKind::host;
};

using LinkIndex = std::size_t;
using Path = std::vector<NodeId>;

/// Static graph of nodes, directed links and host-to-host routes.
class Topology {
 public:
  NodeId add_node(std::string name, NodeKind kind);
  LinkIndex add_link(NodeId from, NodeId to, std::uint64_t rate_bps, SimTime prop_delay);
  /// Adds from->to and to->from with identical parameters.
  void add_duplex(NodeId a, NodeId b, std::uint64_t rate_bps, SimTime prop_delay);

  /// Installs a route after checking it is loop-free and uses existing links.
  /// Throws BadParam otherwise.
  void set_route(NodeId src, NodeId dst, Path path);
  /// Fills every missing host-to-host route with a BFS shortest path
  /// (neighbours explored in node-id order, so the result is deterministic).
  void compute_routes();

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkIndex i) const { return links_.at(i); }
  std::optional<NodeId> find(std::string_view name) const;
  /// Throws BadParam for an unknown name.
  NodeId id_of(std::string_view name) const;
  std::optional<LinkIndex> link_between(NodeId from, NodeId to) const;
  /// Throws BadParam when no route exists.
  const Path& route(NodeId src, NodeId dst) const;
  const std::map<std::pair<NodeId, NodeId>, Path>& routes() const { return routes_; }

  /// The DiffServ edge router (conditioning + scheduling on its egress).
  std::optional<NodeId> edge_router;
  /// Egress link whose queue set is scheduled by the configured scheduler.
  std::optional<LinkIndex> bottleneck;

 private:
  std::vector<Node> nodes_;
  std::vector<Link> links_;
  std::map<std::pair<NodeId, NodeId>, LinkIndex> link_index_;
  std::map<std::pair<NodeId, NodeId>, Path> routes_;
};

inline constexpr std::uint64_t kDefaultLanRateBps = 100'000'000;
inline constexpr SimTime kDefaultLanDelay = SimTime::ms(1);
inline constexpr std::uint64_t kDefaultManRateBps = 2'000'000;
inline constexpr SimTime kDefaultManDelay = SimTime::ns(0);

struct TopologyOverrides {
  std::uint64_t lan_rate_bps = kDefaultLanRateBps;
  SimTime lan_delay = kDefaultLanDelay;
  std::uint64_t man_rate_bps = kDefaultManRateBps;
  /// Propagation delay of each of the two MAN hops (e1->core, core->e2).
  SimTime man_delay = kDefaultManDelay;
};

inline constexpr int kTestbedHostPairs = 5;

/// The simulated testbed: S0-S4 -> e1 -> core -> e2 -> D0-D4. Host links are
/// LAN links, e1-core and core-e2 are MAN links; e1 is the edge router and
/// e1->core the bottleneck. Throws BadParam on zero rates.
Topology build_testbed_topology(const TopologyOverrides& cfg = {});

}  // namespace dsim
