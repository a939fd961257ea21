#include "methlib/network.hpp"

#include "methlib/error.hpp"

namespace methlib {

std::size_t Network::edge_count() const {
  std::size_t n = 0;
  for (const auto& [id, edges] : out_edges) n += edges.size();
  return n;
}

const std::vector<std::string>& Network::outgoing(const std::string& id) const {
  auto it = out_edges.find(id);
  if (it == out_edges.end()) throw Error(ErrorCode::UnknownId, "unknown component '" + id + "'");
  return it->second;
}

const std::vector<std::string>& Network::incoming(const std::string& id) const {
  auto it = in_edges.find(id);
  if (it == in_edges.end()) throw Error(ErrorCode::UnknownId, "unknown component '" + id + "'");
  return it->second;
}

Network build_network(const Library& lib) {
  require_valid(lib);
  Network net;
  net.nodes.reserve(lib.components.size());
  for (const auto& [id, c] : lib.components) {
    net.nodes.push_back(id);
    net.out_edges[id];
    net.in_edges[id];
  }
  // relations iterate in id order, so each list comes out sorted
  for (const auto& [rid, r] : lib.relations) {
    net.out_edges[r.from].push_back(rid);
    net.in_edges[r.to].push_back(rid);
  }
  return net;
}

}  // namespace methlib
