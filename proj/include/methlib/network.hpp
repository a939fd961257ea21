#pragma once

#include <map>
#include <string>
#include <vector>

#include "methlib/model.hpp"

namespace methlib {

/// Adjacency view of the component graph. Every component is a node (with
/// possibly empty adjacency); every relation appears once in the out-list of
/// its source and once in the in-list of its target. Lists are sorted by
/// relation id.
struct Network {
  std::vector<std::string> nodes;
  std::map<std::string, std::vector<std::string>> out_edges;
  std::map<std::string, std::vector<std::string>> in_edges;

  std::size_t edge_count() const;
  const std::vector<std::string>& outgoing(const std::string& id) const;
  const std::vector<std::string>& incoming(const std::string& id) const;

  bool operator==(const Network&) const = default;
};

/// Throws Error(InvalidLibrary) unless validate(lib) is empty.
Network build_network(const Library& lib);

}  // namespace methlib
