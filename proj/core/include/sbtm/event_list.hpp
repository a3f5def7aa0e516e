#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sbtm {

/// One timestamped undirected interaction between two nodes.
struct Event {
  double time;
  int i;
  int j;
};

/// Timestamped interaction list with node ids already compacted to 0..N-1.
struct EventList {
  int n_nodes = 0;
  std::vector<Event> events;
};

/// Maps compact node indices back to the identifiers found in the input
/// file. Indices are assigned in sorted id order (numeric when every id
/// parses as an integer, lexicographic otherwise) so re-ingestion of the
/// same file is stable.
struct IdMap {
  std::vector<std::string> index_to_id;

  int size() const { return static_cast<int>(index_to_id.size()); }
  void write(std::ostream& os) const;
  void write_file(const std::string& path) const;
};

/// Parses a `timestamp node_a node_b` edge-list file. Fields may be
/// separated by whitespace or commas; lines starting with '#' are ignored.
/// Throws InputError naming the offending line on malformed rows or
/// self-loops.
std::pair<EventList, IdMap> read_edge_list(const std::string& path);
std::pair<EventList, IdMap> read_edge_list(std::istream& is, const std::string& name = "<stream>");

}  // namespace sbtm
