#include "sbtm/event_list.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "sbtm/errors.hpp"

namespace sbtm {

namespace {

struct RawEvent {
  double time;
  std::string a;
  std::string b;
};

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_ll(const std::string& s, long long& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace

void IdMap::write(std::ostream& os) const {
  for (size_t i = 0; i < index_to_id.size(); ++i) os << i << ' ' << index_to_id[i] << '\n';
}

void IdMap::write_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  write(os);
}

std::pair<EventList, IdMap> read_edge_list(std::istream& is, const std::string& name) {
  std::vector<RawEvent> raw;
  std::string line;
  long long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    if (fields.size() != 3) {
      throw InputError(name + ":" + std::to_string(line_no) +
                       ": expected `timestamp node_a node_b`, got " +
                       std::to_string(fields.size()) + " fields");
    }
    double ts;
    if (!parse_double(fields[0], ts)) {
      throw InputError(name + ":" + std::to_string(line_no) + ": bad timestamp `" + fields[0] + "`");
    }
    if (fields[1] == fields[2]) {
      throw InputError(name + ":" + std::to_string(line_no) + ": self-loop on node `" + fields[1] + "`");
    }
    raw.push_back({ts, std::move(fields[1]), std::move(fields[2])});
  }
  if (raw.empty()) throw InputError(name + ": no events found");

  // Stable id -> index map: numeric order when every id is an integer,
  // lexicographic otherwise.
  std::vector<std::string> ids;
  ids.reserve(raw.size() * 2);
  for (const auto& e : raw) {
    ids.push_back(e.a);
    ids.push_back(e.b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  bool all_numeric = true;
  std::vector<long long> numeric(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (!parse_ll(ids[i], numeric[i])) {
      all_numeric = false;
      break;
    }
  }
  if (all_numeric) {
    std::vector<size_t> order(ids.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return numeric[a] < numeric[b]; });
    std::vector<std::string> sorted;
    sorted.reserve(ids.size());
    for (size_t o : order) sorted.push_back(std::move(ids[o]));
    ids = std::move(sorted);
  }

  std::map<std::string, int> to_index;
  for (size_t i = 0; i < ids.size(); ++i) to_index[ids[i]] = static_cast<int>(i);

  EventList out;
  out.n_nodes = static_cast<int>(ids.size());
  out.events.reserve(raw.size());
  for (const auto& e : raw) {
    out.events.push_back({e.time, to_index[e.a], to_index[e.b]});
  }
  return {std::move(out), IdMap{std::move(ids)}};
}

std::pair<EventList, IdMap> read_edge_list(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open edge list " + path);
  return read_edge_list(is, path);
}

}  // namespace sbtm
