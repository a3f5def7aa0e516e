#include "sbtm/allocation.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "sbtm/errors.hpp"

namespace sbtm {

int AllocationMatrix::n_groups() const {
  return static_cast<int>(nonempty_labels().size());
}

std::vector<int> AllocationMatrix::nonempty_labels() const {
  std::vector<uint8_t> seen(static_cast<size_t>(k_up_) + 1, 0);
  for (int32_t g : z_) {
    if (g > 0) seen[g] = 1;
  }
  std::vector<int> labels;
  for (int g = 1; g <= k_up_; ++g) {
    if (seen[g]) labels.push_back(g);
  }
  return labels;
}

std::vector<int> AllocationMatrix::compact_labels() {
  std::vector<int> map(static_cast<size_t>(k_up_) + 1, 0);
  int next = 0;
  for (int g : nonempty_labels()) map[g] = ++next;
  for (auto& g : z_) g = map[g];
  return map;
}

void check_consistent(const AllocationMatrix& z, const NodeActivity& activity) {
  if (z.n_nodes() != activity.n_nodes() || z.n_frames() != activity.n_frames())
    throw ConsistencyError("allocation shape does not match activity");
  for (int t = 0; t < z.n_frames(); ++t) {
    for (int i = 0; i < z.n_nodes(); ++i) {
      int32_t g = z(i, t);
      bool active = activity.active(i, t);
      if (active && g == 0)
        throw ConsistencyError("active node " + std::to_string(i) + " allocated 0 at frame " +
                               std::to_string(t));
      if (!active && g != 0)
        throw ConsistencyError("inactive node " + std::to_string(i) + " allocated " +
                               std::to_string(g) + " at frame " + std::to_string(t));
      if (g < 0 || g > z.k_up())
        throw ConsistencyError("label " + std::to_string(g) + " outside 0.." +
                               std::to_string(z.k_up()));
    }
  }
}

void write_allocation_csv(const std::string& path, const AllocationMatrix& z) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  for (int i = 0; i < z.n_nodes(); ++i) {
    for (int t = 0; t < z.n_frames(); ++t) {
      if (t) os << ',';
      os << z(i, t);
    }
    os << '\n';
  }
}

AllocationMatrix read_allocation_csv(const std::string& path, int k_up) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open allocation file " + path);
  std::vector<std::vector<int32_t>> rows;
  std::string line;
  long long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<int32_t> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && (*p == ',' || *p == ' ' || *p == '\t' || *p == '\r')) ++p;
      if (p >= end) break;
      int32_t v;
      auto [ptr, ec] = std::from_chars(p, end, v);
      if (ec != std::errc())
        throw InputError(path + ":" + std::to_string(line_no) + ": expected integer label");
      if (v < 0)
        throw InputError(path + ":" + std::to_string(line_no) + ": negative label");
      row.push_back(v);
      p = ptr;
    }
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError(path + ":" + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(path + ": no allocation rows found");

  int n = static_cast<int>(rows.size());
  int t_frames = static_cast<int>(rows.front().size());
  int max_label = 0;
  for (const auto& r : rows)
    for (int32_t v : r) max_label = std::max(max_label, v);
  int k = k_up > 0 ? k_up : std::max(1, max_label);
  if (max_label > k)
    throw InputError(path + ": label " + std::to_string(max_label) + " exceeds k_up " +
                     std::to_string(k));

  AllocationMatrix z(n, t_frames, k);
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < t_frames; ++t) z.set(i, t, rows[i][t]);
  return z;
}

}  // namespace sbtm
