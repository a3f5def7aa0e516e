#include "sbtm/metrics.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "sbtm/errors.hpp"

namespace sbtm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void write_value(std::ofstream& os, double v) {
  if (std::isnan(v)) {
    os << "NA";
  } else {
    os << v;
  }
}

}  // namespace

double nmi(std::span<const int32_t> a, std::span<const int32_t> b) {
  if (a.size() != b.size()) throw ArgumentError("partitions must have equal length");
  const size_t n = a.size();
  if (n == 0) throw ArgumentError("partitions must be non-empty");

  std::map<int32_t, long long> count_a, count_b;
  std::map<std::pair<int32_t, int32_t>, long long> joint;
  for (size_t idx = 0; idx < n; ++idx) {
    ++count_a[a[idx]];
    ++count_b[b[idx]];
    ++joint[{a[idx], b[idx]}];
  }
  if (count_a.size() < 2 || count_b.size() < 2) return 0.0;  // single-block convention

  const double dn = static_cast<double>(n);
  double h_a = 0.0, h_b = 0.0, mi = 0.0;
  for (const auto& [label, c] : count_a) {
    double p = c / dn;
    h_a -= p * std::log(p);
  }
  for (const auto& [label, c] : count_b) {
    double p = c / dn;
    h_b -= p * std::log(p);
  }
  for (const auto& [pair, c] : joint) {
    double p = c / dn;
    double pa = count_a[pair.first] / dn;
    double pb = count_b[pair.second] / dn;
    mi += p * std::log(p / (pa * pb));
  }
  double denom = std::sqrt(h_a * h_b);
  if (!(denom > 0.0)) return 0.0;
  double v = mi / denom;
  // clamp the tiny excursions from floating-point rounding
  return std::min(1.0, std::max(0.0, v));
}

std::vector<double> nmi_per_frame(const AllocationMatrix& z_a, const AllocationMatrix& z_b) {
  if (z_a.n_nodes() != z_b.n_nodes() || z_a.n_frames() != z_b.n_frames())
    throw ArgumentError("allocation shapes differ");
  std::vector<double> out(z_a.n_frames(), kNaN);
  std::vector<int32_t> la, lb;
  for (int t = 0; t < z_a.n_frames(); ++t) {
    la.clear();
    lb.clear();
    for (int i = 0; i < z_a.n_nodes(); ++i) {
      bool active_a = z_a(i, t) != 0;
      bool active_b = z_b(i, t) != 0;
      if (active_a != active_b)
        throw ArgumentError("activity patterns differ at frame " + std::to_string(t) +
                            ", node " + std::to_string(i));
      if (active_a) {
        la.push_back(z_a(i, t));
        lb.push_back(z_b(i, t));
      }
    }
    if (!la.empty()) out[t] = nmi(la, lb);
  }
  return out;
}

PluginEstimates plugin_estimates(const SufficientStats& stats) {
  PluginEstimates est;
  est.k_up = stats.k_up;
  est.theta_hat = BlockPairs<double>(stats.k_up, kNaN);
  est.p_hat = BlockPairs<double>(stats.k_up, kNaN);
  est.q_hat = BlockPairs<double>(stats.k_up, kNaN);
  est.pi_hat = Matrix<double>(stats.k_up + 1, stats.k_up + 1, kNaN);

  auto ratio = [](long long num, long long denom) {
    return denom > 0 ? static_cast<double>(num) / static_cast<double>(denom) : kNaN;
  };
  for (int g = 1; g <= stats.k_up; ++g) {
    for (int h = g; h <= stats.k_up; ++h) {
      est.theta_hat.at(g, h) = ratio(stats.eta.at(g, h), stats.eta.at(g, h) + stats.zeta.at(g, h));
      est.p_hat.at(g, h) = ratio(stats.u01.at(g, h), stats.u01.at(g, h) + stats.u00.at(g, h));
      est.q_hat.at(g, h) = ratio(stats.u10.at(g, h), stats.u10.at(g, h) + stats.u11.at(g, h));
    }
  }
  for (int g = 0; g <= stats.k_up; ++g) {
    long long row_total = 0;
    for (int h = 0; h <= stats.k_up; ++h) row_total += stats.r(g, h);
    for (int h = 0; h <= stats.k_up; ++h) est.pi_hat(g, h) = ratio(stats.r(g, h), row_total);
  }
  return est;
}

Matrix<long long> group_size_trajectories(const AllocationMatrix& z) {
  Matrix<long long> counts(z.k_up() + 1, z.n_frames(), 0);
  for (int t = 0; t < z.n_frames(); ++t) {
    for (int i = 0; i < z.n_nodes(); ++i) counts(z(i, t), t) += 1;
  }
  return counts;
}

void write_nmi_table(const std::string& path, const std::vector<double>& nmi_values) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  os.precision(12);
  os << "frame,nmi\n";
  for (size_t t = 0; t < nmi_values.size(); ++t) {
    os << t << ',';
    write_value(os, nmi_values[t]);
    os << '\n';
  }
}

void write_k_per_frame_table(const std::string& path, const AllocationMatrix& z_true,
                             const AllocationMatrix& z_hat) {
  if (z_true.n_frames() != z_hat.n_frames())
    throw ArgumentError("allocation shapes differ");
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  os << "frame,k_true,k_hat\n";
  auto k_at = [](const AllocationMatrix& z, int t) {
    std::vector<uint8_t> seen(static_cast<size_t>(z.k_up()) + 1, 0);
    int k = 0;
    for (int i = 0; i < z.n_nodes(); ++i) {
      int g = z(i, t);
      if (g > 0 && !seen[g]) {
        seen[g] = 1;
        ++k;
      }
    }
    return k;
  };
  for (int t = 0; t < z_true.n_frames(); ++t) {
    os << t << ',' << k_at(z_true, t) << ',' << k_at(z_hat, t) << '\n';
  }
}

void write_dense_matrix_csv(const std::string& path, const Matrix<double>& m) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  os.precision(12);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) os << ',';
      write_value(os, m(r, c));
    }
    os << '\n';
  }
}

void write_block_matrix_csv(const std::string& path, const BlockPairs<double>& m) {
  Matrix<double> full(m.k(), m.k());
  for (int g = 1; g <= m.k(); ++g) {
    for (int h = 1; h <= m.k(); ++h) full(g - 1, h - 1) = m.at(g, h);
  }
  write_dense_matrix_csv(path, full);
}

void write_trajectories_csv(const std::string& path, const Matrix<long long>& counts) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  os << "label";
  for (int t = 0; t < counts.cols(); ++t) os << ",t" << t;
  os << '\n';
  for (int g = 0; g < counts.rows(); ++g) {
    os << g;
    for (int t = 0; t < counts.cols(); ++t) os << ',' << counts(g, t);
    os << '\n';
  }
}

}  // namespace sbtm
