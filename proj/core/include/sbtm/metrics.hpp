#pragma once

#include <span>
#include <string>
#include <vector>

#include "sbtm/allocation.hpp"
#include "sbtm/matrix.hpp"
#include "sbtm/suff_stats.hpp"

namespace sbtm {

/// Normalised mutual information between two labelings of the same nodes,
/// mutual information over the geometric mean of the entropies. By
/// convention 0 when either side has a single block. Throws ArgumentError
/// on length mismatch.
double nmi(std::span<const int32_t> a, std::span<const int32_t> b);

/// Frame-wise NMI over active nodes only. Frames with no active node yield
/// NaN (serialised as NA). Throws ArgumentError when shapes or activity
/// patterns differ (label 0 must appear in the same cells).
std::vector<double> nmi_per_frame(const AllocationMatrix& z_a, const AllocationMatrix& z_b);

/// Ratio estimates of the regime probabilities at a given allocation.
/// Entries with a zero denominator are NaN and serialise as NA.
struct PluginEstimates {
  int k_up = 0;
  BlockPairs<double> theta_hat, p_hat, q_hat;
  Matrix<double> pi_hat;  // rows normalised by their transition totals
};

PluginEstimates plugin_estimates(const SufficientStats& stats);

/// Group sizes per frame, one row per label 0..k_up; columns sum to N.
Matrix<long long> group_size_trajectories(const AllocationMatrix& z);

// CSV writers. NaN entries are written as the literal NA.
void write_nmi_table(const std::string& path, const std::vector<double>& nmi_values);
void write_k_per_frame_table(const std::string& path, const AllocationMatrix& z_true,
                             const AllocationMatrix& z_hat);
void write_dense_matrix_csv(const std::string& path, const Matrix<double>& m);
void write_block_matrix_csv(const std::string& path, const BlockPairs<double>& m);
void write_trajectories_csv(const std::string& path, const Matrix<long long>& counts);

}  // namespace sbtm
