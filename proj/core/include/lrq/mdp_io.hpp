#pragma once

#include <filesystem>
#include <iosfwd>

#include "lrq/dense_matrix.hpp"
#include "lrq/mdp.hpp"

namespace lrq {

// Binary layouts (all integers and doubles little-endian):
//
// Matrix, magic "LRQMAT\0\0":
//   magic[8] | u32 version=1 | u32 reserved=0 | u64 rows | u64 cols | f64 data[rows*cols] (row-major)
//
// MDP, magic "LRQMDP\0\0":
//   magic[8] | u32 version=1 | u32 reserved=0 | u64 n_states | u64 n_actions | f64 gamma | u64 nnz
//   | f64 rewards[S*A] | u64 offsets[S*A+1] | u32 next_state[nnz] | f64 probability[nnz]
//
// Readers reject unknown magic, unsupported versions, and truncated payloads
// with FormatError.

inline constexpr std::uint32_t kMatrixFormatVersion = 1;
inline constexpr std::uint32_t kMdpFormatVersion = 1;

void write_matrix(std::ostream& out, const DenseMatrix& m);
DenseMatrix read_matrix(std::istream& in);
void save_matrix(const std::filesystem::path& path, const DenseMatrix& m);
DenseMatrix load_matrix(const std::filesystem::path& path);

void write_mdp(std::ostream& out, const TabularMdp& mdp);
TabularMdp read_mdp(std::istream& in);
void save_mdp(const std::filesystem::path& path, const TabularMdp& mdp);
TabularMdp load_mdp(const std::filesystem::path& path);

/// "state,action" CSV with a header row.
void save_policy_csv(const std::filesystem::path& path, const Policy& pi);
Policy load_policy_csv(const std::filesystem::path& path);

}  // namespace lrq
