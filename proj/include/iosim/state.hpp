#pragma once

#include <Eigen/Core>

namespace iosim {

// All dynamic state of the network, one state variable per row and one
// neuron per column. Row-major storage keeps each variable contiguous
// across neurons (structure-of-arrays), which is the layout the inner
// loops stream over.
template <class Scalar>
using StateMatrix = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row layout of the full three-compartment cell: three membrane voltages,
// ten gating variables, dendritic calcium. Reduced test models may use
// fewer rows; the full model always has state_row::count of them.
namespace state_row {
inline constexpr Eigen::Index v_soma = 0;
inline constexpr Eigen::Index v_dend = 1;
inline constexpr Eigen::Index v_axon = 2;
inline constexpr Eigen::Index cal_k = 3;   // soma low-threshold Ca activation
inline constexpr Eigen::Index cal_l = 4;   // soma low-threshold Ca inactivation
inline constexpr Eigen::Index na_h = 5;    // soma Na inactivation
inline constexpr Eigen::Index kdr_n = 6;   // soma delayed-rectifier K activation
inline constexpr Eigen::Index k_x = 7;     // soma fast K activation
inline constexpr Eigen::Index na_h_a = 8;  // axon Na inactivation
inline constexpr Eigen::Index k_x_a = 9;   // axon K activation
inline constexpr Eigen::Index cah_r = 10;  // dendrite high-threshold Ca activation
inline constexpr Eigen::Index kca_s = 11;  // dendrite Ca-dependent K activation
inline constexpr Eigen::Index h_q = 12;    // dendrite h-current activation
inline constexpr Eigen::Index ca = 13;     // dendritic calcium concentration
inline constexpr Eigen::Index count = 14;
}  // namespace state_row

}  // namespace iosim
