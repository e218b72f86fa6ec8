#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "sikam/kam.hpp"

namespace sikam {

// out(f) = col(f + delta), zero where f + delta falls outside the column.
std::vector<double> shift_frame(std::span<const double> col, int delta);

// squared_distance(target, shift_frame(candidate, delta)) without materializing the shift.
double shifted_squared_distance(std::span<const double> target, std::span<const double> candidate,
                                int delta);

// Best shift of one candidate against the target over [-max_shift, max_shift],
// ties resolved towards the smallest |shift|, then the negative one.
Neighbor best_shift(std::span<const double> target, std::span<const double> candidate,
                    int candidate_frame, int max_shift);

// K-NN over every (frame, shift) pair with |shift| <= max_shift, keeping at
// most one shift per candidate frame.
NeighborSet knn_shift_exhaustive(const MagSpectrogram& mag, int target,
                                 std::span<const int> candidates, int k, int max_shift);

// Same contract as median_estimate; the shifts recorded in the set are applied.
inline Eigen::VectorXd median_estimate_shifted(const MagSpectrogram& mag, const NeighborSet& nset) {
  return median_estimate(mag, nset);
}

}  // namespace sikam
