#pragma once

#include <utility>
#include <vector>

#include "volterra/gaussian.hpp"
#include "volterra/grid.hpp"
#include "volterra/level1.hpp"

namespace volterra {

// Second-level construction scheme. fbm_stratonovich builds i = j entries from
// the partition-mollified Stratonovich sum and i != j entries from the adapted
// left-point (conditional Wiener) sum; bm_ito uses the adapted left-point sum
// for every pair.
enum class Level2Scheme { fbm_stratonovich, bm_ito };

// z^{2,tau,i,j}_{t,0} on the (t, tau) triangle, anchored at s = 0. General
// increments are reconstructed through the Chen relation
//   z^{2,tau}_{ts} = z^{2,tau}_{t,0} - z^{2,tau}_{s,0} - z^{1,tau}_{ts} * z^{1,.}_{s,0},
// which makes delta of the reconstruction equal the same-grid convolution
// identically; storage stays O(N^2) per component pair.
class Level2Field {
  public:
    Level2Field(const Level1Field& z1, const PathSample& path, Level2Scheme scheme);

    const Grid& grid() const { return grid_; }
    double gamma() const { return gamma_; }
    int dim() const { return dim_; }
    Level2Scheme scheme() const { return scheme_; }

    double base(int i, int j, int t_idx, int tau_idx) const {
        return data_[static_cast<std::size_t>(i) * dim_ + j].at(0, t_idx, tau_idx);
    }
    double max_abs() const;

    bool mollified_pair(int i, int j) const {
        return scheme_ == Level2Scheme::fbm_stratonovich && i == j;
    }
    // Kernel weights of the upper factor in the Chen relation for pair (i,j):
    // cell averages for the mollified diagonal, left-point otherwise.
    const KernelWeights& upper_weights(int i, int j) const {
        return mollified_pair(i, j) ? avg_ : left_;
    }
    double db(int component, int k) const { return db_[component][k]; }

  private:
    Grid grid_;
    double gamma_ = 0.0;
    int dim_ = 0;
    Level2Scheme scheme_ = Level2Scheme::bm_ito;
    KernelWeights left_, avg_;
    std::vector<TwoParamField> data_;
    std::vector<std::vector<double>> db_;
};

Level2Field build_level2(const Level1Field& z1, const PathSample& path, Level2Scheme scheme);

// z^{2,tau,i,j}_{ts} for all pairs, row-major m*m. s=0 returns the stored base.
std::vector<double> level2_increment(const Level2Field& f2, const Level1Field& f1, int s_idx,
                                     int t_idx, int tau_idx);

// max over strided grid Delta_4 tuples and component pairs of
// |delta_u z^2 - z^1 * z^1| with the same-grid convolution summed directly.
double chen_max_residual(const Level2Field& f2, const Level1Field& f1, int stride = 1);

// Trace term of the Skorohod-to-Stratonovich conversion for the fBm diagonal:
// H(2H-1)/(2H-1-gamma) * int_s^t (tau-r)^{-gamma} (r-s)^{2H-1-gamma} dr.
double strat_correction(double gamma, double hurst, double s, double t, double tau);

// Deterministic mean proxy of the diverging BM Stratonovich correction,
// c_gamma * sum over cells of h^{1-gamma} (tau - r_left)^{-gamma} with
// c_gamma = (1-gamma)^{-1}, evaluated at each requested mesh. Returns
// (actual mesh, value) pairs; the value diverges like h^{-gamma}.
std::vector<std::pair<double, double>> ito_strat_divergence_probe(
    double gamma, double s, double t, double tau, const std::vector<double>& mesh_levels);

}  // namespace volterra
