#pragma once

#include "fsiplate/assembly.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace fsiplate {

// first-order generator restricted to the constrained subspace, together
// with the energy inner product on the same coordinates
struct GeneratorSystem {
    Eigen::MatrixXd A;         // generator on nullspace coordinates
    Eigen::MatrixXd H;         // SPD energy weight
    Eigen::MatrixXd Z;         // columns span {x : C x = 0}
    Eigen::MatrixXd fluid_dissipation;  // Re<Ax,x>_H = -x'(fluid_dissipation+plate_damping)x
    Eigen::MatrixXd plate_damping;
    std::optional<double> eta;

    int dim() const { return static_cast<int>(A.rows()); }
};

GeneratorSystem build_generator(const ReducedBlocks& rb,
                                std::optional<double> eta = std::nullopt);

struct ResolventSample {
    double beta = 0.0;
    double norm = 0.0;  // operator norm of (i beta - A)^{-1} in the H metric
};

ResolventSample resolvent_norm(const GeneratorSystem& gen, double beta);

// samples in grid order; the grid must be increasing and positive
std::vector<ResolventSample> resolvent_sweep(const GeneratorSystem& gen,
                                             const Eigen::VectorXd& beta_grid, int workers = 1);

Eigen::VectorXd log_spaced(double lo, double hi, int count);

struct GevreyFit {
    double alpha_hat = 0.0;   // negative slope of log norm against log beta
    double delta = 0.0;       // implied smoothing class index, 1/alpha_hat
    double r_squared = 0.0;
    double beta_min = 0.0, beta_max = 0.0;  // window actually used
    int samples_used = 0;
};

GevreyFit fit_decay_exponent(const std::vector<ResolventSample>& samples, double beta_min,
                             double beta_max);

}  // namespace fsiplate
