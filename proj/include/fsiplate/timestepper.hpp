#pragma once

#include "fsiplate/assembly.hpp"
#include "fsiplate/config.hpp"
#include "fsiplate/linsolve.hpp"
#include "fsiplate/mesh.hpp"

#include <optional>
#include <vector>

namespace fsiplate {

// reduced coupled state: interior fluid velocities, plate displacement and
// velocity on unclamped dofs, mean-free pressure, and the two multipliers
struct FsiState {
    Eigen::VectorXd alpha1, alpha2;  // interior u1 / u2 coefficients
    Eigen::VectorXd omega1, omega2;  // plate displacement / velocity
    Eigen::VectorXd q;               // mean-free pressure coefficients
    double c_tilde = 0.0;            // multiplier of the mean-free velocity row
    double mu = 0.0;                 // constant pressure component
    double t = 0.0;
};

FsiState zero_state(const ReducedBlocks& rb);

struct EnergyRecord {
    double t = 0.0;
    double plate_potential = 0.0;  // (1/2) w1' S w1
    double plate_kinetic = 0.0;    // (1/2) w2' Ms w2
    double fluid_kinetic = 0.0;    // (1/2) |u|^2
    double total = 0.0;
    double dissipation = 0.0;      // |grad u|^2
    double div_residual = 0.0;     // max norm of the divergence rows
    double es_omega1_drift = 0.0;  // change of the plate displacement mean row
};

double total_energy(const ReducedBlocks& rb, const FsiState& s);
double gradient_energy(const ReducedBlocks& rb, const FsiState& s);
EnergyRecord energy_record(const ReducedBlocks& rb, const FsiState& s, double es_omega1_initial);

// one implicit Euler step of the monolithic coupled system
class BackwardEulerOperator {
  public:
    BackwardEulerOperator(const ReducedBlocks& rb, double dt,
                          std::optional<double> eta = std::nullopt);

    const SpMat& matrix() const { return A_; }
    const SpMat& mass_part() const { return Mrhs_; }
    double dt() const { return dt_; }

    // forcing, when given, has state_size entries (momentum rows)
    FsiState step(const FsiState& s, const Eigen::VectorXd* forcing = nullptr) const;

    Eigen::VectorXd pack(const FsiState& s) const;
    FsiState unpack(const Eigen::VectorXd& z, double t) const;

  private:
    double dt_;
    int n_interior_, n_plate_, pressure_count_;
    SpMat A_;      // full implicit operator
    SpMat Mrhs_;   // previous-state map (mass rows, zero constraint rows)
    Factorization lu_;
};

BackwardEulerOperator build_backward_euler_operator(const ReducedBlocks& rb, double dt,
                                                    std::optional<double> eta = std::nullopt);
FsiState backward_euler_step(const BackwardEulerOperator& op, const FsiState& s,
                             const Eigen::VectorXd* forcing = nullptr);

// initial plate data families; the fluid starts from the divergence-free
// velocity field of minimal kinetic energy compatible with the plate motion
struct InitialSpec {
    enum class Kind { Zero, Sawtooth, Hat, Randomized } kind = Kind::Zero;
    int teeth = 5;
    std::uint64_t seed = 0;
};
InitialSpec parse_initial_spec(const std::string& text, std::uint64_t default_seed);

FsiState make_initial_data(const ReducedBlocks& rb, const PlateMesh& plate,
                           const InitialSpec& spec);

struct SimulationResult {
    Mesh2D mesh;
    PlateMesh plate;
    DofMap dofs;
    ReducedBlocks blocks;
    std::vector<EnergyRecord> energy;       // one record per step, t=0 included
    std::vector<double> snapshot_times;     // requested times, rounded to steps
    std::vector<FsiState> snapshots;
    FsiState final_state;
    int steps = 0;
};

SimulationResult run_simulation(const SimulationConfig& cfg,
                                const FsiState* initial_override = nullptr);

}  // namespace fsiplate
