#include "fsiplate/timestepper.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fsiplate {

namespace {

void add_sparse(std::vector<Eigen::Triplet<double>>& trips, const SpMat& B, int row0, int col0,
                double scale = 1.0) {
    for (int k = 0; k < B.outerSize(); ++k)
        for (SpMat::InnerIterator it(B, k); it; ++it)
            trips.emplace_back(row0 + static_cast<int>(it.row()), col0 + static_cast<int>(it.col()),
                               scale * it.value());
}

void add_dense(std::vector<Eigen::Triplet<double>>& trips, const Eigen::MatrixXd& B, int row0,
               int col0, double scale = 1.0) {
    for (int i = 0; i < B.rows(); ++i)
        for (int j = 0; j < B.cols(); ++j)
            if (B(i, j) != 0.0) trips.emplace_back(row0 + i, col0 + j, scale * B(i, j));
}

void add_identity(std::vector<Eigen::Triplet<double>>& trips, int size, int row0, int col0,
                  double scale) {
    for (int i = 0; i < size; ++i) trips.emplace_back(row0 + i, col0 + i, scale);
}

}  // namespace

FsiState zero_state(const ReducedBlocks& rb) {
    FsiState s;
    s.alpha1 = Eigen::VectorXd::Zero(rb.n_interior);
    s.alpha2 = Eigen::VectorXd::Zero(rb.n_interior);
    s.omega1 = Eigen::VectorXd::Zero(rb.n_plate);
    s.omega2 = Eigen::VectorXd::Zero(rb.n_plate);
    s.q = Eigen::VectorXd::Zero(rb.pressure_count);
    return s;
}

double total_energy(const ReducedBlocks& rb, const FsiState& s) {
    const double fluid = s.alpha1.dot(rb.Ma * s.alpha1) + s.alpha2.dot(rb.Ma * s.alpha2) +
                         2.0 * s.alpha2.dot(rb.Maw * s.omega2) + s.omega2.dot(rb.Mww * s.omega2);
    const double plate = s.omega1.dot(rb.S_r * s.omega1) + s.omega2.dot(rb.Ms_r * s.omega2);
    return 0.5 * (fluid + plate);
}

double gradient_energy(const ReducedBlocks& rb, const FsiState& s) {
    return s.alpha1.dot(rb.Ka * s.alpha1) + s.alpha2.dot(rb.Ka * s.alpha2) +
           2.0 * s.alpha2.dot(rb.Kaw * s.omega2) + s.omega2.dot(rb.Kww * s.omega2);
}

EnergyRecord energy_record(const ReducedBlocks& rb, const FsiState& s, double es_omega1_initial) {
    EnergyRecord r;
    r.t = s.t;
    r.plate_potential = 0.5 * s.omega1.dot(rb.S_r * s.omega1);
    r.plate_kinetic = 0.5 * s.omega2.dot(rb.Ms_r * s.omega2);
    r.fluid_kinetic = 0.5 * (s.alpha1.dot(rb.Ma * s.alpha1) + s.alpha2.dot(rb.Ma * s.alpha2) +
                             2.0 * s.alpha2.dot(rb.Maw * s.omega2) + s.omega2.dot(rb.Mww * s.omega2));
    r.total = r.plate_potential + r.plate_kinetic + r.fluid_kinetic;
    r.dissipation = gradient_energy(rb, s);
    const Eigen::VectorXd div = rb.Bx_i.transpose() * s.alpha1 + rb.By_i.transpose() * s.alpha2 +
                                rb.Bw.transpose() * s.omega2;
    r.div_residual = div.size() ? div.lpNorm<Eigen::Infinity>() : 0.0;
    r.es_omega1_drift = std::abs(rb.Es_r.dot(s.omega1) - es_omega1_initial);
    return r;
}

BackwardEulerOperator::BackwardEulerOperator(const ReducedBlocks& rb, double dt,
                                             std::optional<double> eta)
    : dt_(dt),
      n_interior_(rb.n_interior),
      n_plate_(rb.n_plate),
      pressure_count_(rb.pressure_count),
      A_(rb.system_size(), rb.system_size()),
      Mrhs_(rb.system_size(), rb.system_size()),
      lu_([&]() -> SpMat {
          if (!(dt > 0.0)) throw std::invalid_argument("timestepper: dt must be positive");
          if (eta && !(*eta >= 0.0 && *eta <= 1.0))
              throw std::invalid_argument("timestepper: eta must lie in [0, 1]");

          const int o1 = rb.offset_u1(), o2 = rb.offset_u2();
          const int w1 = rb.offset_w1(), w2 = rb.offset_w2();
          const int oq = rb.offset_q(), oc = rb.offset_c_tilde(), om = rb.offset_mu();
          const Eigen::VectorXd bx1 = rb.Bx_i * Eigen::VectorXd::Ones(rb.pressure_count);
          const Eigen::VectorXd by1 = rb.By_i * Eigen::VectorXd::Ones(rb.pressure_count);
          const Eigen::VectorXd bw1 = rb.Bw * Eigen::VectorXd::Ones(rb.pressure_count);

          Eigen::MatrixXd Kplate = rb.Kww;
          if (eta) Kplate += plate_fractional_damping(rb.S_r, rb.Ms_r, *eta);

          std::vector<Eigen::Triplet<double>> ta;
          // u1 momentum rows
          add_sparse(ta, rb.Ma, o1, o1);
          add_sparse(ta, rb.Ka, o1, o1, dt);
          add_sparse(ta, rb.Bx_i, o1, oq, dt);
          add_dense(ta, bx1, o1, om, dt);
          // u2 momentum rows
          add_sparse(ta, rb.Ma, o2, o2);
          add_sparse(ta, rb.Ka, o2, o2, dt);
          add_sparse(ta, rb.Maw, o2, w2);
          add_sparse(ta, rb.Kaw, o2, w2, dt);
          add_sparse(ta, rb.By_i, o2, oq, dt);
          add_dense(ta, by1, o2, om, dt);
          // displacement update rows
          add_identity(ta, rb.n_plate, w1, w1, 1.0);
          add_identity(ta, rb.n_plate, w1, w2, -dt);
          // plate momentum rows (interface fluid rows accumulated in)
          add_sparse(ta, SpMat(rb.Maw.transpose()), w2, o2);
          add_sparse(ta, SpMat(rb.Kaw.transpose()), w2, o2, dt);
          add_dense(ta, rb.S_r, w2, w1, dt);
          add_dense(ta, rb.Mww + rb.Ms_r, w2, w2);
          add_dense(ta, Kplate, w2, w2, dt);
          add_dense(ta, rb.Bw, w2, oq, dt);
          add_dense(ta, -dt * rb.Es_r.transpose(), w2, oc);
          add_dense(ta, bw1, w2, om, dt);
          // divergence rows
          add_sparse(ta, SpMat(rb.Bx_i.transpose()), oq, o1);
          add_sparse(ta, SpMat(rb.By_i.transpose()), oq, o2);
          add_dense(ta, rb.Bw.transpose(), oq, w2);
          // mean-free plate velocity row
          add_dense(ta, rb.Es_r, oc, w2);
          // mean-free pressure row
          add_dense(ta, rb.mq.transpose(), om, oq);

          A_.setFromTriplets(ta.begin(), ta.end());
          A_.makeCompressed();

          std::vector<Eigen::Triplet<double>> tm;
          add_sparse(tm, rb.Ma, o1, o1);
          add_sparse(tm, rb.Ma, o2, o2);
          add_sparse(tm, rb.Maw, o2, w2);
          add_identity(tm, rb.n_plate, w1, w1, 1.0);
          add_sparse(tm, SpMat(rb.Maw.transpose()), w2, o2);
          add_dense(tm, rb.Mww + rb.Ms_r, w2, w2);
          Mrhs_.setFromTriplets(tm.begin(), tm.end());
          Mrhs_.makeCompressed();
          return A_;
      }()) {}

Eigen::VectorXd BackwardEulerOperator::pack(const FsiState& s) const {
    const int ns = 2 * n_interior_ + 2 * n_plate_;
    Eigen::VectorXd z(ns + pressure_count_ + 2);
    z << s.alpha1, s.alpha2, s.omega1, s.omega2, s.q, s.c_tilde, s.mu;
    return z;
}

FsiState BackwardEulerOperator::unpack(const Eigen::VectorXd& z, double t) const {
    FsiState s;
    s.alpha1 = z.segment(0, n_interior_);
    s.alpha2 = z.segment(n_interior_, n_interior_);
    s.omega1 = z.segment(2 * n_interior_, n_plate_);
    s.omega2 = z.segment(2 * n_interior_ + n_plate_, n_plate_);
    s.q = z.segment(2 * n_interior_ + 2 * n_plate_, pressure_count_);
    s.c_tilde = z(z.size() - 2);
    s.mu = z(z.size() - 1);
    s.t = t;
    return s;
}

FsiState BackwardEulerOperator::step(const FsiState& s, const Eigen::VectorXd* forcing) const {
    const int ns = 2 * n_interior_ + 2 * n_plate_;
    Eigen::VectorXd rhs = Mrhs_ * pack(s);
    if (forcing) {
        if (forcing->size() != ns)
            throw std::invalid_argument("timestepper: forcing must have state size " +
                                        std::to_string(ns));
        rhs.head(ns) += dt_ * (*forcing);
    }
    Eigen::VectorXd z = lu_.solve(rhs);
    // one refinement pass keeps constraint rows at roundoff
    z += lu_.solve(Eigen::VectorXd(rhs - A_ * z));
    return unpack(z, s.t + dt_);
}

BackwardEulerOperator build_backward_euler_operator(const ReducedBlocks& rb, double dt,
                                                    std::optional<double> eta) {
    return BackwardEulerOperator(rb, dt, eta);
}

FsiState backward_euler_step(const BackwardEulerOperator& op, const FsiState& s,
                             const Eigen::VectorXd* forcing) {
    return op.step(s, forcing);
}

InitialSpec parse_initial_spec(const std::string& text, std::uint64_t default_seed) {
    InitialSpec spec;
    spec.seed = default_seed;
    if (text == "zero") {
        spec.kind = InitialSpec::Kind::Zero;
    } else if (text == "hat") {
        spec.kind = InitialSpec::Kind::Hat;
    } else if (text.rfind("sawtooth(", 0) == 0 && text.back() == ')') {
        spec.kind = InitialSpec::Kind::Sawtooth;
        spec.teeth = std::stoi(text.substr(9, text.size() - 10));
        if (spec.teeth < 1)
            throw std::invalid_argument("timestepper: sawtooth tooth count must be >= 1");
    } else if (text.rfind("randomized(", 0) == 0 && text.back() == ')') {
        spec.kind = InitialSpec::Kind::Randomized;
        spec.seed = std::stoull(text.substr(11, text.size() - 12));
    } else {
        throw std::invalid_argument("timestepper: unknown initial data spec '" + text + "'");
    }
    return spec;
}

namespace {

double sawtooth_value(int k, double x) {
    double s = k * x - std::floor(k * x);
    return 1.0 - 2.0 * std::abs(2.0 * s - 1.0);
}

double sawtooth_slope(int k, double x) {
    double s = k * x - std::floor(k * x);
    return (s < 0.5) ? 4.0 * k : -4.0 * k;
}

double hat_value(double x) { return std::max(0.0, 1.0 - 4.0 * std::abs(x - 0.5)); }

double hat_slope(double x) {
    if (x < 0.25 || x >= 0.75) return 0.0;
    return (x < 0.5) ? 4.0 : -4.0;
}

// remove the components of w along the rows of G (as functionals), using
// the plate mass metric for the correction; applied twice to land the
// residuals at roundoff
void project_rows_to_zero(const Eigen::MatrixXd& G, const Eigen::MatrixXd& Ms,
                          Eigen::VectorXd& w) {
    const Eigen::LLT<Eigen::MatrixXd> llt(Ms);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("timestepper: plate mass block is not positive definite");
    const Eigen::MatrixXd MG = llt.solve(G.transpose());  // carriers
    const Eigen::MatrixXd Gram = G * MG;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(Gram);
    if (!lu.isInvertible())
        throw std::runtime_error("timestepper: initial-data constraints are degenerate");
    for (int pass = 0; pass < 2; ++pass) w -= MG * lu.solve(G * w);
}

}  // namespace

FsiState make_initial_data(const ReducedBlocks& rb, const PlateMesh& plate,
                           const InitialSpec& spec) {
    FsiState s = zero_state(rb);

    Eigen::VectorXd w1_full, w2_full;
    switch (spec.kind) {
        case InitialSpec::Kind::Zero:
            return s;
        case InitialSpec::Kind::Sawtooth: {
            const int k = spec.teeth;
            w1_full = interpolate_plate(plate, [k](double x) { return sawtooth_value(k, x); },
                                        [k](double x) { return sawtooth_slope(k, x); });
            w2_full = w1_full;
            break;
        }
        case InitialSpec::Kind::Hat:
            w1_full = interpolate_plate(plate, hat_value, hat_slope);
            w2_full = w1_full;
            break;
        case InitialSpec::Kind::Randomized: {
            std::mt19937_64 rng(spec.seed);
            std::uniform_real_distribution<double> dist(-1.0, 1.0);
            w1_full.setZero(plate.dof_count());
            w2_full.setZero(plate.dof_count());
            for (int d = 0; d < plate.dof_count(); ++d) w1_full(d) = dist(rng);
            for (int d = 0; d < plate.dof_count(); ++d) w2_full(d) = dist(rng);
            break;
        }
    }

    s.omega1 = rb.R.transpose() * w1_full;
    s.omega2 = rb.R.transpose() * w2_full;

    // The velocity must satisfy both the exact mean-free row and the
    // discrete-trace compatibility of the divergence rows; both functionals
    // are conserved on the displacement as well, so the displacement starts
    // in the same invariant zero-mean slice.
    Eigen::MatrixXd G(2, rb.n_plate);
    G.row(0) = rb.Es_r;
    G.row(1) = (rb.Bw * Eigen::VectorXd::Ones(rb.pressure_count)).transpose();
    project_rows_to_zero(G, rb.Ms_r, s.omega1);
    project_rows_to_zero(G, rb.Ms_r, s.omega2);

    // fluid: minimal-energy velocity compatible with the plate motion,
    // pinned by the mean-free pressure multiplier
    const int ni = rb.n_interior, Mp = rb.pressure_count;
    const int size = 2 * ni + Mp + 1;
    std::vector<Eigen::Triplet<double>> trips;
    add_sparse(trips, rb.Ma, 0, 0);
    add_sparse(trips, rb.Ma, ni, ni);
    add_sparse(trips, rb.Bx_i, 0, 2 * ni);
    add_sparse(trips, rb.By_i, ni, 2 * ni);
    add_sparse(trips, SpMat(rb.Bx_i.transpose()), 2 * ni, 0);
    add_sparse(trips, SpMat(rb.By_i.transpose()), 2 * ni, ni);
    add_dense(trips, rb.mq, 2 * ni, 2 * ni + Mp);
    add_dense(trips, rb.mq.transpose(), 2 * ni + Mp, 2 * ni);
    SpMat K(size, size);
    K.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
    rhs.segment(ni, ni) = -(rb.Maw * s.omega2);
    rhs.segment(2 * ni, Mp) = -(rb.Bw.transpose() * s.omega2);

    const Factorization lu(K);
    Eigen::VectorXd sol = lu.solve(rhs);
    sol += lu.solve(Eigen::VectorXd(rhs - K * sol));
    s.alpha1 = sol.head(ni);
    s.alpha2 = sol.segment(ni, ni);
    return s;
}

SimulationResult run_simulation(const SimulationConfig& cfg, const FsiState* initial_override) {
    validate_config(cfg);
    SimulationResult out;
    out.mesh = build_fluid_mesh(cfg.n);
    out.plate = build_plate_mesh(cfg.plate_elements);
    out.dofs = build_dof_map(out.mesh, out.plate);
    out.blocks = apply_constraints(assemble_all(out.mesh, out.plate, out.dofs), out.dofs);

    FsiState state;
    if (initial_override) {
        state = *initial_override;
        if (state.alpha1.size() != out.blocks.n_interior ||
            state.omega1.size() != out.blocks.n_plate)
            throw std::invalid_argument("timestepper: initial state does not match the mesh");
    } else {
        state = make_initial_data(out.blocks, out.plate,
                                  parse_initial_spec(cfg.initial, cfg.seed));
    }
    state.t = 0.0;

    const long nsteps = std::llround(cfg.T / cfg.dt);
    out.steps = static_cast<int>(nsteps);

    // map requested snapshot times onto step indices
    std::vector<long> snap_steps;
    for (double ts : cfg.snapshot_times)
        snap_steps.push_back(
            std::clamp(static_cast<long>(std::llround(ts / cfg.dt)), 0L, nsteps));

    auto record_snapshot = [&](long k, const FsiState& st) {
        for (size_t i = 0; i < snap_steps.size(); ++i) {
            if (snap_steps[i] == k) {
                out.snapshot_times.push_back(cfg.snapshot_times[i]);
                out.snapshots.push_back(st);
            }
        }
    };

    if (!state.alpha1.allFinite() || !state.alpha2.allFinite() || !state.omega1.allFinite() ||
        !state.omega2.allFinite())
        throw std::runtime_error("timestepper: non-finite state at step 0");

    const double es0 = out.blocks.Es_r.dot(state.omega1);
    out.energy.push_back(energy_record(out.blocks, state, es0));
    record_snapshot(0, state);

    if (nsteps > 0) {
        const std::optional<double> eta = cfg.eta;
        const BackwardEulerOperator op(out.blocks, cfg.dt, eta);
        for (long k = 1; k <= nsteps; ++k) {
            state = op.step(state);
            if (!op.pack(state).allFinite())
                throw std::runtime_error("timestepper: non-finite state at step " +
                                         std::to_string(k));
            out.energy.push_back(energy_record(out.blocks, state, es0));
            record_snapshot(k, state);
        }
    }
    out.final_state = state;
    return out;
}

}  // namespace fsiplate
