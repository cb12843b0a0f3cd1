#include "fsiplate/spectral.hpp"

#include "fsiplate/linsolve.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace fsiplate {

namespace {

void place(Eigen::MatrixXd& A, const Eigen::MatrixXd& B, int r, int c, double scale = 1.0) {
    A.block(r, c, B.rows(), B.cols()) = scale * B;
}

}  // namespace

GeneratorSystem build_generator(const ReducedBlocks& rb, std::optional<double> eta) {
    if (eta && !(*eta >= 0.0 && *eta <= 1.0))
        throw std::invalid_argument("spectral: eta must lie in [0, 1]");

    const int ni = rb.n_interior, np = rb.n_plate, Mp = rb.pressure_count;
    const int nx = rb.state_size();
    const int o1 = 0, o2 = ni, w1 = 2 * ni, w2 = 2 * ni + np;

    const Eigen::MatrixXd Ma(rb.Ma), Ka(rb.Ka), Maw(rb.Maw), Kaw(rb.Kaw);
    const Eigen::MatrixXd Bx(rb.Bx_i), By(rb.By_i);

    Eigen::MatrixXd Mhat = Eigen::MatrixXd::Zero(nx, nx);
    place(Mhat, Ma, o1, o1);
    place(Mhat, Ma, o2, o2);
    place(Mhat, Maw, o2, w2);
    place(Mhat, rb.Ms_r, w1, w1);
    place(Mhat, Maw.transpose(), w2, o2);
    place(Mhat, rb.Mww + rb.Ms_r, w2, w2);

    Eigen::MatrixXd damping = Eigen::MatrixXd::Zero(np, np);
    if (eta) damping = plate_fractional_damping(rb.S_r, rb.Ms_r, *eta);

    Eigen::MatrixXd Khat = Eigen::MatrixXd::Zero(nx, nx);
    place(Khat, Ka, o1, o1);
    place(Khat, Ka, o2, o2);
    place(Khat, Kaw, o2, w2);
    place(Khat, rb.Ms_r, w1, w2, -1.0);
    place(Khat, Kaw.transpose(), w2, o2);
    place(Khat, rb.S_r, w2, w1);
    place(Khat, rb.Kww + damping, w2, w2);

    // Divergence rows plus the mean-free plate rows.  The velocity mean is an
    // explicit constraint of the coupled system; the displacement is pinned
    // against two functionals that are both conserved by the constrained flow
    // (their derivatives vanish: one is the enforced velocity mean, the other
    // is the column sum of the divergence rows).  Restricting to this
    // invariant slice is exact and removes the otherwise steady
    // bent-plate/uniform-pressure equilibria, which have no physical
    // counterpart: a uniform pressure cannot hold a mean-free plate bent.
    const Eigen::RowVectorXd bw_colsum = Eigen::RowVectorXd::Ones(Mp) * rb.Bw.transpose();
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(Mp + 3, nx);
    C.block(0, o1, Mp, ni) = Bx.transpose();
    C.block(0, o2, Mp, ni) = By.transpose();
    C.block(0, w2, Mp, np) = rb.Bw.transpose();
    C.block(Mp, w2, 1, np) = rb.Es_r;
    C.block(Mp + 1, w1, 1, np) = rb.Es_r;
    C.block(Mp + 2, w1, 1, np) = bw_colsum;

    GeneratorSystem gen;
    gen.eta = eta;
    gen.Z = nullspace_basis(C, default_tolerances().nullspace);
    if (gen.Z.cols() != nx - (Mp + 3))
        throw std::runtime_error("spectral: constraint rows are rank deficient (reduction error)");

    const Eigen::MatrixXd Mz = gen.Z.transpose() * Mhat * gen.Z;
    Eigen::LLT<Eigen::MatrixXd> llt(Mz);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("spectral: reduced mass is rank deficient (reduction error)");
    gen.A = llt.solve(-(gen.Z.transpose() * Khat * gen.Z));

    Eigen::MatrixXd Hblock = Mhat;
    place(Hblock, rb.S_r, w1, w1);  // displacement measured in bending energy
    gen.H = gen.Z.transpose() * Hblock * gen.Z;
    gen.H = 0.5 * (gen.H + gen.H.transpose());

    Eigen::MatrixXd Dgrad = Eigen::MatrixXd::Zero(nx, nx);
    place(Dgrad, Ka, o1, o1);
    place(Dgrad, Ka, o2, o2);
    place(Dgrad, Kaw, o2, w2);
    place(Dgrad, Kaw.transpose(), w2, o2);
    place(Dgrad, rb.Kww, w2, w2);
    gen.fluid_dissipation = gen.Z.transpose() * Dgrad * gen.Z;

    Eigen::MatrixXd Ddamp = Eigen::MatrixXd::Zero(nx, nx);
    place(Ddamp, damping, w2, w2);
    gen.plate_damping = gen.Z.transpose() * Ddamp * gen.Z;
    return gen;
}

ResolventSample resolvent_norm(const GeneratorSystem& gen, double beta) {
    const int n = gen.dim();
    Eigen::MatrixXcd B = -gen.A.cast<std::complex<double>>();
    B.diagonal().array() += std::complex<double>(0.0, beta);
    ResolventSample out;
    out.beta = beta;
    out.norm = 1.0 / smallest_singular_value(B, gen.H);
    (void)n;
    return out;
}

Eigen::VectorXd log_spaced(double lo, double hi, int count) {
    if (count < 1) throw std::invalid_argument("spectral: grid needs at least one point");
    if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("spectral: grid bounds must satisfy 0 < lo < hi");
    Eigen::VectorXd g(count);
    if (count == 1) {
        g(0) = lo;
        return g;
    }
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < count; ++i)
        g(i) = std::exp(llo + (lhi - llo) * i / (count - 1));
    // pin the endpoints so closed-window filters keep them
    g(0) = lo;
    g(count - 1) = hi;
    return g;
}

std::vector<ResolventSample> resolvent_sweep(const GeneratorSystem& gen,
                                             const Eigen::VectorXd& beta_grid, int workers) {
    if (beta_grid.size() == 0) throw std::invalid_argument("spectral: empty frequency grid");
    for (int i = 0; i < beta_grid.size(); ++i) {
        if (!(beta_grid(i) > 0.0))
            throw std::invalid_argument("spectral: frequency grid must be positive");
        if (i > 0 && !(beta_grid(i) > beta_grid(i - 1)))
            throw std::invalid_argument("spectral: frequency grid must be increasing");
    }
    if (workers < 1) throw std::invalid_argument("spectral: workers must be >= 1");

    std::vector<ResolventSample> samples(static_cast<size_t>(beta_grid.size()));
    const int count = static_cast<int>(beta_grid.size());
    if (workers == 1) {
        for (int i = 0; i < count; ++i) samples[i] = resolvent_norm(gen, beta_grid(i));
        return samples;
    }
    const int nthreads = std::min(workers, count);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (int i = t; i < count; i += nthreads)
                    samples[i] = resolvent_norm(gen, beta_grid(i));
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return samples;
}

GevreyFit fit_decay_exponent(const std::vector<ResolventSample>& samples, double beta_min,
                             double beta_max) {
    std::vector<double> lx, ly;
    for (const auto& s : samples) {
        if (s.beta < beta_min || s.beta > beta_max) continue;
        if (!(s.norm > 0.0))
            throw std::invalid_argument("spectral: fit requires positive norms");
        lx.push_back(std::log(s.beta));
        ly.push_back(std::log(s.norm));
    }
    const int m = static_cast<int>(lx.size());
    if (m < 5)
        throw std::invalid_argument("spectral: fit window holds " + std::to_string(m) +
                                    " samples, need at least 5");
    double sx = 0, sy = 0;
    for (int i = 0; i < m; ++i) {
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < m; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    GevreyFit fit;
    const double slope = sxy / sxx;
    fit.alpha_hat = -slope;
    fit.delta = 1.0 / fit.alpha_hat;
    fit.r_squared = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    fit.beta_min = beta_min;
    fit.beta_max = beta_max;
    fit.samples_used = m;
    return fit;
}

}  // namespace fsiplate
