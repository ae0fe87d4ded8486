#include "tube/eigensolve.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "tube/errors.hpp"

namespace tube {

bool EigenResult::all_converged() const {
    return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Factorization = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower>;

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2.0;

SparseMatrix shifted(const DiscreteOperator& op, double sigma) {
    const auto n = static_cast<Eigen::Index>(op.dimension());
    SparseMatrix id(n, n);
    id.setIdentity();
    SparseMatrix out = op.lower() - sigma * id;
    out.makeCompressed();
    return out;
}

/// Factorizes A - sigma I with the symbolic analysis already held by ldlt (the pattern does not
/// depend on sigma), nudging sigma downwards if an exact zero pivot shows up.
double factorize(const DiscreteOperator& op, double sigma, Factorization& ldlt) {
    const double nudge = 1e-10 * std::max(1.0, std::abs(sigma));
    for (int attempt = 0; attempt < 8; ++attempt) {
        ldlt.factorize(shifted(op, sigma));
        if (ldlt.info() == Eigen::Success && ldlt.vectorD().cwiseAbs().minCoeff() > 0.0) return sigma;
        sigma -= nudge * std::pow(10.0, attempt);
    }
    throw Error("lowest_eigenpairs: sparse LDL^T factorization failed");
}

std::size_t negatives(const Factorization& ldlt) {
    const Eigen::VectorXd& d = ldlt.vectorD();
    return static_cast<std::size_t>((d.array() < 0.0).count());
}

struct LanczosOutcome {
    std::vector<double> values;
    Eigen::MatrixXd vectors;  // Euclidean-normalized columns
    std::vector<double> residuals;
    std::vector<bool> converged;
    std::size_t applications = 0;
};

class Lanczos {
public:
    Lanczos(const DiscreteOperator& op, const Factorization& ldlt, std::uint64_t seed)
        : op_(op), ldlt_(ldlt), rng_(seed), dim_(static_cast<Eigen::Index>(op.dimension())) {}

    /// `want` Ritz pairs are tracked; the first `need` must meet the residual bound.
    LanczosOutcome run(std::size_t want, std::size_t need, double tol, double floor, std::size_t max_restarts) {
        const Eigen::Index m = std::min<Eigen::Index>(dim_, std::max<Eigen::Index>(2 * static_cast<Eigen::Index>(want) + 20, 40));
        const auto wanted = static_cast<Eigen::Index>(std::min<std::size_t>(want, static_cast<std::size_t>(m)));
        Eigen::MatrixXd v(dim_, m), w(dim_, m);
        v.col(0) = random_unit(v, 0);
        Eigen::Index start = 0;
        LanczosOutcome out;
        for (std::size_t cycle = 0;; ++cycle) {
            for (Eigen::Index j = start; j < m; ++j) {
                w.col(j) = ldlt_.solve(v.col(j));
                ++out.applications;
                if (j + 1 < m) {
                    Eigen::VectorXd q = w.col(j);
                    const double scale = q.norm();
                    orthogonalize(q, v, j + 1);
                    const double nq = q.norm();
                    v.col(j + 1) = nq > 1e-12 * scale ? Eigen::VectorXd(q / nq) : random_unit(v, j + 1);
                }
            }
            Eigen::MatrixXd proj = v.transpose() * w;
            proj = 0.5 * (proj + proj.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj);
            // Largest theta of (A - sigma)^{-1} <-> smallest eigenvalue of A.
            Eigen::MatrixXd s = es.eigenvectors().rowwise().reverse();

            Eigen::MatrixXd y = v * s.leftCols(wanted);
            out.values.assign(static_cast<std::size_t>(wanted), 0.0);
            out.residuals.assign(static_cast<std::size_t>(wanted), 0.0);
            out.converged.assign(static_cast<std::size_t>(wanted), false);
            bool done = true;
            for (Eigen::Index i = 0; i < wanted; ++i) {
                Eigen::VectorXd yi = y.col(i);
                yi.normalize();
                y.col(i) = yi;
                const Eigen::VectorXd ay = op_.apply(yi);
                const double lambda = yi.dot(ay);
                const double r = (ay - lambda * yi).norm();
                const auto k = static_cast<std::size_t>(i);
                out.values[k] = lambda;
                out.residuals[k] = r;
                out.converged[k] = r <= tol * std::max(1.0, std::abs(lambda)) + floor;
                if (k < need && !out.converged[k]) done = false;
            }
            out.vectors = std::move(y);
            if (done || cycle >= max_restarts || m == dim_) break;

            // Thick restart: keep the leading Ritz vectors and continue from the Krylov residual.
            const Eigen::Index keep = std::min<Eigen::Index>(m - 2, wanted + (m - wanted) / 2);
            Eigen::VectorXd f = w.col(m - 1);
            const double fscale = f.norm();
            orthogonalize(f, v, m);
            Eigen::MatrixXd vk = v * s.leftCols(keep);
            Eigen::MatrixXd wk = w * s.leftCols(keep);
            v.leftCols(keep) = vk;
            w.leftCols(keep) = wk;
            const double nf = f.norm();
            v.col(keep) = nf > 1e-12 * fscale ? Eigen::VectorXd(f / nf) : random_unit(v, keep);
            start = keep;
        }
        // Ascending order by eigenvalue.
        std::vector<std::size_t> order(out.values.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return out.values[a] < out.values[b]; });
        LanczosOutcome sorted;
        sorted.applications = out.applications;
        sorted.vectors.resize(dim_, static_cast<Eigen::Index>(order.size()));
        for (std::size_t i = 0; i < order.size(); ++i) {
            sorted.values.push_back(out.values[order[i]]);
            sorted.residuals.push_back(out.residuals[order[i]]);
            sorted.converged.push_back(out.converged[order[i]]);
            sorted.vectors.col(static_cast<Eigen::Index>(i)) = out.vectors.col(static_cast<Eigen::Index>(order[i]));
        }
        return sorted;
    }

private:
    /// Classical Gram-Schmidt, applied twice, against the first `cols` columns of basis.
    static void orthogonalize(Eigen::VectorXd& q, const Eigen::MatrixXd& basis, Eigen::Index cols) {
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd c = basis.leftCols(cols).transpose() * q;
            q -= basis.leftCols(cols) * c;
        }
    }

    Eigen::VectorXd random_unit(const Eigen::MatrixXd& basis, Eigen::Index cols) {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int attempt = 0; attempt < 10; ++attempt) {
            Eigen::VectorXd q(dim_);
            for (Eigen::Index i = 0; i < dim_; ++i) q(i) = normal(rng_);
            if (cols > 0) orthogonalize(q, basis, cols);
            const double nq = q.norm();
            if (nq > 1e-8) return q / nq;
        }
        throw Error("lowest_eigenpairs: could not extend the Krylov basis");
    }

    const DiscreteOperator& op_;
    const Factorization& ldlt_;
    std::mt19937_64 rng_;
    Eigen::Index dim_;
};

EigenResult to_result(LanczosOutcome&& lo, std::size_t n, double weight) {
    EigenResult r;
    r.weight = weight;
    r.values.assign(lo.values.begin(), lo.values.begin() + static_cast<std::ptrdiff_t>(n));
    r.residuals.assign(lo.residuals.begin(), lo.residuals.begin() + static_cast<std::ptrdiff_t>(n));
    r.converged.assign(lo.converged.begin(), lo.converged.begin() + static_cast<std::ptrdiff_t>(n));
    r.vectors = lo.vectors.leftCols(static_cast<Eigen::Index>(n)) / std::sqrt(weight);
    r.iterations = lo.applications;
    return r;
}

}  // namespace

std::size_t count_below(const DiscreteOperator& op, double sigma) {
    Factorization ldlt;
    ldlt.compute(shifted(op, sigma));
    if (ldlt.info() != Eigen::Success) throw Error("count_below: factorization failed");
    return negatives(ldlt);
}

EigenResult lowest_eigenpairs(const DiscreteOperator& op, std::size_t n, const SolverOptions& options) {
    const std::size_t dim = op.dimension();
    if (n < 1) throw std::invalid_argument("lowest_eigenpairs: n must be >= 1");
    if (n > dim) throw std::invalid_argument("lowest_eigenpairs: n exceeds the operator dimension");
    if (!(options.tol > 0.0)) throw std::invalid_argument("lowest_eigenpairs: tol must be positive");

    const double norm = op.norm_inf();
    const double floor = 32.0 * kUnitRoundoff * norm;
    const std::size_t want = std::min(n + 1, dim);
    const double weight = op.weight();

    // Phase 1: a shift below the Gershgorin interval (A - sigma I is positive definite).
    const double gersh = op.gershgorin_lower();
    double sigma = gersh - 1e-6 * std::max(1.0, std::abs(gersh));
    Factorization ldlt;
    ldlt.analyzePattern(shifted(op, sigma));
    sigma = factorize(op, sigma, ldlt);
    std::size_t applications = 0;
    LanczosOutcome rough;
    {
        Lanczos lz(op, ldlt, options.seed);
        rough = lz.run(want, n, options.tol, floor, 1);
        applications += rough.applications;
    }

    LanczosOutcome fine;
    if (std::all_of(rough.converged.begin(), rough.converged.begin() + static_cast<std::ptrdiff_t>(n), [](bool c) { return c; })) {
        fine = std::move(rough);
    } else {
        // Phase 2: move the shift just below the lowest eigenvalue; the Ritz value is an upper bound.
        const double top = rough.values.front();
        double delta = std::max(1e-3 * std::max(1.0, std::abs(top)), rough.residuals.front());
        double candidate = top - delta;
        bool moved = false;
        while (candidate > sigma) {
            const double used = factorize(op, candidate, ldlt);
            if (negatives(ldlt) == 0) {
                sigma = used;
                moved = true;
                break;
            }
            delta *= 4.0;
            candidate = top - delta;
        }
        if (!moved) sigma = factorize(op, sigma, ldlt);
        Lanczos lz(op, ldlt, options.seed + 1);
        fine = lz.run(want, n, options.tol, floor, options.max_restarts);
        applications += fine.applications;
    }

    // Inertia check: exactly n eigenvalues below a point between the n-th and the next one.
    bool verified = false;
    {
        const double ln = fine.values[n - 1];
        double probe = ln + 1e-7 * std::max(1.0, std::abs(ln));
        if (fine.values.size() > n) {
            const double next = fine.values[n];
            if (next - ln > 2e-7 * std::max(1.0, std::abs(ln))) probe = 0.5 * (ln + next);
        }
        const double used = factorize(op, probe, ldlt);
        // n converged Ritz values below the probe and a count of exactly n leave no room for a missed one.
        const bool all_converged = std::all_of(fine.converged.begin(), fine.converged.begin() + static_cast<std::ptrdiff_t>(n),
                                               [](bool c) { return c; });
        verified = all_converged && negatives(ldlt) == n && used <= probe;
    }

    EigenResult result = to_result(std::move(fine), n, weight);
    result.iterations = applications;
    result.seed = options.seed;
    result.shift = sigma;
    result.inertia_verified = verified;
    return result;
}

EigenResult dense_oracle(const DiscreteOperator& op, std::size_t n) {
    const std::size_t dim = op.dimension();
    if (dim > 4000) throw CapabilityError("dense_oracle: dimension exceeds 4000");
    if (n < 1 || n > dim) throw std::invalid_argument("dense_oracle: n out of range");
    const Eigen::MatrixXd a = op.dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw Error("dense_oracle: eigendecomposition failed");
    EigenResult r;
    r.weight = op.weight();
    const auto nn = static_cast<Eigen::Index>(n);
    r.vectors = es.eigenvectors().leftCols(nn) / std::sqrt(r.weight);
    for (Eigen::Index i = 0; i < nn; ++i) {
        const double lambda = es.eigenvalues()(i);
        const Eigen::VectorXd y = es.eigenvectors().col(i);
        r.values.push_back(lambda);
        r.residuals.push_back((a * y - lambda * y).norm());
        r.converged.push_back(true);
    }
    r.inertia_verified = true;
    return r;
}

std::vector<std::size_t> clustered_pairs(const std::vector<double>& values, double rel) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i + 1 < values.size(); ++i)
        if (std::abs(values[i + 1] - values[i]) < rel * std::max(1.0, std::abs(values[i]))) out.push_back(i);
    return out;
}

}  // namespace tube
