#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tube {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct ValidationOptions {
    std::uint64_t seed = 20240607;
    std::size_t oracle_cases = 20;
    std::size_t sturm_nodes = 2000;
    std::size_t sturm_modes = 6;
    double sturm_tolerance = 1e-3;
    std::size_t poincare_samples = 1000;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool pass() const;
    const CheckResult* find(const std::string& name) const;
};

/// Random small assemblies (at most 30 x 15 nodes in d = 2): Lanczos against the dense solver,
/// eigenvalues to 1e-8 relative and eigenvectors to 1e-5 up to sign.
CheckResult check_oracle_equivalence(std::uint64_t seed, std::size_t cases);

/// Spectrum of the assembled T0 against the Kronecker sum of the spectra of S and the transverse stencil, 1e-9 relative.
CheckResult check_kronecker_identity(std::uint64_t seed);

/// Zero counts, eigenvalue bracket, gaps, zero spacing and boundary ratios of S for five preset potentials.
CheckResult check_sturm_suite(std::size_t nodes, std::size_t modes, double tolerance);

/// Transverse Rayleigh quotients of random interior vectors never fall below the discrete E1.
CheckResult check_poincare(std::uint64_t seed, std::size_t samples);

/// Weighted norm preserved by the inverse unitary map, to 1e-10, for random vectors on curved tubes.
CheckResult check_unitarity(std::uint64_t seed);

/// The tang frame stays orthogonal (after projection) for curves in d = 2, 3, 4.
CheckResult check_frame_orthogonality();

/// 1 - C a eps <= h <= 1 + C a eps on the grid for curves in d = 2, 3.
CheckResult check_jacobian_bounds();

/// Sorted spectra satisfy T- <= T <= T+ on small grids (dense solves).
CheckResult check_bracketing(std::uint64_t seed);

/// Multiplying T by a positive constant leaves the ordering of its eigenvectors unchanged.
CheckResult check_order_invariance(std::uint64_t seed);

/// Every check above, in a fixed order.
ValidationReport run_validation(const ValidationOptions& options = {});

}  // namespace tube
