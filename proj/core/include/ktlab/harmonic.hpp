#pragma once

/**
 * @file harmonic.hpp
 * @brief Exact spaces of dbar-harmonic (0,1)-forms, sector by sector.
 *
 * The harmonic space decomposes over the L^2 sectors of sector.hpp.  Torus
 * sectors are finite exact linear systems and are solved outright.  Theta
 * sectors carry recurrence systems in the Hermite orders; for the two
 * built-in families they reduce to closed-form scalar conditions:
 *
 *  - 4d family J_{beta,delta} (beta, delta > 0), family metric: in the
 *    twisted sector basis theta[exp(-i s/(4 delta)) hermite_h] the pair of
 *    recurrences eliminates to one condition per Hermite order k >= 1,
 *
 *        beta^2 - 64 pi^2 delta^4 m^2 - 64 pi k |m| beta delta^2 = 0,
 *
 *    whose imaginary part forces l = 0 first.  Each resonant pair (|m|, k)
 *    contributes one solution per sector (+-|m|, q, l=0), i.e. 2|m| in
 *    total, with witness supported on twisted Hermite orders {k-1, k}.
 *    Rational beta, delta can never satisfy the condition (the three terms
 *    have distinct pi-degrees); the resonant beta for a chosen (m, k) is
 *    the surd 8 pi |m| delta^2 (4k + sqrt(16 k^2 + 1)).
 *
 *  - 6d family J_{a,b,c} (a, b, c nonzero reals), diagonal family metrics
 *    (any rho, sigma, tau > 0): eliminating F, G through the diagonal
 *    conj(V_3) leg turns the first dbar row into a commutator, giving the
 *    K-prefactor i(1-ab)(nu' + 4 pi m c); for ab != 1 it never vanishes
 *    (real and imaginary parts cannot both be zero with m != 0), and for
 *    ab = 1 the adjoint row reduces to the strictly negative prefactor
 *    nu nu' - tau^2 sum_j rho_j^2 (2 h_j + 1).  Hence every theta sector is
 *    empty and the harmonic space is spanned by invariant forms.
 *
 * Anything outside these families is handled by exact window truncation
 * with interior-support certification (a kernel vector whose Hermite
 * support stays two orders inside the window extends by zero to a genuine
 * solution, because every operator in the system shifts orders by at most
 * one).
 */

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ktlab/sector.hpp"

namespace ktlab {

// ============================================================================
// Reports
// ============================================================================

/// How a reported dimension is certified.
struct Certification {
    enum class Kind { Exact, WindowBounded };
    Kind kind{Kind::Exact};
    long radius{0};  ///< torus frequency window (WindowBounded only)
    long degree{0};  ///< Hermite window (WindowBounded only)
};

/// One sector's contribution to the harmonic space.
struct SectorContribution {
    SectorIndex sector;
    int dimension{0};
    std::string witness;  ///< human-readable description of the solutions
};

/// Aggregated description of the computed harmonic (0,1)-form space.
struct HarmonicReport {
    int dimension{0};                         ///< total known dimension
    std::vector<std::string> invariant_basis; ///< invariant harmonic forms
    std::vector<SectorContribution> sectors;  ///< nonzero contributions, sorted
    Certification certification;
    std::vector<std::string> notes;           ///< per-family justifications
};

/// Search windows for the enumeration fallbacks.
struct SearchParams {
    long radius{3};  ///< |I|_inf window for torus sectors, |m|,|l| window for theta
    long degree{8};  ///< Hermite window for theta-sector truncation
};

// ============================================================================
// Family detection
// ============================================================================

/// Parameters of the 4d family V_1 = (d/dt - i beta d/dx)/2,
/// V_2 = (Y - i delta d/dz)/2 with beta, delta > 0.
struct Kt4Family {
    ExactScalar beta;
    ExactScalar delta;
};

/// Parameters of the 6d family V_1 = (d/dx_1 - i a d/dx_2)/2,
/// V_2 = (Y_1 - i b Y_2)/2, V_3 = (d/dt - i c d/dz)/2, a, b, c real nonzero.
struct Kt6Family {
    ExactScalar a;
    ExactScalar b;
    ExactScalar c;
};

/// Recognise the structure matrix of the 4d family (requires beta, delta
/// positive real scalars).
[[nodiscard]] std::optional<Kt4Family> detect_kt4(const AlmostComplexStructure& acs);

/// Recognise the structure matrix of the 6d family (a, b, c real nonzero).
[[nodiscard]] std::optional<Kt6Family> detect_kt6(const AlmostComplexStructure& acs);

/// True when g equals the 4d family metric (1, |beta|, 1, |delta|) exactly.
[[nodiscard]] bool kt4_metric_matches(const MetricParams& g, const Kt4Family& fam);

/// Extract (rho, sigma, tau) when g is a 6d family metric
/// (1/tau, {1/rho, |a|/rho}, {1/sigma, |b|/sigma}, |c|/tau); nullopt otherwise.
[[nodiscard]] std::optional<std::array<ExactScalar, 3>> kt6_family_weights(
    const MetricParams& g, const Kt6Family& fam);

// ============================================================================
// Torus sectors
// ============================================================================

/// Solutions grouped by torus sector.
struct SSectorResult {
    std::vector<std::pair<TorusIndex, std::vector<Vec>>> solutions;
    bool exact{false};  ///< true when the sector family was closed symbolically
};

/**
 * @brief All torus sectors with nonzero harmonic solutions.
 *
 * For the built-in families the solution set is closed symbolically: the
 * determinant condition separates by pi-degree, the imaginary part forces
 * l = 0 and the remaining real equation admits finitely many (p, q), each
 * verified by an exact structural zero test.  Otherwise sectors with
 * |I|_inf <= search.radius are enumerated and the result is marked
 * non-exact (a lower bound).
 */
[[nodiscard]] SSectorResult s_sector_solve(const AlmostComplexStructure& acs,
                                           const MetricParams& g, const SearchParams& search);

// ============================================================================
// Theta sectors: family systems and closed-form conditions
// ============================================================================

/**
 * @brief Recurrence system of the 4d family on a theta sector, in the
 *        twisted basis theta[exp(-i s/(4 delta)) hermite_h].
 *
 * Uses the family metric (1, beta, 1, delta); the twist adds the constant
 * -i beta/(4 delta) to both ladder legs, after which all row coefficients
 * are ring-exact.  Requires beta, delta > 0 and n = 1.
 */
[[nodiscard]] ThetaSystem t_sector_system_kt4(const ExactScalar& beta, const ExactScalar& delta,
                                              const HeisenbergIndex& J);

/// Resonance condition of the 4d family at Hermite order k >= 1:
/// beta^2 - 64 pi^2 delta^4 m^2 - 64 pi k |m| beta delta^2.
[[nodiscard]] ExactScalar kt4_resonance_condition(const ExactScalar& beta,
                                                  const ExactScalar& delta, long m, long k);

/// The positive root of the resonance condition at (m, k):
/// beta = 8 pi |m| delta^2 (4k + sqrt(16 k^2 + 1)).
[[nodiscard]] ExactScalar kt4_resonant_beta(long m, long k, const ExactScalar& delta);

/**
 * @brief Recurrence system of the 6d family on a theta sector with the
 *        family metric at rho = sigma = tau = 1.
 *
 * Requires a, b, c real nonzero and n = 2.
 */
[[nodiscard]] ThetaSystem t_sector_system_kt6(const ExactScalar& a, const ExactScalar& b,
                                              const ExactScalar& c, const HeisenbergIndex& J);

/**
 * @brief The two eliminated scalar prefactors of the 6d family theta system.
 *
 * first  = i(1-ab) (nu' + 4 pi m c): the K-prefactor of the first dbar row
 *          after eliminating F, G (identically zero iff ab = 1);
 * second = nu nu' - tau^2 sum_j rho_j^2 (2 h_j + 1): the K-prefactor of the
 *          adjoint row (strictly negative for every sector and order).
 * K vanishes in every theta sector because the two can never vanish
 * simultaneously; F and G then vanish through the diagonal conj(V_3) leg.
 */
[[nodiscard]] std::pair<ExactScalar, ExactScalar> kt6_elimination_conditions(
    const ExactScalar& a, const ExactScalar& b, const ExactScalar& c, const ExactScalar& rho,
    const ExactScalar& sigma, const ExactScalar& tau, const HeisenbergIndex& J,
    const std::vector<long>& h);

// ============================================================================
// Theta sectors: window truncation (generic fallback)
// ============================================================================

/// Result of an exact window truncation of one theta sector.
struct WindowResult {
    long degree{0};            ///< Hermite window |h|_inf <= degree
    int kernel_dimension{0};   ///< kernel of the truncated system
    int interior_dimension{0}; ///< certified solutions (support <= degree-2)
    std::vector<std::vector<CoeffVec>> witnesses;  ///< interior kernel vectors
    std::string diagnostics;   ///< boundary-touching kernel summary
};

/**
 * @brief Solve one theta sector on the Hermite window |h|_inf <= H.
 *
 * Assembles every equation with image support in the window's reach and
 * computes the exact kernel.  Kernel vectors supported on |h|_inf <= H-2
 * are genuine global solutions (zero-extension satisfies all equations,
 * since every ladder atom shifts orders by at most one); their span's
 * dimension is the certified lower bound.  Kernel vectors touching the
 * window boundary are reported as diagnostics only.
 *
 * An optional twist (one constant per ladder leg) selects a twisted sector
 * basis; the 4d family needs twist -i beta/(4 delta) for its resonant
 * solutions to have finite support.
 *
 * Throws std::domain_error when the frame expansion leaves the ring.
 */
[[nodiscard]] WindowResult t_sector_window_solve(const AlmostComplexStructure& acs,
                                                 const MetricParams& g, const HeisenbergIndex& J,
                                                 long degree,
                                                 const std::vector<ExactScalar>* twist = nullptr);

/// Same, reusing a precomputed operator (cheaper inside sector sweeps).
[[nodiscard]] WindowResult t_sector_window_solve(const SectorOperator& op,
                                                 const HeisenbergIndex& J, long degree,
                                                 const std::vector<ExactScalar>* twist = nullptr);

// ============================================================================
// Aggregation
// ============================================================================

/**
 * @brief Compute the harmonic (0,1)-form space of (acs, g).
 *
 * Family inputs (4d/6d structure with a matching family metric) are solved
 * exactly; everything else falls back to enumeration within search and is
 * certified WindowBounded.  Every reported witness is re-verified exactly
 * against the sector equations before it is counted.
 */
[[nodiscard]] HarmonicReport harmonic_01(const AlmostComplexStructure& acs, const MetricParams& g,
                                         const SearchParams& search = {});

}  // namespace ktlab
