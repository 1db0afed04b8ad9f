#pragma once

/**
 * @file sector.hpp
 * @brief Per-sector restriction of the harmonic (0,1)-form equations.
 *
 * A left-invariant almost complex structure J with dual (1,0) coframe
 * phi^1..phi^{n+1} turns the harmonic-form problem for
 * s = sum_j s_j conj(phi^j) into one first-order system per L^2 sector:
 *
 *  - dbar rows, one per pair j < k:
 *        conj(V_j) s_k - conj(V_k) s_j + sum_l T^l_{jk} s_l = 0,
 *    where T^l_{jk} is the conj(phi^j) ^ conj(phi^k) coefficient of
 *    d conj(phi^l) (the conjugate of the (2,0) torsion of d phi^l);
 *
 *  - one adjoint row
 *        sum_{j,k} H^{jk} V_k(s_j) = 0,
 *    with H^{jk} = h(conj phi^j, conj phi^k) the Gram matrix of the (0,1)
 *    coframe in the chosen diagonal metric (the frame fields are divergence
 *    free, so the formal adjoint of conj(V_k) is -V_k).
 *
 * On a torus sector (central weight m == 0) every frame field acts by a
 * scalar, and the system is a plain exact matrix.  On a theta sector
 * (m != 0) the fields act as ladder operators in the Hermite orders; the
 * system is kept as operator rows over a rescaled basis
 *
 *     ghat_h = (prod_j rho_j^{h_j}) g_{J,h},   rho_j^2 = 2 pi |m| b_j c_j,
 *
 * in which every ladder coefficient lies in the exact scalar ring:
 * for m > 0,  U_j ghat_h = -ghat_{h+e_j} and
 *             conj(U_j) ghat_h = 2 h_j rho_j^2 ghat_{h-e_j}
 * (roles swapped for m < 0), while the diagonal leg acts by
 * 2 pi (i a l -+ d m).  An optional per-leg twist constant models bases of
 * the form exp(-i lambda x_j) ghat_h, which shifts both U_j and conj(U_j)
 * by the same additive constant -i b_j lambda.
 */

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "ktlab/acs.hpp"
#include "ktlab/basis.hpp"
#include "ktlab/linalg.hpp"
#include "ktlab/metric.hpp"
#include "ktlab/scalar.hpp"

namespace ktlab {

// ============================================================================
// Sector identity
// ============================================================================

/// Identifies one L^2 sector: a torus character (m == 0) or a theta sector.
struct SectorIndex {
    std::variant<TorusIndex, HeisenbergIndex> index;

    [[nodiscard]] bool is_torus() const { return index.index() == 0; }
    [[nodiscard]] const TorusIndex& torus() const { return std::get<TorusIndex>(index); }
    [[nodiscard]] const HeisenbergIndex& theta() const { return std::get<HeisenbergIndex>(index); }

    /// Human-readable label, e.g. "S(p=[1,0], q=[0,2], l=-1)" or
    /// "T(m=2, q=[1], l=0)".
    [[nodiscard]] std::string label() const;
};

// ============================================================================
// Frame expansion over the ladder frame
// ============================================================================

/**
 * @brief Expansion of the (1,0) frame over the metric ladder frame.
 *
 * The ladder frame of a diagonal metric (a, b_j, c_j, d) is
 *     U_j = b_j d/dx_j + i c_j Y_j   (j < n),
 *     U_n = a d/dt + i d d/dz,
 * together with the conjugates.  Row k holds the coefficients of V_k:
 *     V_k = sum_j  u(k,j) U_j + ubar(k,j) conj(U_j).
 */
struct FrameExpansion {
    int n{1};
    Matrix u;     ///< (n+1) x (n+1)
    Matrix ubar;  ///< (n+1) x (n+1)
};

/**
 * @brief Expand every V_k over the ladder frame of the metric.
 *
 * Throws std::domain_error when a coefficient fails to divide exactly by the
 * metric weight (the structure is not a ring-exact combination of the ladder
 * frame; callers should treat the pair as an unsupported configuration).
 */
[[nodiscard]] FrameExpansion frame_expansion(const AlmostComplexStructure& acs,
                                             const MetricParams& g);

// ============================================================================
// Scalar data shared by both sector kinds
// ============================================================================

/**
 * @brief Scalar action of the frame columns on the torus character f_I.
 *
 * The real frame acts on f_I = exp(2 pi i (p.x + q.y + l t)) by
 * d/dx_j -> 2 pi i p_j,  Y_j -> 2 pi i q_j,  d/dz -> 0,  d/dt -> 2 pi i l.
 * Entry k of the result is the scalar by which column k of frame_matrix
 * (a (2n+2) x (n+1) matrix such as the structure matrix A or its conjugate)
 * acts.
 */
[[nodiscard]] Vec scalar_actions(const Matrix& frame_matrix, const TorusIndex& I, int n);

/// Gram matrix H^{jk} = h(conj phi^j, conj phi^k) of the (0,1) coframe.
[[nodiscard]] Matrix gram_01(const AlmostComplexStructure& acs, const MetricParams& g);

/**
 * @brief Torsion constants of the (0,2) part of d conj(phi^l).
 *
 * Entry l of the result is an antisymmetric (n+1) x (n+1) matrix with
 * d conj(phi^l) |_(0,2) = sum_{j<k} T[l](j,k) conj(phi^j) ^ conj(phi^k).
 *
 * Computed from frame brackets and exact per-coefficient solves, so it stays
 * available when the dual coframe itself has coefficients outside the scalar
 * ring (the torsion constants are ratios that often remain inside).
 */
[[nodiscard]] std::vector<Matrix> torsion_02(const AlmostComplexStructure& acs);

/**
 * @brief Sector-independent data of a structure/metric pair, precomputed
 *        once and shared by every per-sector system assembly.
 */
struct SectorOperator {
    AlmostComplexStructure acs;
    MetricParams g;
    FrameExpansion fe;            ///< ladder expansion of the (1,0) frame
    Matrix gram;                  ///< gram_01(acs, g)
    std::vector<Matrix> torsion;  ///< torsion_02(acs)
};

/// Precompute the shared data; throws std::domain_error when any of it
/// leaves the scalar ring.
[[nodiscard]] SectorOperator sector_operator(const AlmostComplexStructure& acs,
                                             const MetricParams& g);

// ============================================================================
// Torus (m == 0) sectors: exact matrix systems
// ============================================================================

/// Linear system cutting out the harmonic (0,1)-forms on one torus sector.
struct SectorSystem {
    SectorIndex sector;
    std::vector<std::string> unknowns;    ///< labels of s_1..s_{n+1}
    Matrix equations;                     ///< rows x (n+1), exact entries
    std::vector<std::string> provenance;  ///< one label per row
};

/**
 * @brief Assemble the harmonic system on the torus sector f_I.
 *
 * Rows: dbar(j,k) for j < k, then the adjoint row.  The kernel of the matrix
 * is exactly the space of harmonic (0,1)-forms with all coefficient
 * functions proportional to f_I.
 */
[[nodiscard]] SectorSystem s_sector_system(const AlmostComplexStructure& acs,
                                           const MetricParams& g, const TorusIndex& I);

/// Same, reusing a precomputed operator (cheaper inside sector sweeps).
[[nodiscard]] SectorSystem s_sector_system(const SectorOperator& op, const TorusIndex& I);

// ============================================================================
// Theta (m != 0) sectors: ladder-operator systems
// ============================================================================

/// One summand of a first-order operator over the ladder frame.
struct LadderAtom {
    enum class Kind { Identity, U, Ubar };
    Kind kind{Kind::Identity};
    int leg{0};  ///< j in [0, n]; ignored for Identity
    ExactScalar coeff;
};

/// A first-order operator: the sum of its atoms.
using LadderOp = std::vector<LadderAtom>;

/// Coefficient vector over the rescaled basis, keyed by the Hermite
/// multi-order h (all entries >= 0); absent keys are zero.
using CoeffVec = std::map<std::vector<long>, ExactScalar>;

/**
 * @brief Exact ladder action on the rescaled basis of one theta sector.
 *
 * twist[j] (default zero) is added to the action of both U_j and conj(U_j);
 * it models the basis exp(-i lambda x_j) ghat_h with twist[j] = -i b_j lambda.
 */
struct ThetaAlgebra {
    int n{1};
    HeisenbergIndex J;
    std::vector<ExactScalar> rho_sq;  ///< 2 pi |m| b_j c_j, length n
    ExactScalar diag_u;               ///< U_n multiplier 2 pi (i a l - d m)
    ExactScalar diag_ubar;            ///< conj(U_n) multiplier 2 pi (i a l + d m)
    std::vector<ExactScalar> twist;   ///< per-leg additive constant, length n

    /// Image of coeff * atom applied to v, added into out.
    void apply_atom(const LadderAtom& atom, const CoeffVec& v, CoeffVec& out) const;
    /// Image of an operator applied to a coefficient vector.
    [[nodiscard]] CoeffVec apply(const LadderOp& op, const CoeffVec& v) const;
};

/// Build the ladder algebra of the sector (no twist).
[[nodiscard]] ThetaAlgebra theta_algebra(const HeisenbergIndex& J, const MetricParams& g, int n);

/// V_k (or conj(V_k)) as a ladder operator, from a frame expansion.
[[nodiscard]] LadderOp field_op(const FrameExpansion& fe, int k, bool conjugated);

/// Harmonic system on a theta sector: rows[r][u] acts on unknown u in row r.
struct ThetaSystem {
    SectorIndex sector;
    std::vector<std::string> unknowns;
    std::vector<std::vector<LadderOp>> rows;
    std::vector<std::string> provenance;
    ThetaAlgebra algebra;
};

/**
 * @brief Assemble the harmonic system on a theta sector.
 *
 * Same rows as the torus case with scalar actions replaced by ladder
 * operators.  Throws std::domain_error when the frame expansion leaves the
 * ring (unsupported structure/metric pair).
 */
[[nodiscard]] ThetaSystem t_sector_system(const AlmostComplexStructure& acs,
                                          const MetricParams& g, const HeisenbergIndex& J);

/// Same, reusing a precomputed operator (cheaper inside sector sweeps).
[[nodiscard]] ThetaSystem t_sector_system(const SectorOperator& op, const HeisenbergIndex& J);

/// Row residuals of a candidate section (one coefficient vector per unknown).
[[nodiscard]] std::vector<CoeffVec> theta_apply_rows(const ThetaSystem& sys,
                                                     const std::vector<CoeffVec>& s);

/// Drop exact zeros that arithmetic may have left behind (defensive; the
/// ring prunes on write, so this is a cheap no-op in the common case).
void coeffvec_prune(CoeffVec& v);

/// True when every entry is structurally zero.
[[nodiscard]] bool coeffvec_is_zero(const CoeffVec& v);

}  // namespace ktlab
