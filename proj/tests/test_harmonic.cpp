#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "ktlab/harmonic.hpp"
#include "ktlab/linalg.hpp"
#include "ktlab/presets.hpp"

using namespace ktlab;

namespace {

ExactScalar rat(long num, long den = 1) { return ExactScalar(make_rational(num, den)); }

/// Every torus sector with |I|_inf <= radius that has a nonzero kernel,
/// found by direct enumeration (the reference the symbolic solver must match).
std::vector<std::pair<TorusIndex, int>> brute_torus(const AlmostComplexStructure& acs,
                                                    const MetricParams& g, long radius) {
    std::vector<std::pair<TorusIndex, int>> found;
    const SectorOperator op = sector_operator(acs, g);
    const int n = acs.n;
    std::vector<long> digits(static_cast<std::size_t>(2 * n + 1), -radius);
    while (true) {
        TorusIndex I;
        I.p.assign(digits.begin(), digits.begin() + n);
        I.q.assign(digits.begin() + n, digits.begin() + 2 * n);
        I.l = digits.back();
        const auto kernel = kernel_basis(s_sector_system(op, I).equations);
        if (!kernel.empty()) found.emplace_back(I, static_cast<int>(kernel.size()));
        std::size_t d = 0;
        while (d < digits.size() && ++digits[d] > radius) digits[d++] = -radius;
        if (d == digits.size()) break;
    }
    return found;
}

bool same_sectors(const SSectorResult& got, const std::vector<std::pair<TorusIndex, int>>& want) {
    if (got.solutions.size() != want.size()) return false;
    for (const auto& [I, dim] : want) {
        const auto hit = std::find_if(got.solutions.begin(), got.solutions.end(),
                                      [&I](const auto& s) {
                                          return s.first.p == I.p && s.first.q == I.q &&
                                                 s.first.l == I.l;
                                      });
        if (hit == got.solutions.end()) return false;
        if (static_cast<int>(hit->second.size()) != dim) return false;
    }
    return true;
}

int count_sectors(const HarmonicReport& r, bool torus) {
    int c = 0;
    for (const auto& s : r.sectors)
        if (s.sector.is_torus() == torus) c += s.dimension;
    return c;
}

/// Dense kernel dimension of a theta system truncated to |h|_inf <= H,
/// with the unknowns recombined by an invertible 2x2 mix on legs (u0, u1):
/// new ops: row'[u0] = row[u0]*m00 + row[u1]*m10, etc.  Scaling one op by a
/// ring constant multiplies its atoms' coefficients.
int mixed_window_kernel_dim(const ThetaSystem& sys, long H,
                            const std::array<std::array<ExactScalar, 2>, 2>& mix) {
    const int n = sys.algebra.n;
    std::vector<std::vector<long>> slots;
    std::vector<long> h(static_cast<std::size_t>(n), 0);
    while (true) {
        slots.push_back(h);
        std::size_t d = 0;
        while (d < h.size() && ++h[d] > H) h[d++] = 0;
        if (d == h.size()) break;
    }
    std::map<std::vector<long>, int> slot_id;
    for (std::size_t i = 0; i < slots.size(); ++i) slot_id[slots[i]] = static_cast<int>(i);
    const std::size_t nu = sys.unknowns.size();
    const int cols = static_cast<int>(nu * slots.size());

    auto scaled = [](const LadderOp& op, const ExactScalar& s) {
        LadderOp out = op;
        for (LadderAtom& a : out) a.coeff = a.coeff * s;
        return out;
    };
    std::map<std::pair<std::size_t, std::vector<long>>, std::map<int, ExactScalar>> equations;
    for (std::size_t r = 0; r < sys.rows.size(); ++r)
        for (std::size_t u = 0; u < nu; ++u) {
            LadderOp op;
            if (u < 2) {
                for (std::size_t v = 0; v < 2; ++v) {
                    const LadderOp part = scaled(sys.rows[r][v], mix[v][u]);
                    op.insert(op.end(), part.begin(), part.end());
                }
            } else {
                op = sys.rows[r][u];
            }
            for (const auto& hs : slots) {
                CoeffVec basis;
                basis[hs] = ExactScalar::one();
                const int col = static_cast<int>(u * slots.size()) + slot_id.at(hs);
                for (const auto& [img, coeff] : sys.algebra.apply(op, basis)) {
                    auto& row = equations[{r, img}];
                    row[col] = row[col] + coeff;
                }
            }
        }
    Matrix M(static_cast<int>(equations.size()), cols);
    int r = 0;
    for (const auto& [key, row] : equations) {
        for (const auto& [c, v] : row) M(r, c) = v;
        ++r;
    }
    return static_cast<int>(kernel_basis(M).size());
}

const std::array<std::array<ExactScalar, 2>, 2> kIdentityMix = {
    {{ExactScalar::one(), ExactScalar{}}, {ExactScalar{}, ExactScalar::one()}}};

}  // namespace

// ============================================================================
// Family detection
// ============================================================================

TEST_CASE("family detection recognises the presets and only them") {
    const auto f4 = detect_kt4(preset_kt4(rat(2), rat(3)));
    REQUIRE(f4.has_value());
    CHECK(f4->beta == rat(2));
    CHECK(f4->delta == rat(3));
    CHECK(kt4_metric_matches(metric_kt4(rat(2), rat(3)), *f4));
    CHECK_FALSE(kt4_metric_matches(metric_identity(1), *f4));

    // Negative beta is a valid structure but not the normalised family.
    CHECK_FALSE(detect_kt4(preset_kt4(rat(-2), rat(3))).has_value());
    CHECK_FALSE(detect_kt4(preset_kt6(rat(2), rat(3), rat(5))).has_value());

    const auto f6 = detect_kt6(preset_kt6(rat(2), rat(-3), rat(5)));
    REQUIRE(f6.has_value());
    CHECK(f6->a == rat(2));
    CHECK(f6->b == rat(-3));
    CHECK(f6->c == rat(5));
    const auto w = kt6_family_weights(metric_kt6(rat(2), rat(-3), rat(5), rat(2), rat(1, 3), rat(7)),
                                      *f6);
    REQUIRE(w.has_value());
    CHECK((*w)[0] == rat(2));
    CHECK((*w)[1] == rat(1, 3));
    CHECK((*w)[2] == rat(7));
    CHECK_FALSE(kt6_family_weights(metric_identity(2), *f6).has_value());
}

// ============================================================================
// Torus sectors
// ============================================================================

TEST_CASE("torus solver matches brute enumeration on the 4d family") {
    for (const auto& [beta, delta] : std::vector<std::pair<ExactScalar, ExactScalar>>{
             {rat(2), rat(3)}, {rat(5, 2), rat(1, 3)}, {rat(1), rat(1)}}) {
        const AlmostComplexStructure acs = preset_kt4(beta, delta);
        const MetricParams g = metric_kt4(beta, delta);
        const SSectorResult got = s_sector_solve(acs, g, SearchParams{});
        CHECK(got.exact);
        CHECK(same_sectors(got, brute_torus(acs, g, 3)));
    }
}

TEST_CASE("torus solver finds the extra frequency sector at delta = 1/(4 pi)") {
    const ExactScalar beta = rat(2);
    const ExactScalar delta = rat(1, 4) / ExactScalar::pi();
    const AlmostComplexStructure acs = preset_kt4(beta, delta);
    const MetricParams g = metric_kt4(beta, delta);
    const SSectorResult got = s_sector_solve(acs, g, SearchParams{});
    CHECK(got.exact);
    REQUIRE(got.solutions.size() == 2);
    CHECK(same_sectors(got, brute_torus(acs, g, 2)));
    bool has_p_minus_one = false;
    for (const auto& [I, basis] : got.solutions)
        if (I.p == std::vector<long>{-1} && I.q == std::vector<long>{0} && I.l == 0) {
            has_p_minus_one = true;
            CHECK(basis.size() == 1);
        }
    CHECK(has_p_minus_one);
}

TEST_CASE("torus solver matches brute enumeration on the 6d family") {
    const struct {
        long an, ad, bn, bd, cn, cd;
        ExactScalar rho, sigma, tau;
        int dim0;
    } cases[] = {
        {2, 1, 3, 1, 5, 1, rat(1), rat(1), rat(1), 2},
        {-1, 2, 7, 3, -2, 1, rat(2), rat(1, 3), rat(7), 2},
        {2, 1, 1, 2, 3, 1, rat(1), rat(1), rat(1), 3},  // ab = 1
    };
    for (const auto& t : cases) {
        const ExactScalar a = rat(t.an, t.ad), b = rat(t.bn, t.bd), c = rat(t.cn, t.cd);
        const AlmostComplexStructure acs = preset_kt6(a, b, c);
        const MetricParams g = metric_kt6(a, b, c, t.rho, t.sigma, t.tau);
        const SSectorResult got = s_sector_solve(acs, g, SearchParams{});
        CHECK(got.exact);
        REQUIRE(got.solutions.size() == 1);
        CHECK(static_cast<int>(got.solutions[0].second.size()) == t.dim0);
        CHECK(same_sectors(got, brute_torus(acs, g, 2)));
    }
}

// ============================================================================
// Theta sectors: resonance of the 4d family
// ============================================================================

TEST_CASE("resonant beta is the unique root of the order-k condition") {
    const ExactScalar one = ExactScalar::one();
    const ExactScalar beta = kt4_resonant_beta(1, 1, one);
    CHECK(kt4_resonance_condition(beta, one, 1, 1).is_zero());
    for (long m = 1; m <= 4; ++m)
        for (long k = 1; k <= 5; ++k) {
            if (m == 1 && k == 1) continue;
            CHECK_FALSE(kt4_resonance_condition(beta, one, m, k).is_zero());
        }
    CHECK_FALSE(kt4_resonance_condition(beta + rat(1, 1000), one, 1, 1).is_zero());
    CHECK_FALSE(kt4_resonance_condition(beta - rat(1, 1000), one, 1, 1).is_zero());

    const ExactScalar beta2 = kt4_resonant_beta(2, 3, rat(1, 2));
    CHECK(kt4_resonance_condition(beta2, rat(1, 2), 2, 3).is_zero());

    // Rational parameters can never resonate: the three terms of the
    // condition carry distinct powers of pi.
    for (long m = 1; m <= 3; ++m)
        for (long k = 1; k <= 3; ++k)
            CHECK_FALSE(kt4_resonance_condition(rat(7, 2), rat(2, 3), m, k).is_zero());
}

TEST_CASE("twisted window certifies the resonant theta solution on both branches") {
    const ExactScalar one = ExactScalar::one();
    const ExactScalar beta = kt4_resonant_beta(1, 1, one);
    const AlmostComplexStructure acs = preset_kt4(beta, one);
    const MetricParams g = metric_kt4(beta, one);
    const std::vector<ExactScalar> twist{-(ExactScalar::i() * beta * rat(1, 4))};

    for (long m : {1L, -1L}) {
        const HeisenbergIndex J{m, {0}, 0};
        const WindowResult res = t_sector_window_solve(acs, g, J, 3, &twist);
        CHECK(res.interior_dimension == 1);  // orders {0, 1} sit two inside H = 3
        REQUIRE(res.witnesses.size() == 1);
        // The certified witness is supported on twisted Hermite orders {0, 1}.
        for (const CoeffVec& section : res.witnesses[0])
            for (const auto& [h, coeff] : section) CHECK(h[0] <= 1);

        // A wider window finds the same one-dimensional space.
        CHECK(t_sector_window_solve(acs, g, J, 6, &twist).interior_dimension == 1);

        // Without the twist the solution has no finite expansion.
        CHECK(t_sector_window_solve(acs, g, J, 6).interior_dimension == 0);

        // Detuning beta destroys the resonance.
        for (long s : {1L, -1L}) {
            const ExactScalar off = beta + rat(s, 1000);
            const std::vector<ExactScalar> off_twist{-(ExactScalar::i() * off * rat(1, 4))};
            CHECK(t_sector_window_solve(preset_kt4(off, one), metric_kt4(off, one), J, 6,
                                        &off_twist)
                      .interior_dimension == 0);
        }
    }

    // Degree zero never certifies anything.
    CHECK(t_sector_window_solve(acs, g, HeisenbergIndex{1, {0}, 0}, 0, &twist)
              .interior_dimension == 0);

    // l != 0 sectors are empty even at resonance.
    CHECK(t_sector_window_solve(acs, g, HeisenbergIndex{1, {0}, 2}, 4, &twist)
              .interior_dimension == 0);
}

TEST_CASE("closed-form resonant witnesses satisfy the twisted system exactly") {
    const ExactScalar one = ExactScalar::one();
    const ExactScalar delta = rat(1, 2);
    const ExactScalar beta = kt4_resonant_beta(2, 1, delta);
    const ExactScalar E = beta / (rat(4) * delta);
    const ExactScalar pi = ExactScalar::pi();
    const ExactScalar im = ExactScalar::i();
    const long k = 1;

    for (long m : {2L, -2L}) {
        const ExactScalar w = rat(-2 * (m > 0 ? m : -m)) * pi * delta - E;
        for (long q = 0; q < 2; ++q) {
            const ThetaSystem sys = t_sector_system_kt4(beta, delta, HeisenbergIndex{m, {q}, 0});
            std::vector<CoeffVec> s(2);
            s[0][{k - 1}] = w;
            s[0][{k}] = -im;
            s[1][{k - 1}] = m > 0 ? w : -w;
            s[1][{k}] = m > 0 ? im : -im;
            for (const CoeffVec& r : theta_apply_rows(sys, s)) CHECK(coeffvec_is_zero(r));

            // A generic perturbation of the same support is not a solution.
            std::vector<CoeffVec> bad = s;
            bad[0][{k}] = im;
            bool all_zero = true;
            for (const CoeffVec& r : theta_apply_rows(sys, bad))
                all_zero = all_zero && coeffvec_is_zero(r);
            CHECK_FALSE(all_zero);
        }
    }
}

// ============================================================================
// Theta sectors: the 6d family is always empty
// ============================================================================

TEST_CASE("6d elimination prefactors exclude theta solutions for every parameter sign") {
    const struct {
        long an, ad, bn, bd, cn, cd;
    } params[] = {
        {2, 1, 3, 1, 5, 1},   {-1, 1, 2, 1, 7, 1},  {1, 2, -3, 1, -2, 1},
        {2, 1, 1, 2, 4, 1},   {-2, 1, -1, 2, 3, 1},  // last two have ab = 1
    };
    const struct {
        ExactScalar rho, sigma, tau;
    } weights[] = {{rat(1), rat(1), rat(1)}, {rat(2), rat(1, 3), rat(5)}};

    for (const auto& t : params) {
        const ExactScalar a = rat(t.an, t.ad), b = rat(t.bn, t.bd), c = rat(t.cn, t.cd);
        const bool ab_one = (a * b) == ExactScalar::one();
        for (const auto& wgt : weights)
            for (long m : {1L, -1L, 2L, -3L})
                for (long l : {0L, 1L, -2L})
                    for (const std::vector<long>& h :
                         {std::vector<long>{0, 0}, {1, 0}, {2, 3}}) {
                        const HeisenbergIndex J{m, {0, 0}, l};
                        const auto [cond1, cond2] = kt6_elimination_conditions(
                            a, b, c, wgt.rho, wgt.sigma, wgt.tau, J, h);
                        CHECK(cond1.is_zero() == ab_one);
                        CHECK(cond2.sign_real() < 0);
                    }
    }
}

TEST_CASE("6d theta windows have no interior kernel") {
    const struct {
        long an, ad, bn, bd, cn, cd;
    } params[] = {{2, 1, 3, 1, 5, 1}, {2, 1, 1, 2, 3, 1}};
    for (const auto& t : params) {
        const ExactScalar a = rat(t.an, t.ad), b = rat(t.bn, t.bd), c = rat(t.cn, t.cd);
        const AlmostComplexStructure acs = preset_kt6(a, b, c);
        const MetricParams g = metric_kt6(a, b, c, rat(1), rat(1), rat(1));
        for (const HeisenbergIndex& J :
             {HeisenbergIndex{1, {0, 0}, 0}, HeisenbergIndex{-2, {1, 0}, 1}}) {
            const WindowResult res = t_sector_window_solve(acs, g, J, 4);
            CHECK(res.interior_dimension == 0);
        }
    }
}

TEST_CASE("6d theta window at depth eight stays empty") {
    const ExactScalar a = rat(2), b = rat(3), c = rat(5);
    const WindowResult res =
        t_sector_window_solve(preset_kt6(a, b, c), metric_kt6(a, b, c, rat(1), rat(1), rat(1)),
                              HeisenbergIndex{1, {0, 0}, 0}, 8);
    CHECK(res.degree == 8);
    CHECK(res.interior_dimension == 0);
}

// ============================================================================
// Unknown-change invariants
// ============================================================================

TEST_CASE("sum/difference recombination preserves truncated kernels (4d)") {
    const ExactScalar one = ExactScalar::one();
    const ExactScalar beta = kt4_resonant_beta(1, 1, one);
    const std::array<std::array<ExactScalar, 2>, 2> sum_diff = {
        {{one, one}, {one, -one}}};  // s1 = t1 + t2, s2 = t1 - t2
    for (long m : {1L, -1L})
        for (long l : {0L, 1L}) {
            ThetaSystem sys = t_sector_system_kt4(beta, one, HeisenbergIndex{m, {0}, l});
            const int plain = mixed_window_kernel_dim(sys, 3, kIdentityMix);
            const int mixed = mixed_window_kernel_dim(sys, 3, sum_diff);
            CHECK(plain == mixed);
        }
}

TEST_CASE("alpha/beta recombination preserves truncated kernels (6d)") {
    const ExactScalar one = ExactScalar::one();
    const ExactScalar im = ExactScalar::i();
    // s1 = alpha + beta, s2 = i(beta - alpha)
    const std::array<std::array<ExactScalar, 2>, 2> mix = {{{one, one}, {-im, im}}};
    const ThetaSystem sys =
        t_sector_system_kt6(rat(2), rat(3), rat(5), HeisenbergIndex{1, {0, 0}, 0});
    CHECK(mixed_window_kernel_dim(sys, 2, kIdentityMix) == mixed_window_kernel_dim(sys, 2, mix));
}

// ============================================================================
// Aggregated reports
// ============================================================================

TEST_CASE("harmonic space of the 6d family: two invariant forms when ab != 1") {
    const struct {
        long an, ad, bn, bd, cn, cd;
        ExactScalar rho, sigma, tau;
    } cases[] = {
        {2, 1, 3, 1, 5, 1, rat(1), rat(1), rat(1)},
        {-1, 2, 7, 3, -2, 1, rat(2), rat(1, 3), rat(7)},
    };
    for (const auto& t : cases) {
        const ExactScalar a = rat(t.an, t.ad), b = rat(t.bn, t.bd), c = rat(t.cn, t.cd);
        const HarmonicReport rep = harmonic_01(preset_kt6(a, b, c),
                                               metric_kt6(a, b, c, t.rho, t.sigma, t.tau));
        CHECK(rep.dimension == 2);
        CHECK(rep.certification.kind == Certification::Kind::Exact);
        REQUIRE(rep.invariant_basis.size() == 2);
        CHECK(rep.invariant_basis[0] == "conj(phi^1)");
        CHECK(rep.invariant_basis[1] == "conj(phi^2)");
        CHECK(count_sectors(rep, true) == 2);
        CHECK(count_sectors(rep, false) == 0);
    }
}

TEST_CASE("harmonic space of the 6d family: three invariant forms when ab = 1") {
    const ExactScalar a = rat(2), b = rat(1, 2), c = rat(3);
    const HarmonicReport rep =
        harmonic_01(preset_kt6(a, b, c), metric_kt6(a, b, c, rat(1), rat(1), rat(1)));
    CHECK(rep.dimension == 3);
    CHECK(rep.certification.kind == Certification::Kind::Exact);
    CHECK(rep.invariant_basis.size() == 3);
}

TEST_CASE("harmonic space of the 4d family at rational parameters is one-dimensional") {
    for (const auto& [beta, delta] : std::vector<std::pair<ExactScalar, ExactScalar>>{
             {rat(2), rat(3)}, {rat(7, 3), rat(1, 5)}}) {
        const HarmonicReport rep = harmonic_01(preset_kt4(beta, delta), metric_kt4(beta, delta));
        CHECK(rep.dimension == 1);
        CHECK(rep.certification.kind == Certification::Kind::Exact);
        REQUIRE(rep.invariant_basis.size() == 1);
        CHECK(rep.invariant_basis[0] == "conj(phi^1)");
    }
}

TEST_CASE("harmonic space of the 4d family at delta = 1/(4 pi) gains a frequency sector") {
    const ExactScalar beta = rat(2);
    const ExactScalar delta = rat(1, 4) / ExactScalar::pi();
    const HarmonicReport rep = harmonic_01(preset_kt4(beta, delta), metric_kt4(beta, delta));
    CHECK(rep.dimension == 2);
    CHECK(rep.certification.kind == Certification::Kind::Exact);
    CHECK(rep.invariant_basis.size() == 1);
    CHECK(count_sectors(rep, true) == 2);
}

TEST_CASE("harmonic space of the 4d family at resonance gains theta sectors") {
    const ExactScalar one = ExactScalar::one();

    // (m, k) = (1, 1): one theta solution in each of the two sectors m = +-1.
    const ExactScalar beta1 = kt4_resonant_beta(1, 1, one);
    const HarmonicReport rep1 = harmonic_01(preset_kt4(beta1, one), metric_kt4(beta1, one));
    CHECK(rep1.dimension == 3);
    CHECK(rep1.certification.kind == Certification::Kind::Exact);
    CHECK(count_sectors(rep1, true) == 1);
    CHECK(count_sectors(rep1, false) == 2);

    // (m, k) = (2, 1) at delta = 1/2: sectors (+-2, q in {0, 1}, l = 0).
    const ExactScalar delta = rat(1, 2);
    const ExactScalar beta2 = kt4_resonant_beta(2, 1, delta);
    const HarmonicReport rep2 = harmonic_01(preset_kt4(beta2, delta), metric_kt4(beta2, delta));
    CHECK(rep2.dimension == 5);
    CHECK(rep2.certification.kind == Certification::Kind::Exact);
    CHECK(count_sectors(rep2, false) == 4);

    // Detuning beta removes every theta contribution.
    const ExactScalar off = beta1 + rat(1, 1000);
    const HarmonicReport rep3 = harmonic_01(preset_kt4(off, one), metric_kt4(off, one));
    CHECK(rep3.dimension == 1);
    CHECK(rep3.certification.kind == Certification::Kind::Exact);
}

TEST_CASE("non-family metrics fall back to window-bounded reports") {
    const HarmonicReport rep =
        harmonic_01(preset_kt4(rat(2), rat(3)), metric_identity(1), SearchParams{1, 3});
    CHECK(rep.certification.kind == Certification::Kind::WindowBounded);
    CHECK(rep.certification.radius == 1);
    CHECK(rep.certification.degree == 3);
    CHECK(rep.dimension == 1);
    REQUIRE(rep.invariant_basis.size() == 1);
    CHECK(rep.invariant_basis[0] == "conj(phi^1)");
}

TEST_CASE("reports order sectors by label and re-verify witnesses") {
    const ExactScalar delta = rat(1, 2);
    const ExactScalar beta = kt4_resonant_beta(2, 1, delta);
    const HarmonicReport rep = harmonic_01(preset_kt4(beta, delta), metric_kt4(beta, delta));
    REQUIRE(rep.sectors.size() == 5);
    for (std::size_t i = 1; i < rep.sectors.size(); ++i)
        CHECK(rep.sectors[i - 1].sector.label() < rep.sectors[i].sector.label());
    for (const auto& s : rep.sectors) {
        CHECK(s.dimension > 0);
        CHECK_FALSE(s.witness.empty());
    }
}
