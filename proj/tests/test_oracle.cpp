/**
 * @file test_oracle.cpp
 * @brief Cross-checks of the exact machinery against the floating-point
 *        oracle: brute-force torsion, finite-difference probes, Galerkin
 *        near-kernel counts, and grid-quadrature witnesses.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "ktlab/harmonic.hpp"
#include "ktlab/linalg.hpp"
#include "ktlab/oracle.hpp"
#include "ktlab/presets.hpp"
#include "ktlab/sector.hpp"

using ktlab::AlmostComplexStructure;
using ktlab::BasisFunction;
using ktlab::ExactScalar;
using ktlab::GalerkinConfig;
using ktlab::GalerkinResult;
using ktlab::HeisenbergIndex;
using ktlab::HermiteIndex;
using ktlab::Matrix;
using ktlab::MetricParams;
using ktlab::OperatorProbe;
using ktlab::Point;
using ktlab::TorusIndex;

namespace {

ExactScalar S(const std::string& text) { return ktlab::scalar_parse(text); }

AlmostComplexStructure random_rational_acs(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<long> num(-3, 3);
    for (;;) {
        AlmostComplexStructure acs;
        acs.n = n;
        acs.A = Matrix(2 * n + 2, n + 1);
        for (int i = 0; i < acs.A.rows(); ++i)
            for (int j = 0; j < acs.A.cols(); ++j)
                acs.A(i, j) = ExactScalar(num(rng)) + ExactScalar::i() * ExactScalar(num(rng));
        if (ktlab::acs_spans(acs)) return acs;
    }
}

MetricParams random_rational_metric(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<long> num(1, 4);
    std::uniform_int_distribution<long> den(1, 3);
    const auto w = [&] {
        return ExactScalar(num(rng)).try_divide(ExactScalar(den(rng))).value();
    };
    MetricParams g;
    g.a = w();
    g.d = w();
    for (int j = 0; j < n; ++j) {
        g.b.push_back(w());
        g.c.push_back(w());
    }
    return g;
}

Point random_point(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Point pt;
    for (int j = 0; j < n; ++j) {
        pt.x.push_back(unif(rng));
        pt.y.push_back(unif(rng));
    }
    pt.z = unif(rng);
    pt.t = unif(rng);
    return pt;
}

AlmostComplexStructure product_torus_acs(int n) {
    // V_j = (d/dx_j - i Y_j) / 2, V_{n+1} = (d/dt - i d/dz) / 2: an integrable
    // structure with vanishing torsion (the z-direction never appears).
    AlmostComplexStructure acs;
    acs.n = n;
    acs.A = Matrix(2 * n + 2, n + 1);
    const ExactScalar half = S("1/2");
    const ExactScalar mihalf = S("-i/2");
    for (int j = 0; j < n; ++j) {
        acs.A(j, j) = half;
        acs.A(n + j, j) = mihalf;
    }
    acs.A(2 * n + 1, n) = half;
    acs.A(2 * n, n) = mihalf;
    return acs;
}

int exact_torus_kernel_dim(const AlmostComplexStructure& acs, const MetricParams& g,
                           const TorusIndex& I) {
    const auto sys = ktlab::s_sector_system(ktlab::sector_operator(acs, g), I);
    return static_cast<int>(ktlab::kernel_basis(sys.equations).size());
}

int count_below(const std::vector<double>& sig, double eps) {
    int c = 0;
    for (double s : sig)
        if (s < eps) ++c;
    return c;
}

}  // namespace

// ============================================================================
// Torsion: brute-force wedge expansion vs form calculus
// ============================================================================

TEST_CASE("brute-force torsion matches the form calculus on presets") {
    const auto kt4 = ktlab::preset_kt4(S("3"), S("1/2"));
    const auto tv4 = ktlab::torsion_bruteforce(kt4);
    const auto ref4 = ktlab::torsion_vector(kt4);
    REQUIRE(tv4.C.size() == 2);
    for (std::size_t j = 0; j < tv4.C.size(); ++j) CHECK((tv4.C[j] - ref4.C[j]).is_zero());
    // The 4d family has C = (beta / (4 delta), 0).
    CHECK((tv4.C[0] - S("3/2")).is_zero());
    CHECK(tv4.C[1].is_zero());

    const auto kt6 = ktlab::preset_kt6(S("2"), S("3"), S("5"));
    const auto tv6 = ktlab::torsion_bruteforce(kt6);
    const auto ref6 = ktlab::torsion_vector(kt6);
    REQUIRE(tv6.C.size() == 3);
    for (std::size_t j = 0; j < tv6.C.size(); ++j) {
        CHECK(tv6.C[j].is_zero());
        CHECK(ref6.C[j].is_zero());
    }
}

TEST_CASE("brute-force torsion vanishes on a complex product torus") {
    for (int n = 1; n <= 2; ++n) {
        const auto acs = product_torus_acs(n);
        const auto tv = ktlab::torsion_bruteforce(acs);
        for (const auto& c : tv.C) CHECK(c.is_zero());
    }
}

TEST_CASE("brute-force torsion matches the form calculus on random structures") {
    std::mt19937_64 rng(401u);
    for (int n = 1; n <= 2; ++n) {
        const int trials = n == 1 ? 30 : 20;
        for (int t = 0; t < trials; ++t) {
            const auto acs = random_rational_acs(rng, n);
            const auto brute = ktlab::torsion_bruteforce(acs);
            const auto ref = ktlab::torsion_vector(acs);
            REQUIRE(brute.C.size() == ref.C.size());
            for (std::size_t j = 0; j < brute.C.size(); ++j)
                CHECK((brute.C[j] - ref.C[j]).is_zero());
        }
    }
}

// ============================================================================
// Finite-difference probes
// ============================================================================

TEST_CASE("flow-curve differences match the ladder action") {
    std::mt19937_64 rng(402u);
    const double step = 1e-5;

    // n == 1, several sectors and orders.
    for (long m : {1L, -1L, 2L}) {
        MetricParams g = random_rational_metric(rng, 1);
        for (long h : {0L, 1L, 3L}) {
            HeisenbergIndex J{m, {std::labs(m) > 1 ? 1L : 0L}, 1};
            const Point pt = random_point(rng, 1);
            for (int leg = 0; leg <= 1; ++leg)
                for (const bool conj_ : {false, true}) {
                    const double rel = ktlab::fd_operator_check(
                        OperatorProbe{leg, conj_, false}, J, HermiteIndex{{h}}, g, pt, step);
                    CAPTURE(m);
                    CAPTURE(h);
                    CAPTURE(leg);
                    CAPTURE(conj_);
                    CHECK(rel < 1e-6);
                }
        }
    }

    // n == 2 spot checks.
    MetricParams g2 = random_rational_metric(rng, 2);
    HeisenbergIndex J2{1, {0, 0}, -1};
    for (const auto& h : {std::vector<long>{0, 0}, std::vector<long>{2, 1}}) {
        const Point pt = random_point(rng, 2);
        for (int leg = 0; leg <= 2; ++leg)
            for (const bool conj_ : {false, true}) {
                const double rel = ktlab::fd_operator_check(OperatorProbe{leg, conj_, false}, J2,
                                                            HermiteIndex{h}, g2, pt, step);
                CHECK(rel < 1e-6);
            }
    }
}

TEST_CASE("diagonal leg differences are exact to second order") {
    std::mt19937_64 rng(403u);
    MetricParams g = random_rational_metric(rng, 1);
    HeisenbergIndex J{2, {1}, 2};
    const Point pt = random_point(rng, 1);
    for (const bool conj_ : {false, true}) {
        const double rel = ktlab::fd_operator_check(OperatorProbe{1, conj_, false}, J,
                                                    HermiteIndex{{2}}, g, pt, 1e-5);
        CHECK(rel < 1e-8);
    }
}

TEST_CASE("zero probe and empty lowering report zero error") {
    std::mt19937_64 rng(404u);
    MetricParams g = random_rational_metric(rng, 1);
    HeisenbergIndex J{1, {0}, 0};
    const Point pt = random_point(rng, 1);
    CHECK(ktlab::fd_operator_check(OperatorProbe{0, false, true}, J, HermiteIndex{{1}}, g, pt,
                                   1e-5) == 0.0);
    // Lowering at h = 0 has an empty prediction; the difference quotient only
    // sees the truncation noise of the theta sum.
    const double rel =
        ktlab::fd_operator_check(OperatorProbe{0, true, false}, J, HermiteIndex{{0}}, g, pt, 1e-5);
    CHECK(rel < 1e-9);
}

TEST_CASE("twisted family differences match the twisted ladder") {
    std::mt19937_64 rng(405u);
    const ExactScalar beta = S("3");
    const ExactScalar delta = S("1/2");
    for (long m : {1L, -1L}) {
        HeisenbergIndex J{m, {0}, 1};
        for (long h : {0L, 1L, 2L}) {
            const Point pt = random_point(rng, 1);
            for (int leg = 0; leg <= 1; ++leg)
                for (const bool conj_ : {false, true}) {
                    const double rel = ktlab::fd_twisted_operator_check(
                        OperatorProbe{leg, conj_, false}, J, h, beta, delta, pt, 1e-5);
                    CAPTURE(m);
                    CAPTURE(h);
                    CAPTURE(leg);
                    CHECK(rel < 1e-6);
                }
        }
    }
}

TEST_CASE("second differences match the Laplace eigenvalues") {
    std::mt19937_64 rng(406u);
    const double step = 2e-4;
    for (int n = 1; n <= 2; ++n) {
        MetricParams g = random_rational_metric(rng, n);
        std::uniform_int_distribution<long> freq(-3, 3);
        for (int t = 0; t < 8; ++t) {
            TorusIndex I;
            for (int j = 0; j < n; ++j) {
                I.p.push_back(freq(rng));
                I.q.push_back(freq(rng));
            }
            I.l = freq(rng);
            const double rel = ktlab::fd_laplace_check(I, g, random_point(rng, n), step);
            CHECK(rel < 1e-4);
        }
        for (long m : {1L, -2L}) {
            HeisenbergIndex J{m, std::vector<long>(static_cast<std::size_t>(n), 0), 1};
            std::vector<long> h(static_cast<std::size_t>(n), 0);
            h[0] = 2;
            const double rel =
                ktlab::fd_laplace_check(J, HermiteIndex{h}, g, random_point(rng, n), step);
            CHECK(rel < 1e-4);
        }
    }
    // The constant function: both sides vanish identically.
    MetricParams g1 = random_rational_metric(rng, 1);
    CHECK(ktlab::fd_laplace_check(TorusIndex{{0}, {0}, 0}, g1, random_point(rng, 1), step) == 0.0);
}

// ============================================================================
// Galerkin blocks vs the exact sector systems
// ============================================================================

TEST_CASE("numeric torus blocks agree with the exact kernels on random data") {
    std::mt19937_64 rng(407u);
    std::uniform_int_distribution<long> freq(-1, 1);
    for (int n = 1; n <= 2; ++n) {
        const int trials = n == 1 ? 12 : 6;
        for (int t = 0; t < trials; ++t) {
            const auto acs = random_rational_acs(rng, n);
            const auto g = random_rational_metric(rng, n);
            for (int s = 0; s < 4; ++s) {
                TorusIndex I;
                for (int j = 0; j < n; ++j) {
                    I.p.push_back(freq(rng));
                    I.q.push_back(freq(rng));
                }
                I.l = freq(rng);
                const auto sig = ktlab::galerkin_torus_singulars(acs, g, I);
                const int numeric = count_below(sig, 1e-6);
                const int exact = exact_torus_kernel_dim(acs, g, I);
                CAPTURE(n);
                CAPTURE(t);
                CHECK(numeric == exact);
            }
        }
    }
}

TEST_CASE("kt4 invariant block: one flat direction with a clean gap") {
    const auto acs = ktlab::preset_kt4(S("3"), S("1/2"));
    const auto g = ktlab::metric_kt4(S("3"), S("1/2"));
    const auto sig = ktlab::galerkin_torus_singulars(acs, g, TorusIndex{{0}, {0}, 0});
    REQUIRE(sig.size() == 2);
    CHECK(sig[0] < 1e-12);
    // The invariant sector is pure torsion: in the orthonormalized bases the
    // only other singular value is beta/(4 delta) times the norm ratio
    // |phibar^0 ^ phibar^1| / |phibar^0| = sqrt(H(1,1)) (diagonal Gram here).
    const Matrix H = ktlab::gram_01(acs, g);
    const double expected = 1.5 * std::sqrt(H(1, 1).to_complex().real());
    CHECK(sig[1] == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("twisted theta block: resonance gives an exact numeric kernel") {
    // Resonant pair (m0, h0) = (1, 1) at delta = 1: beta = 8 pi (4 + sqrt 17).
    const ExactScalar delta = S("1");
    const ExactScalar beta = ktlab::kt4_resonant_beta(1, 1, delta);
    CHECK((beta - S("8*pi*(4+sqrt(17))")).is_zero());
    const auto acs = ktlab::preset_kt4(beta, delta);
    const auto g = ktlab::metric_kt4(beta, delta);
    const HeisenbergIndex J{1, {0}, 0};
    const auto sig = ktlab::galerkin_theta_singulars(acs, g, J, 6);
    REQUIRE(!sig.empty());
    CHECK(sig[0] < 1e-8);

    // Detuning beta in either direction removes the kernel.
    for (const ExactScalar& bd : {beta + S("1/1000"), beta - S("1/1000")}) {
        const auto acs_d = ktlab::preset_kt4(bd, delta);
        const auto g_d = ktlab::metric_kt4(bd, delta);
        const auto sig_d = ktlab::galerkin_theta_singulars(acs_d, g_d, J, 6);
        REQUIRE(!sig_d.empty());
        CHECK(sig_d[0] > 1e-6);
    }
}

// ============================================================================
// Full Galerkin counts vs the exact harmonic dimensions
// ============================================================================

TEST_CASE("galerkin count reproduces the 6d family dimensions") {
    GalerkinConfig cfg;  // defaults: R = 3, M = 2, L = 2, H = 6, eps = 1e-6

    // a b != 1: two harmonic directions.
    {
        const auto acs = ktlab::preset_kt6(S("2"), S("3"), S("5"));
        const auto g = ktlab::metric_kt6(S("2"), S("3"), S("5"), S("1"), S("1"), S("1"));
        const GalerkinResult res = ktlab::galerkin_kernel_count(acs, g, cfg);
        CHECK(res.kernel_count == 2);
        CHECK(!res.inconclusive);
    }
    // a b == 1 at the isotropic family metric: three.
    {
        const auto acs = ktlab::preset_kt6(S("1/3"), S("3"), S("2"));
        const auto g = ktlab::metric_kt6(S("1/3"), S("3"), S("2"), S("1"), S("1"), S("1"));
        const GalerkinResult res = ktlab::galerkin_kernel_count(acs, g, cfg);
        CHECK(res.kernel_count == 3);
        CHECK(!res.inconclusive);
    }
}

TEST_CASE("galerkin count sees the 4d resonance appear and disappear") {
    GalerkinConfig cfg;
    const ExactScalar delta = S("1");
    const ExactScalar beta = ktlab::kt4_resonant_beta(1, 1, delta);

    const GalerkinResult resonant = ktlab::galerkin_kernel_count(
        ktlab::preset_kt4(beta, delta), ktlab::metric_kt4(beta, delta), cfg);
    CHECK(!resonant.inconclusive);

    for (const ExactScalar& bd : {beta + S("1/1000"), beta - S("1/1000")}) {
        const GalerkinResult base = ktlab::galerkin_kernel_count(
            ktlab::preset_kt4(bd, delta), ktlab::metric_kt4(bd, delta), cfg);
        CHECK(!base.inconclusive);
        CHECK(resonant.kernel_count >= base.kernel_count + 1);
    }
}

TEST_CASE("zero-form kernel counts the constants and nothing else") {
    GalerkinConfig cfg;
    std::mt19937_64 rng(408u);
    CHECK(ktlab::zero_form_kernel_count(random_rational_metric(rng, 1), 1, cfg) == 1);
    const auto g6 = ktlab::metric_kt6(S("2"), S("3"), S("5"), S("1"), S("1"), S("1"));
    CHECK(ktlab::zero_form_kernel_count(g6, 2, cfg) == 1);
}

// ============================================================================
// Quadrature witnesses
// ============================================================================

namespace {

std::vector<BasisFunction> witness_functions() {
    std::vector<BasisFunction> funcs;
    const auto torus = [&](long p, long q, long l) {
        BasisFunction f;
        f.torus = true;
        f.I = TorusIndex{{p}, {q}, l};
        funcs.push_back(f);
    };
    const auto theta = [&](long m, long q, long l, long h) {
        BasisFunction f;
        f.torus = false;
        f.J = HeisenbergIndex{m, {q}, l};
        f.h = HermiteIndex{{h}};
        funcs.push_back(f);
    };
    torus(0, 0, 0);
    torus(1, 0, 0);
    torus(1, 2, -1);
    theta(1, 0, 0, 0);
    theta(1, 0, 0, 2);  // same sector as the previous entry
    theta(1, 0, 1, 0);
    theta(-1, 0, 0, 0);
    theta(2, 1, 1, 1);
    return funcs;
}

}  // namespace

TEST_CASE("grid quadrature: cross-sector couplings are at machine scale") {
    GalerkinConfig cfg;  // prime 17-point grid
    MetricParams g;
    g.a = S("1");
    g.b = {S("1")};
    g.c = {S("2")};
    g.d = S("1/2");
    const double worst = ktlab::max_cross_sector_entry(witness_functions(), 1, g, cfg);
    CHECK(worst < 1e-10);
}

TEST_CASE("grid quadrature: integration-by-parts sign convention holds") {
    GalerkinConfig cfg;
    MetricParams g;
    g.a = S("1");
    g.b = {S("1")};
    g.c = {S("2")};
    g.d = S("1/2");
    const double worst = ktlab::adjoint_pairing_error(witness_functions(), 1, g, cfg);
    CHECK(worst < 1e-4);
    // The grid sums are exact for these windows, so the actual residue is
    // far smaller than the nominal tolerance.
    CHECK(worst < 1e-8);
}
