#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "ktlab/linalg.hpp"
#include "ktlab/presets.hpp"
#include "ktlab/sector.hpp"

using namespace ktlab;

namespace {

ExactScalar rat(long num, long den = 1) { return ExactScalar(make_rational(num, den)); }

CoeffVec unit(const std::vector<long>& h) {
    CoeffVec v;
    v[h] = ExactScalar::one();
    return v;
}

}  // namespace

// ============================================================================
// Frame expansion
// ============================================================================

TEST_CASE("frame expansion of the 4d family over its natural metric") {
    const ExactScalar beta = rat(2), delta = rat(3);
    const AlmostComplexStructure acs = preset_kt4(beta, delta);
    const MetricParams g = metric_kt4(beta, delta);
    const FrameExpansion fe = frame_expansion(acs, g);

    const ExactScalar quarter = rat(1, 4);
    const ExactScalar iq = ExactScalar::i() * quarter;
    // 4 V_1 = (U_2 + conj U_2) - i (U_1 + conj U_1)
    CHECK(fe.u(0, 0) == -iq);
    CHECK(fe.ubar(0, 0) == -iq);
    CHECK(fe.u(0, 1) == quarter);
    CHECK(fe.ubar(0, 1) == quarter);
    // 4 V_2 = -(U_2 - conj U_2) - i (U_1 - conj U_1)
    CHECK(fe.u(1, 0) == -iq);
    CHECK(fe.ubar(1, 0) == iq);
    CHECK(fe.u(1, 1) == -quarter);
    CHECK(fe.ubar(1, 1) == quarter);
}

TEST_CASE("frame expansion rejects weights that do not divide in the ring") {
    const AlmostComplexStructure acs = preset_kt4(rat(2), rat(3));
    MetricParams g = metric_kt4(rat(2), rat(3));
    g.b[0] = ExactScalar::one() + ExactScalar::pi();  // positive, but 1/(1+pi) leaves the ring
    CHECK_THROWS_AS((void)frame_expansion(acs, g), std::domain_error);
}

// ============================================================================
// Scalar actions
// ============================================================================

TEST_CASE("scalar actions of the 4d family on a torus character") {
    const ExactScalar beta = rat(2), delta = rat(3);
    const AlmostComplexStructure acs = preset_kt4(beta, delta);
    const TorusIndex I{{1}, {2}, 5};

    const ExactScalar pi = ExactScalar::pi();
    const ExactScalar im = ExactScalar::i();
    const Vec v = scalar_actions(acs.A, I, 1);
    const Vec vbar = scalar_actions(acs.A.conj(), I, 1);

    // V_1 f_I = pi (i l + beta p) f_I, V_2 f_I = pi i q f_I.
    CHECK(v[0] == pi * (im * rat(5) + beta * rat(1)));
    CHECK(v[1] == pi * im * rat(2));
    CHECK(vbar[0] == pi * (im * rat(5) - beta * rat(1)));
    CHECK(vbar[1] == pi * im * rat(2));
}

// ============================================================================
// Gram matrices
// ============================================================================

TEST_CASE("Gram matrix of the 4d family coframe is diag(2,2)") {
    const AlmostComplexStructure acs = preset_kt4(rat(2), rat(3));
    const Matrix H = gram_01(acs, metric_kt4(rat(2), rat(3)));
    CHECK(H(0, 0) == rat(2));
    CHECK(H(1, 1) == rat(2));
    CHECK(H(0, 1).is_zero());
    CHECK(H(1, 0).is_zero());
}

TEST_CASE("Gram matrix of the 6d family coframe is diag(2/rho^2, 2/sigma^2, 2/tau^2)") {
    const ExactScalar a = rat(2), b = rat(3), c = rat(5);
    const ExactScalar rho = rat(2), sigma = rat(3), tau = rat(7);
    const AlmostComplexStructure acs = preset_kt6(a, b, c);
    const Matrix H = gram_01(acs, metric_kt6(a, b, c, rho, sigma, tau));
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            if (j != k) CHECK(H(j, k).is_zero());
    CHECK(H(0, 0) == rat(2, 4));
    CHECK(H(1, 1) == rat(2, 9));
    CHECK(H(2, 2) == rat(2, 49));
}

// ============================================================================
// Torsion constants
// ============================================================================

TEST_CASE("torsion constants of the 4d family") {
    const ExactScalar beta = rat(2), delta = rat(3);
    const std::vector<Matrix> T = torsion_02(preset_kt4(beta, delta));
    REQUIRE(T.size() == 2);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) CHECK(T[0](j, k).is_zero());
    // d conj(phi^2)|_(0,2) = -(beta/(4 delta)) conj(phi^1) ^ conj(phi^2).
    CHECK(T[1](0, 1) == -(beta / (rat(4) * delta)));
    CHECK(T[1](1, 0) == beta / (rat(4) * delta));
}

TEST_CASE("torsion constants of the 6d family") {
    const ExactScalar a = rat(2), b = rat(3), c = rat(5);
    const std::vector<Matrix> T = torsion_02(preset_kt6(a, b, c));
    REQUIRE(T.size() == 3);
    for (int l = 0; l < 2; ++l)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) CHECK(T[l](j, k).is_zero());
    // d conj(phi^3)|_(0,2) = -i ((ab-1)/(4c)) conj(phi^1) ^ conj(phi^2).
    const ExactScalar expected = -(ExactScalar::i() * (a * b - rat(1)) / (rat(4) * c));
    CHECK(T[2](0, 1) == expected);
    CHECK(T[2](0, 2).is_zero());
    CHECK(T[2](1, 2).is_zero());
}

// ============================================================================
// Torus sector systems
// ============================================================================

TEST_CASE("torus sector system of the 4d family matches the scalar reduction") {
    const ExactScalar beta = rat(2), delta = rat(3);
    const AlmostComplexStructure acs = preset_kt4(beta, delta);
    const MetricParams g = metric_kt4(beta, delta);
    const TorusIndex I{{1}, {2}, 5};
    const SectorSystem sys = s_sector_system(acs, g, I);

    REQUIRE(sys.equations.rows() == 2);
    REQUIRE(sys.equations.cols() == 2);
    CHECK(sys.provenance[0] == "dbar(1,2)");
    CHECK(sys.provenance[1] == "adjoint");

    const ExactScalar pi = ExactScalar::pi();
    const ExactScalar im = ExactScalar::i();
    // dbar row: -pi i q s_1 + [pi(i l - beta p) - beta/(4 delta)] s_2 = 0.
    CHECK(sys.equations(0, 0) == -(pi * im * rat(2)));
    CHECK(sys.equations(0, 1) == pi * (im * rat(5) - rat(2)) - rat(1, 6));
    // adjoint row: 2 pi (i l + beta p) s_1 + 2 pi i q s_2 = 0.
    CHECK(sys.equations(1, 0) == rat(2) * pi * (im * rat(5) + rat(2)));
    CHECK(sys.equations(1, 1) == rat(2) * pi * im * rat(2));
}

TEST_CASE("torus sector kernels at the invariant sector") {
    const TorusIndex zero4{{0}, {0}, 0};
    const auto kt4 = preset_kt4(rat(2), rat(3));
    auto k4 = kernel_basis(s_sector_system(kt4, metric_kt4(rat(2), rat(3)), zero4).equations);
    CHECK(k4.size() == 1);

    const TorusIndex zero6{{0, 0}, {0, 0}, 0};
    const auto one = ExactScalar::one();
    const auto generic = preset_kt6(rat(2), rat(3), rat(5));
    auto k6 = kernel_basis(
        s_sector_system(generic, metric_kt6(rat(2), rat(3), rat(5), one, one, one), zero6)
            .equations);
    CHECK(k6.size() == 2);

    const auto tangent = preset_kt6(rat(2), rat(1, 2), rat(5));  // a b == 1
    auto k6t = kernel_basis(
        s_sector_system(tangent, metric_kt6(rat(2), rat(1, 2), rat(5), one, one, one), zero6)
            .equations);
    CHECK(k6t.size() == 3);
}

// ============================================================================
// Theta sector ladder algebra
// ============================================================================

TEST_CASE("theta rows of the 4d family act with the expected exact coefficients") {
    const ExactScalar beta = rat(2), delta = rat(3);
    const AlmostComplexStructure acs = preset_kt4(beta, delta);
    const MetricParams g = metric_kt4(beta, delta);
    const HeisenbergIndex J{1, {0}, 4};
    const ThetaSystem sys = t_sector_system(acs, g, J);

    REQUIRE(sys.rows.size() == 2);
    CHECK(sys.provenance[0] == "dbar(1,2)");
    CHECK(sys.provenance[1] == "adjoint");
    // rho^2 = 2 pi |m| b c = 4 pi for beta = 2.
    const ExactScalar pi = ExactScalar::pi();
    const ExactScalar im = ExactScalar::i();
    CHECK(sys.algebra.rho_sq[0] == rat(4) * pi);

    const std::vector<long> h2{2}, h3{3}, h4{4};

    SUBCASE("dbar row on (ghat_3, 0)") {
        auto r = theta_apply_rows(sys, {unit(h3), CoeffVec{}});
        REQUIRE(r.size() == 2);
        // -conj(V_2) ghat_3 = pi delta m ghat_3 - i/4 ghat_4 - 6 i pi ghat_2.
        CHECK(r[0].at(h3) == rat(3) * pi);
        CHECK(r[0].at(h4) == -(im * rat(1, 4)));
        CHECK(r[0].at(h2) == -(im * rat(6) * pi));
        CHECK(r[0].size() == 3);
    }
    SUBCASE("dbar row on (0, ghat_3)") {
        auto r = theta_apply_rows(sys, {CoeffVec{}, unit(h3)});
        // [conj(V_1) + T] ghat_3 = (4 pi i - 1/6) ghat_3 - i/4 ghat_4 + 6 i pi ghat_2.
        CHECK(r[0].at(h3) == rat(4) * pi * im - rat(1, 6));
        CHECK(r[0].at(h4) == -(im * rat(1, 4)));
        CHECK(r[0].at(h2) == im * rat(6) * pi);
    }
    SUBCASE("adjoint row on (ghat_3, 0)") {
        auto r = theta_apply_rows(sys, {unit(h3), CoeffVec{}});
        // 2 V_1 ghat_3 = 8 pi i ghat_3 + i/2 ghat_4 - 12 i pi ghat_2.
        CHECK(r[1].at(h3) == rat(8) * pi * im);
        CHECK(r[1].at(h4) == im * rat(1, 2));
        CHECK(r[1].at(h2) == -(im * rat(12) * pi));
    }
    SUBCASE("adjoint row on (0, ghat_3)") {
        auto r = theta_apply_rows(sys, {CoeffVec{}, unit(h3)});
        // 2 V_2 ghat_3 = 6 pi ghat_3 + i/2 ghat_4 + 12 i pi ghat_2.
        CHECK(r[1].at(h3) == rat(6) * pi);
        CHECK(r[1].at(h4) == im * rat(1, 2));
        CHECK(r[1].at(h2) == im * rat(12) * pi);
    }
}

TEST_CASE("negative central weight swaps the raising and lowering roles") {
    const MetricParams g = metric_kt4(rat(2), rat(3));
    const ThetaAlgebra alg = theta_algebra(HeisenbergIndex{-1, {0}, 0}, g, 1);
    const LadderOp u{{LadderAtom::Kind::U, 0, ExactScalar::one()}};
    const LadderOp ubar{{LadderAtom::Kind::Ubar, 0, ExactScalar::one()}};

    auto lowered = alg.apply(u, unit({2}));
    REQUIRE(lowered.size() == 1);
    CHECK(lowered.at({1}) == rat(4) * alg.rho_sq[0]);  // 2 h rho^2 at h = 2

    auto raised = alg.apply(ubar, unit({2}));
    REQUIRE(raised.size() == 1);
    CHECK(raised.at({3}) == -ExactScalar::one());

    CHECK(alg.apply(u, unit({0})).empty());  // lowering annihilates h = 0
}

TEST_CASE("a twist offsets both ladder legs by the same constant") {
    const MetricParams g = metric_kt4(rat(2), rat(3));
    ThetaAlgebra alg = theta_algebra(HeisenbergIndex{1, {0}, 0}, g, 1);
    const ExactScalar omega = ExactScalar::i() * rat(-1, 6);
    alg.twist[0] = omega;

    const LadderOp u{{LadderAtom::Kind::U, 0, ExactScalar::one()}};
    const LadderOp ubar{{LadderAtom::Kind::Ubar, 0, ExactScalar::one()}};

    auto ru = alg.apply(u, unit({1}));
    CHECK(ru.at({2}) == -ExactScalar::one());
    CHECK(ru.at({1}) == omega);

    auto rb = alg.apply(ubar, unit({1}));
    CHECK(rb.at({0}) == rat(2) * alg.rho_sq[0]);
    CHECK(rb.at({1}) == omega);
}

TEST_CASE("theta rows of the 6d family carry the torsion constant") {
    const ExactScalar a = rat(2), b = rat(3), c = rat(5);
    const auto one = ExactScalar::one();
    const ThetaSystem sys = t_sector_system(preset_kt6(a, b, c),
                                            metric_kt6(a, b, c, one, one, one),
                                            HeisenbergIndex{2, {1, 0}, -1});
    REQUIRE(sys.rows.size() == 4);
    CHECK(sys.provenance[0] == "dbar(1,2)");
    CHECK(sys.provenance[3] == "adjoint");

    // Row dbar(1,2) carries the identity atom -i (ab-1)/(4c) on s_3.
    const ExactScalar expected = -(ExactScalar::i() * (a * b - rat(1)) / (rat(4) * c));
    ExactScalar found;
    for (const LadderAtom& atom : sys.rows[0][2])
        if (atom.kind == LadderAtom::Kind::Identity) found = found + atom.coeff;
    CHECK(found == expected);
}
