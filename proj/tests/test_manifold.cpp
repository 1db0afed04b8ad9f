#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "ktlab/acs.hpp"
#include "ktlab/manifold.hpp"
#include "ktlab/presets.hpp"

using ktlab::AlmostComplexStructure;
using ktlab::ExactScalar;
using ktlab::InvariantForm;
using ktlab::make_rational;
using ktlab::ManifoldModel;
using ktlab::Matrix;
using ktlab::wedge;

namespace {

ExactScalar S(const std::string& text) { return ktlab::scalar_parse(text); }

InvariantForm random_form(std::mt19937_64& rng, const ManifoldModel& model, int degree) {
    std::uniform_int_distribution<int> slot(0, model.dim() - 1);
    std::uniform_int_distribution<long> num(-3, 3);
    std::uniform_int_distribution<int> nterms(1, 4);
    InvariantForm f(degree);
    for (int t = nterms(rng); t > 0; --t) {
        std::vector<int> idx;
        for (int k = 0; k < degree; ++k) idx.push_back(slot(rng));
        ExactScalar c(num(rng));
        if (num(rng) > 1) c = c * ktlab::ExactScalar::pi();
        f.add_term(std::move(idx), c);
    }
    return f;
}

/// Random almost complex structure with Gaussian-rational entries; resampled
/// until the complexified frame matrix is invertible.
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

std::vector<ExactScalar> frame_vector(const AlmostComplexStructure& acs, int k, bool conjugate) {
    std::vector<ExactScalar> v;
    for (int i = 0; i < acs.A.rows(); ++i)
        v.push_back(conjugate ? acs.A(i, k).conj() : acs.A(i, k));
    return v;
}

}  // namespace

TEST_CASE("exterior derivative of coframe generators") {
    const ManifoldModel m2(2);
    // Slots for n=2: e^1=0, e^2=1, e^3=2, f^1=3, f^2=4, f^3=5.
    const InvariantForm de3 = exterior_d(InvariantForm::generator(2), m2);
    InvariantForm expect(2);
    expect.add_term({0, 3}, ExactScalar(-1));
    expect.add_term({1, 4}, ExactScalar(-1));
    CHECK(de3 == expect);
    CHECK(exterior_d(InvariantForm::generator(0), m2).is_zero());
    CHECK(exterior_d(InvariantForm::generator(5), m2).is_zero());

    // d(d(e^{n+1} ^ f^1)) = 0.
    const InvariantForm w = wedge(InvariantForm::generator(2), InvariantForm::generator(3));
    CHECK(exterior_d(exterior_d(w, m2), m2).is_zero());
}

TEST_CASE("d^2 = 0 and wedge algebra on random forms") {
    const ManifoldModel m2(2);
    std::mt19937_64 rng(11u);
    for (int iter = 0; iter < 30; ++iter) {
        const int da = 1 + iter % 3;
        const int db = 1 + (iter / 3) % 2;
        const InvariantForm a = random_form(rng, m2, da);
        const InvariantForm b = random_form(rng, m2, db);
        const InvariantForm c = random_form(rng, m2, 1);

        CHECK(exterior_d(exterior_d(a, m2), m2).is_zero());

        // Graded commutativity: a^b = (-1)^{|a||b|} b^a.
        InvariantForm ba = wedge(b, a);
        if ((da * db) % 2 == 1) ba = -ba;
        CHECK(wedge(a, b) == ba);
        CHECK(wedge(wedge(a, b), c) == wedge(a, wedge(b, c)));

        // Leibniz: d(a^b) = da^b + (-1)^{|a|} a^db.
        InvariantForm leibniz = wedge(exterior_d(a, m2), b);
        InvariantForm second = wedge(a, exterior_d(b, m2));
        if (da % 2 == 1) second = -second;
        CHECK(exterior_d(wedge(a, b), m2) == leibniz + second);
    }
}

TEST_CASE("dual coframe of the kt4 preset") {
    const auto acs = ktlab::preset_kt4(S("2"), S("3"));
    const auto dc = ktlab::dual_coframe(acs);
    REQUIRE(dc.phi.size() == 2);
    // phi^1 = dt + (i/2) dx: slots e^1=0, e^2=1, f^1=2, f^2=3.
    CHECK(dc.phi[0].coefficient({3}) == ExactScalar(1));
    CHECK(dc.phi[0].coefficient({0}) == S("i/2"));
    CHECK(dc.phi[0].coefficient({1}).is_zero());
    CHECK(dc.phi[0].coefficient({2}).is_zero());
    // phi^2 = dy + (i/3)(dz - x dy) = f^1 + (i/3) e^2.
    CHECK(dc.phi[1].coefficient({2}) == ExactScalar(1));
    CHECK(dc.phi[1].coefficient({1}) == S("i/3"));
}

TEST_CASE("dual coframe of the kt6 preset") {
    const auto acs = ktlab::preset_kt6(S("2"), S("3"), S("5"));
    const auto dc = ktlab::dual_coframe(acs);
    REQUIRE(dc.phi.size() == 3);
    // Slots: e^1=0, e^2=1, e^3=2, f^1=3, f^2=4, f^3=5.
    CHECK(dc.phi[0].coefficient({0}) == ExactScalar(1));   // dx_1
    CHECK(dc.phi[0].coefficient({1}) == S("i/2"));         // (i/a) dx_2
    CHECK(dc.phi[1].coefficient({3}) == ExactScalar(1));   // dy_1
    CHECK(dc.phi[1].coefficient({4}) == S("i/3"));         // (i/b) dy_2
    CHECK(dc.phi[2].coefficient({5}) == ExactScalar(1));   // dt
    CHECK(dc.phi[2].coefficient({2}) == S("i/5"));         // (i/c) e^3
}

TEST_CASE("duality pairing is exact for presets and random structures") {
    std::mt19937_64 rng(5u);
    std::vector<AlmostComplexStructure> cases = {
        ktlab::preset_kt4(S("2"), S("3")),
        ktlab::preset_kt4(S("1"), S("1/4/pi")),
        ktlab::preset_kt6(S("2"), S("3"), S("5")),
    };
    for (int iter = 0; iter < 5; ++iter) cases.push_back(random_rational_acs(rng, 1));
    for (int iter = 0; iter < 3; ++iter) cases.push_back(random_rational_acs(rng, 2));

    for (const auto& acs : cases) {
        const ManifoldModel model = acs.model();
        const auto dc = ktlab::dual_coframe(acs);
        const int m = acs.n + 1;
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < m; ++k) {
                const ExactScalar holo = pair_one_form(dc.phi[j], frame_vector(acs, k, false), model);
                const ExactScalar anti = pair_one_form(dc.phi[j], frame_vector(acs, k, true), model);
                CHECK(holo == (j == k ? ExactScalar(1) : ExactScalar()));
                CHECK(anti.is_zero());
            }
        }
        // Conjugate rows of the coframe matrix pair with the conjugate frame.
        for (int j = 0; j < m; ++j)
            for (int c = 0; c < model.dim(); ++c)
                CHECK(dc.complex_from_real(m + j, c) == dc.complex_from_real(j, c).conj());
    }
}

TEST_CASE("bidegree split of d phi^2 on kt4") {
    const ExactScalar beta = S("2"), delta = S("3");
    const auto acs = ktlab::preset_kt4(beta, delta);
    const auto dc = ktlab::dual_coframe(acs);
    const ManifoldModel model = acs.model();

    CHECK(exterior_d(dc.phi[0], model).is_zero());  // d phi^1 = 0

    const InvariantForm dphi2 = exterior_d(dc.phi[1], model);
    const auto parts = ktlab::bidegree_split(dphi2, acs);
    // Expected: -(beta/(4 delta)) (phi^{12} + phi^{1 2bar} + phi^{2 1bar} - phi^{1bar 2bar}).
    const ExactScalar coef = -(beta / (ExactScalar(4) * delta));
    // Complex slots: phi^1=0, phi^2=1, conj1=2, conj2=3.
    REQUIRE(parts.count({2, 0}) == 1);
    CHECK(parts.at({2, 0}).coefficient({0, 1}) == coef);
    REQUIRE(parts.count({1, 1}) == 1);
    CHECK(parts.at({1, 1}).coefficient({0, 3}) == coef);   // phi^1 ^ conj phi^2
    CHECK(parts.at({1, 1}).coefficient({1, 2}) == coef);   // phi^2 ^ conj phi^1
    REQUIRE(parts.count({0, 2}) == 1);
    CHECK(parts.at({0, 2}).coefficient({2, 3}) == -coef);

    // Components convert back and sum to the input.
    InvariantForm back(dphi2.degree());
    for (const auto& [pq, comp] : parts) back = back + ktlab::complex_to_real(comp, dc);
    CHECK(back == dphi2);
}

TEST_CASE("bidegree split of d phi^3 on kt6") {
    const ExactScalar a = S("2"), b = S("3"), c = S("5");
    const auto acs = ktlab::preset_kt6(a, b, c);
    const auto dc = ktlab::dual_coframe(acs);
    const ManifoldModel model = acs.model();

    CHECK(exterior_d(dc.phi[0], model).is_zero());
    CHECK(exterior_d(dc.phi[1], model).is_zero());

    const InvariantForm dphi3 = exterior_d(dc.phi[2], model);
    const auto parts = ktlab::bidegree_split(dphi3, acs);
    // i(ab-1)/(4c) (phi^{12} + conj) + i(ab+1)/(4c)(phi^{2 1bar} - phi^{1 2bar}).
    const ExactScalar four_c = ExactScalar(4) * c;
    const ExactScalar c20 = ExactScalar::i() * (a * b - ExactScalar(1)) / four_c;
    const ExactScalar c11 = ExactScalar::i() * (a * b + ExactScalar(1)) / four_c;
    // Complex slots: phi^1=0, phi^2=1, phi^3=2, conj1=3, conj2=4, conj3=5.
    CHECK(parts.at({2, 0}).coefficient({0, 1}) == c20);
    CHECK(parts.at({0, 2}).coefficient({3, 4}) == c20);
    CHECK(parts.at({1, 1}).coefficient({1, 3}) == c11);    // phi^{2 1bar}
    CHECK(parts.at({1, 1}).coefficient({0, 4}) == -c11);   // -phi^{1 2bar}
    CHECK(parts.count({1, 1}) == 1);

    InvariantForm back(dphi3.degree());
    for (const auto& [pq, comp] : parts) back = back + ktlab::complex_to_real(comp, dc);
    CHECK(back == dphi3);
}

TEST_CASE("torsion vector of the preset families") {
    SUBCASE("kt4: C = (beta/(4 delta), 0)") {
        const auto tv = ktlab::torsion_vector(ktlab::preset_kt4(S("2"), S("3")));
        REQUIRE(tv.C.size() == 2);
        CHECK(tv.C[0] == S("1/6"));
        CHECK(tv.C[1].is_zero());
    }
    SUBCASE("kt4 with delta = 1/(4 pi): C_1 = beta*pi") {
        const auto tv = ktlab::torsion_vector(ktlab::preset_kt4(S("1"), S("1/4/pi")));
        CHECK(tv.C[0] == ktlab::ExactScalar::pi());
        CHECK(tv.C[1].is_zero());
    }
    SUBCASE("kt6: C = 0") {
        const auto tv = ktlab::torsion_vector(ktlab::preset_kt6(S("2"), S("3"), S("5")));
        REQUIRE(tv.C.size() == 3);
        for (const auto& c : tv.C) CHECK(c.is_zero());
    }
    SUBCASE("paired flat directions give zero torsion") {
        // V_1 = (dz - i dt)/2, V_2 = (dx - i Y)/2: d(phi^1^phi^2) = 0.
        AlmostComplexStructure acs;
        acs.n = 1;
        acs.A = Matrix(4, 2);
        acs.A(2, 0) = S("1/2");
        acs.A(3, 0) = S("-i/2");
        acs.A(0, 1) = S("1/2");
        acs.A(1, 1) = S("-i/2");
        const auto tv = ktlab::torsion_vector(acs);
        CHECK(tv.C[0].is_zero());
        CHECK(tv.C[1].is_zero());
    }
}

TEST_CASE("torsion defining identity on random structures") {
    std::mt19937_64 rng(17u);
    for (int iter = 0; iter < 8; ++iter) {
        const int n = 1 + iter % 2;
        const auto acs = random_rational_acs(rng, n);
        const auto dc = ktlab::dual_coframe(acs);
        const ManifoldModel model = acs.model();
        const int m = n + 1;

        InvariantForm omega = dc.phi[0];
        for (int j = 1; j < m; ++j) omega = wedge(omega, dc.phi[j]);
        const auto parts = ktlab::bidegree_split(exterior_d(omega, model), acs);
        const auto tv = ktlab::torsion_vector(acs);

        // (sum_j C_j conj(phi^j)) ^ omega in complex coordinates.
        InvariantForm cbar(1);
        for (int j = 0; j < m; ++j) cbar.add_term({m + j}, tv.C[static_cast<size_t>(j)]);
        InvariantForm omega_c(m);
        std::vector<int> key;
        for (int k = 0; k < m; ++k) key.push_back(k);
        omega_c.add_term(key, ExactScalar(1));
        const InvariantForm rhs = wedge(cbar, omega_c);

        const auto it = parts.find({m, 1});
        const InvariantForm lhs = (it == parts.end()) ? InvariantForm(m + 1) : it->second;
        CHECK(lhs == rhs);
    }
}

TEST_CASE("spanning validation") {
    CHECK(ktlab::acs_spans(ktlab::preset_kt4(S("2"), S("3"))));
    CHECK(ktlab::acs_spans(ktlab::preset_kt6(S("1"), S("1"), S("1"))));
    AlmostComplexStructure bad;
    bad.n = 1;
    bad.A = Matrix(4, 2);
    bad.A(0, 0) = ExactScalar(1);
    bad.A(0, 1) = ExactScalar(2);  // V_2 parallel to V_1
    CHECK_FALSE(ktlab::acs_spans(bad));
    CHECK_THROWS_AS(ktlab::dual_coframe(bad), std::invalid_argument);
}
