#pragma once

/**
 * @file scalar.hpp
 * @brief Exact scalar arithmetic over Gaussian rationals extended by a formal
 *        transcendental Pi and (optionally) one real quadratic surd sqrt(D).
 *
 * The scalar ring used throughout the library is the ring of Laurent
 * polynomials in a formal symbol Pi whose coefficients live in the field
 *
 *     F = Q(i)[sqrt(D)]   (one square-free D >= 2 per value-universe),
 *
 * i.e. every scalar is a finite sum  sum_k  c_k * Pi^k  with integer k
 * (negative exponents allowed, so constants such as 1/(4*pi) are honest ring
 * elements) and c_k in F.  Pi is treated as transcendental: a scalar is zero
 * if and only if every stored coefficient is zero, so identities that mix
 * distinct powers of Pi can be decided coefficient-wise.
 *
 * F is genuinely a field: for square-free D >= 2, D is not a square in Q(i)
 * (a square in Q(i) that is real is either a rational square or negative),
 * hence u^2 - D v^2 != 0 for (u,v) != 0 and the usual conjugation formula
 * inverts u + v*sqrt(D).
 *
 * Division of scalars is *exact* division: a/b is defined exactly when b is
 * nonzero and b divides a in the Laurent ring (remainder zero); otherwise it
 * is a domain error.  Divisors that are units (c * Pi^k with c != 0) always
 * succeed, so dividing by rationals, by i, by surds and by powers of pi is
 * total.  Fraction-free elimination keeps all solver-internal divisions exact.
 *
 * Text syntax (used by the parser and printer):
 *
 *     expr     := ['-'] term (('+'|'-') term)*
 *     term     := factor (('*'|'/') factor)*
 *     factor   := rational | 'i' | 'pi' | 'sqrt(' integer ')' | '(' expr ')'
 *     rational := integer ['/' positive-integer]
 *
 * Printing is canonical: parse(print(s)) == s exactly, and printing again
 * reproduces the same text.
 *
 * Values are immutable in spirit: all operations return new values and never
 * mutate shared state, so scalars are safe to share across threads.
 */

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace ktlab {

/// Arbitrary-precision rational, always kept in lowest terms with positive
/// denominator (GMP canonical form).
using Rational = mpq_class;

/// Build a canonical rational from a numerator/denominator pair.
[[nodiscard]] Rational make_rational(long num, long den = 1);

/// Parse "n" or "n/d" into a canonical rational (throws std::invalid_argument).
[[nodiscard]] Rational parse_rational(const std::string& text);

/// Canonical decimal-ish text for a rational: "n" or "n/d".
[[nodiscard]] std::string rational_to_string(const Rational& r);

// ============================================================================
// GaussQ: Gaussian rationals a + b*i
// ============================================================================

/**
 * @brief Element of Q(i): re + im*i with exact rational parts.
 */
struct GaussQ {
    Rational re;
    Rational im;

    GaussQ() : re(0), im(0) {}
    GaussQ(Rational r) : re(std::move(r)), im(0) {}
    GaussQ(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    [[nodiscard]] bool is_zero() const { return re == 0 && im == 0; }
    [[nodiscard]] bool is_real() const { return im == 0; }

    [[nodiscard]] GaussQ conj() const { return GaussQ(re, -im); }

    /// Multiplicative inverse; throws std::domain_error on zero.
    [[nodiscard]] GaussQ inv() const;

    GaussQ operator-() const { return GaussQ(-re, -im); }
    GaussQ operator+(const GaussQ& o) const { return GaussQ(re + o.re, im + o.im); }
    GaussQ operator-(const GaussQ& o) const { return GaussQ(re - o.re, im - o.im); }
    GaussQ operator*(const GaussQ& o) const {
        return GaussQ(re * o.re - im * o.im, re * o.im + im * o.re);
    }
    bool operator==(const GaussQ& o) const { return re == o.re && im == o.im; }
};

// ============================================================================
// SurdCoeff: elements of F = Q(i) + Q(i)*sqrt(D)
// ============================================================================

/**
 * @brief Coefficient field element u + v*sqrt(d) with u, v Gaussian rational.
 *
 * d == 0 encodes "no surd part" (then v == 0 canonically).  Mixing two
 * distinct nonzero d's in one arithmetic operation is a domain error: the
 * library supports a single quadratic extension at a time.
 */
struct SurdCoeff {
    GaussQ u;      ///< surd-free part
    GaussQ v;      ///< coefficient of sqrt(d)
    long d{0};     ///< square-free radicand >= 2, or 0 when v == 0

    SurdCoeff() = default;
    SurdCoeff(GaussQ u0) : u(std::move(u0)), v(), d(0) {}
    SurdCoeff(GaussQ u0, GaussQ v0, long d0);

    [[nodiscard]] bool is_zero() const { return u.is_zero() && v.is_zero(); }
    [[nodiscard]] bool is_real() const { return u.is_real() && v.is_real(); }
    [[nodiscard]] bool is_gauss() const { return v.is_zero(); }
    [[nodiscard]] bool is_rational() const { return v.is_zero() && u.is_real(); }

    /// Complex conjugation (sqrt(d) is real, so only i flips sign).
    [[nodiscard]] SurdCoeff conj() const { return SurdCoeff(u.conj(), v.conj(), d); }

    /// Multiplicative inverse in F; throws std::domain_error on zero.
    [[nodiscard]] SurdCoeff inv() const;

    /// Exact sign of a *real* value (throws std::domain_error if not real).
    [[nodiscard]] int sign_real() const;

    SurdCoeff operator-() const { return SurdCoeff(-u, -v, d); }
    SurdCoeff operator+(const SurdCoeff& o) const;
    SurdCoeff operator-(const SurdCoeff& o) const { return *this + (-o); }
    SurdCoeff operator*(const SurdCoeff& o) const;
    bool operator==(const SurdCoeff& o) const;

    /// Common radicand of two operands; throws on two distinct nonzero d's.
    static long unify_radicand(const SurdCoeff& a, const SurdCoeff& b);
};

// ============================================================================
// ExactScalar: Laurent polynomials in Pi over F
// ============================================================================

/**
 * @brief The library's exact scalar: finite sum of c_k * Pi^k, c_k in F, k in Z.
 *
 * Zero coefficients are pruned eagerly, so the zero scalar is the empty map
 * and equality/zero-testing is purely structural.
 */
class ExactScalar {
public:
    ExactScalar() = default;
    ExactScalar(long n) { set_term(0, SurdCoeff(GaussQ(make_rational(n)))); }
    ExactScalar(const Rational& r) { set_term(0, SurdCoeff(GaussQ(r))); }
    explicit ExactScalar(const SurdCoeff& c) { set_term(0, c); }

    // Factory methods -------------------------------------------------------

    /// The multiplicative unit.
    [[nodiscard]] static ExactScalar one() { return ExactScalar(1L); }
    /// The formal transcendental Pi raised to an integer power (default 1).
    [[nodiscard]] static ExactScalar pi(int exponent = 1);
    /// The imaginary unit.
    [[nodiscard]] static ExactScalar i();
    /// sqrt(k) for a nonnegative integer k: square part is extracted exactly,
    /// the square-free remainder becomes the surd (throws on negative k).
    [[nodiscard]] static ExactScalar sqrt_int(long k);
    /// Monomial c * Pi^k.
    [[nodiscard]] static ExactScalar monomial(const SurdCoeff& c, int k);

    /// Parse the scalar grammar; throws std::invalid_argument (syntax),
    /// std::domain_error (inexact division / second distinct surd).
    [[nodiscard]] static ExactScalar parse(const std::string& text);

    // Predicates -------------------------------------------------------------

    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    [[nodiscard]] bool is_rational() const;
    [[nodiscard]] bool is_real() const;
    /// True when the scalar is c * Pi^0 with c Gaussian-rational (no surd).
    [[nodiscard]] bool is_gauss_constant() const;
    /// True when the scalar is a unit: a single term c * Pi^k.
    [[nodiscard]] bool is_monomial() const { return terms_.size() == 1; }

    /// The rational value; throws std::domain_error when not rational.
    [[nodiscard]] Rational to_rational() const;

    /// Exact sign for real scalars that are Pi-free; for Pi-dependent real
    /// scalars falls back to the double projection (documented best effort).
    [[nodiscard]] int sign_real() const;
    [[nodiscard]] bool is_positive_real() const { return !is_zero() && sign_real() > 0; }

    // Arithmetic -------------------------------------------------------------

    ExactScalar operator-() const;
    ExactScalar operator+(const ExactScalar& o) const;
    ExactScalar operator-(const ExactScalar& o) const;
    ExactScalar operator*(const ExactScalar& o) const;

    /// Exact division; throws std::domain_error when the divisor is zero or
    /// the quotient would leave the ring.
    ExactScalar operator/(const ExactScalar& o) const;

    /// Exact division returning std::nullopt instead of throwing on an
    /// inexact quotient (still throws on division by zero).
    [[nodiscard]] std::optional<ExactScalar> try_divide(const ExactScalar& o) const;

    [[nodiscard]] ExactScalar pow(int e) const;
    /// Complex conjugation (Pi and sqrt(D) are real).
    [[nodiscard]] ExactScalar conj() const;

    bool operator==(const ExactScalar& o) const { return (*this - o).is_zero(); }
    bool operator!=(const ExactScalar& o) const { return !(*this == o); }

    // Projection / printing --------------------------------------------------

    /**
     * @brief Evaluate at numeric Pi and sqrt(D) values in any real type.
     *
     * Deterministic evaluation order: Horner over the exponent range for the
     * real part, then the imaginary part, then one multiplication by
     * Pi^{min exponent}.  Instantiate with double (the default projection) or
     * a high-precision type for independent cross-checks.
     */
    template <class Real>
    [[nodiscard]] std::complex<Real> eval(const Real& pi_value, const Real& sqrt_d_value) const {
        if (terms_.empty()) return {Real(0), Real(0)};
        const int lo = terms_.begin()->first;
        const int hi = terms_.rbegin()->first;
        Real acc_re(0), acc_im(0);
        for (int k = hi; k >= lo; --k) {
            acc_re = acc_re * pi_value;
            acc_im = acc_im * pi_value;
            auto it = terms_.find(k);
            if (it == terms_.end()) continue;
            const SurdCoeff& c = it->second;
            acc_re += rational_cast<Real>(c.u.re) + sqrt_d_value * rational_cast<Real>(c.v.re);
            acc_im += rational_cast<Real>(c.u.im) + sqrt_d_value * rational_cast<Real>(c.v.im);
        }
        Real shift(1);
        if (lo > 0) {
            for (int k = 0; k < lo; ++k) shift = shift * pi_value;
        } else if (lo < 0) {
            for (int k = 0; k < -lo; ++k) shift = shift * pi_value;
            shift = Real(1) / shift;
        }
        return {acc_re * shift, acc_im * shift};
    }

    /// Double projection at IEEE pi and sqrt(D).
    [[nodiscard]] std::complex<double> to_complex() const;

    /// Canonical grammar text (round-trips through parse()).
    [[nodiscard]] std::string to_string() const;

    // Structure access -------------------------------------------------------

    [[nodiscard]] const std::map<int, SurdCoeff>& terms() const { return terms_; }
    [[nodiscard]] int min_exponent() const;
    [[nodiscard]] int max_exponent() const;
    /// Radicand used by any coefficient (0 when surd-free).
    [[nodiscard]] long radicand() const;

    /// Convert a rational to any real type via numerator/denominator.
    template <class Real>
    [[nodiscard]] static Real rational_cast(const Rational& r) {
        if constexpr (std::is_same_v<Real, double>) {
            return r.get_d();
        } else {
            return Real(r.get_num().get_str()) / Real(r.get_den().get_str());
        }
    }

private:
    void set_term(int k, const SurdCoeff& c);
    std::map<int, SurdCoeff> terms_;
};

// Convenience free functions matching the public operation vocabulary --------

/// Real part (s + conj s)/2 as a ring element.
[[nodiscard]] inline ExactScalar real_part(const ExactScalar& s) {
    return (s + s.conj()) * ExactScalar(make_rational(1, 2));
}

/// Imaginary part -i (s - conj s)/2 as a (real) ring element.
[[nodiscard]] inline ExactScalar imag_part(const ExactScalar& s) {
    return (s - s.conj()) * ExactScalar(make_rational(1, 2)) * (-ExactScalar::i());
}

/// Parse text in the scalar grammar (alias of ExactScalar::parse).
[[nodiscard]] ExactScalar scalar_parse(const std::string& text);

/// Structural zero test (alias of ExactScalar::is_zero).
[[nodiscard]] bool scalar_is_zero(const ExactScalar& s);

/// Deterministic complex-double projection (alias of to_complex).
[[nodiscard]] std::complex<double> scalar_to_float(const ExactScalar& s);

/**
 * @brief Exact square root within the ring, when one exists.
 *
 * Succeeds for monomials r * Pi^{2k} with r a positive rational whose square
 * root stays in the ring (a rational square, or rational * sqrt(D) for the
 * active surd).  Returns std::nullopt when the value has no representable
 * square root; throws std::domain_error for negative real inputs.
 */
[[nodiscard]] std::optional<ExactScalar> scalar_sqrt(const ExactScalar& s);

}  // namespace ktlab
