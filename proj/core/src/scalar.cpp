#include "ktlab/scalar.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace ktlab {

namespace {

int sgn(const Rational& r) { return ::sgn(r); }

long unify_radicands(long a, long b) {
    if (a == 0) return b;
    if (b == 0 || a == b) return a;
    throw std::domain_error("scalar ring supports a single square root per session: saw sqrt(" +
                            std::to_string(a) + ") and sqrt(" + std::to_string(b) + ")");
}

}  // namespace

Rational make_rational(long num, long den) {
    if (den == 0) throw std::domain_error("make_rational: zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            Rational r(mpz_class(text), 1);
            r.canonicalize();
            return r;
        }
        mpz_class num(text.substr(0, slash));
        mpz_class den(text.substr(slash + 1));
        if (den <= 0) throw std::invalid_argument("denominator must be positive");
        Rational r(num, den);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("parse_rational: malformed rational '" + text + "'");
    }
}

std::string rational_to_string(const Rational& r) { return r.get_str(); }

// ============================================================================
// GaussQ
// ============================================================================

GaussQ GaussQ::inv() const {
    if (is_zero()) throw std::domain_error("GaussQ::inv: division by zero");
    Rational n = re * re + im * im;
    return GaussQ(re / n, -im / n);
}

// ============================================================================
// SurdCoeff
// ============================================================================

SurdCoeff::SurdCoeff(GaussQ u0, GaussQ v0, long d0) : u(std::move(u0)), v(std::move(v0)), d(d0) {
    if (v.is_zero()) {
        d = 0;
    } else if (d < 2) {
        throw std::domain_error("SurdCoeff: radicand must be a square-free integer >= 2");
    }
}

long SurdCoeff::unify_radicand(const SurdCoeff& a, const SurdCoeff& b) {
    if (a.d == 0) return b.d;
    if (b.d == 0 || a.d == b.d) return a.d;
    throw std::domain_error("scalar ring supports a single square root per session: saw sqrt(" +
                            std::to_string(a.d) + ") and sqrt(" + std::to_string(b.d) + ")");
}

SurdCoeff SurdCoeff::operator+(const SurdCoeff& o) const {
    const long dd = unify_radicand(*this, o);
    return SurdCoeff(u + o.u, v + o.v, dd);
}

SurdCoeff SurdCoeff::operator*(const SurdCoeff& o) const {
    const long dd = unify_radicand(*this, o);
    const GaussQ rad{Rational(dd)};
    return SurdCoeff(u * o.u + rad * (v * o.v), u * o.v + v * o.u, dd);
}

bool SurdCoeff::operator==(const SurdCoeff& o) const {
    return (*this - o).is_zero();
}

SurdCoeff SurdCoeff::inv() const {
    if (is_zero()) throw std::domain_error("SurdCoeff::inv: division by zero");
    if (v.is_zero()) return SurdCoeff(u.inv());
    // (u + v sqrt(d))^{-1} = (u - v sqrt(d)) / (u^2 - d v^2); the norm is
    // nonzero because a square-free d >= 2 is not a square in Q(i).
    const GaussQ norm = u * u - GaussQ(Rational(d)) * (v * v);
    if (norm.is_zero()) throw std::domain_error("SurdCoeff::inv: degenerate surd norm");
    const GaussQ ninv = norm.inv();
    return SurdCoeff(u * ninv, -(v * ninv), d);
}

int SurdCoeff::sign_real() const {
    if (!is_real()) throw std::domain_error("SurdCoeff::sign_real: value is not real");
    const Rational& a = u.re;
    const Rational& b = v.re;
    if (b == 0) return sgn(a);
    if (a == 0) return sgn(b);
    if (a > 0 && b > 0) return 1;
    if (a < 0 && b < 0) return -1;
    // Mixed signs: compare a^2 against d b^2 (sqrt(d) irrational, never equal).
    const Rational lhs = a * a;
    const Rational rhs = Rational(d) * b * b;
    if (a > 0) return lhs > rhs ? 1 : -1;
    return lhs > rhs ? -1 : 1;
}

// ============================================================================
// ExactScalar
// ============================================================================

void ExactScalar::set_term(int k, const SurdCoeff& c) {
    if (c.is_zero()) {
        terms_.erase(k);
    } else {
        terms_.insert_or_assign(k, c);
    }
}

ExactScalar ExactScalar::pi(int exponent) {
    ExactScalar s;
    s.set_term(exponent, SurdCoeff(GaussQ(make_rational(1))));
    return s;
}

ExactScalar ExactScalar::i() {
    ExactScalar s;
    s.set_term(0, SurdCoeff(GaussQ(make_rational(0), make_rational(1))));
    return s;
}

ExactScalar ExactScalar::sqrt_int(long k) {
    if (k < 0) throw std::domain_error("sqrt of a negative integer is not in the scalar ring");
    if (k == 0) return ExactScalar();
    // Extract the largest square divisor: k = s^2 * f with f square-free.
    long s = 1, f = k;
    for (long p = 2; p * p <= f; ++p) {
        while (f % (p * p) == 0) {
            f /= p * p;
            s *= p;
        }
    }
    if (f == 1) return ExactScalar(make_rational(s));
    ExactScalar out;
    out.set_term(0, SurdCoeff(GaussQ(), GaussQ(make_rational(s)), f));
    return out;
}

ExactScalar ExactScalar::monomial(const SurdCoeff& c, int k) {
    ExactScalar s;
    s.set_term(k, c);
    return s;
}

long ExactScalar::radicand() const {
    long d = 0;
    for (const auto& [k, c] : terms_) {
        if (c.d != 0) {
            if (d == 0) {
                d = c.d;
            } else if (d != c.d) {
                throw std::domain_error("scalar mixes two distinct square roots");
            }
        }
    }
    return d;
}

bool ExactScalar::is_rational() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && terms_.begin()->first == 0 && terms_.begin()->second.is_rational();
}

bool ExactScalar::is_real() const {
    for (const auto& [k, c] : terms_) {
        if (!c.is_real()) return false;
    }
    return true;
}

bool ExactScalar::is_gauss_constant() const {
    if (terms_.empty()) return true;
    return terms_.size() == 1 && terms_.begin()->first == 0 && terms_.begin()->second.is_gauss();
}

Rational ExactScalar::to_rational() const {
    if (terms_.empty()) return Rational(0);
    if (!is_rational()) throw std::domain_error("scalar is not rational: " + to_string());
    return terms_.begin()->second.u.re;
}

int ExactScalar::sign_real() const {
    if (terms_.empty()) return 0;
    if (!is_real()) throw std::domain_error("sign_real: scalar is not real: " + to_string());
    // A single monomial c * Pi^k has the sign of c (Pi > 0).  More generally a
    // sum whose coefficients all share one sign has that sign.
    int common = 0;
    bool uniform = true;
    for (const auto& [k, c] : terms_) {
        const int s = c.sign_real();
        if (common == 0) {
            common = s;
        } else if (s != 0 && s != common) {
            uniform = false;
            break;
        }
    }
    if (uniform && common != 0) return common;
    // Mixed signs across Pi-degrees: fall back to the double projection.
    const double x = to_complex().real();
    if (x > 0) return 1;
    if (x < 0) return -1;
    return 0;
}

ExactScalar ExactScalar::operator-() const {
    ExactScalar out;
    for (const auto& [k, c] : terms_) out.terms_.emplace(k, -c);
    return out;
}

ExactScalar ExactScalar::operator+(const ExactScalar& o) const {
    unify_radicands(radicand(), o.radicand());
    ExactScalar out = *this;
    for (const auto& [k, c] : o.terms_) {
        auto it = out.terms_.find(k);
        if (it == out.terms_.end()) {
            out.terms_.emplace(k, c);
        } else {
            out.set_term(k, it->second + c);
        }
    }
    return out;
}

ExactScalar ExactScalar::operator-(const ExactScalar& o) const { return *this + (-o); }

ExactScalar ExactScalar::operator*(const ExactScalar& o) const {
    ExactScalar out;
    for (const auto& [k1, c1] : terms_) {
        for (const auto& [k2, c2] : o.terms_) {
            const SurdCoeff prod = c1 * c2;
            auto it = out.terms_.find(k1 + k2);
            if (it == out.terms_.end()) {
                out.set_term(k1 + k2, prod);
            } else {
                out.set_term(k1 + k2, it->second + prod);
            }
        }
    }
    return out;
}

std::optional<ExactScalar> ExactScalar::try_divide(const ExactScalar& o) const {
    if (o.is_zero()) throw std::domain_error("scalar division by zero");
    if (is_zero()) return ExactScalar();
    // Shift both operands so the divisor becomes an honest polynomial, run
    // polynomial long division over the coefficient field, and demand a zero
    // remainder; exactness in the Laurent ring is equivalent.
    const int ashift = min_exponent();
    const int bshift = o.min_exponent();
    const int bdeg = o.max_exponent() - bshift;
    const SurdCoeff lead_inv = o.terms_.rbegin()->second.inv();

    std::map<int, SurdCoeff> rem;
    for (const auto& [k, c] : terms_) rem.emplace(k - ashift, c);
    std::map<int, SurdCoeff> quot;

    while (!rem.empty()) {
        const int rdeg = rem.rbegin()->first;
        if (rdeg < bdeg) return std::nullopt;  // nonzero remainder: inexact
        const SurdCoeff qc = rem.rbegin()->second * lead_inv;
        const int qk = rdeg - bdeg;
        quot.emplace(qk, qc);
        for (const auto& [k, c] : o.terms_) {
            const int kk = qk + (k - bshift);
            const SurdCoeff delta = qc * c;
            auto it = rem.find(kk);
            if (it == rem.end()) {
                rem.emplace(kk, -delta);
            } else {
                const SurdCoeff next = it->second - delta;
                if (next.is_zero()) {
                    rem.erase(it);
                } else {
                    it->second = next;
                }
            }
        }
    }

    ExactScalar out;
    for (const auto& [k, c] : quot) out.set_term(k + ashift - bshift, c);
    return out;
}

ExactScalar ExactScalar::operator/(const ExactScalar& o) const {
    auto q = try_divide(o);
    if (!q) {
        throw std::domain_error("inexact scalar division: (" + to_string() + ") / (" +
                                o.to_string() + ") leaves the ring");
    }
    return *q;
}

ExactScalar ExactScalar::pow(int e) const {
    if (e < 0) return ExactScalar(1) / pow(-e);
    ExactScalar result(1);
    ExactScalar base = *this;
    unsigned n = static_cast<unsigned>(e);
    while (n > 0) {
        if (n & 1u) result = result * base;
        base = base * base;
        n >>= 1u;
    }
    return result;
}

ExactScalar ExactScalar::conj() const {
    ExactScalar out;
    for (const auto& [k, c] : terms_) out.terms_.emplace(k, c.conj());
    return out;
}

int ExactScalar::min_exponent() const {
    return terms_.empty() ? 0 : terms_.begin()->first;
}

int ExactScalar::max_exponent() const {
    return terms_.empty() ? 0 : terms_.rbegin()->first;
}

std::complex<double> ExactScalar::to_complex() const {
    const double sqrt_d = std::sqrt(static_cast<double>(radicand()));
    return eval<double>(std::numbers::pi_v<double>, sqrt_d);
}

// ============================================================================
// Parsing
// ============================================================================

namespace {

class ScalarParser {
public:
    explicit ScalarParser(const std::string& text) : s_(text) {}

    ExactScalar run() {
        ExactScalar v = parse_expr();
        skip_ws();
        if (pos_ != s_.size()) fail("trailing input");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw std::invalid_argument("scalar syntax error at position " + std::to_string(pos_) +
                                    ": " + what + " in '" + s_ + "'");
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    mpz_class read_integer() {
        skip_ws();
        size_t start = pos_;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
        size_t digits = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == digits) fail("expected integer");
        return mpz_class(s_.substr(start, pos_ - start));
    }

    std::string read_word() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        return s_.substr(start, pos_ - start);
    }

    ExactScalar parse_expr() {
        bool neg = false;
        skip_ws();
        if (eat('-')) {
            neg = true;
        } else {
            (void)eat('+');
        }
        ExactScalar v = parse_term();
        if (neg) v = -v;
        for (;;) {
            if (eat('+')) {
                v = v + parse_term();
            } else if (eat('-')) {
                v = v - parse_term();
            } else {
                return v;
            }
        }
    }

    ExactScalar parse_term() {
        ExactScalar v = parse_factor();
        for (;;) {
            if (eat('*')) {
                v = v * parse_factor();
            } else if (eat('/')) {
                v = v / parse_factor();
            } else {
                return v;
            }
        }
    }

    ExactScalar parse_factor() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            ExactScalar v = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Rational r(read_integer(), 1);
            r.canonicalize();
            return ExactScalar(r);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::string word = read_word();
            if (word == "i") return ExactScalar::i();
            if (word == "pi") return ExactScalar::pi();
            if (word == "sqrt") {
                if (!eat('(')) fail("expected '(' after sqrt");
                const mpz_class k = read_integer();
                if (!eat(')')) fail("expected ')' after sqrt radicand");
                if (k < 0) throw std::domain_error("sqrt of a negative integer");
                if (!k.fits_slong_p()) fail("sqrt radicand too large");
                return ExactScalar::sqrt_int(k.get_si());
            }
            fail("unknown symbol '" + word + "'");
        }
        fail("expected factor");
    }

    const std::string& s_;
    size_t pos_{0};
};

/// One printable product "mag * suffixes * pi-part" for a single coefficient
/// slot; mag is a positive rational.
std::string product_text(const Rational& mag, const std::string& symbolic, int k) {
    std::vector<std::string> upper;
    if (mag != 1 || (symbolic.empty() && k <= 0)) upper.push_back(rational_to_string(mag));
    if (!symbolic.empty()) upper.push_back(symbolic);
    for (int j = 0; j < k; ++j) upper.push_back("pi");
    std::string out;
    for (size_t j = 0; j < upper.size(); ++j) {
        if (j) out += "*";
        out += upper[j];
    }
    if (out.empty()) out = "1";
    for (int j = 0; j < -k; ++j) out += "/pi";
    return out;
}

/// Render one coefficient slot (value r times optional symbol) as sign + text.
struct SignedText {
    int sign;
    std::string text;
};

std::vector<SignedText> coeff_parts(const SurdCoeff& c, int k) {
    std::vector<SignedText> parts;
    const std::string sq = c.d ? "sqrt(" + std::to_string(c.d) + ")" : "";
    auto push = [&](const Rational& r, const std::string& symbolic) {
        if (r == 0) return;
        parts.push_back({sgn(r), product_text(abs(r), symbolic, k)});
    };
    push(c.u.re, "");
    push(c.u.im, "i");
    push(c.v.re, sq);
    push(c.v.im, sq + "*i");
    return parts;
}

}  // namespace

ExactScalar ExactScalar::parse(const std::string& text) { return ScalarParser(text).run(); }

std::string ExactScalar::to_string() const {
    if (terms_.empty()) return "0";
    std::vector<SignedText> parts;
    // Descending Pi-degree reads naturally: "4*pi*pi - 4*pi + 3".
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        for (auto& p : coeff_parts(it->second, it->first)) parts.push_back(std::move(p));
    }
    std::string out;
    for (size_t j = 0; j < parts.size(); ++j) {
        if (j == 0) {
            if (parts[j].sign < 0) out += "-";
        } else {
            out += parts[j].sign < 0 ? " - " : " + ";
        }
        out += parts[j].text;
    }
    return out;
}

ExactScalar scalar_parse(const std::string& text) { return ExactScalar::parse(text); }

bool scalar_is_zero(const ExactScalar& s) { return s.is_zero(); }

std::complex<double> scalar_to_float(const ExactScalar& s) { return s.to_complex(); }

std::optional<ExactScalar> scalar_sqrt(const ExactScalar& s) {
    if (s.is_zero()) {
        return ExactScalar();
    }
    if (!s.is_monomial()) {
        return std::nullopt;
    }
    const int k = s.min_exponent();
    if (k % 2 != 0) {
        return std::nullopt;
    }
    const SurdCoeff& c = s.terms().begin()->second;
    if (!c.is_real()) {
        return std::nullopt;
    }
    if (c.sign_real() < 0) {
        throw std::domain_error("scalar_sqrt: negative real value " + s.to_string());
    }
    if (!c.is_rational()) {
        return std::nullopt;  // surd-bearing squares are not reconstructed
    }
    // sqrt(num/den) = sqrt(num*den)/den, delegated to the integer square-root
    // factoring (which may introduce the session surd).
    const mpz_class num = c.u.re.get_num();
    const mpz_class den = c.u.re.get_den();
    const mpz_class radicand = num * den;
    if (!radicand.fits_slong_p()) {
        return std::nullopt;
    }
    ExactScalar root;
    try {
        root = ExactScalar::sqrt_int(radicand.get_si());
    } catch (const std::domain_error&) {
        return std::nullopt;
    }
    Rational inv_den(1);
    inv_den /= Rational(den);
    return root * ExactScalar(inv_den) * ExactScalar::pi(k / 2);
}

}  // namespace ktlab
