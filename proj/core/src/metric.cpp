#include "ktlab/metric.hpp"

#include <stdexcept>
#include <string>

namespace ktlab {

namespace {

void require_positive(const ExactScalar& w, const std::string& label) {
    int sign = 0;
    try {
        sign = w.sign_real();
    } catch (const std::domain_error&) {
        throw std::invalid_argument("metric weight " + label + " = " + w.to_string() +
                                    " is not a real scalar");
    }
    if (sign <= 0) {
        throw std::invalid_argument("metric weight " + label + " = " + w.to_string() +
                                    " is not strictly positive");
    }
}

ExactScalar abs_real(const ExactScalar& s, const std::string& label) {
    int sign = 0;
    try {
        sign = s.sign_real();
    } catch (const std::domain_error&) {
        throw std::invalid_argument("parameter " + label + " = " + s.to_string() +
                                    " must be a real scalar");
    }
    if (sign == 0) {
        throw std::invalid_argument("parameter " + label + " must be nonzero");
    }
    return sign < 0 ? -s : s;
}

}  // namespace

MetricParams metric_identity(int n) {
    MetricParams g;
    g.a = ExactScalar::one();
    g.d = ExactScalar::one();
    g.b.assign(static_cast<std::size_t>(n), ExactScalar::one());
    g.c.assign(static_cast<std::size_t>(n), ExactScalar::one());
    return g;
}

void metric_validate(const MetricParams& g, int n) {
    if (n < 1) {
        throw std::invalid_argument("metric_validate: n must be >= 1");
    }
    const auto nn = static_cast<std::size_t>(n);
    if (g.b.size() != nn || g.c.size() != nn) {
        throw std::invalid_argument("metric_validate: weight vectors b, c must have length n");
    }
    require_positive(g.a, "a");
    require_positive(g.d, "d");
    for (std::size_t j = 0; j < nn; ++j) {
        require_positive(g.b[j], "b[" + std::to_string(j) + "]");
        require_positive(g.c[j], "c[" + std::to_string(j) + "]");
    }
}

std::vector<ExactScalar> metric_coframe_weights(const MetricParams& g,
                                                const ManifoldModel& model) {
    const int n = model.n;
    metric_validate(g, n);
    std::vector<ExactScalar> w(static_cast<std::size_t>(model.dim()));
    for (int j = 0; j < n; ++j) {
        w[static_cast<std::size_t>(j)] = g.b[static_cast<std::size_t>(j)];          // e^j
        w[static_cast<std::size_t>(n + 1 + j)] = g.c[static_cast<std::size_t>(j)];  // f^j
    }
    w[static_cast<std::size_t>(n)] = g.d;               // e^{n+1}
    w[static_cast<std::size_t>(2 * n + 1)] = g.a;       // f^{n+1}
    return w;
}

MetricParams metric_kt4(const ExactScalar& beta, const ExactScalar& delta) {
    MetricParams g;
    g.a = ExactScalar::one();
    g.b = {abs_real(beta, "beta")};
    g.c = {ExactScalar::one()};
    g.d = abs_real(delta, "delta");
    metric_validate(g, 1);
    return g;
}

MetricParams metric_kt6(const ExactScalar& a_param, const ExactScalar& b_param,
                        const ExactScalar& c_param, const ExactScalar& rho,
                        const ExactScalar& sigma, const ExactScalar& tau) {
    require_positive(rho, "rho");
    require_positive(sigma, "sigma");
    require_positive(tau, "tau");
    const ExactScalar one = ExactScalar::one();
    MetricParams g;
    g.a = one / tau;
    g.b = {one / rho, abs_real(a_param, "a") / rho};
    g.c = {one / sigma, abs_real(b_param, "b") / sigma};
    g.d = abs_real(c_param, "c") / tau;
    metric_validate(g, 2);
    return g;
}

}  // namespace ktlab
