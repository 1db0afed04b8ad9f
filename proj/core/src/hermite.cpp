#include "ktlab/hermite.hpp"

#include <cmath>
#include <stdexcept>

namespace ktlab {

double hermite_F(int h, double s) {
    if (h < 0) {
        throw std::invalid_argument("hermite_F: order must be nonnegative");
    }
    const double gauss = std::exp(-0.5 * s * s);
    double prev = gauss;           // F_0
    if (h == 0) {
        return prev;
    }
    double curr = 2.0 * s * gauss;  // F_1
    for (int k = 1; k < h; ++k) {
        const double next = 2.0 * s * curr - 2.0 * static_cast<double>(k) * prev;
        prev = curr;
        curr = next;
    }
    return curr;
}

double hermite_F_derivative(int h, double s) {
    if (h < 0) {
        throw std::invalid_argument("hermite_F_derivative: order must be nonnegative");
    }
    const double lower = h == 0 ? 0.0 : hermite_F(h - 1, s);
    return 2.0 * static_cast<double>(h) * lower - s * hermite_F(h, s);
}

}  // namespace ktlab
