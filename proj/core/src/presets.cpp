#include "ktlab/presets.hpp"

namespace ktlab {

AlmostComplexStructure preset_kt4(const ExactScalar& beta, const ExactScalar& delta) {
    if (beta.is_zero() || delta.is_zero())
        throw std::invalid_argument("kt4 preset: beta and delta must be nonzero");
    const ExactScalar half(make_rational(1, 2));
    const ExactScalar mihalf = -ExactScalar::i() * half;
    AlmostComplexStructure acs;
    acs.n = 1;
    acs.A = Matrix(4, 2);
    // Frame rows: (d/dx, Y, d/dz, d/dt).
    acs.A(0, 0) = mihalf * beta;   // V_1 = (dt - i beta dx)/2
    acs.A(3, 0) = half;
    acs.A(1, 1) = half;            // V_2 = (Y - i delta dz)/2
    acs.A(2, 1) = mihalf * delta;
    return acs;
}

AlmostComplexStructure preset_kt6(const ExactScalar& a, const ExactScalar& b,
                                  const ExactScalar& c) {
    if (a.is_zero() || b.is_zero() || c.is_zero())
        throw std::invalid_argument("kt6 preset: a, b and c must be nonzero");
    const ExactScalar half(make_rational(1, 2));
    const ExactScalar mihalf = -ExactScalar::i() * half;
    AlmostComplexStructure acs;
    acs.n = 2;
    acs.A = Matrix(6, 3);
    // Frame rows: (d/dx_1, d/dx_2, Y_1, Y_2, d/dz, d/dt).
    acs.A(0, 0) = half;            // V_1 = (dx_1 - i a dx_2)/2
    acs.A(1, 0) = mihalf * a;
    acs.A(2, 1) = half;            // V_2 = (Y_1 - i b Y_2)/2
    acs.A(3, 1) = mihalf * b;
    acs.A(4, 2) = mihalf * c;      // V_3 = (dt - i c dz)/2
    acs.A(5, 2) = half;
    return acs;
}

}  // namespace ktlab
