#pragma once

#include <complex>
#include <string>

#include <boost/multiprecision/mpfr.hpp>

namespace brunesynth {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;
using Complex = std::complex<Real>;
using cdouble = std::complex<double>;

inline constexpr unsigned kDefaultPrecisionBits = 256;

// Precision is process-global (MPFR default precision). Set it before creating values.
void set_precision_bits(unsigned bits);
unsigned precision_bits();

// Restores the previous precision on scope exit.
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned bits);
    ~PrecisionScope();
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_bits_;
};

// 2^-bits at the current precision.
Real working_epsilon();

inline double to_double(const Real& x) { return x.convert_to<double>(); }
inline cdouble to_double(const Complex& z) { return {to_double(z.real()), to_double(z.imag())}; }
inline Complex to_ext(const cdouble& z) { return {Real(z.real()), Real(z.imag())}; }

std::string to_string(const Real& x, int digits = 17);

}  // namespace brunesynth
