#include "brunesynth/extended.hpp"

#include <cmath>
#include <sstream>

#include "brunesynth/errors.hpp"

namespace brunesynth {

namespace {
unsigned bits_to_digits10(unsigned bits) {
    return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

unsigned& current_bits() {
    static unsigned bits = [] {
        Real::default_precision(bits_to_digits10(kDefaultPrecisionBits));
        return kDefaultPrecisionBits;
    }();
    return bits;
}

// Make sure the default applies even if nobody asks for the precision first.
const unsigned g_touch = current_bits();
}  // namespace

void set_precision_bits(unsigned bits) {
    if (bits < 53 || bits > 100000) throw ValidationError("precision bits must be in [53, 100000]");
    current_bits() = bits;
    Real::default_precision(bits_to_digits10(bits));
}

unsigned precision_bits() { return current_bits(); }

PrecisionScope::PrecisionScope(unsigned bits) : saved_bits_(precision_bits()) {
    set_precision_bits(bits);
}

PrecisionScope::~PrecisionScope() { set_precision_bits(saved_bits_); }

Real working_epsilon() {
    return boost::multiprecision::ldexp(Real(1), -static_cast<int>(precision_bits()));
}

std::string to_string(const Real& x, int digits) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

}  // namespace brunesynth
