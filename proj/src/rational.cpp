#include "srwlt/rational.hpp"

#include <cmath>

namespace srwlt {

double ExactValue::to_double(const Rational& r) {
    BigInt num = boost::multiprecision::numerator(r);
    const BigInt den = boost::multiprecision::denominator(r);
    if (num == 0) return 0.0;
    const bool negative = num < 0;
    if (negative) num = -num;

    // Quotient carrying 55-56 significant bits; a nonzero remainder becomes a
    // sticky bit below the rounding position, so the final uint64 -> double
    // conversion rounds exactly once.
    const long shift = 55 - (static_cast<long>(boost::multiprecision::msb(num)) -
                             static_cast<long>(boost::multiprecision::msb(den)));
    BigInt q;
    BigInt rem;
    if (shift >= 0) {
        boost::multiprecision::divide_qr(BigInt(num << shift), den, q, rem);
    } else {
        boost::multiprecision::divide_qr(num, BigInt(den << -shift), q, rem);
    }
    auto mant = q.convert_to<std::uint64_t>();
    if (rem != 0) mant |= 1U;
    const double out = std::ldexp(static_cast<double>(mant), static_cast<int>(-shift));
    return negative ? -out : out;
}

} // namespace srwlt
