#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace srwlt {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Exact rational with a binary64 shadow. Always stored reduced with a
/// positive denominator (cpp_rational normalizes on construction).
class ExactValue {
public:
    ExactValue() : value_(0), shadow_(0.0) {}
    ExactValue(Rational value) : value_(std::move(value)), shadow_(to_double(value_)) {}
    // Boost 1.74 rejects a negative denominator at construction, so the sign
    // is moved to the numerator first.
    ExactValue(std::int64_t num, std::int64_t den)
        : ExactValue(den < 0 ? Rational(-BigInt(num), -BigInt(den)) : Rational(num, den)) {}

    const Rational& rational() const noexcept { return value_; }
    double value() const noexcept { return shadow_; }
    BigInt numerator() const { return boost::multiprecision::numerator(value_); }
    BigInt denominator() const { return boost::multiprecision::denominator(value_); }

    /// "p/q", with q = 1 rendered explicitly ("2/1").
    std::string str() const { return numerator().str() + "/" + denominator().str(); }

    friend bool operator==(const ExactValue& a, const ExactValue& b) { return a.value_ == b.value_; }

    /// Correctly rounded conversion of num/den to binary64.
    static double to_double(const Rational& r);

private:
    Rational value_;
    double shadow_;
};

} // namespace srwlt
