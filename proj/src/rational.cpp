#include "orbitclt/rational.hpp"

#include "orbitclt/error.hpp"

#include <algorithm>
#include <cctype>

namespace orbitclt {

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NotPrimitive: return "NotPrimitive";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NoPath: return "NoPath";
    case ErrorCode::GapTooShort: return "GapTooShort";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::IncompatibleSchedule: return "IncompatibleSchedule";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ValidationFailure: return "ValidationFailure";
    }
    return "Unknown";
}

namespace {

bool is_integer_literal(std::string_view s)
{
    if (s.empty())
        return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size())
        return false;
    return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

} // namespace

Rational parse_rational(std::string_view text)
{
    std::string s(text);
    s.erase(std::remove_if(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
            s.end());
    if (s.empty())
        throw Error(ErrorCode::ParseError, "empty rational");

    if (auto slash = s.find('/'); slash != std::string::npos) {
        auto num = s.substr(0, slash);
        auto den = s.substr(slash + 1);
        if (!is_integer_literal(num) || !is_integer_literal(den))
            throw Error(ErrorCode::ParseError, "malformed rational '" + s + "'");
        BigInt d(den);
        if (d == 0)
            throw Error(ErrorCode::ParseError, "zero denominator in '" + s + "'");
        Rational out(BigInt(num), d);
        out.canonicalize();
        return out;
    }

    if (auto dot = s.find('.'); dot != std::string::npos) {
        auto whole = s.substr(0, dot);
        auto frac = s.substr(dot + 1);
        bool negative = !whole.empty() && whole[0] == '-';
        if (!whole.empty() && (whole[0] == '-' || whole[0] == '+'))
            whole.erase(0, 1);
        if (whole.empty())
            whole = "0";
        if (!is_integer_literal(whole) || (!frac.empty() && !is_integer_literal(frac)) || frac.find_first_of("+-") != std::string::npos)
            throw Error(ErrorCode::ParseError, "malformed decimal '" + s + "'");
        BigInt den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i)
            den *= 10;
        BigInt num = BigInt(whole) * den + (frac.empty() ? BigInt(0) : BigInt(frac));
        Rational out(negative ? BigInt(-num) : num, den);
        out.canonicalize();
        return out;
    }

    if (!is_integer_literal(s))
        throw Error(ErrorCode::ParseError, "malformed rational '" + s + "'");
    return Rational(BigInt(s));
}

std::string format_rational(const Rational& value)
{
    Rational v = value;
    v.canonicalize();
    if (v.get_den() == 1)
        return v.get_num().get_str();
    return v.get_num().get_str() + "/" + v.get_den().get_str();
}

Rational rational_pow(const Rational& base, unsigned exponent)
{
    BigInt num, den;
    mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
    mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
    Rational out(num, den);
    out.canonicalize();
    return out;
}

unsigned min_exponent_below(const Rational& base, const Rational& bound)
{
    if (bound <= 0 || base <= 0 || base >= 1)
        throw Error(ErrorCode::InvalidArgument, "min_exponent_below needs 0<base<1 and bound>0");
    unsigned j = 0;
    Rational power = 1;
    while (power >= bound) {
        power *= base;
        ++j;
    }
    return j;
}

unsigned min_exponent_at_or_below(const Rational& base, const Rational& bound)
{
    if (bound <= 0 || base <= 0 || base >= 1)
        throw Error(ErrorCode::InvalidArgument, "min_exponent_at_or_below needs 0<base<1 and bound>0");
    unsigned j = 0;
    Rational power = 1;
    while (power > bound) {
        power *= base;
        ++j;
    }
    return j;
}

std::string format_bigint(const BigInt& value) { return value.get_str(); }

} // namespace orbitclt
