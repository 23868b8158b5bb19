#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace flatmc {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

struct DimensionMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GuardFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonNegativityViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WrongSource : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotFlat : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BadArity : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnboundVariable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ", col " +
                             std::to_string(col_) + ")"),
          line(line_), col(col_) {}
};

enum class Cmp { Eq, Le, Ge, Lt, Gt };

inline const char* cmp_text(Cmp c) {
    switch (c) {
        case Cmp::Eq: return "=";
        case Cmp::Le: return "<=";
        case Cmp::Ge: return ">=";
        case Cmp::Lt: return "<";
        case Cmp::Gt: return ">";
    }
    return "?";
}

template <typename V>
bool cmp_holds(Cmp c, const V& lhs, const V& rhs) {
    switch (c) {
        case Cmp::Eq: return lhs == rhs;
        case Cmp::Le: return lhs <= rhs;
        case Cmp::Ge: return lhs >= rhs;
        case Cmp::Lt: return lhs < rhs;
        case Cmp::Gt: return lhs > rhs;
    }
    return false;
}

}  // namespace flatmc
