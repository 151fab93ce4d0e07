#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace moodpipe {

/// The six basic expressions, in canonical (class-index) order.
enum class Expression { Anger = 0, Fear, Disgust, Joy, Sadness, Surprise };

inline constexpr int kExpressionCount = 6;

inline constexpr std::array<Expression, kExpressionCount> kAllExpressions{
    Expression::Anger, Expression::Fear,    Expression::Disgust,
    Expression::Joy,   Expression::Sadness, Expression::Surprise};

/// Row order of the accuracy report.
inline constexpr std::array<Expression, kExpressionCount> kReportOrder{
    Expression::Anger, Expression::Disgust, Expression::Fear,
    Expression::Joy,   Expression::Sadness, Expression::Surprise};

inline constexpr int index_of(Expression e) { return static_cast<int>(e); }

inline std::string_view name_of(Expression e) {
    switch (e) {
        case Expression::Anger: return "Anger";
        case Expression::Fear: return "Fear";
        case Expression::Disgust: return "Disgust";
        case Expression::Joy: return "Joy";
        case Expression::Sadness: return "Sadness";
        case Expression::Surprise: return "Surprise";
    }
    return "?";
}

inline std::optional<Expression> parse_expression(std::string_view s) {
    for (Expression e : kAllExpressions) {
        if (name_of(e) == s) return e;
    }
    return std::nullopt;
}

}  // namespace moodpipe
