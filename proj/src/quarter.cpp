#include "cyclekit/quarter.hpp"

#include <cctype>

#include "cyclekit/error.hpp"

namespace cyclekit {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::malformed: return "malformed";
        case ErrorCode::missing_column: return "missing_column";
        case ErrorCode::gap: return "gap";
        case ErrorCode::duplicate: return "duplicate";
        case ErrorCode::non_numeric: return "non_numeric";
        case ErrorCode::non_positive: return "non_positive";
        case ErrorCode::unknown_variable: return "unknown_variable";
        case ErrorCode::insufficient_data: return "insufficient_data";
        case ErrorCode::singular: return "singular";
        case ErrorCode::rank_deficient: return "rank_deficient";
        case ErrorCode::non_finite: return "non_finite";
        case ErrorCode::coverage: return "coverage";
        case ErrorCode::too_few: return "too_few";
        case ErrorCode::invalid_spec: return "invalid_spec";
        case ErrorCode::missing_input: return "missing_input";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

Quarter::Quarter(int year, int q) : year_(year), q_(q) {
    if (q < 1 || q > 4) {
        throw Error(ErrorCode::malformed, "quarter digit must be in 1..4, got " + std::to_string(q));
    }
}

Quarter Quarter::from_ordinal(std::int64_t ordinal) {
    // floor division so that negative ordinals still map to q in 1..4
    std::int64_t year = ordinal >= 0 ? ordinal / 4 : -((-ordinal + 3) / 4);
    auto q = static_cast<int>(ordinal - year * 4) + 1;
    return Quarter(static_cast<int>(year), q);
}

std::string Quarter::to_string() const {
    std::string out = std::to_string(year_);
    while (out.size() < 4) out.insert(out.begin(), '0');
    out += 'Q';
    out += static_cast<char>('0' + q_);
    return out;
}

Quarter parse_quarter(std::string_view text) {
    auto fail = [&]() -> Quarter {
        throw Error(ErrorCode::malformed, "malformed quarter '" + std::string(text) +
                                              "', expected YYYYQn with n in 1..4");
    };
    if (text.size() != 6 || text[4] != 'Q') return fail();
    int year = 0;
    for (std::size_t i = 0; i < 4; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) return fail();
        year = year * 10 + (text[i] - '0');
    }
    char digit = text[5];
    if (digit < '1' || digit > '4') return fail();
    return Quarter(year, digit - '0');
}

}  // namespace cyclekit
