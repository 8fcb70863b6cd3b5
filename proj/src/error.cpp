#include "latprof/error.hpp"

namespace latprof {

std::string describe(const LineError& e) {
    std::string kind;
    switch (e.kind) {
    case ParseErrorKind::malformed_line: kind = "malformed line"; break;
    case ParseErrorKind::malformed_row: kind = "malformed row"; break;
    case ParseErrorKind::missing_header: kind = "missing header"; break;
    }
    if (e.line == 0) return kind + ": " + e.reason;
    return kind + " at line " + std::to_string(e.line) + ": " + e.reason;
}

namespace {
std::string join_cycle(const std::vector<std::string>& w) {
    std::string s = "cycle detected:";
    for (const auto& n : w) s += " " + n;
    return s;
}
} // namespace

CycleError::CycleError(std::vector<std::string> witness) : Error(join_cycle(witness)), witness_(std::move(witness)) {}

} // namespace latprof
