#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace milnesim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (arccos of |p| > alpha, k <= 0, ...).
struct DomainError : Error {
    using Error::Error;
};

// A coefficient profile produced a value its role forbids (omega <= 0, beta < 0).
struct InvalidProfile : Error {
    using Error::Error;
};

// The envelope denominator beta(t)ck + omega(t)^2 ctk vanished.
struct SingularityError : Error {
    SingularityError(const std::string& what, double t) : Error(what), time(t) {}
    double time;
};

struct InsufficientData : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& what, std::size_t line_no, std::string field_name)
        : Error(what), line(line_no), field(std::move(field_name)) {}
    std::size_t line;
    std::string field;
};

// Carries every violated invariant, not just the first one found.
struct ValidationError : Error {
    explicit ValidationError(std::vector<std::string> problems)
        : Error(join(problems)), issues(std::move(problems)) {}
    std::vector<std::string> issues;

private:
    static std::string join(const std::vector<std::string>& items) {
        std::string out = "invalid configuration:";
        for (const auto& s : items) out += "\n  - " + s;
        return out;
    }
};

struct NotComputed : Error {
    using Error::Error;
};

} // namespace milnesim
