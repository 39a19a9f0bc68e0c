// Exception hierarchy shared by all eigenflow modules.
//
// Every failure raised by the library derives from eigenflow::Error. The
// category decides the CLI exit code: input problems (2), degeneracies and
// subdivision failures (3), numerical breakdowns (4).

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eigenflow {

enum class ErrorCategory { Input, Degeneracy, Numerical };

class Error : public std::runtime_error {
public:
    Error(std::string kind, ErrorCategory category, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)), category_(category) {}

    const std::string& kind() const noexcept { return kind_; }
    ErrorCategory category() const noexcept { return category_; }

private:
    std::string kind_;
    ErrorCategory category_;
};

// ---------------------------------------------------------------- parsing

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t offset, int line, int column)
        : Error("SyntaxError", ErrorCategory::Input,
                "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          offset_(offset), line_(line), column_(column) {}

    std::size_t offset() const noexcept { return offset_; }
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    std::size_t offset_;
    int line_;
    int column_;
};

class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& message)
        : Error("DimensionError", ErrorCategory::Input, message) {}
};

class UnknownIdentifier : public Error {
public:
    explicit UnknownIdentifier(const std::string& name)
        : Error("UnknownIdentifier", ErrorCategory::Input, "unknown identifier '" + name + "'"),
          name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class SceneError : public Error {
public:
    explicit SceneError(const std::string& message)
        : Error("SceneError", ErrorCategory::Input, message) {}
};

class NotALoop : public Error {
public:
    explicit NotALoop(const std::string& message)
        : Error("NotALoop", ErrorCategory::Input, message) {}
};

class NonCyclicBand : public Error {
public:
    explicit NonCyclicBand(const std::string& message)
        : Error("NonCyclicBand", ErrorCategory::Input, message) {}
};

// ------------------------------------------------------------ degeneracy

class DegenerateOperator : public Error {
public:
    explicit DegenerateOperator(const std::string& message)
        : Error("DegenerateOperator", ErrorCategory::Degeneracy, message) {}
};

class DegeneracyOnPath : public Error {
public:
    DegeneracyOnPath(const std::string& message, double t)
        : Error("DegeneracyOnPath", ErrorCategory::Degeneracy, message), t_(t) {}

    double t() const noexcept { return t_; }

private:
    double t_;
};

// The offending sub-interval [t0, t1] and the smallest gap observed inside it.
class SubdivisionLimit : public Error {
public:
    SubdivisionLimit(const std::string& message, double t0, double t1, double min_gap)
        : Error("SubdivisionLimit", ErrorCategory::Degeneracy, message),
          t0_(t0), t1_(t1), min_gap_(min_gap) {}

    double t0() const noexcept { return t0_; }
    double t1() const noexcept { return t1_; }
    double min_gap() const noexcept { return min_gap_; }

private:
    double t0_;
    double t1_;
    double min_gap_;
};

class BandAmbiguity : public Error {
public:
    explicit BandAmbiguity(const std::string& message)
        : Error("BandAmbiguity", ErrorCategory::Degeneracy, message) {}
};

// ------------------------------------------------------------- numerical

class DomainError : public Error {
public:
    explicit DomainError(const std::string& message)
        : Error("DomainError", ErrorCategory::Numerical, message) {}
};

class NoConvergence : public Error {
public:
    explicit NoConvergence(const std::string& message)
        : Error("NoConvergence", ErrorCategory::Numerical, message) {}
};

class NotRealSpectrum : public Error {
public:
    explicit NotRealSpectrum(const std::string& message)
        : Error("NotRealSpectrum", ErrorCategory::Numerical, message) {}
};

class NumericalUnderflow : public Error {
public:
    NumericalUnderflow(const std::string& message, double t)
        : Error("NumericalUnderflow", ErrorCategory::Numerical, message), t_(t) {}

    double t() const noexcept { return t_; }

private:
    double t_;
};

class SingularFrame : public Error {
public:
    explicit SingularFrame(const std::string& message)
        : Error("SingularFrame", ErrorCategory::Numerical, message) {}
};

class GaugeBreakdown : public Error {
public:
    explicit GaugeBreakdown(const std::string& message)
        : Error("GaugeBreakdown", ErrorCategory::Numerical, message) {}
};

}  // namespace eigenflow
