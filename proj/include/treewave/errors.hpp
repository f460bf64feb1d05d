#pragma once

#include <stdexcept>
#include <string>

namespace treewave {

/// Base class for every error raised by the library.
///
/// `numerical()` separates failures of a numerical method (non-convergence,
/// blow-up, lost fronts) from invalid input, which the CLI maps to
/// different exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what, bool numerical)
        : std::runtime_error(what), numerical_(numerical) {}
    bool numerical() const noexcept { return numerical_; }

private:
    bool numerical_;
};

class ParameterError : public Error {
public:
    explicit ParameterError(const std::string& what) : Error(what, false) {}
};

class AlignmentError : public Error {
public:
    explicit AlignmentError(const std::string& what) : Error(what, false) {}
};

class InstabilityError : public Error {
public:
    InstabilityError(const std::string& what, double dt) : Error(what, true), dt_(dt) {}
    double dt() const noexcept { return dt_; }

private:
    double dt_;
};

class FrontLostError : public Error {
public:
    explicit FrontLostError(const std::string& what) : Error(what, true) {}
};

class QuadratureError : public Error {
public:
    explicit QuadratureError(const std::string& what) : Error(what, true) {}
};

class BracketError : public Error {
public:
    explicit BracketError(const std::string& what) : Error(what, true) {}
};

} // namespace treewave
