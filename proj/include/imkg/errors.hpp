#pragma once

#include <stdexcept>
#include <string>

namespace imkg {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid shapes or invariants when building a tableau or coefficient set.
class ConstructionError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

// Parameters outside the domain of a closed-form formula (division by zero etc).
class DomainError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public SolverError {
public:
    ConvergenceError(const std::string& msg, int iterations, double final_norm)
        : SolverError(msg), iterations_(iterations), final_norm_(final_norm) {}
    int iterations() const { return iterations_; }
    double final_norm() const { return final_norm_; }

private:
    int iterations_;
    double final_norm_;
};

class StepError : public Error {
public:
    StepError(const std::string& msg, long step, int stage)
        : Error(msg), step_(step), stage_(stage) {}
    long step() const { return step_; }
    int stage() const { return stage_; }

private:
    long step_;
    int stage_;
};

class BlowUpError : public StepError {
public:
    using StepError::StepError;
};

}  // namespace imkg
