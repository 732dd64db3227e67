#pragma once

#include <stdexcept>
#include <string>

namespace clsym {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parse-time failures. offset is a byte offset into the input text.
struct SyntaxError : Error {
    SyntaxError(const std::string& what, std::size_t offset_)
        : Error(what + " at offset " + std::to_string(offset_)), offset(offset_) {}
    std::size_t offset;
};

struct UnknownSymbol : Error {
    explicit UnknownSymbol(const std::string& name)
        : Error("unknown symbol '" + name + "'"), symbol(name) {}
    std::string symbol;
};

// Evaluation failures carry the printed offending subtree.
struct DomainError : Error {
    DomainError(const std::string& what, const std::string& subtree_)
        : Error(what + " in '" + subtree_ + "'"), subtree(subtree_) {}
    std::string subtree;
};

struct NonFinite : Error {
    explicit NonFinite(const std::string& subtree_)
        : Error("non-finite value in '" + subtree_ + "'"), subtree(subtree_) {}
    std::string subtree;
};

struct NotCubic : Error {
    NotCubic(double residual, const std::string& witness)
        : Error("RHS is not cubic in the first derivative (I1 residual " +
                std::to_string(residual) + " at " + witness),
          max_residual(residual) {}
    double max_residual;
};

struct DegenerateJacobian : Error {
    using Error::Error;
};

struct InvalidConstant : Error {
    using Error::Error;
};

struct NotSymmetry : Error {
    using Error::Error;
};

struct Degenerate : Error {
    using Error::Error;
};

struct SingularityEncountered : Error {
    using Error::Error;
};

struct StepUnderflow : Error {
    using Error::Error;
};

struct AnalyticContinuationUnsupported : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

}  // namespace clsym
