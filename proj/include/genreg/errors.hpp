#pragma once

#include <stdexcept>
#include <string>

namespace genreg {

// Base for everything thrown by the library. CLI maps ConfigError to exit
// code 2 and NumericError to exit code 3.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

// Submatrix columns are linearly dependent.
struct RankDeficient : NumericError {
    explicit RankDeficient(const std::string& msg) : NumericError(msg) {}
};

// Infeasible model scored before any feasible model exists in the ledger.
struct NoFeasibleHistory : NumericError {
    explicit NoFeasibleHistory(const std::string& msg) : NumericError(msg) {}
};

// Requested model has at least n active variables where a fit is required.
struct SizeTooLarge : NumericError {
    explicit SizeTooLarge(const std::string& msg) : NumericError(msg) {}
};

struct HolpRequiresWide : ConfigError {
    explicit HolpRequiresWide(const std::string& msg) : ConfigError(msg) {}
};

struct AllGammaZero : NumericError {
    explicit AllGammaZero(const std::string& msg) : NumericError(msg) {}
};

struct PiTooLarge : ConfigError {
    explicit PiTooLarge(const std::string& msg) : ConfigError(msg) {}
};

// Population failed its construction contract (size, feasibility, lengths).
struct ContractViolation : ConfigError {
    explicit ContractViolation(const std::string& msg) : ConfigError(msg) {}
};

// Exact-chain state space exceeds the enumeration cap.
struct TooLarge : ConfigError {
    explicit TooLarge(const std::string& msg) : ConfigError(msg) {}
};

struct NoConvergence : NumericError {
    explicit NoConvergence(const std::string& msg) : NumericError(msg) {}
};

// Escape probability underflow: no finite hitting-time bound.
struct XiZero : NumericError {
    explicit XiZero(const std::string& msg) : NumericError(msg) {}
};

// Every averaging candidate was dropped by the leverage guard.
struct LeverageOne : NumericError {
    explicit LeverageOne(const std::string& msg) : NumericError(msg) {}
};

}  // namespace genreg
