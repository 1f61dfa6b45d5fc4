//SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace msdi {

// Error taxonomy shared by the library and the CLI. The CLI maps each
// category to a stable process exit code.
enum class ErrorCategory {
    Validation,     // bad input data, argument, or domain violation
    FitFailure,     // an iterative fit did not converge or degenerated
    Io,             // file or network trouble
    ModelMismatch,  // model document does not match the input series
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

    int exit_code() const noexcept {
        switch (category_) {
        case ErrorCategory::Validation: return 2;
        case ErrorCategory::FitFailure: return 3;
        case ErrorCategory::Io: return 4;
        case ErrorCategory::ModelMismatch: return 5;
        }
        return 1;
    }

private:
    ErrorCategory category_;
};

[[noreturn]] inline void throw_validation(const std::string& msg) {
    throw Error(ErrorCategory::Validation, msg);
}
[[noreturn]] inline void throw_fit(const std::string& msg) {
    throw Error(ErrorCategory::FitFailure, msg);
}
[[noreturn]] inline void throw_io(const std::string& msg) {
    throw Error(ErrorCategory::Io, msg);
}
[[noreturn]] inline void throw_mismatch(const std::string& msg) {
    throw Error(ErrorCategory::ModelMismatch, msg);
}

}  // namespace msdi
