#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace triptrie {

/// All library failures throw this (or a subclass). `code()` is a stable
/// machine-readable identifier; `what()` is for humans.
class error : public std::runtime_error {
public:
    error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Thrown when a single sample of a trip falls outside the grid; the whole
// trip is rejected and the offending sample index is reported.
class trip_rejected : public error {
public:
    trip_rejected(std::size_t sample_index, const std::string& message)
        : error("trip_rejected", message), sample_index_(sample_index) {}

    std::size_t sample_index() const noexcept { return sample_index_; }

private:
    std::size_t sample_index_;
};

} // namespace triptrie
