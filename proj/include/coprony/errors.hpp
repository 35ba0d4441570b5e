#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace coprony {

enum class ErrorKind {
    InvalidInput,
    SampleUnavailable,
    OrderMismatch,
    NotCoprime,
    InvalidEigenvalue,
    InvalidSchedule,
    InvalidCalibration,
    DegenerateCoefficient,
    BudgetExceeded,
    InconclusiveOrder,
    Config,
    Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// A requested time index is not present in a trace (or would be negative).
class SampleUnavailable : public Error {
public:
    explicit SampleUnavailable(std::int64_t index)
        : Error(ErrorKind::SampleUnavailable,
                "sample unavailable at index " + std::to_string(index)),
          index_(index) {}

    std::int64_t index() const noexcept { return index_; }

private:
    std::int64_t index_;
};

class OrderMismatch : public Error {
public:
    OrderMismatch(std::size_t requested, std::size_t detected)
        : Error(ErrorKind::OrderMismatch,
                "order mismatch: requested " + std::to_string(requested) +
                    " terms but effective rank is " + std::to_string(detected)),
          requested_(requested), detected_(detected) {}

    std::size_t requested() const noexcept { return requested_; }
    std::size_t detected_rank() const noexcept { return detected_; }

private:
    std::size_t requested_;
    std::size_t detected_;
};

class DegenerateCoefficient : public Error {
public:
    explicit DegenerateCoefficient(std::size_t term)
        : Error(ErrorKind::DegenerateCoefficient,
                "coefficient " + std::to_string(term) +
                    " vanishes at the base grid (possible cancellation)"),
          term_(term) {}

    std::size_t term() const noexcept { return term_; }

private:
    std::size_t term_;
};

class InconclusiveOrder : public Error {
public:
    InconclusiveOrder(std::string what, std::vector<std::size_t> partial_ranks)
        : Error(ErrorKind::InconclusiveOrder, std::move(what)),
          partial_(std::move(partial_ranks)) {}

    const std::vector<std::size_t>& partial_ranks() const noexcept { return partial_; }

private:
    std::vector<std::size_t> partial_;
};

}  // namespace coprony
