#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace lucky {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An interval operation was applied outside its domain (log of a
// nonpositive bound, division by an interval containing zero, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// An index or value lies beyond what the lucky table (or a sieve window)
// can answer.
class RangeError : public Error {
public:
    using Error::Error;
};

// A named input required by the requested computation was not supplied.
class MissingParameterError : public Error {
public:
    using Error::Error;
};

// A memory request for a sieve window could not be satisfied.
class ResourceError : public Error {
public:
    using Error::Error;
};

// Malformed lucky table file.
class FormatError : public Error {
public:
    enum class Kind { Io, CorruptHeader, Truncated, ChecksumMismatch };

    FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

// A constant derivation was asked to run on inputs that violate the
// hypotheses of the lemma it implements.
class HypothesisError : public Error {
public:
    HypothesisError(std::string stage, std::string lemma, std::string detail)
        : Error((stage.empty() ? "" : stage + ": ") + lemma + ": " + detail),
          stage_(std::move(stage)), lemma_(std::move(lemma)), detail_(std::move(detail)) {}

    const std::string& stage() const noexcept { return stage_; }
    const std::string& lemma() const noexcept { return lemma_; }
    const std::string& detail() const noexcept { return detail_; }

    // The pipeline attaches its stage name once it is known.
    HypothesisError with_stage(const std::string& stage) const {
        return HypothesisError(stage, lemma_, detail_);
    }

private:
    std::string stage_;
    std::string lemma_;
    std::string detail_;
};

}  // namespace lucky
