#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace leadflux {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input, bad arguments, or bad configuration. The CLI maps these to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A computation could not produce a defined result. The CLI maps these to exit code 3.
class ComputationError : public Error {
public:
    using Error::Error;
};

class MissingColumn : public ValidationError {
public:
    explicit MissingColumn(std::string name)
        : ValidationError("missing mandatory column '" + name + "'"), column(std::move(name)) {}
    std::string column;
};

class RowParseError : public ValidationError {
public:
    RowParseError(std::size_t line_no, std::string field_name, const std::string& why)
        : ValidationError("line " + std::to_string(line_no) + ", field '" + field_name + "': " + why),
          line(line_no), field(std::move(field_name)) {}
    std::size_t line;
    std::string field;
};

class EmptyInput : public ValidationError { public: using ValidationError::ValidationError; };
class InvalidConfig : public ValidationError { public: using ValidationError::ValidationError; };
class InvalidCutoff : public ValidationError { public: using ValidationError::ValidationError; };
class InvalidPolicy : public ValidationError { public: using ValidationError::ValidationError; };
class InvalidGuardrail : public ValidationError { public: using ValidationError::ValidationError; };
class OverlappingBuckets : public ValidationError { public: using ValidationError::ValidationError; };
class NonFiniteInput : public ValidationError { public: using ValidationError::ValidationError; };

class SupportMismatch : public ComputationError { public: using ComputationError::ComputationError; };
class InsufficientMonths : public ComputationError { public: using ComputationError::ComputationError; };
class NoBaselineData : public ComputationError { public: using ComputationError::ComputationError; };
class SeriesTooShort : public ComputationError { public: using ComputationError::ComputationError; };
class ZeroPickup : public ComputationError { public: using ComputationError::ComputationError; };
class EmptyCohort : public ComputationError { public: using ComputationError::ComputationError; };
class ZeroScale : public ComputationError { public: using ComputationError::ComputationError; };
class AllPairsDegenerate : public ComputationError { public: using ComputationError::ComputationError; };

} // namespace leadflux
