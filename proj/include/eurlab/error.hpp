#pragma once

#include <stdexcept>
#include <string>

namespace eurlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class SelectionError : public Error {
public:
    using Error::Error;
};

class InvalidStateError : public Error {
public:
    using Error::Error;
};

class InvalidProbabilityError : public Error {
public:
    using Error::Error;
};

class BoundLookupError : public Error {
public:
    using Error::Error;
};

class PovmError : public Error {
public:
    using Error::Error;
};

class RefinementRejected : public Error {
public:
    using Error::Error;
};

class ClassificationAmbiguous : public Error {
public:
    ClassificationAmbiguous(const std::string& what, double min_value)
        : Error(what), min_value_(min_value) {}
    double min_value() const noexcept { return min_value_; }

private:
    double min_value_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace eurlab
