#pragma once

#include <stdexcept>
#include <string>

namespace wmf {

// Base class for all library errors. The CLI maps InputError -> exit code 2
// and NumericError -> exit code 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InputError : public Error {
public:
    explicit InputError(const std::string& msg) : Error(msg) {}
};

class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

class SingularDesign : public NumericError {
public:
    explicit SingularDesign(const std::string& msg) : NumericError(msg) {}
};

class NonFiniteInput : public InputError {
public:
    explicit NonFiniteInput(const std::string& msg) : InputError(msg) {}
};

class NotOrthogonal : public InputError {
public:
    explicit NotOrthogonal(const std::string& msg) : InputError(msg) {}
};

class NoConvergence : public NumericError {
public:
    explicit NoConvergence(const std::string& msg) : NumericError(msg) {}
};

class EmptyTable : public InputError {
public:
    explicit EmptyTable(const std::string& msg) : InputError(msg) {}
};

class FoldTooSmall : public InputError {
public:
    explicit FoldTooSmall(const std::string& msg) : InputError(msg) {}
};

class NonPositiveSigma : public NumericError {
public:
    explicit NonPositiveSigma(const std::string& msg) : NumericError(msg) {}
};

class Separation : public NumericError {
public:
    explicit Separation(const std::string& msg) : NumericError(msg) {}
};

class UnknownCriterion : public InputError {
public:
    explicit UnknownCriterion(const std::string& msg) : InputError(msg) {}
};

class ParseError : public InputError {
public:
    explicit ParseError(const std::string& msg) : InputError(msg) {}
};

class NonFiniteValue : public InputError {
public:
    explicit NonFiniteValue(const std::string& msg) : InputError(msg) {}
};

class EmptyFile : public InputError {
public:
    explicit EmptyFile(const std::string& msg) : InputError(msg) {}
};

} // namespace wmf
