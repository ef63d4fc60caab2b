#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adaquery {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unknown feature id, malformed catalog line, duplicate id.
class CatalogError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class EmptySchemaError : public Error {
public:
    using Error::Error;
};

// Every alternative of a production is Unsupported.
class RuleExhaustedError : public Error {
public:
    using Error::Error;
};

class GenerationExhaustedError : public Error {
public:
    using Error::Error;
};

// Connection or process loss; aborts a campaign.
class FatalAdapterError : public Error {
public:
    using Error::Error;
};

}  // namespace adaquery
