#pragma once

#include <stdexcept>
#include <string>

namespace aerialnet {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error("config: " + key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

// Quadrature or root-finding failed to meet its tolerance.
class NumericsError : public Error {
public:
    using Error::Error;
};

class NoRouteError : public Error {
public:
    using Error::Error;
};

class NoServerError : public Error {
public:
    using Error::Error;
};

class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace aerialnet
