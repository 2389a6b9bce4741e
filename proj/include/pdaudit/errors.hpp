#pragma once

#include <stdexcept>
#include <string>

namespace pdaudit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Catalog validation failure; names the offending property and field.
class CatalogError : public Error {
public:
    CatalogError(std::string property_id, std::string field, const std::string& what)
        : Error(property_id.empty() ? what : property_id + "." + field + ": " + what),
          property_id_(std::move(property_id)), field_(std::move(field)) {}

    const std::string& property_id() const noexcept { return property_id_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::string property_id_;
    std::string field_;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Ground-truth value too short to yield a two-character prefix.
class PrefixTooShort : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Counterfactual budget exceeds what the pool can supply.
class PoolExhausted : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Retryable transport failure talking to a model or external client.
class TransportError : public Error {
public:
    using Error::Error;
};

/// Requested operation needs a backend capability that is absent.
class CapabilityError : public Error {
public:
    using Error::Error;
};

class FixtureError : public Error {
public:
    using Error::Error;
};

/// Persistence failure; callers may retry.
class StorageError : public Error {
public:
    using Error::Error;
};

class NotFound : public Error {
public:
    using Error::Error;
};

} // namespace pdaudit
