#pragma once

#include <stdexcept>
#include <string>

namespace anderson {

/// Requested allocation exceeds the configured memory budget.
class SizingError : public std::runtime_error {
public:
  explicit SizingError(const std::string& what) : std::runtime_error(what) {}
};

/// An argument value is outside the operation's domain.
class DomainError : public std::runtime_error {
public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// A caller broke an API contract (aliased buffers, mismatched lattices, ...).
class ContractError : public std::runtime_error {
public:
  explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

/// A fit or statistical reduction cannot be carried out on the given data.
class AnalysisError : public std::runtime_error {
public:
  explicit AnalysisError(const std::string& what) : std::runtime_error(what) {}
};

/// A persisted file does not conform to its schema.
class SchemaError : public std::runtime_error {
public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace anderson
