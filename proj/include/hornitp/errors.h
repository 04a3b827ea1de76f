#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hornitp {

// Root of every error raised by the library. The CLI maps any of these to
// exit code 2 unless a subcommand documents something more specific.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string & what) : std::runtime_error(what) {}
};

class SortError : public Error {
public:
    using Error::Error;
};

// A resource budget (cubes, expansion nodes, paths, subsets) was exhausted.
class LimitExceeded : public Error {
public:
    LimitExceeded(std::string budget, std::size_t limit)
        : Error(budget + " limit exceeded (" + std::to_string(limit) + ")"), budget_(std::move(budget)), limit_(limit) {}
    const std::string & budget() const { return budget_; }
    std::size_t limit() const { return limit_; }

private:
    std::string budget_;
    std::size_t limit_;
};

class CubeLimitExceeded : public LimitExceeded {
public:
    explicit CubeLimitExceeded(std::size_t limit) : LimitExceeded("cube", limit) {}
};

class ExpansionLimitExceeded : public LimitExceeded {
public:
    explicit ExpansionLimitExceeded(std::size_t limit) : LimitExceeded("expansion", limit) {}
};

class PathLimitExceeded : public LimitExceeded {
public:
    explicit PathLimitExceeded(std::size_t limit) : LimitExceeded("path", limit) {}
};

class SubsetLimitExceeded : public LimitExceeded {
public:
    explicit SubsetLimitExceeded(std::size_t limit) : LimitExceeded("subset", limit) {}
};

// Integer branching exceeded its depth; the answer is not known.
class UnknownResult : public Error {
public:
    using Error::Error;
};

class MissingSymbol : public Error {
public:
    explicit MissingSymbol(const std::string & symbol) : Error("no definition for relation symbol " + symbol), symbol_(symbol) {}
    const std::string & symbol() const { return symbol_; }

private:
    std::string symbol_;
};

class WrongFragment : public Error {
public:
    using Error::Error;
};

class NotLinear : public WrongFragment {
public:
    using WrongFragment::WrongFragment;
};

class NotBodyDisjoint : public WrongFragment {
public:
    using WrongFragment::WrongFragment;
};

class RecursiveSystem : public Error {
public:
    explicit RecursiveSystem(std::vector<std::string> cycle);
    const std::vector<std::string> & cycle() const { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t col, const std::string & message)
        : Error(std::to_string(line) + ":" + std::to_string(col) + ": " + message), line_(line), col_(col) {}
    std::size_t line() const { return line_; }
    std::size_t col() const { return col_; }

private:
    std::size_t line_;
    std::size_t col_;
};

class UndeclaredSymbol : public ParseError {
public:
    using ParseError::ParseError;
};

class BackendError : public Error {
public:
    using Error::Error;
};

class VerificationFailed : public Error {
public:
    using Error::Error;
};

class NonTerminating : public Error {
public:
    using Error::Error;
};

inline RecursiveSystem::RecursiveSystem(std::vector<std::string> cycle)
    : Error([&] {
          std::string msg = "recursive system, dependence cycle:";
          for (auto const & s : cycle) { msg += " " + s; }
          return msg;
      }()),
      cycle_(std::move(cycle)) {}

} // namespace hornitp
