// Error taxonomy shared across the simulator.
#pragma once

#include <stdexcept>
#include <string>

namespace manet {

class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

// Attempt to schedule an event before the current clock.
class SchedulingInPast : public SimError {
public:
    explicit SchedulingInPast(const std::string& what) : SimError(what) {}
};

// Time query outside a path's covered interval.
class OutOfRangeTime : public SimError {
public:
    explicit OutOfRangeTime(const std::string& what) : SimError(what) {}
};

class InvalidParams : public SimError {
public:
    explicit InvalidParams(const std::string& what) : SimError(what) {}
};

class UnknownProtocol : public SimError {
public:
    explicit UnknownProtocol(const std::string& name)
        : SimError("unknown protocol: " + name) {}
};

// Config/scenario validation failure; carries the offending field path.
class ValidationError : public SimError {
public:
    ValidationError(std::string field, const std::string& what)
        : SimError(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Text-format parse failure; carries the 1-based line number.
class ParseError : public SimError {
public:
    ParseError(int line, const std::string& what)
        : SimError("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

} // namespace manet
