#pragma once

#include <stdexcept>
#include <string>

namespace mfs {

// Malformed textual/JSON input (bad token, bad line, unknown label, ...).
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// A mathematical precondition does not hold (non-hermitian input, broken
// unitarity, projector/rotation commutation failure, ...).
class constraint_error : public std::runtime_error {
public:
    explicit constraint_error(const std::string& what) : std::runtime_error(what) {}
};

// Request exceeds a hard resource limit (dense dimension cap, closure cap).
class capacity_error : public std::runtime_error {
public:
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

}
