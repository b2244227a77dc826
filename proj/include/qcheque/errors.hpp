// errors.hpp
// Exception hierarchy shared by every qcheque module.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace qcheque {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A handle that no StateGroup of the world contains.
class UnknownHandle : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A merge would push a StateGroup past the world's qubit ceiling.
class CapacityError : public Error {
public:
    using Error::Error;
};

// Raised by overlap() when a register is not a pure state on its own.
class EntangledRegister : public Error {
public:
    using Error::Error;
};

// An adversary touched a qubit it does not hold.
class CustodyViolation : public Error {
public:
    using Error::Error;
};

// Misuse of the cheque protocol, e.g. signing twice from one book.
class ProtocolError : public Error {
public:
    using Error::Error;
};

class SnapshotError : public Error {
public:
    SnapshotError(const std::string& what, std::optional<std::size_t> offset = std::nullopt,
                  std::string path = {})
        : Error(format(what, offset, path)), offset_(offset), path_(std::move(path)) {}

    // Byte offset of a syntax error, when the document did not parse.
    std::optional<std::size_t> offset() const noexcept { return offset_; }
    // JSON pointer to the offending element, when the document parsed but is invalid.
    const std::string& path() const noexcept { return path_; }

private:
    static std::string format(const std::string& what, std::optional<std::size_t> offset,
                              const std::string& path) {
        std::string msg = "snapshot: " + what;
        if (offset) msg += " (at byte " + std::to_string(*offset) + ")";
        if (!path.empty()) msg += " (at " + path + ")";
        return msg;
    }

    std::optional<std::size_t> offset_;
    std::string path_;
};

}  // namespace qcheque
