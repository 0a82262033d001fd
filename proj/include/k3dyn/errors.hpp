#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace k3dyn {

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class NotUnimodular : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed input file or literal. `where` names the offending field.
class FormatError : public Error {
public:
    FormatError(std::string where, const std::string& what)
        : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

/// A fiber of one of the two projections is not a line meeting a conic in
/// two points: the linear form vanishes, or the line lies on the conic.
class DegenerateFiber : public Error {
public:
    DegenerateFiber(int projection, std::string point, const std::string& reason,
                    std::optional<long> step = std::nullopt)
        : Error(describe(projection, point, reason, step)),
          projection_(projection),
          point_(std::move(point)),
          reason_(reason),
          step_(step) {}

    int projection() const noexcept { return projection_; }
    const std::string& point() const noexcept { return point_; }
    const std::string& reason() const noexcept { return reason_; }
    std::optional<long> step() const noexcept { return step_; }

    DegenerateFiber at_step(long k) const { return {projection_, point_, reason_, k}; }

private:
    static std::string describe(int projection, const std::string& point,
                                const std::string& reason, std::optional<long> step) {
        std::string msg = "degenerate fiber of projection " + std::to_string(projection) +
                          " at " + point + ": " + reason;
        if (step) msg += " (orbit step " + std::to_string(*step) + ")";
        return msg;
    }

    int projection_;
    std::string point_;
    std::string reason_;
    std::optional<long> step_;
};

class DegenerateReduction : public Error {
public:
    using Error::Error;
};

}  // namespace k3dyn
