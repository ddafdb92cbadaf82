#ifndef EXPFIT_COMMON_HPP
#define EXPFIT_COMMON_HPP

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>

namespace expfit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Pointwise scalar coefficient field on a 2-D (or 3-D) domain.
using ScalarField2 = std::function<double(double, double)>;
using ScalarField3 = std::function<double(double, double, double)>;
using VectorField2 = std::function<Vec2(double, double)>;

/// Base class of all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an analytic expression cannot be evaluated at a point
/// (division by zero, log of a non-positive value, ...).
class EvalDomainError : public Error {
public:
    EvalDomainError(const std::string& what, std::string subexpr)
        : Error(what + " in '" + subexpr + "'"), subexpr_(std::move(subexpr)) {}
    const std::string& subexpression() const { return subexpr_; }

private:
    std::string subexpr_;
};

/// Raised by the expression parser; carries a 1-based column position.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int column)
        : Error(what + " (column " + std::to_string(column) + ")"), column_(column) {}
    int column() const { return column_; }

private:
    int column_;
};

/// Mesh file / consistency problems; `line` is 0 when not file-related.
class MeshError : public Error {
public:
    explicit MeshError(const std::string& what, int line = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// Raised when a per-element fit matrix is numerically singular.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, int rank, int size)
        : Error(what), rank_(rank), size_(size) {}
    int rank() const { return rank_; }
    int size() const { return size_; }

private:
    int rank_;
    int size_;
};

/// Linear solver failures (non-convergence, indefiniteness).
class SolverError : public Error {
public:
    using Error::Error;
};

/// Configuration file problems; names the offending key.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what, std::string key = "")
        : Error(key.empty() ? what : what + ": " + key), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

} // namespace expfit

#endif
