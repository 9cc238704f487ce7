// errors.hpp — exception taxonomy shared by all fibrate modules.

#pragma once

#include <stdexcept>
#include <string>

namespace fibrate {

// Invalid construction input (grid spec, problem parameters, config).
struct BadSpec : std::invalid_argument {
    explicit BadSpec(const std::string& msg) : std::invalid_argument("BadSpec: " + msg) {}
};

struct BadParams : std::invalid_argument {
    explicit BadParams(const std::string& msg) : std::invalid_argument("BadParams: " + msg) {}
};

// Homogeneity-degree ordering of a power class violated.
struct BadDegrees : std::invalid_argument {
    explicit BadDegrees(const std::string& msg) : std::invalid_argument("BadDegrees: " + msg) {}
};

struct BadLevel : std::invalid_argument {
    explicit BadLevel(const std::string& msg) : std::invalid_argument("BadLevel: " + msg) {}
};

// |I2(u)| below machine threshold; the Rayleigh quotient is undefined.
struct ZeroDenominator : std::runtime_error {
    explicit ZeroDenominator(const std::string& msg) : std::runtime_error("ZeroDenominator: " + msg) {}
};

// u lies outside D, the domain where the fiber map has a critical point.
struct NotInD : std::runtime_error {
    explicit NotInD(const std::string& msg) : std::runtime_error("NotInD: " + msg) {}
};

// |psi''(t0)| at the fiber critical point is numerically zero.
struct DegenerateFiber : std::runtime_error {
    explicit DegenerateFiber(const std::string& msg) : std::runtime_error("DegenerateFiber: " + msg) {}
};

// |J'_mu(v)v| is numerically zero; the Nehari class is undecidable.
struct DegenerateNehari : std::runtime_error {
    explicit DegenerateNehari(const std::string& msg) : std::runtime_error("DegenerateNehari: " + msg) {}
};

struct GridMismatch : std::runtime_error {
    explicit GridMismatch(const std::string& msg) : std::runtime_error("GridMismatch: " + msg) {}
};

struct NotRadial : std::runtime_error {
    explicit NotRadial(const std::string& msg) : std::runtime_error("NotRadial: " + msg) {}
};

struct ConvergenceFailure : std::runtime_error {
    explicit ConvergenceFailure(const std::string& msg) : std::runtime_error("ConvergenceFailure: " + msg) {}
};

// An optimizer iterate left D and step halving could not recover.
struct LeftD : std::runtime_error {
    explicit LeftD(const std::string& msg) : std::runtime_error("LeftD: " + msg) {}
};

// The whole surrogate sphere misses D; the min-max bound is undefined.
struct SamplerOutOfD : std::runtime_error {
    explicit SamplerOutOfD(const std::string& msg) : std::runtime_error("SamplerOutOfD: " + msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error("FormatError: " + msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error("IoError: " + msg) {}
};

} // namespace fibrate
