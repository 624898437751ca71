#pragma once

#include <stdexcept>
#include <string>

namespace spectramass {

// Base class for all spectramass runtime failures.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A quadrature, series or iterative scheme exhausted its budget before
// reaching the requested tolerance.
class NonConvergent : public Error {
public:
    explicit NonConvergent(const std::string& what) : Error(what) {}
};

class NotSymmetric : public Error {
public:
    explicit NotSymmetric(const std::string& what) : Error(what) {}
};

class TooLarge : public Error {
public:
    explicit TooLarge(const std::string& what) : Error(what) {}
};

class DimensionTooLarge : public Error {
public:
    explicit DimensionTooLarge(const std::string& what) : Error(what) {}
};

class MissingTailModel : public Error {
public:
    explicit MissingTailModel(const std::string& what) : Error(what) {}
};

class NonPositiveConductance : public Error {
public:
    explicit NonPositiveConductance(const std::string& what) : Error(what) {}
};

class BadCharacterTable : public Error {
public:
    explicit BadCharacterTable(const std::string& what) : Error(what) {}
};

// Isotypic trace failed to round to an integer: broken symmetry or a
// clustering failure upstream.
class NonIntegerTrace : public Error {
public:
    explicit NonIntegerTrace(const std::string& what) : Error(what) {}
};

class BoundViolated : public Error {
public:
    explicit BoundViolated(const std::string& what) : Error(what) {}
};

class ZeroVector : public Error {
public:
    explicit ZeroVector(const std::string& what) : Error(what) {}
};

class DegeneratePhase : public Error {
public:
    explicit DegeneratePhase(const std::string& what) : Error(what) {}
};

class LevelTooLarge : public Error {
public:
    explicit LevelTooLarge(const std::string& what) : Error(what) {}
};

} // namespace spectramass
