#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace micropump {

/// Bad input data: configuration keys, material tensors, geometry, file contents.
/// Collects every violation found, not just the first.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::string issue)
        : std::runtime_error(issue), issues_{std::move(issue)} {}

    explicit ValidationError(std::vector<std::string> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<std::string>& issues() const { return issues_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) {
            if (i) s += "\n";
            s += v[i];
        }
        return s;
    }
    std::vector<std::string> issues_;
};

/// Runtime numerical failure: CFL violation, solver non-convergence,
/// sub-iteration divergence, indefinite matrices.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Accumulates validation issues and throws once at the end.
class IssueList {
public:
    void add(std::string msg) { issues_.push_back(std::move(msg)); }
    bool empty() const { return issues_.empty(); }
    void throw_if_any() const {
        if (!issues_.empty()) throw ValidationError(issues_);
    }
    const std::vector<std::string>& issues() const { return issues_; }

private:
    std::vector<std::string> issues_;
};

} // namespace micropump
