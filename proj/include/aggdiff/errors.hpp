#ifndef AGGDIFF_ERRORS_HPP
#define AGGDIFF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace aggdiff {

/// State became non-finite during time integration; carries the failure time.
class blowup_error : public std::runtime_error {
public:
    blowup_error(const std::string& what, double time)
        : std::runtime_error(what + " (at t = " + std::to_string(time) + ")"), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// CFL-limited time step fell below dt_min (velocity blow-up / stiffness).
class stiffness_error : public std::runtime_error {
public:
    stiffness_error(const std::string& what, double time)
        : std::runtime_error(what + " (at t = " + std::to_string(time) + ")"), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// A stated hypothesis of an analysis routine does not hold for the given inputs.
class precondition_error : public std::runtime_error {
public:
    explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

/// Not enough data points for a fit or report.
class insufficient_data_error : public std::runtime_error {
public:
    explicit insufficient_data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Requested profile has an unbounded denominator (|C| too close to sqrt(pi)/2).
class degenerate_profile_error : public std::runtime_error {
public:
    explicit degenerate_profile_error(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration text error; carries the offending line and key when known.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, int line, std::string key = {})
        : std::runtime_error("line " + std::to_string(line) +
                             (key.empty() ? std::string{} : " (key '" + key + "')") + ": " + what),
          line_(line), key_(std::move(key)) {}
    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    int line_;
    std::string key_;
};

}  // namespace aggdiff

#endif
