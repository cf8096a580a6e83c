#pragma once

#include <stdexcept>
#include <string>

namespace beliefwalk {

// Out-of-domain model or operation parameters (non-positive rates, negative
// times, drift outside (0,1), ...).
struct parameter_error : std::domain_error {
  using std::domain_error::domain_error;
};

// Floating-point drift beyond what round-off can explain; indicates an
// algorithmic bug rather than noise.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input rows or degenerate datasets. Carries source context when a
// file is involved.
class data_error : public std::runtime_error {
 public:
  data_error(std::string file, int line, std::string column, const std::string& reason)
      : std::runtime_error(format(file, line, column, reason)),
        file_(std::move(file)),
        line_(line),
        column_(std::move(column)) {}

  explicit data_error(const std::string& reason) : std::runtime_error(reason), line_(0) {}

  const std::string& file() const { return file_; }
  int line() const { return line_; }
  const std::string& column() const { return column_; }

 private:
  static std::string format(const std::string& file, int line, const std::string& column,
                            const std::string& reason) {
    std::string msg = file + ":" + std::to_string(line);
    if (!column.empty()) msg += ": column '" + column + "'";
    msg += ": " + reason;
    return msg;
  }

  std::string file_;
  int line_;
  std::string column_;
};

// Inconsistent run configuration (missing fits for a data cell, unknown model
// names, ...).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Report rendering / output failures.
struct render_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace beliefwalk
