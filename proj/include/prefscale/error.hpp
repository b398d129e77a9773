#ifndef PREFSCALE_ERROR_HPP
#define PREFSCALE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace prefscale {

/// Malformed or inconsistent input data (corpus, factors, model and result files).
class data_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model was asked to score before it had any training evidence.
class untrained_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Hill climbing hit its iteration cap without terminating.
class convergence_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace prefscale

#endif  // PREFSCALE_ERROR_HPP
