#ifndef STPOT_ERROR_HPP
#define STPOT_ERROR_HPP

#include <stdexcept>
#include <string>

namespace stpot {

/** Raised when input data is malformed or inconsistent (bad files, unknown
 *  ids, out-of-range coordinates, missing upstream artifacts). */
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/** Raised when a computation cannot proceed numerically (degenerate
 *  moments, non-finite objective, singular systems). */
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stpot

#endif
