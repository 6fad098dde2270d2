#include "models_common.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "graspeeg/error.hpp"

namespace graspeeg::detail {

EncodedLabels encode_labels(std::span<const int> y) {
  EncodedLabels enc;
  enc.classes.assign(y.begin(), y.end());
  std::sort(enc.classes.begin(), enc.classes.end());
  enc.classes.erase(std::unique(enc.classes.begin(), enc.classes.end()), enc.classes.end());
  enc.index.reserve(y.size());
  for (int v : y)
    enc.index.push_back(static_cast<std::size_t>(
        std::lower_bound(enc.classes.begin(), enc.classes.end(), v) - enc.classes.begin()));
  return enc;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

void check_fit_input(const Matrix& X, std::span<const int> y, const char* who) {
  if (X.rows() != y.size()) throw DataError(std::string(who) + ": row count differs from label count");
  if (X.rows() == 0 || X.cols() == 0) throw DataError(std::string(who) + ": empty training data");
  for (double v : X.data())
    if (!std::isfinite(v)) throw DataError(std::string(who) + ": non-finite feature value");
}

}  // namespace graspeeg::detail
