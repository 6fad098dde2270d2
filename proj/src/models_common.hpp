#pragma once

#include <span>
#include <vector>

#include "graspeeg/models.hpp"

namespace graspeeg::detail {

// Sorted distinct label codes and each row's class index among them.
struct EncodedLabels {
  std::vector<int> classes;
  std::vector<std::size_t> index;
};

EncodedLabels encode_labels(std::span<const int> y);

// First index of the maximum value.
std::size_t argmax(std::span<const double> values);

void check_fit_input(const Matrix& X, std::span<const int> y, const char* who);

}  // namespace graspeeg::detail
