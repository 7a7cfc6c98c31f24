#pragma once

#include <string>

#include "budgetal/dataset.hpp"

namespace budgetal::datagen {

/// Reads a dataset from CSV: UTF-8, comma separated, first row is the
/// header, one column named `label` holds base-10 integers, every other
/// column is a base-10 real feature in header order. Labels must already be
/// the contiguous range 0..C-1. Parse errors name the offending line.
Dataset load_csv(const std::string& path);

/// Inverse of load_csv; features are written with enough digits to round
/// trip exactly. Columns are f0..f{d-1},label.
void save_csv(const Dataset& dataset, const std::string& path);

}  // namespace budgetal::datagen
