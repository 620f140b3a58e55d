#pragma once

#include "relanom/pipeline.hpp"

#include <filesystem>
#include <iosfwd>

namespace relanom {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON with round-trip precision. Non-finite values are written
/// as the strings "inf"/"-inf" and NaN as null. The similarity graph itself
/// is not stored; training data, configuration and fitted state are enough
/// to score new observations.
void save_model(std::ostream& out, const FittedModel& model);
FittedModel load_model(std::istream& in);

void save_model_file(const std::filesystem::path& path, const FittedModel& model);
FittedModel load_model_file(const std::filesystem::path& path);

}  // namespace relanom
