#pragma once

#include "relanom/data_prep.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace relanom {

/// Numeric table read from CSV. A trailing column named "label" is split off
/// into `labels` and never enters the numeric data.
struct CsvTable {
    RawDataset data;
    std::optional<std::vector<std::string>> labels;
};

/// Header row, then comma-separated decimal reals. Empty or unparsable cells
/// reject the whole input with the offending line number.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

void write_csv(std::ostream& out, const RawDataset& data, const std::vector<std::string>* labels = nullptr);

/// Runs `writer` against a temporary file next to `path` and renames it into
/// place once the stream has been flushed successfully.
void write_file_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);

}  // namespace relanom
