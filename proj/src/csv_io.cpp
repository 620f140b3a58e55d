#include "relanom/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace relanom {

namespace {

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r");
    return std::string(text.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? comma : comma - start)));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

double parse_real(const std::string& cell, std::size_t line, std::size_t column) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = cell.data() + cell.size();
    if (!cell.empty() && *begin == '+') {
        ++begin;
    }
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (cell.empty() || ec != std::errc() || ptr != end) {
        std::ostringstream msg;
        msg << "line " << line << ", column " << column + 1 << ": cannot parse '" << cell << "' as a number";
        throw std::invalid_argument(msg.str());
    }
    return value;
}

}  // namespace

CsvTable read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("CSV input is empty");
    }
    std::vector<std::string> header = split(line);
    const bool has_labels = header.size() > 1 && header.back() == "label";
    if (has_labels) {
        header.pop_back();
    }
    const std::size_t d = header.size();

    std::vector<double> values;
    std::vector<std::string> labels;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != d + (has_labels ? 1 : 0)) {
            std::ostringstream msg;
            msg << "line " << line_no << ": expected " << d + (has_labels ? 1 : 0) << " cells, found "
                << cells.size();
            throw std::invalid_argument(msg.str());
        }
        for (std::size_t j = 0; j < d; ++j) {
            values.push_back(parse_real(cells[j], line_no, j));
        }
        if (has_labels) {
            labels.push_back(cells.back());
        }
    }

    CsvTable table;
    const auto n = static_cast<Eigen::Index>(d == 0 ? 0 : values.size() / d);
    table.data.column_names = std::move(header);
    table.data.values = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        values.data(), n, static_cast<Eigen::Index>(d));
    if (has_labels) {
        table.labels = std::move(labels);
    }
    table.data.validate();
    return table;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path.string() + "'");
    }
    try {
        return read_csv(in);
    } catch (const std::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

void write_csv(std::ostream& out, const RawDataset& data, const std::vector<std::string>* labels) {
    const auto old_precision = out.precision();
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t j = 0; j < data.column_names.size(); ++j) {
        out << (j ? "," : "") << data.column_names[j];
    }
    if (labels) {
        out << ",label";
    }
    out << '\n';
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            out << (j ? "," : "") << data.values(i, j);
        }
        if (labels) {
            out << ',' << (*labels)[static_cast<std::size_t>(i)];
        }
        out << '\n';
    }
    out.precision(old_precision);
}

void write_file_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    try {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write '" + tmp.string() + "'");
        }
        writer(out);
        out.flush();
        if (!out) {
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
    } catch (...) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw;
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace relanom
