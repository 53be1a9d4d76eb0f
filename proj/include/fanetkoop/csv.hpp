#pragma once

#include <string>
#include <vector>

#include "fanetkoop/common.hpp"

namespace fanetkoop {

/// Minimal CSV writer: header row then plain comma-joined cells (values
/// never contain commas or quotes in our schemas).
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header);

    void add_row(std::vector<std::string> cells);
    std::string str() const;
    void write_file(const std::string& path) const;

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // throws DataError if absent
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace fanetkoop
