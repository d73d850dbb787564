#include "dbf/cli/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace dbf::cli {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  fail(ErrorKind::kParse, path.string() + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

TimeSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) parse_fail(path, 1, "missing header");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (trim(line) != "index,value") parse_fail(path, line_no, "expected header 'index,value'");

  std::vector<double> values;
  long origin = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      parse_fail(path, line_no, "expected two comma-separated fields");
    }
    const std::string index_text = trim(line.substr(0, comma));
    const std::string value_text = trim(line.substr(comma + 1));
    long index = 0;
    auto [iend, iec] = std::from_chars(index_text.data(), index_text.data() + index_text.size(), index);
    if (iec != std::errc() || iend != index_text.data() + index_text.size()) {
      parse_fail(path, line_no, "bad index '" + index_text + "'");
    }
    double value = 0.0;
    auto [vend, vec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (vec != std::errc() || vend != value_text.data() + value_text.size() || !std::isfinite(value)) {
      parse_fail(path, line_no, "bad value '" + value_text + "'");
    }
    if (values.empty()) {
      origin = index;
    } else if (index != origin + static_cast<long>(values.size())) {
      parse_fail(path, line_no, "index is not consecutive");
    }
    values.push_back(value);
  }
  if (values.empty()) fail(ErrorKind::kSeriesTooShort, path.string() + ": no data rows");
  return TimeSeries(std::move(values), origin);
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) fail(ErrorKind::kNumericalFailure, "cannot format a double");
  return std::string(buf, end);
}

std::string series_csv(std::span<const double> values, long origin_index) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += std::to_string(origin_index + static_cast<long>(i));
    out += ',';
    out += format_double(values[i]);
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
    out << contents;
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      fail(ErrorKind::kIo, "write failed for " + path.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::kIo, "cannot move output into place at " + path.string());
  }
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::kParse, path.string() + ": " + e.what());
  }
}

}  // namespace dbf::cli
