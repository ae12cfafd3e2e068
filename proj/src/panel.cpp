#include "sectorcorr/panel.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace sectorcorr {

namespace {

std::int64_t parse_count(std::string_view field, std::size_t line_no,
                         const char* name) {
  std::int64_t value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || field.empty()) {
    std::ostringstream msg;
    msg << "panel CSV line " << line_no << ": field '" << name
        << "' is not an integer: '" << field << "'";
    throw std::runtime_error(msg.str());
  }
  return value;
}

std::string_view next_field(std::string_view& rest, std::size_t line_no) {
  const auto comma = rest.find(',');
  if (comma == std::string_view::npos) {
    std::ostringstream msg;
    msg << "panel CSV line " << line_no << ": expected 5 comma-separated fields";
    throw std::runtime_error(msg.str());
  }
  const std::string_view field = rest.substr(0, comma);
  rest.remove_prefix(comma + 1);
  return field;
}

}  // namespace

void validate(const Panel& panel) {
  if (panel.size() < 2) {
    throw std::domain_error("Panel: need more than one observation date");
  }
  std::int64_t prev_t = 0;
  bool first = true;
  for (const PanelRow& row : panel) {
    if (!first && row.t <= prev_t) {
      throw std::domain_error("Panel: date indices must be strictly increasing");
    }
    first = false;
    prev_t = row.t;
    if (row.n < 1 || row.n_tilde < 1) {
      throw std::domain_error("Panel: cohort sizes must be at least 1");
    }
    if (row.d < 0 || row.d > row.n || row.d_tilde < 0 ||
        row.d_tilde > row.n_tilde) {
      throw std::domain_error("Panel: event counts must satisfy 0 <= d <= n");
    }
  }
}

Panel read_panel_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw std::runtime_error("panel CSV line 1: missing header");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,n,d,n_tilde,d_tilde") {
    throw std::runtime_error(
        "panel CSV line 1: header must be 't,n,d,n_tilde,d_tilde'");
  }
  Panel panel;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view rest{line};
    PanelRow row;
    row.t = parse_count(next_field(rest, line_no), line_no, "t");
    row.n = parse_count(next_field(rest, line_no), line_no, "n");
    row.d = parse_count(next_field(rest, line_no), line_no, "d");
    row.n_tilde = parse_count(next_field(rest, line_no), line_no, "n_tilde");
    if (rest.find(',') != std::string_view::npos) {
      std::ostringstream msg;
      msg << "panel CSV line " << line_no << ": expected exactly 5 fields";
      throw std::runtime_error(msg.str());
    }
    row.d_tilde = parse_count(rest, line_no, "d_tilde");
    panel.push_back(row);
  }
  validate(panel);
  return panel;
}

Panel read_panel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open panel CSV: " + path);
  }
  return read_panel_csv(in);
}

void write_panel_csv(std::ostream& out, const Panel& panel) {
  out << "t,n,d,n_tilde,d_tilde\n";
  for (const PanelRow& row : panel) {
    out << row.t << ',' << row.n << ',' << row.d << ',' << row.n_tilde << ','
        << row.d_tilde << '\n';
  }
}

void write_panel_csv(const std::string& path, const Panel& panel) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  write_panel_csv(out, panel);
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

}  // namespace sectorcorr
