#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sectorcorr {

//! One observation date: cohort sizes and event counts for both sectors.
struct PanelRow {
  std::int64_t t = 0;        //!< date index, strictly increasing across rows
  std::int64_t n = 0;        //!< sector A cohort size, >= 1
  std::int64_t d = 0;        //!< sector A event count, 0 <= d <= n
  std::int64_t n_tilde = 0;  //!< sector B cohort size, >= 1
  std::int64_t d_tilde = 0;  //!< sector B event count
};

using Panel = std::vector<PanelRow>;

//! Throws std::domain_error when the panel violates its invariants
//! (T > 1, strictly increasing dates, 1 <= n, 0 <= d <= n per sector).
void validate(const Panel& panel);

//! Panel CSV interchange format: header `t,n,d,n_tilde,d_tilde`, one row per
//! observation date, LF line endings. Parse failures throw std::runtime_error
//! with the offending line number; the parsed panel is validated before
//! returning.
Panel read_panel_csv(std::istream& in);
Panel read_panel_csv(const std::string& path);
void write_panel_csv(std::ostream& out, const Panel& panel);
void write_panel_csv(const std::string& path, const Panel& panel);

}  // namespace sectorcorr
