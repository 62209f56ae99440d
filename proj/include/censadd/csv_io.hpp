#pragma once

#include "censadd/additive.hpp"
#include "censadd/survival.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace censadd {

//! Shortest round-trip-safe text for a double (%.17g).
std::string format_double(double value);

//! Splits one CSV record; double-quoted fields may contain commas and "".
std::vector<std::string> split_csv_record(const std::string& line);

//! Reads a header `z,delta,x1,...,xd` followed by one row per observation.
//! Errors are std::invalid_argument naming `source` and the line number.
CensoredSample read_sample_csv(std::istream& in, const std::string& source = "<input>");
CensoredSample read_sample_csv_file(const std::string& path);
void write_sample_csv(std::ostream& out, const CensoredSample& sample);

//! Columns axis, x, eta_hat, sigma_hat, ci_lo, ci_hi, eta_true_if_known;
//! axes are written 1-based and missing values as empty fields.
void write_bands_csv(std::ostream& out, const AdditiveFit& fit);
//! Inverse of write_bands_csv (the constant is not part of the table).
AdditiveFit read_bands_csv(std::istream& in, const std::string& source = "<input>");

} // namespace censadd
