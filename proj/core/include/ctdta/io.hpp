#pragma once

#include <string>

#include "ctdta/markov.hpp"
#include "ctdta/report.hpp"
#include "ctdta/timed.hpp"

namespace ctdta {

// `source` names the origin (a path) in error messages.
Ctmc parse_ctmc(const std::string& text, const std::string& source = "<string>");
Dta parse_dta(const std::string& text, const std::string& source = "<string>");

// Read a file and parse it; ParseError on syntax, ValidationError on model errors.
Ctmc load_ctmc(const std::string& path);
Dta load_dta(const std::string& path, std::vector<std::string>* warnings = nullptr);

std::string save_ctmc(const Ctmc& c);
std::string save_dta(const Dta& a);

std::string report_to_json(const VerificationReport& r);
std::string report_to_text(const VerificationReport& r);

std::string read_file(const std::string& path);

}  // namespace ctdta
