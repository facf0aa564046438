#pragma once

#include <optional>

#include "qrdyn/cli.hpp"
#include "qrdyn/io.hpp"

namespace qrdyn::cli {

// Certificate per the --cert choice. Auto tries Hölder then the doubling
// search and returns nullopt for maps with no certificate; explicit choices
// propagate estimation errors.
std::optional<EscapeCertificate> choose_certificate(const MapInstance& f, CertChoice choice,
                                                    std::vector<std::string>& notes);

// Runs the suite named in cfg.suite, appending checks to the report.
void run_suite(const RunConfig& cfg, ReportDocument& report);

}  // namespace qrdyn::cli
