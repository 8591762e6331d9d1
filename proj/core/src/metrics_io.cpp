// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <qsr/metrics.hpp>

#include <charconv>
#include <cmath>
#include <ostream>

namespace qsr {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

void write_metrics_header(std::ostream& out) { out << kMetricsHeader << '\n'; }

void write_metrics_row(std::ostream& out, const MetricsRecord& r) {
    const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    out << r.epoch << ',' << opt(r.nll) << ',' << format_double(r.energy) << ','
        << format_double(r.energy_stderr) << ',' << format_double(r.epsilon) << ',' << opt(r.infidelity)
        << ',' << format_double(r.frac_out_sector) << ',' << opt(r.seconds) << '\n';
}

}  // namespace qsr
