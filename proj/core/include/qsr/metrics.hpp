// Copyright 2026 The qsr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

namespace qsr {

/// One evaluation row. Optional fields print as empty CSV cells.
struct MetricsRecord {
    int epoch = 0;
    std::optional<double> nll;  ///< mean NLL over the training set
    double energy = 0.0;
    double energy_stderr = 0.0;
    double epsilon = 0.0;  ///< |E_model - E_exact| / N
    std::optional<double> infidelity;
    double frac_out_sector = 0.0;
    std::optional<double> seconds;
};

/// Receives every record as soon as it is produced. Returning false stops
/// training after the current epoch.
using MetricsSink = std::function<bool(const MetricsRecord&)>;

inline constexpr const char* kMetricsHeader =
    "epoch,nll,energy,energy_stderr,epsilon,infidelity,frac_out_sector,seconds";

/// Shortest round-trip formatting of doubles, so reruns are byte-identical.
std::string format_double(double value);

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const MetricsRecord& record);

}  // namespace qsr
