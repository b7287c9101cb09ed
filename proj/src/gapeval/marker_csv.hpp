#pragma once

#include <optional>
#include <string>

#include "gapeval/types.hpp"

namespace gapeval {

/// Fixed significant-digit formatting used by every CSV writer, so that
/// identical values always serialize to identical bytes.
std::string format_value(double v);

/// Marker CSV: header `frame,time,<marker>:x,<marker>:y,<marker>:z,...`,
/// one row per frame, positions in cm, empty field = value absent,
/// LF line endings, `.` decimal separator.
MarkerSequence read_markers(const std::string& path, std::optional<double> fps_override = std::nullopt);
void write_markers(const MarkerSequence& seq, const std::string& path);

/// Mask CSV: header `frame,<marker>,...`, cells 0|1 (1 = observed).
ObservationMask read_mask(const std::string& path, std::vector<std::string>* marker_ids = nullptr);
void write_mask(const ObservationMask& mask, const std::vector<std::string>& marker_ids,
                const std::string& path);

/// Metrics CSV: header `stimulus_id,metric,value,norm_mode`.
MetricReport read_metric_report(const std::string& path);
void write_metric_report(const MetricReport& report, const std::string& path);
void append_metric_report(const MetricReport& report, const std::string& path);

/// Ratings CSV: header `stimulus_id,rater_id,rating`.
RatingsTable read_ratings(const std::string& path);
void write_ratings(const RatingsTable& table, const std::string& path);

/// Correlation CSV: header `metric,tau,p_value,ci_lo,ci_hi,n_stimuli`.
struct CorrelationRow;
void write_correlation_csv(const std::vector<CorrelationRow>& rows, const std::string& path);

/// Writes `content` to `path` via a temp file and rename, so readers never
/// observe a partial file.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace gapeval
