// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swrls/regressor.hpp"

namespace swrls {

using Date = std::chrono::year_month_day;

struct SeriesRecord {
  Date date;
  double value;
  std::optional<std::string> quality;
};

/// Whitespace-separated "year month day value ..." lines, '#' comments.
/// `value_column` is the 1-based column holding the temperature (>= 4).
/// Records whose value is NaN/NA are dropped, leaving a gap.
std::vector<SeriesRecord> parse_stockholm(std::string_view text, int value_column = 4);

/// "date,value[,quality]" header then ISO-8601 dates; '#' lines are skipped.
std::vector<SeriesRecord> parse_csv(std::string_view text);

enum class GapPolicy { fail, interpolate, previous };

GapPolicy parse_gap_policy(std::string_view name);
std::string_view to_string(GapPolicy policy) noexcept;

/// Daily series with k = 1 at `origin` and no missing days.
struct IndexedSeries {
  Date origin;
  std::vector<Sample> samples;
  /// Dates synthesized by the gap policy.
  std::vector<Date> filled;
  GapPolicy policy = GapPolicy::fail;

  Date date_of(std::int64_t k) const;
  std::int64_t index_of(Date d) const;
};

/// Throws GapError (policy fail, or nothing to hold/interpolate from),
/// RangeError (span outside the data), CalendarError (dates not increasing).
IndexedSeries to_indexed(std::span<const SeriesRecord> records, std::optional<Date> start,
                         std::optional<Date> end, GapPolicy policy = GapPolicy::fail);

/// YYYY-MM-DD; throws CalendarError for impossible dates, RangeError for
/// malformed text.
Date parse_date(std::string_view text);
std::string format_date(Date d);

}  // namespace swrls
