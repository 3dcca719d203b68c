// SPDX-License-Identifier: Apache-2.0
#include "swrls/ingest.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "swrls/error.hpp"

namespace swrls {

namespace {

using std::chrono::sys_days;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> split_on(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <class F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    const auto line = text.substr(start, pos == std::string_view::npos ? pos : pos - start);
    ++line_no;
    f(line, line_no);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
}

bool is_missing_token(std::string_view t) {
  return t == "NaN" || t == "nan" || t == "NA" || t == "na";
}

std::optional<double> to_double(std::string_view t) {
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

std::optional<int> to_int(std::string_view t) {
  int v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.data() + t.size()) return std::nullopt;
  return v;
}

Date make_date(int y, int m, int d) {
  const Date date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                  std::chrono::day{static_cast<unsigned>(d)}};
  if (m < 1 || d < 1 || !date.ok()) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "invalid calendar date %04d-%02d-%02d", y, m, d);
    throw CalendarError(buf);
  }
  return date;
}

}  // namespace

Date parse_date(std::string_view text) {
  const auto t = trim(text);
  const auto parts = split_on(t, '-');
  if (parts.size() != 3 || parts[0].size() != 4 || parts[1].size() != 2 || parts[2].size() != 2) {
    throw RangeError("malformed date '" + std::string{t} + "', expected YYYY-MM-DD");
  }
  const auto y = to_int(parts[0]);
  const auto m = to_int(parts[1]);
  const auto d = to_int(parts[2]);
  if (!y || !m || !d) throw RangeError("malformed date '" + std::string{t} + "'");
  return make_date(*y, *m, *d);
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::vector<SeriesRecord> parse_stockholm(std::string_view text, int value_column) {
  if (value_column < 4) throw RangeError("value column must be 4 or greater");
  std::vector<SeriesRecord> out;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') return;
    const auto fields = split_ws(t);
    if (fields.size() < static_cast<std::size_t>(value_column)) {
      throw ParseError("expected at least " + std::to_string(value_column) + " columns", line_no);
    }
    const auto y = to_int(fields[0]);
    const auto m = to_int(fields[1]);
    const auto d = to_int(fields[2]);
    if (!y || !m || !d) throw ParseError("year, month and day must be integers", line_no);
    Date date;
    try {
      date = make_date(*y, *m, *d);
    } catch (const CalendarError& e) {
      throw CalendarError("line " + std::to_string(line_no) + ": " + e.what());
    }
    const auto token = fields[static_cast<std::size_t>(value_column - 1)];
    if (is_missing_token(token)) return;
    const auto v = to_double(token);
    if (!v) throw ParseError("non-numeric value '" + std::string{token} + "'", line_no);
    out.push_back({date, *v, std::nullopt});
  });
  return out;
}

std::vector<SeriesRecord> parse_csv(std::string_view text) {
  std::vector<SeriesRecord> out;
  bool header_seen = false;
  bool has_quality = false;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') return;
    const auto fields = split_on(t, ',');
    if (!header_seen) {
      if (fields.size() < 2 || fields[0] != "date" || fields[1] != "value") {
        throw ParseError("expected header 'date,value'", line_no);
      }
      has_quality = fields.size() > 2 && fields[2] == "quality";
      header_seen = true;
      return;
    }
    if (fields.size() < 2) throw ParseError("expected 'date,value'", line_no);
    Date date;
    try {
      date = parse_date(fields[0]);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no);
    }
    const auto v = to_double(fields[1]);
    if (!v) throw ParseError("non-numeric value '" + std::string{fields[1]} + "'", line_no);
    SeriesRecord rec{date, *v, std::nullopt};
    if (has_quality && fields.size() > 2 && !fields[2].empty()) rec.quality = std::string{fields[2]};
    out.push_back(std::move(rec));
  });
  if (!header_seen) throw ParseError("missing header 'date,value'", 1);
  return out;
}

GapPolicy parse_gap_policy(std::string_view name) {
  if (name == "fail") return GapPolicy::fail;
  if (name == "interpolate") return GapPolicy::interpolate;
  if (name == "previous") return GapPolicy::previous;
  throw RangeError("unknown gap policy '" + std::string{name} + "'");
}

std::string_view to_string(GapPolicy policy) noexcept {
  switch (policy) {
    case GapPolicy::fail:
      return "fail";
    case GapPolicy::interpolate:
      return "interpolate";
    case GapPolicy::previous:
      return "previous";
  }
  return "fail";
}

Date IndexedSeries::date_of(std::int64_t k) const {
  return Date{sys_days{origin} + std::chrono::days{k - 1}};
}

std::int64_t IndexedSeries::index_of(Date d) const {
  return (sys_days{d} - sys_days{origin}).count() + 1;
}

IndexedSeries to_indexed(std::span<const SeriesRecord> records, std::optional<Date> start,
                         std::optional<Date> end, GapPolicy policy) {
  if (records.empty()) throw RangeError("series is empty");
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (!(sys_days{records[i].date} > sys_days{records[i - 1].date})) {
      throw CalendarError("dates are not strictly increasing at " + format_date(records[i].date));
    }
  }
  const sys_days first{records.front().date};
  const sys_days last{records.back().date};
  const sys_days from = start ? sys_days{*start} : first;
  const sys_days to = end ? sys_days{*end} : last;
  if (from < first || to > last) {
    throw RangeError("requested span " + format_date(Date{from}) + " .. " + format_date(Date{to}) +
                     " lies outside the data " + format_date(Date{first}) + " .. " +
                     format_date(Date{last}));
  }
  if (from > to) throw RangeError("start date is after end date");

  IndexedSeries out{Date{from}, {}, {}, policy};
  out.samples.reserve(static_cast<std::size_t>((to - from).count() + 1));

  // `next` is the first record dated on or after the current day.
  std::size_t next = 0;
  while (sys_days{records[next].date} < from) ++next;
  std::int64_t k = 1;
  for (sys_days day = from; day <= to; day += std::chrono::days{1}, ++k) {
    if (sys_days{records[next].date} == day) {
      out.samples.push_back({k, records[next].value});
      ++next;
      continue;
    }
    const Date missing{day};
    switch (policy) {
      case GapPolicy::fail:
        throw GapError("missing observation on " + format_date(missing));
      case GapPolicy::previous: {
        if (next == 0) throw GapError("no earlier value to hold for " + format_date(missing));
        out.samples.push_back({k, records[next - 1].value});
        break;
      }
      case GapPolicy::interpolate: {
        if (next == 0) throw GapError("no earlier value to interpolate " + format_date(missing));
        const auto& lo = records[next - 1];
        const auto& hi = records[next];
        const double span = static_cast<double>((sys_days{hi.date} - sys_days{lo.date}).count());
        const double at = static_cast<double>((day - sys_days{lo.date}).count());
        out.samples.push_back({k, lo.value + (hi.value - lo.value) * (at / span)});
        break;
      }
    }
    out.filled.push_back(missing);
  }
  return out;
}

}  // namespace swrls
