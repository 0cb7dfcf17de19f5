#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "patrol/ingest.hpp"
#include "patrol/sim.hpp"

namespace patrol {

struct Visit {
  OfficerId officer = 0;
  NodeId node = kNoNode;
  Minutes start = 0;
  Minutes end = 0;
};

/// Visit intervals from paired visit_start/visit_end records; an unmatched
/// start yields a zero-length visit.
std::vector<Visit> visits_of(const EventLog& log);

/// Share of crimes whose node had a visit overlapping [t-60, t+60] (closed).
/// nullopt when there are no crimes.
std::optional<double> efficiency(const EventLog& log, std::span<const CrimeRecord> crimes, int window_minutes = 60);

/// Sum of arrival multipliers over attended calls.
double robustness(const EventLog& log);

enum class Grouping { Weekly, Monthly };

struct Period {
  std::string label;
  Minutes begin = 0;
  Minutes end = 0;  // exclusive
};

/// Consecutive 7-day blocks from `begin` ("week-1", ...), or calendar months
/// ("2013-01", ...), clipped to [begin, end).
std::vector<Period> split_periods(Minutes begin, Minutes end, Grouping grouping);

struct PeriodMetrics {
  std::string period;
  std::optional<double> efficiency;
  double robustness = 0.0;
  std::size_t crimes = 0;
  std::size_t attended = 0;
};

/// Metrics per period. Crimes count only inside duty hours
/// [duty_start_minute, duty_end_minute) of their day; events fall into the
/// period holding their timestamp.
std::vector<PeriodMetrics> evaluate_periods(const EventLog& log, std::span<const CrimeRecord> crimes,
                                            const std::vector<Period>& periods, int duty_start_minute = 8 * 60,
                                            int duty_end_minute = 20 * 60);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single run
  int runs = 0;
};

/// NaN entries are skipped; with no finite values mean and std are NaN.
Summary summarize(std::span<const double> values);

struct MetricReport {
  std::string planner;
  int n_officers = 0;
  std::string period;
  std::string metric;  // "efficiency" or "robustness"
  Summary summary;
};

/// Per-run period metrics for one (planner, officer count) cell, reduced to
/// mean and std per period and metric.
std::vector<MetricReport> aggregate(const std::string& planner, int n_officers,
                                    const std::vector<std::vector<PeriodMetrics>>& runs);

/// `planner,n_officers,period,metric,mean,std,runs`; undefined values print as NA.
void write_report_csv(std::ostream& out, const std::vector<MetricReport>& rows);

}  // namespace patrol
