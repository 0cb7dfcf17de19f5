#include "patrol/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "patrol/csv.hpp"
#include "patrol/timeutil.hpp"

namespace patrol {

std::vector<Visit> visits_of(const EventLog& log) {
  std::vector<Visit> out;
  std::map<OfficerId, std::size_t> open;
  for (const auto& e : log.events) {
    if (e.kind == EventKind::VisitStart) {
      if (auto it = open.find(e.officer); it != open.end()) out[it->second].end = out[it->second].start;
      open[e.officer] = out.size();
      out.push_back({e.officer, e.node, e.time, e.time});
    } else if (e.kind == EventKind::VisitEnd) {
      if (auto it = open.find(e.officer); it != open.end()) {
        out[it->second].end = e.time;
        open.erase(it);
      }
    }
  }
  return out;
}

std::optional<double> efficiency(const EventLog& log, std::span<const CrimeRecord> crimes, int window_minutes) {
  if (crimes.empty()) return std::nullopt;
  std::map<NodeId, std::vector<Visit>> by_node;
  for (const auto& v : visits_of(log)) by_node[v.node].push_back(v);
  std::size_t prevented = 0;
  for (const auto& c : crimes) {
    auto it = by_node.find(c.node);
    if (it == by_node.end()) continue;
    const Minutes lo = c.time - window_minutes;
    const Minutes hi = c.time + window_minutes;
    const bool hit = std::any_of(it->second.begin(), it->second.end(),
                                 [&](const Visit& v) { return v.start <= hi && v.end >= lo; });
    if (hit) ++prevented;
  }
  return static_cast<double>(prevented) / static_cast<double>(crimes.size());
}

double robustness(const EventLog& log) {
  double total = 0.0;
  for (const auto& e : log.events)
    if (e.kind == EventKind::CallAttended) total += arrival_multiplier(e.delay, e.priority);
  return total;
}

std::vector<Period> split_periods(Minutes begin, Minutes end, Grouping grouping) {
  std::vector<Period> out;
  if (end <= begin) return out;
  if (grouping == Grouping::Weekly) {
    int week = 1;
    for (Minutes t = begin; t < end; t += 7 * kMinutesPerDay, ++week)
      out.push_back({"week-" + std::to_string(week), t, std::min(end, t + 7 * kMinutesPerDay)});
    return out;
  }
  using namespace std::chrono;
  Minutes t = begin;
  while (t < end) {
    const auto [y, m] = patrol::year_month(t);
    const std::chrono::year_month next = year{y} / month{static_cast<unsigned>(m)} + months{1};
    const auto next_start = sys_days{next / 1}.time_since_epoch().count() * kMinutesPerDay;
    char label[16];
    std::snprintf(label, sizeof label, "%04d-%02d", y, m);
    const Minutes stop = std::min<Minutes>(end, next_start);
    out.push_back({label, t, stop});
    t = stop;
  }
  return out;
}

std::vector<PeriodMetrics> evaluate_periods(const EventLog& log, std::span<const CrimeRecord> crimes,
                                            const std::vector<Period>& periods, int duty_start_minute,
                                            int duty_end_minute) {
  std::vector<PeriodMetrics> out;
  for (const auto& p : periods) {
    EventLog slice;
    for (const auto& e : log.events)
      if (e.time >= p.begin && e.time < p.end) slice.events.push_back(e);
    std::vector<CrimeRecord> in_period;
    for (const auto& c : crimes) {
      const int minute = minute_of_day(c.time);
      if (c.time >= p.begin && c.time < p.end && minute >= duty_start_minute && minute < duty_end_minute)
        in_period.push_back(c);
    }
    PeriodMetrics m;
    m.period = p.label;
    // The whole log: a visit just across the period edge still covers the crime.
    m.efficiency = efficiency(log, in_period);
    m.robustness = robustness(slice);
    m.crimes = in_period.size();
    m.attended = static_cast<std::size_t>(std::count_if(slice.events.begin(), slice.events.end(), [](const Event& e) {
      return e.kind == EventKind::CallAttended;
    }));
    out.push_back(std::move(m));
  }
  return out;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  double sum = 0.0;
  for (double v : values)
    if (std::isfinite(v)) {
      sum += v;
      ++s.runs;
    }
  if (s.runs == 0) {
    s.mean = s.std = std::nan("");
    return s;
  }
  s.mean = sum / s.runs;
  if (s.runs > 1) {
    double sq = 0.0;
    for (double v : values)
      if (std::isfinite(v)) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / (s.runs - 1));
  }
  return s;
}

std::vector<MetricReport> aggregate(const std::string& planner, int n_officers,
                                    const std::vector<std::vector<PeriodMetrics>>& runs) {
  std::vector<MetricReport> out;
  if (runs.empty()) return out;
  for (std::size_t p = 0; p < runs.front().size(); ++p) {
    std::vector<double> eff, rob;
    for (const auto& run : runs) {
      const auto& m = run.at(p);
      eff.push_back(m.efficiency.value_or(std::nan("")));
      rob.push_back(m.robustness);
    }
    const std::string& label = runs.front()[p].period;
    out.push_back({planner, n_officers, label, "efficiency", summarize(eff)});
    out.push_back({planner, n_officers, label, "robustness", summarize(rob)});
  }
  return out;
}

void write_report_csv(std::ostream& out, const std::vector<MetricReport>& rows) {
  auto num = [](double v) { return std::isfinite(v) ? format_double(v) : std::string("NA"); };
  csv::write_row(out, {"planner", "n_officers", "period", "metric", "mean", "std", "runs"});
  for (const auto& r : rows)
    csv::write_row(out, {r.planner, std::to_string(r.n_officers), r.period, r.metric, num(r.summary.mean),
                         num(r.summary.std), std::to_string(r.summary.runs)});
}

}  // namespace patrol
