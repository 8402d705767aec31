#include "adabkb/trace.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace adabkb {

namespace {
using json = nlohmann::ordered_json;
}  // namespace

std::string_view to_string(RunTermination t) {
  switch (t) {
    case RunTermination::Budget:
      return "budget";
    case RunTermination::EarlyStop:
      return "early-stop";
    case RunTermination::TimeThreshold:
      return "time-threshold";
  }
  return "unknown";
}

json record_to_json(const TraceRecord& r) {
  json j;
  j["t"] = r.t;
  json pt = json::array();
  for (Eigen::Index i = 0; i < r.point.size(); ++i) pt.push_back(r.point[i]);
  j["point"] = std::move(pt);
  j["y"] = r.y;
  if (r.f) j["f"] = *r.f;
  if (r.regret) j["regret"] = *r.regret;
  if (r.cum_regret) j["cum_regret"] = *r.cum_regret;
  j["wall_clock_s"] = r.wall_clock_s;
  j["frontier"] = r.frontier;
  j["inducing"] = r.inducing;
  j["d_eff"] = r.d_eff;
  return j;
}

TraceRecord record_from_json(const json& j) {
  TraceRecord r;
  r.t = j.at("t").get<int>();
  const auto& pt = j.at("point");
  r.point.resize(static_cast<Eigen::Index>(pt.size()));
  for (std::size_t i = 0; i < pt.size(); ++i) {
    r.point[static_cast<Eigen::Index>(i)] = pt[i].get<double>();
  }
  r.y = j.at("y").get<double>();
  if (j.contains("f")) r.f = j.at("f").get<double>();
  if (j.contains("regret")) r.regret = j.at("regret").get<double>();
  if (j.contains("cum_regret")) r.cum_regret = j.at("cum_regret").get<double>();
  r.wall_clock_s = j.at("wall_clock_s").get<double>();
  r.frontier = j.at("frontier").get<std::size_t>();
  r.inducing = j.at("inducing").get<std::size_t>();
  r.d_eff = j.at("d_eff").get<double>();
  return r;
}

void write_trace_jsonl(const RunTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("trace: cannot open " + path.string() + " for writing");
  }
  for (const TraceRecord& r : trace.records) {
    out << record_to_json(r).dump() << '\n';
  }
}

std::vector<TraceRecord> read_records_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("trace: cannot open " + path.string());
  }
  std::vector<TraceRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(record_from_json(json::parse(line)));
  }
  return records;
}

bool records_equal_modulo_time(const std::vector<TraceRecord>& a,
                               const std::vector<TraceRecord>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    json ja = record_to_json(a[i]);
    json jb = record_to_json(b[i]);
    ja.erase("wall_clock_s");
    jb.erase("wall_clock_s");
    if (ja.dump() != jb.dump()) return false;
  }
  return true;
}

std::vector<StepAggregate> aggregate_traces(const std::vector<RunTrace>& traces) {
  std::size_t max_len = 0;
  for (const RunTrace& tr : traces) max_len = std::max(max_len, tr.records.size());

  std::vector<StepAggregate> out;
  out.reserve(max_len);
  for (std::size_t s = 0; s < max_len; ++s) {
    std::vector<double> avg_regret, cum_time, frontier, inducing, d_eff;
    for (const RunTrace& tr : traces) {
      if (s >= tr.records.size()) continue;
      const TraceRecord& r = tr.records[s];
      if (r.cum_regret) {
        avg_regret.push_back(*r.cum_regret / static_cast<double>(r.t));
      }
      cum_time.push_back(r.wall_clock_s);
      frontier.push_back(static_cast<double>(r.frontier));
      inducing.push_back(static_cast<double>(r.inducing));
      d_eff.push_back(r.d_eff);
    }
    if (cum_time.empty()) continue;

    auto mean_of = [](const std::vector<double>& v) {
      double m = 0.0;
      for (double x : v) m += x;
      return m / static_cast<double>(v.size());
    };
    auto ci_of = [&](const std::vector<double>& v, double m) {
      if (v.size() < 2) return 0.0;
      double ss = 0.0;
      for (double x : v) ss += (x - m) * (x - m);
      const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
      return 1.96 * sd / std::sqrt(static_cast<double>(v.size()));
    };

    StepAggregate a;
    a.t = static_cast<int>(s) + 1;
    a.reps = static_cast<int>(cum_time.size());
    if (!avg_regret.empty()) {
      a.avg_regret_mean = mean_of(avg_regret);
      a.avg_regret_ci95 = ci_of(avg_regret, a.avg_regret_mean);
    } else {
      a.avg_regret_mean = std::numeric_limits<double>::quiet_NaN();
      a.avg_regret_ci95 = std::numeric_limits<double>::quiet_NaN();
    }
    a.cum_time_mean_s = mean_of(cum_time);
    a.cum_time_ci95_s = ci_of(cum_time, a.cum_time_mean_s);
    a.frontier_mean = mean_of(frontier);
    a.inducing_mean = mean_of(inducing);
    a.d_eff_mean = mean_of(d_eff);
    out.push_back(a);
  }
  return out;
}

void write_summary_csv(const std::vector<StepAggregate>& agg,
                       const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("trace: cannot open " + path.string() + " for writing");
  }
  out << "t,reps,avg_regret_mean,avg_regret_ci95,cum_time_mean_s,cum_time_ci95_s,"
         "frontier_mean,inducing_mean,d_eff_mean\n";
  // JSON double formatting gives round-trip-stable cells; NaN (regret columns
  // without a known optimum) becomes an empty field.
  auto cell = [](double v) { return std::isnan(v) ? std::string() : json(v).dump(); };
  for (const StepAggregate& a : agg) {
    out << a.t << ',' << a.reps << ',' << cell(a.avg_regret_mean) << ','
        << cell(a.avg_regret_ci95) << ',' << cell(a.cum_time_mean_s) << ','
        << cell(a.cum_time_ci95_s) << ',' << cell(a.frontier_mean) << ','
        << cell(a.inducing_mean) << ',' << cell(a.d_eff_mean) << '\n';
  }
}

}  // namespace adabkb
