#include "failbench/report.hpp"

#include "failbench/error.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "csv_format.hpp"

namespace failbench {

using detail::fmt;

namespace {

std::string opt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  return out;
}

void expect_header(std::istream& in, std::string_view header, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(std::string(what) + ": empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw InvalidArgument(std::string(what) + ": unexpected header '" + line + "'");
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const std::vector<LogRow>& log) {
  out << kTrajectoryHeader << '\n';
  for (const LogRow& r : log) {
    out << fmt(r.t) << ',' << fmt(r.north) << ',' << fmt(r.east) << ',' << fmt(r.alt) << ','
        << fmt(r.phi) << ',' << fmt(r.theta) << ',' << fmt(r.psi) << ',' << fmt(r.p) << ','
        << fmt(r.q) << ',' << fmt(r.r) << ',' << fmt(r.act.ail_l) << ',' << fmt(r.act.ail_r)
        << ',' << fmt(r.act.ele) << ',' << fmt(r.act.thr) << ',' << fmt(r.act.rud) << ','
        << r.failure_state_id << '\n';
  }
}

std::vector<LogRow> read_trajectory_csv(std::istream& in) {
  expect_header(in, kTrajectoryHeader, "trajectory csv");
  std::vector<LogRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = detail::parse_doubles(line);
    if (f.size() != 16) throw InvalidArgument("trajectory csv: expected 16 columns");
    LogRow r;
    r.t = f[0];
    r.north = f[1];
    r.east = f[2];
    r.alt = f[3];
    r.phi = f[4];
    r.theta = f[5];
    r.psi = f[6];
    r.p = f[7];
    r.q = f[8];
    r.r = f[9];
    r.act = {f[10], f[11], f[12], f[13], f[14]};
    r.failure_state_id = static_cast<std::size_t>(f[15]);
    rows.push_back(r);
  }
  return rows;
}

void write_failure_log_csv(std::ostream& out, const std::vector<FailureEvent>& log) {
  out << "t,state_id\n";
  for (const auto& e : log) out << fmt(e.t) << ',' << e.state_id << '\n';
}

void write_flown_csv(std::ostream& out, const Trajectory& flown) {
  out << "t,north,east,alt\n";
  for (const auto& s : flown.samples)
    out << fmt(s.t) << ',' << fmt(s.p.x()) << ',' << fmt(s.p.y()) << ',' << fmt(s.p.z()) << '\n';
}

Trajectory read_points_csv(std::istream& in, TrajectorySource source) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("points csv: empty input");
  Trajectory traj;
  traj.source = source;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto f = detail::parse_doubles(line);
    if (f.size() < 4) throw InvalidArgument("points csv: expected 4 columns");
    traj.samples.push_back({f[0], Vec3(f[1], f[2], f[3])});
  }
  return traj;
}

std::string trial_file_stem(const TrialRecord& rec) {
  return rec.config + "_" + rec.regime + "_seed" + std::to_string(rec.seed);
}

void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "config,regime,seed,status,sim_time,dtw_to_plan,dtw_normalized,trajectory_file\n";
  for (const auto& r : records) {
    out << r.config << ',' << r.regime << ',' << r.seed << ',' << to_string(r.status) << ','
        << fmt(r.sim_time) << ',' << opt(r.dtw_to_plan) << ',' << opt(r.dtw_normalized) << ','
        << "trials/" << trial_file_stem(r) << ".csv\n";
  }
}

std::vector<TrialRecord> read_records_dir(const std::filesystem::path& dir) {
  std::ifstream in(dir / "records.csv", std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + (dir / "records.csv").string());
  expect_header(in, "config,regime,seed,status,sim_time,dtw_to_plan,dtw_normalized,trajectory_file",
                "records csv");
  std::vector<TrialRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split(line);
    if (f.size() != 8) throw InvalidArgument("records csv: expected 8 columns");
    TrialRecord r;
    r.config = std::string(f[0]);
    r.regime = std::string(f[1]);
    r.seed = std::stoull(std::string(f[2]));
    r.status = trial_status_from_string(f[3]);
    r.sim_time = detail::parse_double(f[4]);
    if (!f[5].empty()) r.dtw_to_plan = detail::parse_double(f[5]);
    if (!f[6].empty()) r.dtw_normalized = detail::parse_double(f[6]);

    std::filesystem::path flown = dir / "trials" / (trial_file_stem(r) + "_flown.csv");
    if (std::ifstream fin(flown, std::ios::binary); fin)
      r.flown = read_points_csv(fin, TrajectorySource::Flown);
    records.push_back(std::move(r));
  }
  return records;
}

void write_summary_csv(std::ostream& out, const std::vector<EnsembleSummary>& summaries) {
  out << "config,regime,trials,crashed,incomplete,mean,std,min,q1,median,q3,max,"
         "self_similarity_mean,self_similarity_std\n";
  for (const auto& s : summaries) {
    out << s.config << ',' << s.regime << ',' << s.trials << ',' << s.crashed << ','
        << s.incomplete << ',' << fmt(s.mean) << ',' << fmt(s.stddev) << ',' << fmt(s.min) << ','
        << fmt(s.q1) << ',' << fmt(s.median) << ',' << fmt(s.q3) << ',' << fmt(s.max) << ','
        << opt(s.self_similarity_mean) << ',' << opt(s.self_similarity_std) << '\n';
  }
}

void write_boxplot_csv(std::ostream& out, const std::vector<EnsembleSummary>& summaries) {
  out << "config,regime,n,min,q1,median,q3,max\n";
  for (const auto& s : summaries) {
    out << s.config << ',' << s.regime << ',' << s.values.size() << ',' << fmt(s.min) << ','
        << fmt(s.q1) << ',' << fmt(s.median) << ',' << fmt(s.q3) << ',' << fmt(s.max) << '\n';
  }
}

std::string summary_json(const std::vector<EnsembleSummary>& summaries,
                         std::uint64_t config_hash, const std::vector<std::uint64_t>& seeds) {
  using nlohmann::ordered_json;
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << config_hash;

  ordered_json root;
  root["config_hash"] = hash.str();
  root["seeds"] = seeds;
  ordered_json rows = ordered_json::array();
  for (const auto& s : summaries) {
    ordered_json row;
    row["config"] = s.config;
    row["regime"] = s.regime;
    row["trials"] = s.trials;
    row["crashed"] = s.crashed;
    row["incomplete"] = s.incomplete;
    row["mean"] = s.mean;
    row["std"] = s.stddev;
    row["std_degenerate"] = s.degenerate;
    row["min"] = s.min;
    row["q1"] = s.q1;
    row["median"] = s.median;
    row["q3"] = s.q3;
    row["max"] = s.max;
    row["values"] = s.values;
    row["self_similarity_mean"] =
        s.self_similarity_mean ? ordered_json(*s.self_similarity_mean) : ordered_json();
    row["self_similarity_std"] =
        s.self_similarity_std ? ordered_json(*s.self_similarity_std) : ordered_json();
    rows.push_back(std::move(row));
  }
  root["summaries"] = std::move(rows);
  return root.dump(2) + "\n";
}

void print_tables(std::ostream& out, const std::vector<EnsembleSummary>& summaries) {
  auto table = [&](const std::string& regime, const char* title) {
    bool any = false;
    for (const auto& s : summaries) any = any || s.regime == regime;
    if (!any) return;
    out << title << '\n';
    out << std::left << std::setw(16) << "config" << std::right << std::setw(12) << "mean"
        << std::setw(12) << "std" << std::setw(8) << "n" << std::setw(9) << "crashed";
    if (regime == "clean") out << std::setw(14) << "self-sim" << std::setw(12) << "self-std";
    out << '\n';
    for (const auto& s : summaries) {
      if (s.regime != regime) continue;
      out << std::left << std::setw(16) << s.config << std::right << std::fixed
          << std::setprecision(1) << std::setw(12) << s.mean << std::setw(12) << s.stddev
          << std::setw(8) << s.values.size() << std::setw(9) << s.crashed;
      if (regime == "clean") {
        if (s.self_similarity_mean)
          out << std::setw(14) << *s.self_similarity_mean << std::setw(12)
              << *s.self_similarity_std;
        else
          out << std::setw(14) << "-" << std::setw(12) << "-";
      }
      out << std::defaultfloat << '\n';
    }
    out << '\n';
  };
  table("clean", "DTW distance to plan [m], clean");
  table("adverse", "DTW distance to plan [m], adverse");
}

void write_run_directory(const std::filesystem::path& dir, const EnsembleResult& result,
                         std::uint64_t config_hash) {
  std::filesystem::create_directories(dir / "trials");
  for (const auto& r : result.records) {
    const std::string stem = trial_file_stem(r);
    {
      auto out = open_out(dir / "trials" / (stem + ".csv"));
      write_trajectory_csv(out, r.log);
    }
    {
      auto out = open_out(dir / "trials" / (stem + "_failures.csv"));
      write_failure_log_csv(out, r.failure_log);
    }
    {
      auto out = open_out(dir / "trials" / (stem + "_flown.csv"));
      write_flown_csv(out, r.flown);
    }
  }
  {
    auto out = open_out(dir / "records.csv");
    write_records_csv(out, result.records);
  }
  {
    auto out = open_out(dir / "summary.csv");
    write_summary_csv(out, result.summaries);
  }
  {
    auto out = open_out(dir / "boxplot.csv");
    write_boxplot_csv(out, result.summaries);
  }
  {
    auto out = open_out(dir / "summary.json");
    out << summary_json(result.summaries, config_hash, result.seeds);
  }
}

}  // namespace failbench
