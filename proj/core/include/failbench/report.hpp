#pragma once

#include "failbench/harness.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace failbench {

inline constexpr std::string_view kTrajectoryHeader =
    "t,north,east,alt,phi,theta,psi,p,q,r,ail_l,ail_r,ele,thr,rud,failure_state_id";

void write_trajectory_csv(std::ostream& out, const std::vector<LogRow>& log);
std::vector<LogRow> read_trajectory_csv(std::istream& in);

/// `t,state_id`
void write_failure_log_csv(std::ostream& out, const std::vector<FailureEvent>& log);

/// `t,north,east,alt` samples used for DTW.
void write_flown_csv(std::ostream& out, const Trajectory& flown);
Trajectory read_points_csv(std::istream& in, TrajectorySource source);

/// One row per trial:
/// `config,regime,seed,status,sim_time,dtw_to_plan,dtw_normalized,trajectory_file`
void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& records);

/// Reads records.csv back (log / failure_log empty; `flown` loaded from the
/// referenced files relative to `dir` when present).
std::vector<TrialRecord> read_records_dir(const std::filesystem::path& dir);

/// `config,regime,trials,crashed,incomplete,mean,std,min,q1,median,q3,max,
///  self_similarity_mean,self_similarity_std`
void write_summary_csv(std::ostream& out, const std::vector<EnsembleSummary>& summaries);

/// `config,regime,n,min,q1,median,q3,max` (box-plot whiskers at min/max).
void write_boxplot_csv(std::ostream& out, const std::vector<EnsembleSummary>& summaries);

/// Structured summary with config hash and seeds; key order is fixed.
std::string summary_json(const std::vector<EnsembleSummary>& summaries,
                         std::uint64_t config_hash, const std::vector<std::uint64_t>& seeds);

/// Plain-text mean/std tables per regime.
void print_tables(std::ostream& out, const std::vector<EnsembleSummary>& summaries);

std::string trial_file_stem(const TrialRecord& rec);

/// Writes records, per-trial trajectories / failure logs / flown samples and
/// all summaries into `dir`.
void write_run_directory(const std::filesystem::path& dir, const EnsembleResult& result,
                         std::uint64_t config_hash);

}  // namespace failbench
