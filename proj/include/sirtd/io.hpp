#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sirtd/abm.hpp"
#include "sirtd/core.hpp"
#include "sirtd/diagnostics.hpp"
#include "sirtd/mcmc.hpp"
#include "sirtd/model.hpp"

namespace sirtd::io {

// Days since 1970-01-01 for an ISO-8601 calendar date (YYYY-MM-DD); throws
// ParseError on anything else.
int parse_date(const std::string& text);
std::string format_date(int days_since_epoch);

/// Deaths and tweets joined on date. Day 0 is the earliest joint date.
struct ObservationSeries {
  std::vector<std::string> dates;
  std::vector<int> days;
  std::vector<std::int64_t> cumulative_deaths;
  std::vector<std::int64_t> tweet_counts;
};

/// Reads `date,cumulative_deaths` and `date,symptom_tweet_count` files and
/// inner-joins them on date. Throws ParseError (with line number),
/// NonMonotoneDeaths, DateGap (a missing date inside the joint window, in
/// either file) or EmptyJoin.
ObservationSeries read_observed_csv(const std::filesystem::path& deaths_path,
                                    const std::filesystem::path& tweets_path);

ObservedData make_observed(const ObservationSeries& series, double N, const CompartmentState& y0);

/// Initial state from a `date,new_cases,cumulative_cases` file: I0 is the new
/// cases on `date`, R0 the cumulative cases, D0 the cumulative deaths given,
/// T0 = 0 and S0 the remainder of N.
CompartmentState initial_state_from_cases(const std::filesystem::path& cases_path, const std::string& date, double N,
                                          std::int64_t cumulative_deaths);

void write_sim_csv(const SimOutput& out, const std::filesystem::path& path);
// Throws ParseError or InvariantViolation (rows failing conservation).
SimOutput read_sim_csv(const std::filesystem::path& path);

// deaths.csv / tweets.csv views of a simulation, dated from `start_date`.
void write_sim_observations(const SimOutput& out, const std::string& start_date,
                            const std::filesystem::path& deaths_path, const std::filesystem::path& tweets_path);

// chain,iteration,<parameters...>; iteration counts post-warmup draws from 1.
void write_draws_csv(const ChainDraws& draws, const std::filesystem::path& path);
ChainDraws read_draws_csv(const std::filesystem::path& path);

void write_summary_csv(const PosteriorSummary& summary, const std::filesystem::path& path);
// day,channel,mean,q5,q95
void write_predictive_csv(const PredictiveTable& table, const std::filesystem::path& path);
// day,channel,observed,predicted_mean for deaths and tweets.
void write_overlay_csv(const ObservedData& observed, const PredictiveTable& table,
                       const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`, so readers
// never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

}  // namespace sirtd::io
