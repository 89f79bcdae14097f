#include "sirtd/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "sirtd/errors.hpp"

namespace sirtd::io {

namespace fs = std::filesystem;

namespace {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                          : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

CsvTable read_csv(const fs::path& path, const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_fields(line);
    if (!have_header) {
      if (fields != expected_header) {
        std::string want;
        for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
        throw ParseError(path.string() + ": expected header '" + want + "'", line_no);
      }
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != expected_header.size()) {
      throw ParseError(path.string() + ": expected " + std::to_string(expected_header.size()) + " fields", line_no);
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) throw ParseError(path.string() + ": missing header", 1);
  return table;
}

std::int64_t parse_count(const std::string& text, const fs::path& path, std::size_t line) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError(path.string() + ": '" + text + "' is not an integer", line);
  }
  if (v < 0) throw ParseError(path.string() + ": negative count '" + text + "'", line);
  return v;
}

// date -> value, sorted by date; duplicate dates are rejected.
std::map<int, std::int64_t> read_dated_counts(const fs::path& path, const std::string& column) {
  const CsvTable t = read_csv(path, {"date", column});
  std::map<int, std::int64_t> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const std::size_t line = t.line_numbers[i];
    int day = 0;
    try {
      day = parse_date(t.rows[i][0]);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what(), line);
    }
    if (!out.emplace(day, parse_count(t.rows[i][1], path, line)).second) {
      throw ParseError(path.string() + ": duplicate date " + t.rows[i][0], line);
    }
  }
  return out;
}

std::string sim_header() { return "day,S,I,R,T,D,tweets"; }

}  // namespace

int parse_date(const std::string& text) {
  using namespace std::chrono;
  int y = 0;
  unsigned m = 0, d = 0;
  char tail = 0;
  if (text.size() != 10 || std::sscanf(text.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &tail) != 3 || text[4] != '-' ||
      text[7] != '-') {
    throw ParseError("malformed ISO-8601 date '" + text + "'");
  }
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw ParseError("invalid calendar date '" + text + "'");
  return static_cast<int>(sys_days{ymd}.time_since_epoch().count());
}

std::string format_date(int days_since_epoch) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{days{days_since_epoch}}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw ValidationError("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

ObservationSeries read_observed_csv(const fs::path& deaths_path, const fs::path& tweets_path) {
  const auto deaths = read_dated_counts(deaths_path, "cumulative_deaths");
  const auto tweets = read_dated_counts(tweets_path, "symptom_tweet_count");
  if (deaths.empty() || tweets.empty()) throw EmptyJoin("no rows to join");

  const int first = std::max(deaths.begin()->first, tweets.begin()->first);
  const int last = std::min(deaths.rbegin()->first, tweets.rbegin()->first);
  if (first > last) throw EmptyJoin("deaths and tweets files share no dates");

  ObservationSeries s;
  for (int day = first; day <= last; ++day) {
    const auto d = deaths.find(day);
    const auto t = tweets.find(day);
    if (d == deaths.end()) throw DateGap("date " + format_date(day) + " missing from " + deaths_path.string());
    if (t == tweets.end()) throw DateGap("date " + format_date(day) + " missing from " + tweets_path.string());
    if (!s.cumulative_deaths.empty() && d->second < s.cumulative_deaths.back()) {
      throw NonMonotoneDeaths("cumulative deaths decrease on " + format_date(day));
    }
    s.dates.push_back(format_date(day));
    s.days.push_back(day - first);
    s.cumulative_deaths.push_back(d->second);
    s.tweet_counts.push_back(t->second);
  }
  return s;
}

ObservedData make_observed(const ObservationSeries& series, double N, const CompartmentState& y0) {
  ObservedData obs;
  obs.days = series.days;
  obs.cumulative_deaths = series.cumulative_deaths;
  obs.tweet_counts = series.tweet_counts;
  obs.N = N;
  obs.y0 = y0;
  obs.validate();
  return obs;
}

CompartmentState initial_state_from_cases(const fs::path& cases_path, const std::string& date, double N,
                                          std::int64_t cumulative_deaths) {
  const CsvTable t = read_csv(cases_path, {"date", "new_cases", "cumulative_cases"});
  const int wanted = parse_date(date);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (parse_date(t.rows[i][0]) != wanted) continue;
    CompartmentState y0;
    y0.I = static_cast<double>(parse_count(t.rows[i][1], cases_path, t.line_numbers[i]));
    y0.R = static_cast<double>(parse_count(t.rows[i][2], cases_path, t.line_numbers[i]));
    y0.T = 0.0;
    y0.D = static_cast<double>(cumulative_deaths);
    y0.S = N - y0.I - y0.R - y0.D;
    if (y0.S < 0.0) throw InvariantViolation("initial cases and deaths exceed the population");
    return y0;
  }
  throw DateGap("date " + date + " missing from " + cases_path.string());
}

void write_sim_csv(const SimOutput& out, const fs::path& path) {
  std::ostringstream os;
  os << sim_header() << '\n';
  for (const SimRow& r : out.rows) {
    os << r.day << ',' << r.S << ',' << r.I << ',' << r.R << ',' << r.T << ',' << r.D << ',' << r.tweets << '\n';
  }
  write_file_atomic(path, os.str());
}

SimOutput read_sim_csv(const fs::path& path) {
  const CsvTable t = read_csv(path, {"day", "S", "I", "R", "T", "D", "tweets"});
  SimOutput out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& f = t.rows[i];
    const std::size_t line = t.line_numbers[i];
    SimRow r;
    r.day = static_cast<int>(parse_count(f[0], path, line));
    r.S = parse_count(f[1], path, line);
    r.I = parse_count(f[2], path, line);
    r.R = parse_count(f[3], path, line);
    r.T = parse_count(f[4], path, line);
    r.D = parse_count(f[5], path, line);
    r.tweets = parse_count(f[6], path, line);
    out.rows.push_back(r);
  }
  out.validate();
  return out;
}

void write_sim_observations(const SimOutput& out, const std::string& start_date, const fs::path& deaths_path,
                            const fs::path& tweets_path) {
  const int start = parse_date(start_date);
  std::ostringstream deaths, tweets;
  deaths << "date,cumulative_deaths\n";
  tweets << "date,symptom_tweet_count\n";
  for (const SimRow& r : out.rows) {
    const std::string date = format_date(start + r.day);
    deaths << date << ',' << r.D << '\n';
    tweets << date << ',' << r.tweets << '\n';
  }
  write_file_atomic(deaths_path, deaths.str());
  write_file_atomic(tweets_path, tweets.str());
}

void write_draws_csv(const ChainDraws& draws, const fs::path& path) {
  std::ostringstream os;
  os << "chain,iteration";
  for (auto name : kParamNames) os << ',' << name;
  os << '\n';
  for (std::size_t c = 0; c < draws.chains.size(); ++c) {
    const auto& rows = draws.chains[c].draws;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      os << c + 1 << ',' << i + 1;
      for (double x : rows[i]) os << ',' << format_double(x);
      os << '\n';
    }
  }
  write_file_atomic(path, os.str());
}

ChainDraws read_draws_csv(const fs::path& path) {
  std::vector<std::string> header = {"chain", "iteration"};
  for (auto name : kParamNames) header.emplace_back(name);
  const CsvTable t = read_csv(path, header);

  ChainDraws draws;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& f = t.rows[i];
    const std::size_t line = t.line_numbers[i];
    const auto chain = parse_count(f[0], path, line);
    if (chain < 1) throw ParseError(path.string() + ": chain index starts at 1", line);
    if (static_cast<std::size_t>(chain) > draws.chains.size()) draws.chains.resize(static_cast<std::size_t>(chain));
    ParamVector row{};
    for (std::size_t j = 0; j < kNumParams; ++j) {
      const std::string& text = f[j + 2];
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), row[j]);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError(path.string() + ": '" + text + "' is not a number", line);
      }
    }
    if (!EpidemicParams::from_array(row).is_valid()) {
      throw InvariantViolation(path.string() + ": draw violates parameter constraints (line " +
                               std::to_string(line) + ")");
    }
    Chain& c = draws.chains[static_cast<std::size_t>(chain - 1)];
    c.draws.push_back(row);
    c.unconstrained.push_back(to_unconstrained(EpidemicParams::from_array(row)));
  }
  if (draws.chains.empty()) throw ParseError(path.string() + ": no draws");
  for (const Chain& c : draws.chains) {
    if (c.draws.size() != draws.chains.front().draws.size()) {
      throw InvariantViolation(path.string() + ": chains have different numbers of draws");
    }
  }
  return draws;
}

void write_summary_csv(const PosteriorSummary& summary, const fs::path& path) {
  std::ostringstream os;
  for (std::size_t i = 0; i < kSummaryColumns.size(); ++i) os << (i ? "," : "") << kSummaryColumns[i];
  os << '\n';
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("NA"); };
  for (const SummaryRow& r : summary) {
    os << r.name << ',' << format_double(r.mean) << ',' << format_double(r.median) << ',' << format_double(r.sd)
       << ',' << format_double(r.mad) << ',' << format_double(r.q5) << ',' << format_double(r.q95) << ','
       << opt(r.rhat) << ',' << opt(r.ess_bulk) << ',' << opt(r.ess_tail) << '\n';
  }
  write_file_atomic(path, os.str());
}

void write_predictive_csv(const PredictiveTable& table, const fs::path& path) {
  std::ostringstream os;
  os << "day,channel,mean,q5,q95\n";
  for (std::size_t c = 0; c < kChannels.size(); ++c) {
    const PredictiveBand& b = table.bands[c];
    for (std::size_t d = 0; d < table.days.size(); ++d) {
      os << format_double(table.days[d]) << ',' << kChannels[c] << ',' << format_double(b.mean[d]) << ','
         << format_double(b.q5[d]) << ',' << format_double(b.q95[d]) << '\n';
    }
  }
  write_file_atomic(path, os.str());
}

void write_overlay_csv(const ObservedData& observed, const PredictiveTable& table, const fs::path& path) {
  std::ostringstream os;
  os << "day,channel,observed,predicted_mean\n";
  const PredictiveBand& deaths = table.channel("deaths");
  const PredictiveBand& tweets = table.channel("tweets");
  for (std::size_t d = 0; d < observed.size(); ++d) {
    os << observed.days[d] << ",deaths," << observed.cumulative_deaths[d] << ',' << format_double(deaths.mean[d])
       << '\n';
  }
  for (std::size_t d = 0; d < observed.size(); ++d) {
    os << observed.days[d] << ",tweets," << observed.tweet_counts[d] << ',' << format_double(tweets.mean[d])
       << '\n';
  }
  write_file_atomic(path, os.str());
}

}  // namespace sirtd::io
