#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "exactcache/bench.hpp"
#include "parallel.hpp"

namespace exactcache {

namespace {

double round_ms(double ms) { return std::round(ms * 1000.0) / 1000.0; }

ExperimentRow make_row(const CorpusEntry& entry, const CacheConfig& config, Mode mode,
                       const ClassifyResult& r, bool timings) {
  ExperimentRow row;
  row.name = entry.name;
  row.seed = entry.seed;
  row.k = config.associativity;
  row.sets = config.num_sets;
  row.block_size = config.block_size;
  row.mode = std::string(to_string(mode));
  row.n_access = r.stats.accesses;
  row.n_ah = r.stats.count(Verdict::AlwaysHit, r.verdicts);
  row.n_am = r.stats.count(Verdict::AlwaysMiss, r.verdicts);
  row.n_du = r.stats.count(Verdict::DefinitelyUnknown, r.verdicts);
  row.prov_must = r.stats.count(Provenance::Must);
  row.prov_may = r.stats.count(Provenance::May);
  row.prov_ehem = r.stats.count(Provenance::EhEm);
  row.prov_mc = r.stats.count(Provenance::McCheckAh) + r.stats.count(Provenance::McCheckAm) +
                r.stats.count(Provenance::McRefutedBoth);
  row.focused_runs = r.stats.focused_runs;
  row.states_explored = r.stats.states_explored;
  if (timings) {
    row.t_ai_ms = round_ms(r.stats.ai_ms);
    row.t_mc_ms = round_ms(r.stats.mc_ms);
  }
  return row;
}

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

template <typename T>
T parse_number(std::string_view field, std::size_t line) {
  T value{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    throw std::invalid_argument("line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  return value;
}

std::optional<double> geomean(const std::vector<double>& ratios) {
  if (ratios.empty()) return std::nullopt;
  double log_sum = 0;
  for (double r : ratios) log_sum += std::log(r);
  return std::exp(log_sum / static_cast<double>(ratios.size()));
}

}  // namespace

ExperimentResult run_experiment(const std::vector<CorpusEntry>& corpus,
                                const std::vector<CacheConfig>& configs,
                                const ExperimentOptions& options) {
  const std::size_t per_program = configs.size() * options.modes.size();
  std::vector<ExperimentRow> rows(corpus.size() * per_program);
  std::vector<std::vector<std::string>> errors(rows.size());

  detail::parallel_for(rows.size(), options.jobs, [&](std::size_t i) {
    const auto& entry = corpus[i / per_program];
    const auto& config = configs[(i % per_program) / options.modes.size()];
    const Mode mode = options.modes[i % options.modes.size()];
    ClassifyOptions co;
    co.mode = mode;
    co.init = options.init;
    co.mc_budget = options.mc_budget;
    const ClassifyResult r = classify_all(rebind(entry.cfg, config), config, co);
    rows[i] = make_row(entry, config, mode, r, options.timings);
    for (const auto& e : r.errors)
      errors[i].push_back(entry.name + " [k=" + std::to_string(config.associativity) + ", " +
                          std::string(to_string(mode)) + "]: " + e);
  });

  ExperimentResult result{std::move(rows), {}};
  for (auto& e : errors) result.errors.insert(result.errors.end(), e.begin(), e.end());
  return result;
}

ExperimentSummary summarize(const std::vector<ExperimentRow>& rows) {
  using Key = std::tuple<std::string, std::uint64_t, unsigned, std::uint64_t, std::uint64_t>;
  std::map<Key, std::pair<const ExperimentRow*, const ExperimentRow*>> pairs;
  for (const auto& row : rows) {
    Key key{row.name, row.seed, row.k, row.sets, row.block_size};
    if (row.mode == to_string(Mode::AiMc)) pairs[key].first = &row;
    if (row.mode == to_string(Mode::AiMcNoDu)) pairs[key].second = &row;
  }
  ExperimentSummary summary;
  std::vector<double> calls;
  std::vector<double> times;
  for (const auto& [key, p] : pairs) {
    const auto [with_du, without_du] = p;
    if (!with_du || !without_du) continue;
    ++summary.comparisons;
    if (with_du->focused_runs == 0) ++summary.zero_with_du;
    if (with_du->focused_runs > 0 && without_du->focused_runs > 0)
      calls.push_back(static_cast<double>(without_du->focused_runs) / with_du->focused_runs);
    if (with_du->t_mc_ms && without_du->t_mc_ms && *with_du->t_mc_ms > 0 && *without_du->t_mc_ms > 0)
      times.push_back(*without_du->t_mc_ms / *with_du->t_mc_ms);
  }
  summary.geomean_call_ratio = geomean(calls);
  summary.geomean_time_ratio = geomean(times);
  return summary;
}

std::string_view csv_header() {
  return "name,seed,k,sets,block_size,mode,n_access,n_ah,n_am,n_du,prov_must,prov_may,prov_ehem,"
         "prov_mc,focused_runs,states_explored,t_ai_ms,t_mc_ms";
}

std::string write_csv(const std::vector<ExperimentRow>& rows) {
  std::ostringstream out;
  out << csv_header() << "\n";
  for (const auto& r : rows) {
    if (r.name.find_first_of(",\"\n") != std::string::npos)
      throw std::invalid_argument("program name '" + r.name + "' cannot be written to CSV");
    out << r.name << ',' << r.seed << ',' << r.k << ',' << r.sets << ',' << r.block_size << ','
        << r.mode << ',' << r.n_access << ',' << r.n_ah << ',' << r.n_am << ',' << r.n_du << ','
        << r.prov_must << ',' << r.prov_may << ',' << r.prov_ehem << ',' << r.prov_mc << ','
        << r.focused_runs << ',' << r.states_explored << ','
        << (r.t_ai_ms ? format_double(*r.t_ai_ms) : "") << ','
        << (r.t_mc_ms ? format_double(*r.t_mc_ms) : "") << "\n";
  }
  return out.str();
}

std::vector<ExperimentRow> parse_csv(std::string_view text) {
  std::vector<ExperimentRow> rows;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != csv_header()) throw std::invalid_argument("unexpected CSV header");
      header_seen = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 18) throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 18 fields");
    ExperimentRow r;
    r.name = std::string(f[0]);
    r.seed = parse_number<std::uint64_t>(f[1], line_no);
    r.k = parse_number<unsigned>(f[2], line_no);
    r.sets = parse_number<std::uint64_t>(f[3], line_no);
    r.block_size = parse_number<std::uint64_t>(f[4], line_no);
    r.mode = std::string(f[5]);
    std::size_t* counts[] = {&r.n_access, &r.n_ah,      &r.n_am,      &r.n_du,
                             &r.prov_must, &r.prov_may, &r.prov_ehem, &r.prov_mc,
                             &r.focused_runs, &r.states_explored};
    for (std::size_t i = 0; i < std::size(counts); ++i) *counts[i] = parse_number<std::size_t>(f[6 + i], line_no);
    if (!f[16].empty()) r.t_ai_ms = parse_number<double>(f[16], line_no);
    if (!f[17].empty()) r.t_mc_ms = parse_number<double>(f[17], line_no);
    rows.push_back(std::move(r));
  }
  if (!header_seen) throw std::invalid_argument("empty CSV");
  return rows;
}

}  // namespace exactcache
