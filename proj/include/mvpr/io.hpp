#pragma once

// File formats: comma-separated datasets (1-based category codes), tertile
// discretisation of real-valued tables, JSON run configurations, and the
// line-oriented posterior trace.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "mvpr/errors.hpp"
#include "mvpr/gibbs.hpp"
#include "mvpr/matrix.hpp"
#include "mvpr/model.hpp"
#include "mvpr/simulation.hpp"
#include "mvpr/summaries.hpp"

namespace mvpr {

// ---------------------------------------------------------------------------
// Delimited text

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.emplace_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<long long> parse_integer(std::string_view s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<double> parse_real(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

// Shortest representation that reads back to the same double.
inline std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::string cell_ref(std::size_t line, std::size_t col, const std::string& name) {
  return "line " + std::to_string(line) + ", column " + std::to_string(col) + " ('" + name + "')";
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values, char sep = ',') {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += sep;
    if constexpr (std::is_floating_point_v<T>) {
      out += format_real(values[k]);
    } else {
      out += std::to_string(values[k]);
    }
  }
  return out;
}

}  // namespace detail

/// Header row plus rows of cells, kept as text.
struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};

inline TextTable read_table(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  TextTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto cells = detail::split(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw DataError(path + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
    table.line_numbers.push_back(line_no);
  }
  if (table.header.empty()) throw DataError(path + ": file is empty");
  if (table.rows.empty()) throw DataError(path + ": no data rows");
  return table;
}

/// Reads a header-plus-rows file of positive category codes. R_j is the largest
/// code seen in column j (at least 2). The named column, if any, becomes the response.
inline CategoricalDataset load_dataset(const std::string& path,
                                       const std::optional<std::string>& response_column = std::nullopt) {
  const TextTable table = read_table(path);
  std::optional<std::size_t> response_index;
  if (response_column) {
    const auto it = std::find(table.header.begin(), table.header.end(), *response_column);
    if (it == table.header.end()) throw DataError(path + ": response column '" + *response_column + "' not found");
    response_index = static_cast<std::size_t>(it - table.header.begin());
  }

  CategoricalDataset data;
  data.n = static_cast<int>(table.rows.size());
  std::vector<std::size_t> columns;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (response_index && c == *response_index) continue;
    columns.push_back(c);
    data.variable_names.push_back(table.header[c]);
  }
  data.P = static_cast<int>(columns.size());
  if (data.P == 0) throw DataError(path + ": no clustering variables");
  data.categories.assign(columns.size(), 2);
  data.cells.resize(static_cast<std::size_t>(data.n) * data.P);

  auto read_code = [&](std::size_t row, std::size_t col) {
    const std::string& cell = table.rows[row][col];
    const std::string where = detail::cell_ref(table.line_numbers[row], col + 1, table.header[col]);
    if (cell.empty()) throw DataError(path + ": blank cell at " + where);
    const auto v = detail::parse_integer(cell);
    if (!v) throw DataError(path + ": non-integer cell '" + cell + "' at " + where);
    if (*v < 1 || *v > 1000000) throw DataError(path + ": category code out of range at " + where);
    return static_cast<int>(*v);
  };

  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const int code = read_code(row, columns[j]);
      data.categories[j] = std::max(data.categories[j], code);
      data.cells[row * columns.size() + j] = code - 1;
    }
  }
  if (response_index) {
    data.response_name = table.header[*response_index];
    std::vector<int> y(table.rows.size());
    data.response_categories = 2;
    for (std::size_t row = 0; row < table.rows.size(); ++row) {
      const int code = read_code(row, *response_index);
      data.response_categories = std::max(data.response_categories, code);
      y[row] = code - 1;
    }
    data.response = std::move(y);
  }
  validate(data);
  return data;
}

inline void write_dataset(const std::string& path, const CategoricalDataset& data) {
  std::ofstream out = detail::open_output(path);
  for (int j = 0; j < data.P; ++j) {
    if (j) out << ',';
    out << (data.variable_names.empty() ? "x" + std::to_string(j + 1) : data.variable_names[j]);
  }
  if (data.has_response()) out << ',' << (data.response_name.empty() ? "y" : data.response_name);
  out << '\n';
  for (int i = 0; i < data.n; ++i) {
    for (int j = 0; j < data.P; ++j) {
      if (j) out << ',';
      out << data.at(i, j) + 1;
    }
    if (data.has_response()) out << ',' << data.y(i) + 1;
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Tertile discretisation

/// Within each row, values at or below the ceil(P/3)-th order statistic become 1,
/// at or below the ceil(2P/3)-th become 2, the rest 3.
inline Matrix<int> tertile_discretize(const DenseMatrix& values) {
  Matrix<int> codes(values.rows, values.cols, 0);
  const int P = values.cols;
  if (P == 0) return codes;
  const int lower_rank = (P + 2) / 3;        // ceil(P / 3)
  const int upper_rank = (2 * P + 2) / 3;    // ceil(2P / 3)
  std::vector<double> sorted(static_cast<std::size_t>(P));
  for (int i = 0; i < values.rows; ++i) {
    for (int j = 0; j < P; ++j) {
      const double v = values(i, j);
      if (!std::isfinite(v)) {
        throw DataError("tertile_discretize: non-finite value at row " + std::to_string(i + 1) + ", column " +
                        std::to_string(j + 1));
      }
      sorted[static_cast<std::size_t>(j)] = v;
    }
    std::sort(sorted.begin(), sorted.end());
    const double t1 = sorted[static_cast<std::size_t>(lower_rank - 1)];
    const double t2 = sorted[static_cast<std::size_t>(upper_rank - 1)];
    for (int j = 0; j < P; ++j) {
      const double v = values(i, j);
      codes(i, j) = v <= t1 ? 1 : (v <= t2 ? 2 : 3);
    }
  }
  return codes;
}

/// Discretises every column of a real-valued table except `passthrough` columns,
/// which are copied unchanged. Tertiles are taken within each row.
inline void discretize_file(const std::string& in_path, const std::string& out_path,
                            const std::vector<std::string>& passthrough = {}) {
  const TextTable table = read_table(in_path);
  std::vector<std::size_t> numeric;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (std::find(passthrough.begin(), passthrough.end(), table.header[c]) == passthrough.end()) numeric.push_back(c);
  }
  for (const auto& name : passthrough) {
    if (std::find(table.header.begin(), table.header.end(), name) == table.header.end()) {
      throw DataError(in_path + ": passthrough column '" + name + "' not found");
    }
  }
  DenseMatrix values(static_cast<int>(table.rows.size()), static_cast<int>(numeric.size()));
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    for (std::size_t k = 0; k < numeric.size(); ++k) {
      const std::size_t c = numeric[k];
      const auto v = detail::parse_real(table.rows[row][c]);
      const std::string where = detail::cell_ref(table.line_numbers[row], c + 1, table.header[c]);
      if (!v) throw DataError(in_path + ": non-numeric cell at " + where);
      if (!std::isfinite(*v)) throw DataError(in_path + ": non-finite cell at " + where);
      values(static_cast<int>(row), static_cast<int>(k)) = *v;
    }
  }
  const Matrix<int> codes = tertile_discretize(values);
  std::ofstream out = detail::open_output(out_path);
  for (std::size_t c = 0; c < table.header.size(); ++c) out << (c ? "," : "") << table.header[c];
  out << '\n';
  for (std::size_t row = 0; row < table.rows.size(); ++row) {
    std::size_t k = 0;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c) out << ',';
      if (k < numeric.size() && numeric[k] == c) {
        out << codes(static_cast<int>(row), static_cast<int>(k));
        ++k;
      } else {
        out << table.rows[row][c];
      }
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Ground truth from the simulator

/// `individual,view1,view2` with 1-based cluster labels.
inline void write_truth(const std::string& path, const GroundTruth& truth) {
  std::ofstream out = detail::open_output(path);
  out << "individual";
  for (std::size_t v = 0; v < truth.z.size(); ++v) out << ",view" << v + 1;
  out << '\n';
  const std::size_t n = truth.z.empty() ? 0 : truth.z[0].size();
  for (std::size_t i = 0; i < n; ++i) {
    out << i + 1;
    for (const auto& z : truth.z) out << ',' << z[i] + 1;
    out << '\n';
  }
}

inline void write_truth_views(const std::string& path, const GroundTruth& truth,
                              const std::vector<std::string>& names) {
  std::ofstream out = detail::open_output(path);
  out << "variable,view\n";
  for (std::size_t j = 0; j < truth.gamma.size(); ++j) out << names[j] << ',' << truth.gamma[j] << '\n';
}

inline void write_truth_profiles(const std::string& path, const GroundTruth& truth) {
  std::ofstream out = detail::open_output(path);
  out << "view,cluster,variable";
  const std::size_t R = truth.profiles.empty() ? 0 : truth.profiles.front().probs.size();
  for (std::size_t r = 0; r < R; ++r) out << ",p" << r + 1;
  out << '\n';
  for (const auto& p : truth.profiles) {
    out << p.view << ',' << p.cluster + 1 << ',' << p.variable + 1 << ',' << detail::join(p.probs) << '\n';
  }
}

struct TruthTable {
  std::vector<std::string> names;      // column names after `individual`
  std::vector<Partition> partitions;   // one per column
};

inline TruthTable read_truth(const std::string& path) {
  const TextTable table = read_table(path);
  if (table.header.size() < 2) throw DataError(path + ": truth file needs at least one partition column");
  TruthTable truth;
  for (std::size_t c = 1; c < table.header.size(); ++c) {
    truth.names.push_back(table.header[c]);
    Partition p;
    for (std::size_t row = 0; row < table.rows.size(); ++row) {
      const auto v = detail::parse_integer(table.rows[row][c]);
      if (!v) {
        throw DataError(path + ": non-integer label at " +
                        detail::cell_ref(table.line_numbers[row], c + 1, table.header[c]));
      }
      p.push_back(static_cast<int>(*v));
    }
    truth.partitions.push_back(std::move(p));
  }
  return truth;
}

// ---------------------------------------------------------------------------
// Run configuration

struct RunConfig {
  std::string data_path;
  std::optional<std::string> response_column;
  std::string output_dir = "out";
  int views = 3;
  bool supervised = true;
  bool sample_relevance = false;
  bool update_views = true;
  double concentration_x = 1.0;
  double concentration_null = 1.0;
  double concentration_y = 1.0;
  std::vector<double> view_prior;  // empty: uniform 1/L
  double view_prior_concentration = 1.0;
  std::vector<AlphaSetting> alpha{AlphaSetting::gamma_prior(2.0, 1.0)};  // one entry applies to every view
  SweepConfig sweeps;
  std::uint64_t seed = 1;
};

namespace detail {

inline nlohmann::json alpha_to_json(const AlphaSetting& a) {
  if (a.sampled) return {{"mode", "sampled"}, {"shape", a.shape}, {"rate", a.rate}};
  return {{"mode", "fixed"}, {"value", a.value}};
}

inline AlphaSetting alpha_from_json(const nlohmann::json& j) {
  const std::string mode = j.value("mode", "sampled");
  for (const auto& [key, value] : j.items()) {
    if (key != "mode" && key != "shape" && key != "rate" && key != "value") {
      throw ConfigError("unknown alpha field '" + key + "'");
    }
  }
  if (mode == "sampled") return AlphaSetting::gamma_prior(j.value("shape", 2.0), j.value("rate", 1.0));
  if (mode == "fixed") return AlphaSetting::fixed(j.value("value", 1.0));
  throw ConfigError("alpha mode must be 'sampled' or 'fixed'");
}

}  // namespace detail

inline nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json alpha = nlohmann::json::array();
  for (const auto& a : cfg.alpha) alpha.push_back(detail::alpha_to_json(a));
  return {
      {"data", cfg.data_path},
      {"response_column", cfg.response_column ? nlohmann::json(*cfg.response_column) : nlohmann::json(nullptr)},
      {"output_dir", cfg.output_dir},
      {"views", cfg.views},
      {"supervised", cfg.supervised},
      {"sample_relevance", cfg.sample_relevance},
      {"update_views", cfg.update_views},
      {"concentration_x", cfg.concentration_x},
      {"concentration_null", cfg.concentration_null},
      {"concentration_y", cfg.concentration_y},
      {"view_prior", cfg.view_prior},
      {"view_prior_concentration", cfg.view_prior_concentration},
      {"alpha", alpha},
      {"iterations", cfg.sweeps.iterations},
      {"burn_in", cfg.sweeps.burn_in},
      {"thin", cfg.sweeps.thin},
      {"update_view_prior", cfg.sweeps.update_view_prior},
      {"audit_interval", cfg.sweeps.audit_interval},
      {"seed", cfg.seed},
  };
}

/// Missing fields keep their defaults; unknown fields are rejected.
inline RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("run configuration must be a JSON object");
  RunConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "data") cfg.data_path = value.get<std::string>();
      else if (key == "response_column") {
        if (value.is_null()) cfg.response_column.reset();
        else cfg.response_column = value.get<std::string>();
      } else if (key == "output_dir") cfg.output_dir = value.get<std::string>();
      else if (key == "views") cfg.views = value.get<int>();
      else if (key == "supervised") cfg.supervised = value.get<bool>();
      else if (key == "sample_relevance") cfg.sample_relevance = value.get<bool>();
      else if (key == "update_views") cfg.update_views = value.get<bool>();
      else if (key == "concentration_x") cfg.concentration_x = value.get<double>();
      else if (key == "concentration_null") cfg.concentration_null = value.get<double>();
      else if (key == "concentration_y") cfg.concentration_y = value.get<double>();
      else if (key == "view_prior") cfg.view_prior = value.get<std::vector<double>>();
      else if (key == "view_prior_concentration") cfg.view_prior_concentration = value.get<double>();
      else if (key == "alpha") {
        cfg.alpha.clear();
        if (value.is_array()) {
          for (const auto& a : value) cfg.alpha.push_back(detail::alpha_from_json(a));
        } else {
          cfg.alpha.push_back(detail::alpha_from_json(value));
        }
      } else if (key == "iterations") cfg.sweeps.iterations = value.get<int>();
      else if (key == "burn_in") cfg.sweeps.burn_in = value.get<int>();
      else if (key == "thin") cfg.sweeps.thin = value.get<int>();
      else if (key == "update_view_prior") cfg.sweeps.update_view_prior = value.get<bool>();
      else if (key == "audit_interval") cfg.sweeps.audit_interval = value.get<int>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else throw ConfigError("unknown configuration field '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("configuration type error: ") + e.what());
  }
  return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return run_config_from_json(j);
}

/// The configuration as recorded in a trace: everything except where output goes.
inline nlohmann::json provenance_json(const RunConfig& cfg) {
  nlohmann::json j = to_json(cfg);
  j.erase("output_dir");
  return j;
}

/// 64-bit FNV-1a of the canonical (key-sorted, compact) provenance JSON, as 16 hex digits.
inline std::string config_digest(const RunConfig& cfg) {
  const std::string text = provenance_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

inline Hyperparameters build_hyperparameters(const RunConfig& cfg, const CategoricalDataset& data) {
  Hyperparameters hp;
  hp.views = cfg.views;
  if (cfg.views < 2) throw ConfigError("number of views L must be at least 2");
  try {
    for (int j = 0; j < data.P; ++j) {
      hp.a_x.push_back(Concentration::symmetric(data.categories[j], cfg.concentration_x));
      hp.a_null.push_back(Concentration::symmetric(data.categories[j], cfg.concentration_null));
    }
    hp.supervised = cfg.supervised;
    if (cfg.supervised && data.has_response()) {
      hp.a_y = Concentration::symmetric(data.response_categories, cfg.concentration_y);
    }
  } catch (const std::domain_error& e) {
    throw ConfigError(std::string("invalid concentration: ") + e.what());
  }
  hp.view_prior = cfg.view_prior.empty() ? std::vector<double>(static_cast<std::size_t>(cfg.views), 1.0 / cfg.views)
                                         : cfg.view_prior;
  hp.view_prior_concentration = cfg.view_prior_concentration;
  if (cfg.alpha.size() == 1) {
    hp.alpha.assign(static_cast<std::size_t>(cfg.views - 1), cfg.alpha.front());
  } else {
    hp.alpha = cfg.alpha;
  }
  hp.sample_relevance = cfg.sample_relevance;
  hp.update_views = cfg.update_views;
  hp.seed = cfg.seed;
  validate(hp, data);
  return hp;
}

// ---------------------------------------------------------------------------
// Posterior trace

inline constexpr std::string_view kTraceMagic = "mvpr-trace 1";

/// Header lines `key value`, then `records N`, then one line per retained sweep:
/// `iteration;nu;alpha...;gamma...;z(view 1)...;...;z(view L-1)...` with
/// comma-separated lists inside each field.
inline void write_trace(const PosteriorTrace& trace, std::ostream& out) {
  out << kTraceMagic << '\n';
  out << "n " << trace.n << '\n';
  out << "P " << trace.P << '\n';
  out << "L " << trace.L << '\n';
  out << "seed " << trace.seed << '\n';
  out << "iterations " << trace.config.iterations << '\n';
  out << "burn_in " << trace.config.burn_in << '\n';
  out << "thin " << trace.config.thin << '\n';
  out << "update_view_prior " << (trace.config.update_view_prior ? 1 : 0) << '\n';
  out << "audit_interval " << trace.config.audit_interval << '\n';
  out << "config_digest " << (trace.config_digest.empty() ? "-" : trace.config_digest) << '\n';
  out << "config " << (trace.config_json.empty() ? "{}" : trace.config_json) << '\n';
  out << "records " << trace.records.size() << '\n';
  for (const auto& rec : trace.records) {
    out << rec.iteration << ';' << rec.nu << ';' << detail::join(rec.alpha) << ';' << detail::join(rec.gamma);
    for (const auto& z : rec.z) out << ';' << detail::join(z);
    out << '\n';
  }
}

inline void write_trace(const PosteriorTrace& trace, const std::string& path) {
  std::ofstream out = detail::open_output(path);
  write_trace(trace, out);
  if (!out) throw DataError("failed writing trace to '" + path + "'");
}

inline PosteriorTrace read_trace(std::istream& in, const std::string& source = "trace") {
  PosteriorTrace trace;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) -> DataError {
    return DataError(source + ": line " + std::to_string(line_no) + ": " + what);
  };
  auto next_line = [&]() {
    if (!std::getline(in, line)) {
      ++line_no;
      throw fail("unexpected end of file");
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  auto header_value = [&](std::string_view key) {
    next_line();
    if (line.size() <= key.size() || line.compare(0, key.size(), key) != 0 || line[key.size()] != ' ') {
      throw fail("expected header field '" + std::string(key) + "'");
    }
    return line.substr(key.size() + 1);
  };
  auto header_int = [&](std::string_view key) {
    const auto v = detail::parse_integer(header_value(key));
    if (!v) throw fail("header field '" + std::string(key) + "' is not an integer");
    return *v;
  };

  next_line();
  if (line != kTraceMagic) throw fail("not a trace file");
  trace.n = static_cast<int>(header_int("n"));
  trace.P = static_cast<int>(header_int("P"));
  trace.L = static_cast<int>(header_int("L"));
  {
    const std::string s = header_value("seed");
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw fail("seed is not an unsigned integer");
    trace.seed = seed;
  }
  trace.config.iterations = static_cast<int>(header_int("iterations"));
  trace.config.burn_in = static_cast<int>(header_int("burn_in"));
  trace.config.thin = static_cast<int>(header_int("thin"));
  trace.config.update_view_prior = header_int("update_view_prior") != 0;
  trace.config.audit_interval = static_cast<int>(header_int("audit_interval"));
  trace.config_digest = header_value("config_digest");
  if (trace.config_digest == "-") trace.config_digest.clear();
  trace.config_json = header_value("config");
  if (trace.config_json == "{}") trace.config_json.clear();
  const long long count = header_int("records");
  if (trace.n < 1 || trace.P < 1 || trace.L < 2) throw fail("invalid dimensions in header");
  if (count < 1) throw fail("trace has no records");

  auto parse_ints = [&](const std::string& field, std::size_t expected, const char* what) {
    std::vector<int> out;
    for (const auto& cell : detail::split(field)) {
      const auto v = detail::parse_integer(cell);
      if (!v) throw fail(std::string("malformed ") + what);
      out.push_back(static_cast<int>(*v));
    }
    if (out.size() != expected) throw fail(std::string(what) + " has the wrong length");
    return out;
  };

  for (long long r = 0; r < count; ++r) {
    next_line();
    const auto fields = detail::split(line, ';');
    if (fields.size() != static_cast<std::size_t>(4 + trace.L - 1)) throw fail("record has the wrong number of fields");
    TraceRecord rec;
    const auto it = detail::parse_integer(fields[0]);
    const auto nu = detail::parse_integer(fields[1]);
    if (!it || !nu) throw fail("malformed iteration or nu");
    rec.iteration = static_cast<int>(*it);
    rec.nu = static_cast<int>(*nu);
    if (rec.nu < 1 || rec.nu >= trace.L) throw fail("nu is not a non-null view");
    for (const auto& cell : detail::split(fields[2])) {
      const auto v = detail::parse_real(cell);
      if (!v || !(*v > 0.0)) throw fail("malformed alpha");
      rec.alpha.push_back(*v);
    }
    if (rec.alpha.size() != static_cast<std::size_t>(trace.L - 1)) throw fail("alpha has the wrong length");
    rec.gamma = parse_ints(fields[3], static_cast<std::size_t>(trace.P), "gamma");
    for (int g : rec.gamma) {
      if (g < 0 || g >= trace.L) throw fail("gamma entry outside 0..L-1");
    }
    for (int v = 1; v < trace.L; ++v) rec.z.push_back(parse_ints(fields[static_cast<std::size_t>(3 + v)], static_cast<std::size_t>(trace.n), "z"));
    trace.records.push_back(std::move(rec));
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) throw fail("trailing content after the last record");
  }
  return trace;
}

inline PosteriorTrace read_trace(const std::string& path) {
  std::ifstream in = detail::open_input(path);
  return read_trace(in, path);
}

// ---------------------------------------------------------------------------
// Summary outputs

inline void write_matrix(const std::string& path, const DenseMatrix& m) {
  std::ofstream out = detail::open_output(path);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) out << (j ? "," : "") << detail::format_real(m(i, j));
    out << '\n';
  }
}

}  // namespace mvpr
