#include "stmpc/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace stmpc {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view token, const std::string& context) {
  const std::string buf(token);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(buf, &used);
  } catch (const std::exception&) {
    throw InvalidInputError("config: cannot parse number '" + buf + "' in " + context);
  }
  if (used != buf.size() || !std::isfinite(value)) {
    throw InvalidInputError("config: cannot parse number '" + buf + "' in " + context);
  }
  return value;
}

Eigen::MatrixXd parse_matrix(std::string_view value, const std::string& key) {
  value = trim(value);
  if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
    throw InvalidInputError("config: value for '" + key + "' must be a [..] matrix literal");
  }
  value = value.substr(1, value.size() - 2);

  std::vector<std::vector<double>> rows;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t stop = value.find(';', start);
    std::string_view row_text =
        value.substr(start, stop == std::string_view::npos ? value.size() - start : stop - start);
    std::vector<double> row;
    std::string token;
    std::istringstream stream{std::string(row_text)};
    while (stream >> token) {
      if (!token.empty() && token.back() == ',') token.pop_back();
      if (token.empty()) continue;
      row.push_back(parse_number(token, "matrix '" + key + "'"));
    }
    rows.push_back(std::move(row));
    if (stop == std::string_view::npos) break;
    start = stop + 1;
  }
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty()) {
    throw InvalidInputError("config: empty matrix for '" + key + "'");
  }
  const std::size_t cols = rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != cols || cols == 0) {
      throw InvalidInputError("config: ragged rows in matrix '" + key + "'");
    }
  }
  Eigen::MatrixXd out(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = rows[r][c];
  return out;
}

Eigen::VectorXd as_vector(const Eigen::MatrixXd& mat, const std::string& key) {
  if (mat.cols() == 1) return mat.col(0);
  if (mat.rows() == 1) return mat.row(0).transpose();
  throw InvalidInputError("config: '" + key + "' must be a vector");
}

std::string format_shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_matrix(const Eigen::MatrixXd& mat) {
  std::string out = "[";
  for (Eigen::Index r = 0; r < mat.rows(); ++r) {
    if (r > 0) out += "; ";
    for (Eigen::Index c = 0; c < mat.cols(); ++c) {
      if (c > 0) out += " ";
      out += format_shortest(mat(r, c));
    }
  }
  out += "]";
  return out;
}

std::map<std::string, std::string, std::less<>> parse_pairs(std::string_view text) {
  std::map<std::string, std::string, std::less<>> pairs;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw InvalidInputError("config: line " + std::to_string(line_no) +
                                " is not of the form key = value");
      }
      const std::string key{trim(line.substr(0, eq))};
      const std::string value{trim(line.substr(eq + 1))};
      if (key.empty() || value.empty()) {
        throw InvalidInputError("config: malformed entry on line " + std::to_string(line_no));
      }
      if (!pairs.emplace(key, value).second) {
        throw InvalidInputError("config: duplicate key '" + key + "'");
      }
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return pairs;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidInputError("config: cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  auto pairs = parse_pairs(text);
  const auto take = [&pairs](const char* key) -> std::string {
    const auto it = pairs.find(key);
    if (it == pairs.end()) {
      throw InvalidInputError(std::string("config: missing required key '") + key + "'");
    }
    std::string value = it->second;
    pairs.erase(it);
    return value;
  };
  const auto take_optional = [&pairs](const char* key) -> std::string {
    const auto it = pairs.find(key);
    if (it == pairs.end()) return {};
    std::string value = it->second;
    pairs.erase(it);
    return value;
  };

  ExperimentConfig cfg;
  cfg.A = parse_matrix(take("A"), "A");
  cfg.B = parse_matrix(take("B"), "B");
  cfg.u_max = as_vector(parse_matrix(take("u_max"), "u_max"), "u_max");
  cfg.Q = parse_matrix(take("Q"), "Q");
  cfg.R = parse_matrix(take("R"), "R");
  cfg.delta = parse_number(take("delta"), "delta");
  cfg.n_intervals = static_cast<int>(parse_number(take("N_p"), "N_p"));
  cfg.n_patterns = static_cast<int>(parse_number(take("M"), "M"));
  cfg.beta = parse_number(take("beta"), "beta");
  cfg.gamma = parse_number(take("gamma"), "gamma");
  cfg.x0 = as_vector(parse_matrix(take("x0"), "x0"), "x0");
  cfg.t_end = parse_number(take("t_end"), "t_end");
  const std::string resolution = take_optional("sample_resolution");
  if (!resolution.empty()) cfg.sample_resolution = parse_number(resolution, "sample_resolution");
  const std::string seed = take_optional("seed");
  if (!seed.empty()) cfg.seed = static_cast<std::uint64_t>(parse_number(seed, "seed"));

  if (!pairs.empty()) {
    throw InvalidInputError("config: unknown key '" + pairs.begin()->first + "'");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  return parse(read_file(path));
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "A = " << format_matrix(A) << "\n";
  out << "B = " << format_matrix(B) << "\n";
  out << "u_max = " << format_matrix(u_max) << "\n";
  out << "Q = " << format_matrix(Q) << "\n";
  out << "R = " << format_matrix(R) << "\n";
  out << "delta = " << format_shortest(delta) << "\n";
  out << "N_p = " << n_intervals << "\n";
  out << "M = " << n_patterns << "\n";
  out << "beta = " << format_shortest(beta) << "\n";
  out << "gamma = " << format_shortest(gamma) << "\n";
  out << "x0 = " << format_matrix(x0) << "\n";
  out << "t_end = " << format_shortest(t_end) << "\n";
  if (sample_resolution > 0.0) {
    out << "sample_resolution = " << format_shortest(sample_resolution) << "\n";
  }
  if (seed != 0) {
    out << "seed = " << seed << "\n";
  }
  return out.str();
}

LinearSystem ExperimentConfig::system() const {
  LinearSystem sys{A, B, u_max};
  sys.validate();
  return sys;
}

CostWeights ExperimentConfig::weights() const {
  CostWeights w{Q, R};
  w.validate(static_cast<int>(A.rows()), static_cast<int>(B.cols()));
  return w;
}

TriggerParams ExperimentConfig::trigger() const {
  TriggerParams params{beta, gamma};
  params.validate();
  return params;
}

SimulationConfig ExperimentConfig::simulation() const {
  SimulationConfig sim;
  sim.sys = system();
  sim.weights = weights();
  sim.trigger = trigger();
  sim.delta = delta;
  sim.n_intervals = n_intervals;
  sim.n_patterns = n_patterns;
  sim.x0 = x0;
  sim.t_end = t_end;
  sim.sample_resolution = sample_resolution;
  sim.validate();
  return sim;
}

std::string serialize_terminal(const TerminalIngredients& ing) {
  std::ostringstream out;
  out << "delta = " << format_shortest(ing.delta) << "\n";
  out << "K = " << format_matrix(ing.K) << "\n";
  out << "P_f = " << format_matrix(ing.P_f) << "\n";
  out << "epsilon = " << format_shortest(ing.epsilon) << "\n";
  return out.str();
}

TerminalIngredients parse_terminal(std::string_view text) {
  auto pairs = parse_pairs(text);
  const auto take = [&pairs](const char* key) -> std::string {
    const auto it = pairs.find(key);
    if (it == pairs.end()) {
      throw InvalidInputError(std::string("terminal file: missing key '") + key + "'");
    }
    std::string value = it->second;
    pairs.erase(it);
    return value;
  };
  TerminalIngredients ing;
  ing.delta = parse_number(take("delta"), "delta");
  ing.K = parse_matrix(take("K"), "K");
  ing.P_f = parse_matrix(take("P_f"), "P_f");
  ing.epsilon = parse_number(take("epsilon"), "epsilon");
  if (!pairs.empty()) {
    throw InvalidInputError("terminal file: unknown key '" + pairs.begin()->first + "'");
  }
  return ing;
}

TerminalIngredients parse_terminal_file(const std::string& path) {
  return parse_terminal(read_file(path));
}

}  // namespace stmpc
