#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "stmpc/config.hpp"
#include "stmpc/trace_io.hpp"
#include "test_support.hpp"

using namespace stmpc;

namespace {

const char* kSpringConfig = R"(
# spring-mass study
A = [0 1; -2 0]
B = [0; 1]
u_max = [8]
Q = [1 0; 0 1]
R = [0.5]
delta = 0.1
N_p = 80
M = 30
beta = 1
gamma = 0.5
x0 = [2.5; 0]
t_end = 40
seed = 42
)";

}  // namespace

TEST_CASE("config parses the documented example") {
  const ExperimentConfig cfg = ExperimentConfig::parse(kSpringConfig);
  CHECK(cfg.A(1, 0) == -2.0);
  CHECK(cfg.B(1, 0) == 1.0);
  CHECK(cfg.u_max[0] == 8.0);
  CHECK(cfg.n_intervals == 80);
  CHECK(cfg.n_patterns == 30);
  CHECK(cfg.x0[0] == 2.5);
  CHECK(cfg.seed == 42);
  CHECK(cfg.sample_resolution == 0.0);
  CHECK_NOTHROW(cfg.simulation());
}

TEST_CASE("parse-serialize-parse is the identity") {
  const ExperimentConfig cfg = ExperimentConfig::parse(kSpringConfig);
  const std::string text = cfg.serialize();
  const ExperimentConfig reparsed = ExperimentConfig::parse(text);
  CHECK(cfg == reparsed);
  CHECK(reparsed.serialize() == text);
}

TEST_CASE("malformed configs are rejected") {
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse("A = [1 2; 3]"),
                       doctest::Contains("ragged"), InvalidInputError);
  const std::string base{kSpringConfig};
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse(base + "\nmystery = 1\n"),
                       doctest::Contains("unknown key"), InvalidInputError);
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse(base + "\nbeta = 2\n"),
                       doctest::Contains("duplicate"), InvalidInputError);
  CHECK_THROWS_WITH_AS(ExperimentConfig::parse("A = [0]"), doctest::Contains("missing"),
                       InvalidInputError);
  CHECK_THROWS_AS(ExperimentConfig::parse(base + "\nnot a pair\n"), InvalidInputError);
}

TEST_CASE("parameter domains are enforced when building the simulation") {
  std::string text{kSpringConfig};
  const auto replace = [&](const std::string& from, const std::string& to) {
    std::string out = text;
    out.replace(out.find(from), from.size(), to);
    return out;
  };
  CHECK_THROWS_AS(ExperimentConfig::parse(replace("gamma = 0.5", "gamma = 1.5")).simulation(),
                  InvalidInputError);
  CHECK_THROWS_AS(ExperimentConfig::parse(replace("M = 30", "M = 80")).simulation(),
                  InvalidInputError);
  CHECK_THROWS_AS(ExperimentConfig::parse(replace("u_max = [8]", "u_max = [0]")).simulation(),
                  InvalidInputError);
  CHECK_THROWS_AS(ExperimentConfig::parse(replace("R = [0.5]", "R = [-0.5]")).simulation(),
                  InvalidInputError);
}

TEST_CASE("terminal ingredients round-trip through their file format") {
  TerminalIngredients ing;
  ing.delta = 0.1;
  ing.K = Eigen::MatrixXd(1, 2);
  ing.K << -0.25336948327128, -1.5832684442424;
  ing.P_f = Eigen::MatrixXd(2, 2);
  ing.P_f << 2.0874876325, 0.2262273847, 0.2262273847, 0.8529266988;
  ing.epsilon = 21.675296;
  const TerminalIngredients back = parse_terminal(serialize_terminal(ing));
  CHECK((back.K - ing.K).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.P_f - ing.P_f).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.epsilon == ing.epsilon);
  CHECK(back.delta == ing.delta);
  CHECK_THROWS_AS(parse_terminal("delta = 0.1\nK = [1]\n"), InvalidInputError);
}

TEST_CASE("scientific cells carry 12 significant digits") {
  CHECK(format_sci(2.5) == "2.50000000000e+00");
  CHECK(format_sci(-1.0 / 3.0) == "-3.33333333333e-01");
  CHECK(format_sci(0.0) == "0.00000000000e+00");
}

TEST_CASE("trace CSV has the documented shape") {
  SimulationConfig cfg;
  cfg.sys = testing::spring_mass();
  cfg.weights = testing::spring_mass_weights();
  cfg.trigger = TriggerParams{1.0, 0.5};
  cfg.delta = 0.1;
  cfg.n_intervals = 12;
  cfg.n_patterns = 3;
  cfg.x0 = Eigen::VectorXd(2);
  cfg.x0 << 0.5, 0.0;
  cfg.t_end = 1.0;
  const SimulationTrace trace = simulate(cfg);
  std::ostringstream out;
  write_trace_csv(out, trace, 2, 1, 3);
  const std::string text = out.str();
  CHECK(text.find("# samples\nt,x1,x2,u1\n") != std::string::npos);
  CHECK(text.find("# events\nk,t_k,i_k,interval,J_1,J_2,J_3,cond_a_1,cond_a_2,cond_a_3,"
                  "cond_b_1,cond_b_2,cond_b_3\n") != std::string::npos);
  CHECK(text.find("# summary\ntransmissions,cumulative_stage_cost\n") != std::string::npos);
  // The t_0 event solves pattern 1 only: trailing cost cells stay empty.
  std::istringstream lines(text.substr(text.find("# events")));
  std::string line;
  std::getline(lines, line);  // marker
  std::getline(lines, line);  // header
  std::getline(lines, line);  // event 0
  CHECK(line.find(",,") != std::string::npos);
}

TEST_CASE("settling time finds the last entry into the ball") {
  SimulationTrace trace;
  const auto add = [&](double t, double norm) {
    TraceSample s;
    s.t = t;
    s.x = Eigen::VectorXd::Constant(1, norm);
    s.u = Eigen::VectorXd::Zero(1);
    trace.samples.push_back(s);
  };
  add(0.0, 1.0);
  add(1.0, 0.01);
  add(2.0, 0.30);
  add(3.0, 0.02);
  add(4.0, 0.01);
  CHECK(settling_time(trace, 0.05) == 3.0);
  trace.samples.clear();
  add(0.0, 1.0);
  add(1.0, 0.9);
  CHECK(settling_time(trace, 0.05) == -1.0);
}
