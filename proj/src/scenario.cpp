#include "das/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "das/error.hpp"

namespace das {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ValidationError("'" + key + "' expects a number, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ValidationError("'" + key + "' expects a nonnegative integer, got '" + v + "'");
  return x;
}

Index parse_count(const std::string& key, const std::string& v) {
  return static_cast<Index>(parse_u64(key, v));
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
  if (out.empty()) throw ValidationError("'" + key + "' is empty");
  return out;
}

std::vector<double> per_node(const std::vector<double>& v, Index K, const char* what) {
  if (v.size() == 1) return std::vector<double>(K, v.front());
  if (v.size() != K)
    throw ValidationError(std::string(what) + " needs 1 or K values, got " + std::to_string(v.size()));
  return v;
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::polling: return "polling";
    case Mode::aloha: return "aloha";
    case Mode::bandit: return "bandit";
  }
  return "?";
}

std::string to_string(AccessMode mode) {
  return mode == AccessMode::polling ? "polling" : "aloha";
}

AccessMode Scenario::access_mode() const {
  switch (mode) {
    case Mode::polling: return AccessMode::polling;
    case Mode::aloha: return AccessMode::aloha;
    case Mode::bandit: return bandit_access;
  }
  return AccessMode::aloha;
}

ChannelConfig Scenario::channel_config() const {
  if (threshold_snr) {
    return ChannelConfig::from_fading(N, access_mode(), *threshold_snr,
                                      per_node(mean_snr, K, "mean_snr"),
                                      per_node(availability.empty() ? std::vector<double>{1.0}
                                                                    : availability,
                                               K, "availability"));
  }
  return ChannelConfig::uniform(N, access_mode(), K, p.value_or(0.0));
}

void Scenario::validate() const {
  if (K < 1) throw ValidationError("K must be positive");
  if (N < 1) throw ValidationError("N must be positive");
  if (runs < 1) throw ValidationError("runs must be positive");
  if (max_rounds < 1) throw ValidationError("max_rounds must be positive");
  if (!(rho > -1.0 && rho < 1.0)) throw ValidationError("rho must lie in (-1, 1)");
  if (target_known && (*target_known < 1 || *target_known > K))
    throw ValidationError("target_known must lie in [1, K]");
  if (q_policy.fixed && *q_policy.fixed < 1) throw ValidationError("fixed Q must be positive");
  if (threshold_snr) {
    if (mean_snr.empty()) throw ValidationError("fading parameterization needs mean_snr");
    for (double g : mean_snr)
      if (!(g > 0.0)) throw ValidationError("mean_snr must be positive");
  } else if (!p) {
    throw ValidationError("either p or threshold_snr/mean_snr must be given");
  }
  const ChannelConfig cfg = channel_config();
  if (!(cfg.mean_probability() > 0.0)) throw ValidationError("uploading probability must be positive");
  if (mode == Mode::bandit) {
    if (M < 2 || M > 5) throw ValidationError("bandit mode needs 2 <= M <= 5");
    if (!(tau > 0.0)) throw ValidationError("tau must be positive");
    if (J < 1) throw ValidationError("J must be positive");
    if (K < J + M - 1) throw ValidationError("K must be at least J + M - 1");
    if (true_model < 1 || true_model > M) throw ValidationError("true_model must lie in [1, M]");
    if (baseline_model < 1 || baseline_model > M)
      throw ValidationError("baseline_model must lie in [1, M]");
  }
}

void apply_setting(Scenario& s, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  s.explicit_keys.insert(key == "T" ? "max_rounds" : key);
  if (key == "mode") {
    if (v == "polling") s.mode = Mode::polling;
    else if (v == "aloha") s.mode = Mode::aloha;
    else if (v == "bandit") s.mode = Mode::bandit;
    else throw ValidationError("mode must be polling, aloha or bandit");
  } else if (key == "access") {
    if (v == "polling") s.bandit_access = AccessMode::polling;
    else if (v == "aloha") s.bandit_access = AccessMode::aloha;
    else throw ValidationError("access must be polling or aloha");
  } else if (key == "K") {
    s.K = parse_count(key, v);
  } else if (key == "rho") {
    s.rho = parse_real(key, v);
  } else if (key == "N") {
    s.N = parse_count(key, v);
  } else if (key == "p") {
    s.p = parse_real(key, v);
  } else if (key == "threshold_snr") {
    s.threshold_snr = parse_real(key, v);
  } else if (key == "mean_snr") {
    s.mean_snr = parse_list(key, v);
  } else if (key == "availability") {
    s.availability = parse_list(key, v);
  } else if (key == "q_policy") {
    if (v == "optimal") {
      s.q_policy.fixed.reset();
    } else if (v.rfind("fixed:", 0) == 0) {
      s.q_policy.fixed = parse_count(key, v.substr(6));
    } else {
      throw ValidationError("q_policy must be 'optimal' or 'fixed:<q>'");
    }
  } else if (key == "selection") {
    if (v == "greedy") s.selection = SelectionRule::greedy;
    else if (v == "topq") s.selection = SelectionRule::top_q;
    else throw ValidationError("selection must be greedy or topq");
  } else if (key == "first_round") {
    if (v == "random") s.first_round = FirstRound::random;
    else if (v == "greedy") s.first_round = FirstRound::greedy;
    else throw ValidationError("first_round must be random or greedy");
  } else if (key == "target_known") {
    s.target_known = parse_count(key, v);
  } else if (key == "max_rounds" || key == "T") {
    s.max_rounds = parse_count(key, v);
  } else if (key == "runs") {
    s.runs = parse_count(key, v);
  } else if (key == "seed") {
    s.seed = parse_u64(key, v);
  } else if (key == "threads") {
    s.threads = parse_count(key, v);
  } else if (key == "tau") {
    s.tau = parse_real(key, v);
  } else if (key == "M") {
    s.M = parse_count(key, v);
  } else if (key == "J") {
    s.J = parse_count(key, v);
  } else if (key == "noise") {
    s.noise = parse_real(key, v);
  } else if (key == "true_model") {
    s.true_model = parse_count(key, v);
  } else if (key == "baseline_model") {
    s.baseline_model = parse_count(key, v);
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

Scenario parse_scenario(std::istream& in) {
  Scenario s;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("line " + std::to_string(lineno) + ": expected key = value");
    apply_setting(s, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  return parse_scenario(in);
}

}  // namespace das
