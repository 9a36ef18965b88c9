#include "afb/run_config.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

namespace afb {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + value + "' as a number");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used != value.size()) {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + value + "' as an integer");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size()) {
      throw std::invalid_argument(value);
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': cannot parse '" + value +
                      "' as an unsigned integer");
  }
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      out.push_back(parse_double(key, item));
    }
  }
  if (out.empty()) {
    throw ConfigError("key '" + key + "': empty value list");
  }
  return out;
}

}  // namespace

RunConfigFile RunConfigFile::parse(std::istream& in) {
  RunConfigFile cfg;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line.substr(0, line.find('#')));
    if (text.empty()) {
      continue;
    }
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section '" +
                          text + "'");
      }
      section = text.substr(1, text.size() - 2);
      if (section != "filterbank" && section != "envelope" && section != "dataset" &&
          section != "train" && section != "sweep") {
        throw ConfigError("unknown section '[" + section + "]'");
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (section.empty()) {
      throw ConfigError("key '" + key + "' appears before any section header");
    }

    if (section == "filterbank") {
      if (key == "n_filters") cfg.n_filters = parse_int(key, value);
      else if (key == "f_max_hz") cfg.f_max_hz = parse_double(key, value);
      else if (key == "q") cfg.q = parse_double(key, value);
      else if (key == "f_min_hz") cfg.f_min_hz = parse_double(key, value);
      else throw ConfigError("unknown key '" + key + "' in [filterbank]");
    } else if (section == "envelope") {
      if (key == "window_ms") cfg.window_ms = parse_double(key, value);
      else if (key == "hop_ms") cfg.hop_ms = parse_double(key, value);
      else throw ConfigError("unknown key '" + key + "' in [envelope]");
    } else if (section == "dataset") {
      if (key == "root") cfg.dataset_root = value;
      else if (key == "preset") cfg.dataset_preset = value;
      else if (key == "seed") cfg.dataset_seed = parse_u64(key, value);
      else throw ConfigError("unknown key '" + key + "' in [dataset]");
    } else if (section == "train") {
      if (key == "preset") cfg.train_preset = value;
      else if (key == "momentum") cfg.momentum = parse_double(key, value);
      else if (key == "learning_rate") cfg.learning_rate = parse_double(key, value);
      else if (key == "lr_decay") cfg.lr_decay = parse_double(key, value);
      else if (key == "epochs") cfg.epochs = parse_int(key, value);
      else if (key == "batch_size") cfg.batch_size = parse_int(key, value);
      else if (key == "l2") cfg.l2 = parse_double(key, value);
      else throw ConfigError("unknown key '" + key + "' in [train]");
    } else if (section == "sweep") {
      if (key == "parameter") cfg.sweep_parameter = value;
      else if (key == "values") cfg.sweep_values = parse_list(key, value);
      else if (key == "trials") cfg.sweep_trials = parse_int(key, value);
      else throw ConfigError("unknown key '" + key + "' in [sweep]");
    }
  }
  return cfg;
}

RunConfigFile RunConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open run config '" + path + "'");
  }
  return parse(in);
}

FilterbankConfig RunConfigFile::filterbank(const FilterbankConfig& defaults) const {
  FilterbankConfig out = defaults;
  if (n_filters) out.n_filters = *n_filters;
  if (f_max_hz) out.f_max_hz = *f_max_hz;
  if (q) out.q_filter = *q;
  if (f_min_hz) out.f_min_hz = *f_min_hz;
  return out;
}

EnvelopeConfig RunConfigFile::envelope(const EnvelopeConfig& defaults) const {
  EnvelopeConfig out = defaults;
  if (window_ms) out.window_ms = *window_ms;
  if (hop_ms) out.hop_ms = *hop_ms;
  return out;
}

TrainConfig RunConfigFile::train(const TrainConfig& defaults) const {
  TrainConfig out = defaults;
  if (train_preset) {
    if (*train_preset == "paper") {
      out = paper_train_config();
    } else if (*train_preset != "default") {
      throw ConfigError("unknown train preset '" + *train_preset +
                        "' (expected paper or default)");
    }
  }
  if (momentum) out.momentum = *momentum;
  if (learning_rate) out.learning_rate = *learning_rate;
  if (lr_decay) out.lr_decay = *lr_decay;
  if (epochs) out.epochs = *epochs;
  if (batch_size) out.batch_size = *batch_size;
  if (l2) out.l2 = *l2;
  return out;
}

}  // namespace afb
