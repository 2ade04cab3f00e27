#include "tracklink/config.hpp"

#include "tracklink/types.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tracklink {
namespace {

// Shortest text that parses back to the same double.
std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* begin = value.data();
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) {
    throw Error("config: invalid value '" + value + "' for key '" + key + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error("config: invalid boolean '" + value + "' for key '" + key + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"segment_len", [](RunConfig& c, auto& k, auto& v) { c.segment_len = parse_number<int>(k, v); }},
      {"probe_window", [](RunConfig& c, auto& k, auto& v) { c.probe_window = parse_number<int>(k, v); }},
      {"strongest_q", [](RunConfig& c, auto& k, auto& v) { c.strongest_q = parse_number<int>(k, v); }},
      {"split_run", [](RunConfig& c, auto& k, auto& v) { c.split_run = parse_number<int>(k, v); }},
      {"refine_iters", [](RunConfig& c, auto& k, auto& v) { c.refine_iters = parse_number<int>(k, v); }},
      {"distance_threshold",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "auto") {
           c.distance_threshold.reset();
         } else {
           c.distance_threshold = parse_number<double>(k, v);
         }
       }},
      {"split_iqr_gain", [](RunConfig& c, auto& k, auto& v) { c.split_iqr_gain = parse_number<double>(k, v); }},
      {"rank_tol", [](RunConfig& c, auto& k, auto& v) { c.rank_tol = parse_number<double>(k, v); }},
      {"rank_noise_gain", [](RunConfig& c, auto& k, auto& v) { c.rank_noise_gain = parse_number<double>(k, v); }},
      {"overlap_eta", [](RunConfig& c, auto& k, auto& v) { c.overlap_eta = parse_number<double>(k, v); }},
      {"gap_bound", [](RunConfig& c, auto& k, auto& v) { c.gap_bound = parse_number<int>(k, v); }},
      {"lambda1", [](RunConfig& c, auto& k, auto& v) { c.lambda1 = parse_number<double>(k, v); }},
      {"lambda2", [](RunConfig& c, auto& k, auto& v) { c.lambda2 = parse_number<double>(k, v); }},
      {"exit_band_frac", [](RunConfig& c, auto& k, auto& v) { c.exit_band_frac = parse_number<double>(k, v); }},
      {"entry_exit_prob", [](RunConfig& c, auto& k, auto& v) { c.entry_exit_prob = parse_number<double>(k, v); }},
      {"feature_dim", [](RunConfig& c, auto& k, auto& v) { c.feature_dim = parse_number<int>(k, v); }},
      {"rng_seed", [](RunConfig& c, auto& k, auto& v) { c.rng_seed = parse_number<std::uint64_t>(k, v); }},
      {"det_threshold", [](RunConfig& c, auto& k, auto& v) { c.det_threshold = parse_number<double>(k, v); }},
      {"frame_width", [](RunConfig& c, auto& k, auto& v) { c.frame_width = parse_number<double>(k, v); }},
      {"frame_height", [](RunConfig& c, auto& k, auto& v) { c.frame_height = parse_number<double>(k, v); }},
      {"use_appearance", [](RunConfig& c, auto& k, auto& v) { c.use_appearance = parse_bool(k, v); }},
      {"pair_cap", [](RunConfig& c, auto& k, auto& v) { c.pair_cap = parse_number<int>(k, v); }},
      {"max_columns", [](RunConfig& c, auto& k, auto& v) { c.max_columns = parse_number<int>(k, v); }},
  };
  return table;
}

void require(bool ok, const std::string& what) {
  if (!ok) {
    throw Error("config: " + what);
  }
}

}  // namespace

void validate(const RunConfig& c) {
  require(c.lambda1 >= 0.0 && c.lambda1 <= 1.0, "lambda1 must lie in [0,1]");
  require(c.lambda2 >= 0.0 && c.lambda2 <= 1.0, "lambda2 must lie in [0,1]");
  require(c.probe_window >= 1, "probe_window must be >= 1");
  require(c.segment_len >= 2 * c.probe_window, "segment_len must be >= 2 * probe_window");
  require(c.overlap_eta > 0.0 && c.overlap_eta < 1.0, "overlap_eta must lie in (0,1)");
  require(c.rank_tol > 0.0, "rank_tol must be > 0");
  require(c.rank_noise_gain >= 0.0, "rank_noise_gain must be >= 0");
  require(!c.distance_threshold || *c.distance_threshold > 0.0, "distance_threshold must be > 0");
  require(c.split_iqr_gain >= 0.0, "split_iqr_gain must be >= 0");
  require(c.strongest_q >= 2, "strongest_q must be >= 2");
  require(c.split_run >= 1, "split_run must be >= 1");
  require(c.refine_iters >= 0, "refine_iters must be >= 0");
  require(c.gap_bound >= 1, "gap_bound must be >= 1");
  require(c.exit_band_frac >= 0.0 && c.exit_band_frac < 0.5, "exit_band_frac must lie in [0,0.5)");
  require(c.entry_exit_prob > 0.0 && c.entry_exit_prob < 1.0, "entry_exit_prob must lie in (0,1)");
  require(c.feature_dim >= 0, "feature_dim must be >= 0");
  require(c.det_threshold > 0.0 && c.det_threshold < 1.0, "det_threshold must lie in (0,1)");
  require(c.frame_width >= 0.0 && c.frame_height >= 0.0, "frame dimensions must be >= 0");
  require(c.pair_cap >= 1, "pair_cap must be >= 1");
  require(c.max_columns >= 1, "max_columns must be >= 1");
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw Error("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    it->second(cfg, key, value);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const RunConfig& c) {
  std::ostringstream out;
  out << "segment_len=" << c.segment_len << '\n'
      << "probe_window=" << c.probe_window << '\n'
      << "strongest_q=" << c.strongest_q << '\n'
      << "split_run=" << c.split_run << '\n'
      << "refine_iters=" << c.refine_iters << '\n';
  if (c.distance_threshold) {
    out << "distance_threshold=" << shortest(*c.distance_threshold) << '\n';
  } else {
    out << "distance_threshold=auto\n";
  }
  out << "split_iqr_gain=" << shortest(c.split_iqr_gain) << '\n'
      << "rank_tol=" << shortest(c.rank_tol) << '\n'
      << "rank_noise_gain=" << shortest(c.rank_noise_gain) << '\n'
      << "overlap_eta=" << shortest(c.overlap_eta) << '\n'
      << "gap_bound=" << c.gap_bound << '\n'
      << "lambda1=" << shortest(c.lambda1) << '\n'
      << "lambda2=" << shortest(c.lambda2) << '\n'
      << "exit_band_frac=" << shortest(c.exit_band_frac) << '\n'
      << "entry_exit_prob=" << shortest(c.entry_exit_prob) << '\n'
      << "feature_dim=" << c.feature_dim << '\n'
      << "rng_seed=" << c.rng_seed << '\n'
      << "det_threshold=" << shortest(c.det_threshold) << '\n'
      << "frame_width=" << shortest(c.frame_width) << '\n'
      << "frame_height=" << shortest(c.frame_height) << '\n'
      << "use_appearance=" << (c.use_appearance ? "true" : "false") << '\n'
      << "pair_cap=" << c.pair_cap << '\n'
      << "max_columns=" << c.max_columns << '\n';
  return out.str();
}

}  // namespace tracklink
