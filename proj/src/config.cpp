#include "nlframe/config.hpp"

#include <cctype>
#include <iomanip>
#include <sstream>

#include "nlframe/io.hpp"

namespace nlframe {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// strip a trailing comment that is not inside a string literal
std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

class ValueParser {
 public:
  explicit ValueParser(const std::string& s) : s_(s) {}

  nlohmann::json parse() {
    nlohmann::json v = parse_value();
    skip_ws();
    require(pos_ == s_.size(), "toml: trailing characters in value '" + s_ + "'");
    return v;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  nlohmann::json parse_value() {
    skip_ws();
    require(pos_ < s_.size(), "toml: empty value");
    char c = s_[pos_];
    if (c == '[') return parse_array();
    if (c == '"') return parse_string();
    return parse_scalar();
  }

  nlohmann::json parse_array() {
    ++pos_;  // '['
    nlohmann::json arr = nlohmann::json::array();
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ']') {
      ++pos_;
      return arr;
    }
    while (true) {
      arr.push_back(parse_value());
      skip_ws();
      require(pos_ < s_.size(), "toml: unterminated array");
      if (s_[pos_] == ',') {
        ++pos_;
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == ']') {  // trailing comma
          ++pos_;
          return arr;
        }
        continue;
      }
      if (s_[pos_] == ']') {
        ++pos_;
        return arr;
      }
      throw InvalidInput("toml: expected ',' or ']' in array");
    }
  }

  nlohmann::json parse_string() {
    ++pos_;  // '"'
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
        ++pos_;
        switch (s_[pos_]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: out += s_[pos_];
        }
      } else {
        out += s_[pos_];
      }
      ++pos_;
    }
    require(pos_ < s_.size(), "toml: unterminated string");
    ++pos_;
    return out;
  }

  nlohmann::json parse_scalar() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']') ++pos_;
    std::string tok = trim(s_.substr(start, pos_ - start));
    require(!tok.empty(), "toml: empty scalar");
    if (tok == "true") return true;
    if (tok == "false") return false;
    // integer or float
    bool is_int = true;
    for (std::size_t i = 0; i < tok.size(); ++i) {
      char c = tok[i];
      if (std::isdigit(static_cast<unsigned char>(c))) continue;
      if ((c == '+' || c == '-') && i == 0) continue;
      is_int = false;
      break;
    }
    try {
      if (is_int) return std::stoll(tok);
      return std::stod(tok);
    } catch (const std::exception&) {
      throw InvalidInput("toml: cannot parse value '" + tok + "'");
    }
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

nlohmann::json* table_at(nlohmann::json& root, const std::string& dotted) {
  nlohmann::json* cur = &root;
  std::stringstream ss(dotted);
  std::string part;
  while (std::getline(ss, part, '.')) {
    part = trim(part);
    require(!part.empty(), "toml: empty table name component");
    cur = &((*cur)[part]);
    if (cur->is_null()) *cur = nlohmann::json::object();
  }
  return cur;
}

}  // namespace

nlohmann::json parse_toml_subset(const std::string& text) {
  nlohmann::json root = nlohmann::json::object();
  nlohmann::json* table = &root;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      require(line.back() == ']', "toml line " + std::to_string(lineno) +
                                      ": malformed table header");
      table = table_at(root, line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    require(eq != std::string::npos,
            "toml line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    require(!key.empty(), "toml line " + std::to_string(lineno) + ": empty key");
    // multiline arrays: keep reading until brackets balance
    auto balance = [](const std::string& s) {
      int depth = 0;
      bool in_str = false;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
        if (in_str) continue;
        if (s[i] == '[') ++depth;
        if (s[i] == ']') --depth;
      }
      return depth;
    };
    while (balance(value) > 0) {
      std::string cont;
      if (!std::getline(in, cont))
        throw InvalidInput("toml: unterminated multiline array for key '" + key + "'");
      ++lineno;
      value += " " + trim(strip_comment(cont));
    }
    (*table)[key] = ValueParser(value).parse();
  }
  return root;
}

nlohmann::json load_config_file(const std::string& path) {
  std::string text = read_text(path);
  auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "json") return nlohmann::json::parse(text);
  return parse_toml_subset(text);
}

std::string canonical_json(const nlohmann::json& j) {
  // nlohmann objects keep keys sorted; dump() is deterministic
  return j.dump();
}

std::uint64_t config_hash(const nlohmann::json& j) {
  return hash_str(canonical_json(j));
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  std::vector<std::string> problems;
  ExperimentConfig cfg;
  cfg.raw = j;

  if (!j.is_object()) throw InvalidInput("config: expected an object/table at top level");

  cfg.mode = j.value("mode", std::string());
  if (cfg.mode.empty()) problems.push_back("missing 'mode' (certify|solve|recover|triple)");
  else if (cfg.mode != "certify" && cfg.mode != "solve" && cfg.mode != "recover" &&
           cfg.mode != "triple")
    problems.push_back("unknown mode '" + cfg.mode + "'");

  cfg.map_spec = j.value("map", nlohmann::json());
  cfg.operator_spec = j.value("operator", nlohmann::json());
  cfg.plan = j.value("plan", nlohmann::json::object());
  cfg.solver = j.value("solver", nlohmann::json::object());
  cfg.signal = j.value("signal", nlohmann::json());
  cfg.noise = j.value("noise", nlohmann::json());
  cfg.recover = j.value("recover", nlohmann::json::object());
  cfg.certify = j.value("certify", nlohmann::json::object());
  cfg.triple_spec = j.value("triple", std::string());
  cfg.seed = j.value("seed", 0ULL);
  cfg.threads = j.value("threads", 1);

  if (j.contains("output")) {
    const auto& out = j["output"];
    cfg.out_report = out.value("report", std::string());
    cfg.out_trace = out.value("trace", std::string());
    cfg.out_summary = out.value("summary", std::string());
  }

  if (cfg.mode == "certify" || cfg.mode == "solve") {
    if (cfg.map_spec.is_null()) problems.push_back("mode '" + cfg.mode + "' requires [map]");
    if (cfg.operator_spec.is_null())
      problems.push_back("mode '" + cfg.mode + "' requires [operator]");
  }
  if (cfg.mode == "solve") {
    if (!cfg.solver.contains("algo"))
      problems.push_back("[solver] requires 'algo' (left-inverse|van-cittert|localized)");
    if (!cfg.solver.contains("mu")) problems.push_back("[solver] requires 'mu'");
    if (cfg.signal.is_null() && !j.contains("data"))
      problems.push_back("mode 'solve' requires [signal] or 'data'");
  }
  if (cfg.mode == "recover") {
    if (cfg.map_spec.is_null()) problems.push_back("mode 'recover' requires [map]");
    if (cfg.triple_spec.empty()) problems.push_back("mode 'recover' requires 'triple'");
    if (!cfg.recover.contains("eps")) problems.push_back("[recover] requires 'eps'");
    if (cfg.signal.is_null() && !j.contains("data"))
      problems.push_back("mode 'recover' requires [signal] or 'data'");
  }
  if (cfg.mode == "triple" && cfg.triple_spec.empty())
    problems.push_back("mode 'triple' requires 'triple'");
  if (cfg.out_report.empty()) problems.push_back("[output] requires 'report'");

  if (!problems.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw InvalidInput(msg);
  }
  return cfg;
}

nlohmann::json RunManifest::to_json() const {
  return {{"tool", "nlframe"},
          {"version", version},
          {"config_hash", config_hash_hex},
          {"seed", seed},
          {"timings_ms", wall_ms},
          {"artifacts", artifacts}};
}

}  // namespace nlframe
