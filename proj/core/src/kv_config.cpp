#include "krdist/kv_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <stdexcept>

namespace krdist {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  const std::string t = trim(text);
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (t.empty() || used != t.size()) throw std::invalid_argument(what + ": not a number: '" + text + "'");
  return v;
}

KvSection::KvSection(std::string name, std::map<std::string, std::string> values)
    : name_(std::move(name)), values_(std::move(values)) {}

bool KvSection::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KvSection::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("[" + name_ + "] missing key '" + key + "'");
  used_.insert(key);
  return trim(it->second);
}

std::string KvSection::str_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? str(key) : fallback;
}

double KvSection::num(const std::string& key) const { return parse_double(str(key), "[" + name_ + "] " + key); }

double KvSection::num_or(const std::string& key, double fallback) const { return has(key) ? num(key) : fallback; }

std::optional<double> KvSection::num_opt(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return num(key);
}

std::uint64_t KvSection::uint(const std::string& key) const {
  const std::string s = str(key);
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || s[0] == '-')
    throw std::invalid_argument("[" + name_ + "] " + key + ": not a nonnegative integer: '" + s + "'");
  return v;
}

std::uint64_t KvSection::uint_or(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? uint(key) : fallback;
}

std::vector<double> KvSection::list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& piece : split_list(str(key), ',')) out.push_back(parse_double(piece, "[" + name_ + "] " + key));
  return out;
}

void KvSection::finish() const {
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) throw std::invalid_argument("[" + name_ + "] unknown key '" + k + "'");
}

KvDocument KvDocument::parse(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  KvDocument doc;
  std::map<std::string, std::string> top;
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      top[name] = node.data();
      continue;
    }
    std::map<std::string, std::string> values;
    for (const auto& [k, v] : node) values[k] = v.data();
    doc.sections_.emplace(name, KvSection(name, std::move(values)));
  }
  if (!top.empty()) doc.sections_.emplace("", KvSection("", std::move(top)));
  return doc;
}

KvDocument KvDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse(in);
}

bool KvDocument::has(const std::string& section) const { return sections_.count(section) > 0; }

const KvSection& KvDocument::section(const std::string& name) const {
  auto it = sections_.find(name);
  if (it == sections_.end()) throw std::invalid_argument("missing section [" + name + "]");
  used_.insert(name);
  return it->second;
}

void KvDocument::finish() const {
  for (const auto& [name, sec] : sections_) {
    if (!used_.count(name))
      throw std::invalid_argument(name.empty() ? "keys outside any section are not allowed"
                                               : "unknown section [" + name + "]");
    sec.finish();
  }
}

}  // namespace krdist
