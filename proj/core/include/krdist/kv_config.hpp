#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace krdist {

// One [section] of an INI-style key = value document. Every lookup marks the
// key as used; finish() rejects keys that were never looked up.
class KvSection {
 public:
  KvSection() = default;
  KvSection(std::string name, std::map<std::string, std::string> values);

  const std::string& name() const { return name_; }
  bool has(const std::string& key) const;

  std::string str(const std::string& key) const;
  std::string str_or(const std::string& key, const std::string& fallback) const;
  double num(const std::string& key) const;
  double num_or(const std::string& key, double fallback) const;
  std::optional<double> num_opt(const std::string& key) const;
  std::uint64_t uint(const std::string& key) const;
  std::uint64_t uint_or(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> list(const std::string& key) const;

  void finish() const;

 private:
  std::string name_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

class KvDocument {
 public:
  static KvDocument parse(std::istream& in);
  static KvDocument load(const std::string& path);

  bool has(const std::string& section) const;
  const KvSection& section(const std::string& name) const;

  // Rejects sections that were never requested and unused keys in the rest.
  void finish() const;

 private:
  std::map<std::string, KvSection> sections_;
  mutable std::set<std::string> used_;
};

// Splits on `sep`, trimming whitespace and dropping empty pieces.
std::vector<std::string> split_list(const std::string& text, char sep);
double parse_double(const std::string& text, const std::string& what);

}  // namespace krdist
