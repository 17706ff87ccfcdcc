#include "krdist/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace krdist {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

std::vector<double> parse_numbers(const std::string& line, std::size_t lineno) {
  std::istringstream ss(line);
  std::vector<double> v;
  std::string tok;
  while (ss >> tok) {
    std::size_t used = 0;
    double x;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw std::runtime_error("line " + std::to_string(lineno) + ": bad number '" + tok + "'");
    v.push_back(x);
  }
  return v;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

}  // namespace

PointSet read_point_set(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_content_line(in, line, lineno)) throw std::runtime_error("point file is empty");
  std::istringstream head(line);
  std::string word;
  head >> word;
  if (word == "DMAT") {
    long long n = -1;
    if (!(head >> n) || n < 0) throw std::runtime_error("DMAT header needs a size");
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(n * n));
    for (long long i = 0; i < n; ++i) {
      if (!next_content_line(in, line, lineno)) throw std::runtime_error("distance matrix is truncated");
      auto row = parse_numbers(line, lineno);
      if (row.size() != static_cast<std::size_t>(n))
        throw std::runtime_error("line " + std::to_string(lineno) + ": expected " + std::to_string(n) + " distances");
      d.insert(d.end(), row.begin(), row.end());
    }
    if (next_content_line(in, line, lineno)) throw std::runtime_error("trailing data after distance matrix");
    return PointSet::from_distance_matrix(static_cast<std::size_t>(n), std::move(d));
  }
  std::vector<double> coords = parse_numbers(line, lineno);
  const std::size_t dim = coords.size();
  while (next_content_line(in, line, lineno)) {
    auto row = parse_numbers(line, lineno);
    if (row.size() != dim) throw std::runtime_error("line " + std::to_string(lineno) + ": inconsistent dimension");
    coords.insert(coords.end(), row.begin(), row.end());
  }
  return PointSet::from_coordinates(dim, std::move(coords));
}

PointSet load_point_set(const std::string& path) {
  auto in = open_in(path);
  return read_point_set(in);
}

void write_point_set(std::ostream& out, const PointSet& space) {
  if (!space.has_coordinates()) {
    out << "DMAT " << space.size() << '\n';
    for (std::size_t i = 0; i < space.size(); ++i) {
      for (std::size_t j = 0; j < space.size(); ++j) out << (j ? " " : "") << fmt(space.distance(i, j));
      out << '\n';
    }
    return;
  }
  for (std::size_t i = 0; i < space.size(); ++i) {
    auto x = space.point(i);
    for (std::size_t k = 0; k < x.size(); ++k) out << (k ? " " : "") << fmt(x[k]);
    out << '\n';
  }
}

DiscreteMeasure read_measure(std::istream& in, std::shared_ptr<const PointSet> space) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_content_line(in, line, lineno)) throw std::runtime_error("measure file is empty");
  std::istringstream head(line);
  std::string word;
  long long n = -1;
  head >> word >> n;
  if (word != "MEASURE" || n < 0) throw std::runtime_error("measure file must start with 'MEASURE n_points'");
  if (static_cast<std::size_t>(n) != space->size())
    throw std::runtime_error("measure header size does not match the point set");
  std::vector<Atom> atoms;
  while (next_content_line(in, line, lineno)) {
    std::istringstream ss(line);
    long long idx;
    double w;
    std::string extra;
    if (!(ss >> idx >> w) || (ss >> extra) || idx < 0)
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected 'index weight'");
    atoms.push_back({static_cast<std::size_t>(idx), w});
  }
  return DiscreteMeasure(std::move(space), std::move(atoms));
}

DiscreteMeasure load_measure(const std::string& path, std::shared_ptr<const PointSet> space) {
  auto in = open_in(path);
  return read_measure(in, std::move(space));
}

void write_measure(std::ostream& out, const DiscreteMeasure& mu) {
  out << "MEASURE " << mu.space().size() << '\n';
  for (const Atom& a : mu.atoms()) out << a.index << ' ' << fmt(a.weight) << '\n';
}

void write_plan(std::ostream& out, const UnbalancedPlan& plan) {
  for (const auto& e : plan.entries) out << e.src << ' ' << e.dst << ' ' << fmt(e.mass) << '\n';
  out << "# value " << fmt(plan.value) << '\n';
  out << "# transported_mass " << fmt(plan.transported_mass) << '\n';
  out << "# destroyed_source " << fmt(plan.destroyed_source) << '\n';
  out << "# destroyed_target " << fmt(plan.destroyed_target) << '\n';
}

void write_pattern(std::ostream& out, const Pattern& p) {
  out << "STPP " << fmt(p.T) << ' ' << p.size() << '\n';
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto x = p.location(i);
    for (double v : x) out << fmt(v) << ' ';
    out << fmt(p.times[i]) << '\n';
  }
}

Pattern read_pattern(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_content_line(in, line, lineno)) throw std::runtime_error("pattern file is empty");
  std::istringstream head(line);
  std::string word;
  double T;
  long long n;
  if (!(head >> word >> T >> n) || word != "STPP" || n < 0)
    throw std::runtime_error("pattern file must start with 'STPP T n'");
  Pattern p;
  p.T = T;
  p.dim = 0;
  for (long long i = 0; i < n; ++i) {
    if (!next_content_line(in, line, lineno)) throw std::runtime_error("pattern file is truncated");
    auto row = parse_numbers(line, lineno);
    if (row.size() < 2) throw std::runtime_error("line " + std::to_string(lineno) + ": need coordinates and a time");
    if (i == 0) p.dim = row.size() - 1;
    if (row.size() != p.dim + 1) throw std::runtime_error("line " + std::to_string(lineno) + ": inconsistent dimension");
    if (i > 0 && row.back() < p.times.back())
      throw std::runtime_error("line " + std::to_string(lineno) + ": times must be sorted");
    p.coords.insert(p.coords.end(), row.begin(), row.end() - 1);
    p.times.push_back(row.back());
  }
  if (p.dim == 0) p.dim = 1;
  return p;
}

}  // namespace krdist
