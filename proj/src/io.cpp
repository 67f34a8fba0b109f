#include "slowmix/io.hpp"

#include <charconv>
#include <istream>
#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "slowmix/error.hpp"

namespace slowmix {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <typename T>
T parse_field(const std::string& text, std::size_t line, std::size_t column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("malformed number '" + text + "'", line, column);
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const ReactionNetwork& net, const Trajectory& traj) {
  out << "t,reaction";
  for (const Species& s : net.species()) out << ',' << s.name;
  out << '\n';
  for (const Event& e : traj.events) {
    out << format_double(e.time) << ',' << e.reaction;
    for (Count c : e.state.counts()) out << ',' << c;
    out << '\n';
  }
}

void write_boundary_csv(std::ostream& out, const ReactionNetwork& net, const BoundaryStats& stats) {
  out << "i,nu,mu";
  for (std::size_t k = 0; k + 1 < net.dimension(); ++k) out << ",z_" << net.species()[k].name;
  out << '\n';
  for (std::size_t i = 0; i < stats.nu.size(); ++i) {
    out << i << ',' << format_double(stats.nu[i]) << ',';
    if (i < stats.mu.size()) out << format_double(stats.mu[i]);
    for (Count c : stats.z[i]) out << ',' << c;
    out << '\n';
  }
}

void write_pmf_csv(std::ostream& out, const ReactionNetwork& net, const Pmf& pmf) {
  for (const Species& s : net.species()) out << "x_" << s.name << ',';
  out << "mass\n";
  for (std::size_t off = 0; off < pmf.mass.size(); ++off) {
    const State x = pmf.window.state_at(off);
    for (Count c : x.counts()) out << c << ',';
    out << format_double(pmf.mass[off]) << '\n';
  }
  out << "TAIL";
  for (std::size_t k = 1; k < pmf.window.dimension(); ++k) out << ',';
  out << ',' << format_double(pmf.tail_mass) << '\n';
}

Pmf read_pmf_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty pmf file", 1, 1);
  const std::vector<std::string> header = split(line);
  if (header.size() < 2 || header.back() != "mass") throw ParseError("expected header 'x_...,mass'", 1, 1);
  const std::size_t d = header.size() - 1;

  std::map<std::vector<Count>, double> rows;
  std::optional<double> tail;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (tail) throw ParseError("rows after the TAIL row", lineno, 1);
    const std::vector<std::string> fields = split(line);
    if (fields.size() != d + 1) throw ParseError("expected " + std::to_string(d + 1) + " fields", lineno, 1);
    if (fields[0] == "TAIL") {
      tail = parse_field<double>(fields[d], lineno, d + 1);
      continue;
    }
    std::vector<Count> x(d);
    for (std::size_t k = 0; k < d; ++k) x[k] = parse_field<Count>(fields[k], lineno, k + 1);
    if (!rows.emplace(std::move(x), parse_field<double>(fields[d], lineno, d + 1)).second) {
      throw ParseError("duplicate state", lineno, 1);
    }
  }
  if (!tail) throw ParseError("missing TAIL row", lineno, 1);
  if (rows.empty()) throw ParseError("no states", lineno, 1);

  std::vector<Count> lo = rows.begin()->first;
  std::vector<Count> hi = lo;
  for (const auto& [x, m] : rows) {
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], x[k]);
      hi[k] = std::max(hi[k], x[k]);
    }
  }
  Pmf pmf{Window(lo, hi)};
  if (rows.size() != pmf.window.volume()) throw ParseError("rows do not cover a rectangular window", lineno, 1);
  for (const auto& [x, m] : rows) pmf.mass[pmf.window.offset(x)] = m;
  pmf.tail_mass = *tail;
  return pmf;
}

void write_tv_curve_csv(std::ostream& out, const std::vector<std::pair<double, double>>& curve) {
  out << "t,tv\n";
  for (const auto& [t, tv] : curve) out << format_double(t) << ',' << format_double(tv) << '\n';
}

}  // namespace slowmix
