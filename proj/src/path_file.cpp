#include "slowmix/path_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "slowmix/error.hpp"

namespace slowmix {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

void render_section(std::string& out, const char* header, const std::vector<TransitionSequence>& seqs) {
  out += header;
  out += '\n';
  for (const TransitionSequence& s : seqs) {
    for (std::size_t k = 0; k < s.labels.size(); ++k) {
      if (k) out += ", ";
      out += std::to_string(s.labels[k]);
    }
    out += '\n';
  }
}

}  // namespace

PathSets parse_path_file(std::string_view text, const ReactionNetwork& net) {
  PathSets paths;
  std::vector<TransitionSequence>* section = nullptr;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line == "[cycles]") {
      section = &paths.cycles;
      continue;
    }
    if (line == "[excursions]") {
      section = &paths.excursions;
      continue;
    }
    if (line.front() == '[') throw ParseError("unknown section " + std::string(line), line_no, 1);
    if (!section) throw ParseError("path listed before any [cycles] or [excursions] header", line_no, 1);

    std::vector<std::size_t> labels;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      auto comma = line.find(',', pos);
      if (comma == std::string_view::npos) comma = line.size();
      const std::string_view token = trim(line.substr(pos, comma - pos));
      std::size_t label = 0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), label);
      if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
        throw ParseError("expected a reaction index", line_no, pos + 1);
      }
      labels.push_back(label);
      pos = comma + 1;
    }
    section->push_back(sequence_from_labels(net, std::move(labels)));
  }
  return paths;
}

PathSets load_path_file(const std::string& path, const ReactionNetwork& net) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open path file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_path_file(buf.str(), net);
}

std::string render_path_file(const PathSets& paths) {
  std::string out;
  render_section(out, "[cycles]", paths.cycles);
  render_section(out, "[excursions]", paths.excursions);
  return out;
}

}  // namespace slowmix
