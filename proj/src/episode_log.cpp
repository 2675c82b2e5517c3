#include "radae/episode_log.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace radae {

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_episode_csv(const std::vector<EpisodeRecord>& records, std::ostream& out) {
  out << kEpisodeCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.episode << ',' << to_string(r.action) << ',' << (r.collided ? 1 : 0) << ','
        << format_real(r.p_chosen);
    for (std::size_t l = 0; l < 3; ++l) out << ',' << (l < r.widths.size() ? r.widths[l] : 0);
    out << ',' << (r.adapt_action ? to_string(*r.adapt_action) : std::string_view("none")) << ','
        << format_real(r.reward) << ',' << format_real(r.l_g) << ',' << format_real(r.l_c) << ','
        << format_real(r.train_time_s) << ',' << format_real(r.predict_time_s) << ','
        << format_real(r.pose_after.x) << ',' << format_real(r.pose_after.y) << ','
        << format_real(r.pose_after.heading) << '\n';
  }
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double real(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("episode csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::size_t whole(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("episode csv line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<EpisodeRecord> read_episode_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kEpisodeCsvHeader) {
    throw std::runtime_error("episode csv: missing or unexpected header");
  }
  std::vector<EpisodeRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 16) {
      throw std::runtime_error("episode csv line " + std::to_string(line_no) + ": expected 16 columns");
    }
    EpisodeRecord r;
    r.episode = whole(cells[0], line_no);
    const auto action = parse_action(cells[1]);
    if (!action) throw std::runtime_error("episode csv line " + std::to_string(line_no) + ": bad action");
    r.action = *action;
    r.collided = whole(cells[2], line_no) != 0;
    r.p_chosen = real(cells[3], line_no);
    for (std::size_t l = 0; l < 3; ++l) {
      const auto w = whole(cells[4 + l], line_no);
      if (w > 0) r.widths.push_back(w);
    }
    for (AdaptKind k : kAllAdaptKinds) {
      if (cells[7] == to_string(k)) r.adapt_action = k;
    }
    r.reward = real(cells[8], line_no);
    r.l_g = real(cells[9], line_no);
    r.l_c = real(cells[10], line_no);
    r.train_time_s = real(cells[11], line_no);
    r.predict_time_s = real(cells[12], line_no);
    r.pose_after = {real(cells[13], line_no), real(cells[14], line_no), real(cells[15], line_no)};
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<EpisodeRecord> read_episode_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_episode_csv(in);
}

}  // namespace radae
