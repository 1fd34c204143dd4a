#include "regimescope/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace regimescope::io {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void fail_line(const std::string& path, std::size_t lineno, const std::string& msg) {
  throw DataError(path + ":" + std::to_string(lineno) + ": " + msg);
}

double parse_double_field(const std::string& field, const std::string& path, std::size_t lineno) {
  if (field == "inf") return ph::kInfiniteDeath;
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    fail_line(path, lineno, "not a number: '" + field + "'");
  return value;
}

std::int64_t parse_int_field(const std::string& field, const std::string& path,
                             std::size_t lineno) {
  std::int64_t value = 0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc{} || res.ptr != end)
    fail_line(path, lineno, "not an integer: '" + field + "'");
  return value;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  return out;
}

constexpr const char* kSnapshotHeader = "time_index,particle_id,x,y,interacting";
constexpr const char* kFramesHeader = "frame_index,track_id,x,y";
constexpr const char* kDiagramHeader = "time_index,dim,birth,death";
constexpr const char* kContourHeader = "run_id,time_index,eps,value";

}  // namespace

sim::SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);

  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    if (!kv.emplace(key, value).second)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }

  auto take_double = [&](const std::string& key, double& slot) {
    const auto it = kv.find(key);
    if (it == kv.end()) return;
    double value = 0.0;
    const char* begin = it->second.data();
    const char* end = begin + it->second.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end)
      throw ConfigError("config key '" + key + "': not a number: '" + it->second + "'");
    slot = value;
    kv.erase(it);
  };
  auto take_count = [&](const std::string& key, auto& slot) {
    const auto it = kv.find(key);
    if (it == kv.end()) return;
    std::uint64_t value = 0;
    const char* begin = it->second.data();
    const char* end = begin + it->second.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end)
      throw ConfigError("config key '" + key + "': not a nonnegative integer: '" + it->second +
                        "'");
    slot = static_cast<std::remove_reference_t<decltype(slot)>>(value);
    kv.erase(it);
  };

  sim::SimConfig cfg;
  take_count("num_particles", cfg.num_particles);
  take_double("box_side", cfg.box_side);
  take_double("dt", cfg.dt);
  take_count("num_steps", cfg.num_steps);
  take_double("alpha", cfg.alpha);
  take_double("beta", cfg.beta);
  take_double("l_attract", cfg.l_attract);
  take_double("l_repel", cfg.l_repel);
  take_double("l_max", cfg.l_max);
  take_count("tumble_period", cfg.tumble_period);
  take_count("seed", cfg.seed);
  take_count("snapshot_stride", cfg.snapshot_stride);
  if (const auto it = kv.find("force_mode"); it != kv.end()) {
    if (it->second == "naive") {
      cfg.force_mode = sim::ForceMode::naive;
    } else if (it->second == "cell_list") {
      cfg.force_mode = sim::ForceMode::cell_list;
    } else {
      throw ConfigError("config key 'force_mode': expected naive or cell_list, got '" +
                        it->second + "'");
    }
    kv.erase(it);
  }
  if (!kv.empty()) throw ConfigError("unknown config key: '" + kv.begin()->first + "'");
  cfg.validate();
  return cfg;
}

void write_snapshots(const std::string& path, const std::vector<sim::Snapshot>& snapshots,
                     double box_side) {
  auto out = open_output(path);
  out << "# box_side=" << format_double(box_side) << "\n";
  out << kSnapshotHeader << "\n";
  for (const auto& snap : snapshots) {
    for (std::size_t i = 0; i < snap.positions.size(); ++i) {
      out << snap.time_index << ',' << i << ',' << format_double(snap.positions.points[i].x)
          << ',' << format_double(snap.positions.points[i].y) << ','
          << (snap.interacting[i] ? 1 : 0) << "\n";
    }
  }
}

SnapshotData read_snapshots(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  double box_side = 0.0;
  bool has_box = false;

  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  ++lineno;
  if (line.rfind("# box_side=", 0) == 0) {
    box_side = parse_double_field(trim(line.substr(11)), path, lineno);
    has_box = true;
    if (!std::getline(in, line)) throw DataError(path + ": missing header");
    ++lineno;
  }
  if (trim(line) != kSnapshotHeader)
    fail_line(path, lineno, std::string("expected header '") + kSnapshotHeader + "'");

  struct Row {
    std::int64_t particle;
    Vec2 pos;
    bool interacting;
  };
  std::map<std::int64_t, std::vector<Row>> by_time;
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 5) fail_line(path, lineno, "expected 5 columns");
    const std::int64_t t = parse_int_field(fields[0], path, lineno);
    const std::int64_t id = parse_int_field(fields[1], path, lineno);
    const double x = parse_double_field(fields[2], path, lineno);
    const double y = parse_double_field(fields[3], path, lineno);
    if (!std::isfinite(x) || !std::isfinite(y)) fail_line(path, lineno, "non-finite coordinate");
    const std::int64_t flag = parse_int_field(fields[4], path, lineno);
    if (flag != 0 && flag != 1) fail_line(path, lineno, "interacting must be 0 or 1");
    if (!seen.emplace(std::make_pair(t, id), lineno).second)
      fail_line(path, lineno, "duplicate (time_index, particle_id)");
    by_time[t].push_back({id, {x, y}, flag == 1});
  }
  if (by_time.empty()) throw DataError(path + ": no snapshots");

  SnapshotData data;
  for (auto& [t, rows] : by_time) {
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return a.particle < b.particle; });
    PointCloud cloud;
    std::vector<bool> interacting;
    for (const Row& r : rows) {
      cloud.points.push_back(r.pos);
      interacting.push_back(r.interacting);
    }
    if (has_box) cloud.domain = Domain{box_side, true};
    data.times.push_back(t);
    data.clouds.push_back(std::move(cloud));
    data.interacting.push_back(std::move(interacting));
  }
  return data;
}

FramesData load_frames(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  ++lineno;
  if (trim(line) != kFramesHeader)
    fail_line(path, lineno, std::string("expected header '") + kFramesHeader + "'");

  struct Row {
    std::int64_t track;
    Vec2 pos;
  };
  std::map<std::int64_t, std::vector<Row>> by_frame;
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) fail_line(path, lineno, "expected 4 columns");
    const std::int64_t frame = parse_int_field(fields[0], path, lineno);
    const std::int64_t track = parse_int_field(fields[1], path, lineno);
    const double x = parse_double_field(fields[2], path, lineno);
    const double y = parse_double_field(fields[3], path, lineno);
    if (!std::isfinite(x) || !std::isfinite(y)) fail_line(path, lineno, "non-finite coordinate");
    if (!seen.emplace(std::make_pair(frame, track), lineno).second)
      fail_line(path, lineno, "duplicate (frame_index, track_id)");
    by_frame[frame].push_back({track, {x, y}});
  }
  if (by_frame.empty()) throw DataError(path + ": no frames");

  FramesData data;
  for (auto& [frame, rows] : by_frame) {
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return a.track < b.track; });
    PointCloud cloud;
    for (const Row& r : rows) cloud.points.push_back(r.pos);
    if (cloud.size() < 2) data.flagged.push_back(frame);
    data.times.push_back(frame);
    data.clouds.push_back(std::move(cloud));
  }
  return data;
}

SnapshotData read_clouds(const std::string& path) {
  {
    auto in = open_input(path);
    std::string first;
    if (!std::getline(in, first)) throw DataError(path + ": empty file");
    first = trim(first);
    if (first == kFramesHeader) {
      FramesData frames = load_frames(path);
      SnapshotData data;
      data.clouds = std::move(frames.clouds);
      data.times = std::move(frames.times);
      data.interacting.resize(data.clouds.size());
      return data;
    }
  }
  return read_snapshots(path);
}

void write_diagrams(const std::string& path, const DiagramSeries& series) {
  if (series.times.size() != series.diagrams.size())
    throw DataError("diagram series times and diagrams differ in length");
  auto out = open_output(path);
  out << kDiagramHeader << "\n";
  for (std::size_t t = 0; t < series.times.size(); ++t) {
    for (const auto& p : series.diagrams[t].pairs) {
      out << series.times[t] << ',' << p.dim << ',' << format_double(p.birth) << ','
          << (p.infinite() ? std::string("inf") : format_double(p.death)) << "\n";
    }
  }
}

DiagramSeries read_diagrams(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  ++lineno;
  if (trim(line) != kDiagramHeader)
    fail_line(path, lineno, std::string("expected header '") + kDiagramHeader + "'");

  DiagramSeries series;
  std::map<std::int64_t, std::size_t> index_of;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) fail_line(path, lineno, "expected 4 columns");
    const std::int64_t t = parse_int_field(fields[0], path, lineno);
    const std::int64_t dim = parse_int_field(fields[1], path, lineno);
    if (dim != 0 && dim != 1) fail_line(path, lineno, "dim must be 0 or 1");
    const double birth = parse_double_field(fields[2], path, lineno);
    const double death = parse_double_field(fields[3], path, lineno);
    if (!std::isfinite(birth) || birth < 0.0) fail_line(path, lineno, "invalid birth");
    if (!(death > birth)) fail_line(path, lineno, "death must exceed birth");
    auto [it, inserted] = index_of.emplace(t, series.times.size());
    if (inserted) {
      series.times.push_back(t);
      series.diagrams.emplace_back();
    }
    series.diagrams[it->second].pairs.push_back({birth, death, static_cast<int>(dim)});
  }
  if (series.times.empty()) throw DataError(path + ": no persistence pairs");
  for (auto& d : series.diagrams) ph::sort_pairs(d.pairs);
  return series;
}

void write_contours(const std::string& path, const ContourSeries& series) {
  auto out = open_output(path);
  out << kContourHeader << "\n";
  for (std::size_t run = 0; run < series.values.size(); ++run) {
    if (series.values[run].size() != series.times.size())
      throw DataError("contour series run length does not match the time indices");
    for (std::size_t t = 0; t < series.times.size(); ++t) {
      const auto& curve = series.values[run][t];
      if (curve.size() != series.grid.num_samples)
        throw DataError("contour curve length does not match the grid");
      for (std::size_t k = 0; k < curve.size(); ++k) {
        out << run << ',' << series.times[t] << ',' << format_double(series.grid.value(k)) << ','
            << format_double(curve[k]) << "\n";
      }
    }
  }
}

ContourSeries read_contours(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  ++lineno;
  if (trim(line) != kContourHeader)
    fail_line(path, lineno, std::string("expected header '") + kContourHeader + "'");

  struct Row {
    std::int64_t run;
    std::int64_t time;
    double eps;
    double value;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 4) fail_line(path, lineno, "expected 4 columns");
    rows.push_back({parse_int_field(fields[0], path, lineno),
                    parse_int_field(fields[1], path, lineno),
                    parse_double_field(fields[2], path, lineno),
                    parse_double_field(fields[3], path, lineno)});
  }
  if (rows.empty()) throw DataError(path + ": no contour values");

  // Rows must be grouped run-major, then time, then ascending eps, the layout
  // write_contours produces.
  std::size_t g = 0;
  while (g < rows.size() && rows[g].run == rows[0].run && rows[g].time == rows[0].time) ++g;
  if (g < 2) throw DataError(path + ": grid needs at least 2 samples");
  ContourSeries series;
  series.grid = {rows[g - 1].eps, g};
  series.grid.validate();

  if (rows.size() % g != 0) throw DataError(path + ": truncated contour block");
  const std::size_t blocks = rows.size() / g;
  std::vector<std::int64_t> times;
  for (std::size_t b = 0; b < blocks; ++b) {
    const Row& head = rows[b * g];
    for (std::size_t k = 0; k < g; ++k) {
      const Row& r = rows[b * g + k];
      if (r.run != head.run || r.time != head.time)
        throw DataError(path + ": contour block mixes runs or time indices");
      if (r.eps != series.grid.value(k))
        throw DataError(path + ": eps values do not form the shared grid");
    }
    if (head.run == rows[0].run) {
      times.push_back(head.time);
    }
  }
  series.times = times;
  const std::size_t t_count = times.size();
  if (blocks % t_count != 0) throw DataError(path + ": runs have different time coverage");
  const std::size_t runs = blocks / t_count;
  series.values.assign(runs, std::vector<std::vector<double>>(t_count));
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t run = b / t_count;
    const std::size_t t = b % t_count;
    const Row& head = rows[b * g];
    if (head.run != rows[t_count * g * run].run || head.time != times[t])
      throw DataError(path + ": contour blocks out of order");
    std::vector<double> curve(g);
    for (std::size_t k = 0; k < g; ++k) curve[k] = rows[b * g + k].value;
    series.values[run][t] = std::move(curve);
  }
  return series;
}

void write_landscape(const std::string& path, const landscape::Landscape& ls) {
  auto out = open_output(path);
  out << "eps";
  for (std::size_t m = 1; m <= ls.envelopes.size(); ++m) out << ",lambda_" << m;
  out << "\n";
  for (std::size_t k = 0; k < ls.grid.num_samples; ++k) {
    out << format_double(ls.grid.value(k));
    for (const auto& env : ls.envelopes) out << ',' << format_double(env[k]);
    out << "\n";
  }
}

void write_test_curve(const std::string& path, const stats::TestCurve& curve) {
  auto out = open_output(path);
  out << "eps,stat,raw_p,adjusted_p\n";
  for (std::size_t k = 0; k < curve.grid.num_samples; ++k) {
    out << format_double(curve.grid.value(k)) << ',' << format_double(curve.statistic[k]) << ','
        << format_double(curve.raw_p[k]) << ',' << format_double(curve.adjusted_p[k]) << "\n";
  }
  out << "# global_stat=" << format_double(curve.global_stat) << "\n";
  out << "# global_p=" << format_double(curve.global_p) << "\n";
}

void write_transition(const std::string& path, const detect::TransitionReport& report) {
  auto out = open_output(path);
  out << "time,min_adjusted_p\n";
  for (std::size_t t = 0; t < report.times.size(); ++t) {
    out << report.times[t] << ',' << format_double(report.min_adjusted_p[t]) << "\n";
  }
  out << "# alpha_level=" << format_double(report.alpha_level) << "\n";
  out << "# window=" << report.sustained_window << "\n";
  if (report.transition_interval) {
    out << "# transition_start=" << report.transition_interval->first << "\n";
    out << "# transition_end=" << report.transition_interval->second << "\n";
  } else {
    out << "# transition=none\n";
  }
}

NormalizeResult normalize_density(const PointCloud& cloud, double target_density) {
  if (!(target_density > 0.0)) throw ConfigError("target density must be > 0");
  if (cloud.size() < 2) throw DataError("density normalization needs at least 2 points");

  Vec2 lo = cloud.points.front();
  Vec2 hi = lo;
  for (const Vec2 p : cloud.points) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  const double extent = std::max(hi.x - lo.x, hi.y - lo.y);
  if (!(extent > 0.0)) throw DataError("density normalization: all points coincide");

  NormalizeResult res;
  res.side = std::sqrt(static_cast<double>(cloud.size()) / target_density);
  res.scale = res.side / extent;
  res.offset = lo;
  res.cloud.points.reserve(cloud.size());
  for (const Vec2 p : cloud.points)
    res.cloud.points.push_back({(p.x - lo.x) * res.scale, (p.y - lo.y) * res.scale});
  res.cloud.domain = Domain{res.side, false};
  return res;
}

}  // namespace regimescope::io
