#include "bimoplan/trace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bimoplan/errors.hpp"

namespace bimoplan {
namespace {

using nlohmann::json;

struct RawRecord {
  double t;
  std::string name;
  ElementKind kind;
  RigidTransform pose;
};

void check_quaternion(double w, double x, double y, double z, const std::string& where) {
  const double norm = std::sqrt(w * w + x * x + y * y + z * z);
  if (std::abs(norm - 1.0) > 1e-6) {
    raise(ErrorCode::SchemaError,
          where + ": quaternion norm " + std::to_string(norm) + " is not unit");
  }
}

void check_finite(double v, const std::string& field, const std::string& where) {
  if (!std::isfinite(v)) raise(ErrorCode::SchemaError, where + ": non-finite " + field);
}

RawRecord parse_csv_row(const std::string& line, std::size_t line_no) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (cells.size() != 10) {
    raise(ErrorCode::ParseError,
          "line " + std::to_string(line_no) + ": expected 10 columns, got " +
              std::to_string(cells.size()));
  }
  const std::string where = "line " + std::to_string(line_no);
  RawRecord rec;
  std::array<double, 8> nums{};
  const std::array<int, 8> idx = {0, 3, 4, 5, 6, 7, 8, 9};
  for (std::size_t i = 0; i < nums.size(); ++i) {
    try {
      std::size_t used = 0;
      nums[i] = std::stod(cells[idx[i]], &used);
      if (used != cells[idx[i]].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      raise(ErrorCode::ParseError, where + ": bad number '" + cells[idx[i]] + "'");
    }
  }
  rec.t = nums[0];
  rec.name = cells[1];
  auto kind = element_kind_from_name(cells[2]);
  if (!kind) raise(ErrorCode::SchemaError, where + ": unknown kind '" + cells[2] + "'");
  rec.kind = *kind;
  check_finite(rec.t, "t", where);
  for (int i = 1; i < 4; ++i) check_finite(nums[i], "position", where);
  check_quaternion(nums[4], nums[5], nums[6], nums[7], where);
  rec.pose = make_transform(Eigen::Quaterniond(nums[4], nums[5], nums[6], nums[7]),
                            Eigen::Vector3d(nums[1], nums[2], nums[3]));
  return rec;
}

RawRecord parse_jsonl_row(const std::string& line, std::size_t line_no) {
  const std::string where = "line " + std::to_string(line_no);
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::exception& e) {
    raise(ErrorCode::ParseError, where + ": " + e.what());
  }
  for (const char* field : {"t", "name", "kind", "px", "py", "pz", "qw", "qx", "qy", "qz"}) {
    if (!obj.contains(field)) raise(ErrorCode::SchemaError, where + ": missing field '" + std::string(field) + "'");
  }
  RawRecord rec;
  rec.t = obj["t"].get<double>();
  rec.name = obj["name"].get<std::string>();
  auto kind = element_kind_from_name(obj["kind"].get<std::string>());
  if (!kind) raise(ErrorCode::SchemaError, where + ": unknown kind");
  rec.kind = *kind;
  const double px = obj["px"].get<double>(), py = obj["py"].get<double>(), pz = obj["pz"].get<double>();
  const double qw = obj["qw"].get<double>(), qx = obj["qx"].get<double>(), qy = obj["qy"].get<double>(), qz = obj["qz"].get<double>();
  check_finite(rec.t, "t", where);
  check_finite(px, "position", where);
  check_finite(py, "position", where);
  check_finite(pz, "position", where);
  check_quaternion(qw, qx, qy, qz, where);
  rec.pose = make_transform(Eigen::Quaterniond(qw, qx, qy, qz), Eigen::Vector3d(px, py, pz));
  return rec;
}

}  // namespace

const char* element_kind_name(ElementKind kind) {
  switch (kind) {
    case ElementKind::HandRight: return "hand_right";
    case ElementKind::HandLeft: return "hand_left";
    case ElementKind::Object: return "object";
  }
  return "object";
}

std::optional<ElementKind> element_kind_from_name(const std::string& name) {
  if (name == "hand_right") return ElementKind::HandRight;
  if (name == "hand_left") return ElementKind::HandLeft;
  if (name == "object") return ElementKind::Object;
  return std::nullopt;
}

const ElementId* Trace::find(const std::string& name) const {
  for (const auto& e : elements)
    if (e.name == name) return &e;
  return nullptr;
}

std::optional<std::string> Trace::hand(ElementKind kind) const {
  for (const auto& e : elements)
    if (e.kind == kind) return e.name;
  return std::nullopt;
}

std::vector<std::string> Trace::object_names() const {
  std::vector<std::string> out;
  for (const auto& e : elements)
    if (e.kind == ElementKind::Object) out.push_back(e.name);
  return out;
}

const std::vector<double>& Trace::grid() const {
  if (grid_cache_.empty() && !streams.empty()) {
    const auto& first = streams.begin()->second;
    grid_cache_.reserve(first.size());
    for (const auto& s : first) grid_cache_.push_back(s.t);
  }
  return grid_cache_;
}

const RigidTransform& Trace::pose_at(const std::string& name, std::size_t frame) const {
  auto it = streams.find(name);
  if (it == streams.end()) raise(ErrorCode::UnknownElement, name);
  return it->second.at(frame).pose;
}

Eigen::Vector3d Trace::position_at(const std::string& name, std::size_t frame) const {
  return pose_at(name, frame).translation;
}

Trace ingest_stream(std::istream& in, TraceFormat format, const std::string& origin) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::map<std::string, ElementKind> kinds;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (format == TraceFormat::Csv && !saw_header) {
      if (line.rfind("t,", 0) != 0) {
        raise(ErrorCode::ParseError, origin + ": missing CSV header");
      }
      saw_header = true;
      continue;
    }
    RawRecord rec = format == TraceFormat::Csv ? parse_csv_row(line, line_no)
                                               : parse_jsonl_row(line, line_no);
    auto it = kinds.find(rec.name);
    if (it == kinds.end()) {
      if (rec.kind != ElementKind::Object) {
        for (const auto& [name, kind] : kinds) {
          if (kind == rec.kind && name != rec.name) {
            raise(ErrorCode::DuplicateHand,
                  "elements '" + name + "' and '" + rec.name + "' both claim " +
                      element_kind_name(rec.kind));
          }
        }
      }
      kinds.emplace(rec.name, rec.kind);
      trace.elements.push_back({rec.name, rec.kind});
    } else if (it->second != rec.kind) {
      raise(ErrorCode::SchemaError, "element '" + rec.name + "' changes kind mid-file");
    }
    trace.streams[rec.name].push_back({rec.t, rec.pose});
  }
  if (format == TraceFormat::Csv && !saw_header) {
    raise(ErrorCode::ParseError, origin + ": empty file");
  }

  for (auto& [name, stream] : trace.streams) {
    std::stable_sort(stream.begin(), stream.end(),
                     [](const PoseSample& a, const PoseSample& b) { return a.t < b.t; });
    // Duplicate timestamps collapse to the last record.
    std::vector<PoseSample> dedup;
    dedup.reserve(stream.size());
    for (const auto& s : stream) {
      if (!dedup.empty() && dedup.back().t == s.t) {
        dedup.back() = s;
      } else {
        dedup.push_back(s);
      }
    }
    stream = std::move(dedup);
  }
  return trace;
}

Trace ingest(const std::string& path, TraceFormat format) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::IoError, "cannot open '" + path + "'");
  return ingest_stream(in, format, path);
}

Trace normalize(const Trace& trace, double rate_hz, double max_gap_s) {
  if (rate_hz <= 0.0) raise(ErrorCode::InvalidArgument, "rate_hz must be positive");
  if (trace.streams.empty()) raise(ErrorCode::EmptyOverlap, "trace has no streams");

  double start = -std::numeric_limits<double>::infinity();
  double stop = std::numeric_limits<double>::infinity();
  for (const auto& [name, stream] : trace.streams) {
    if (stream.size() < 2) {
      raise(ErrorCode::EmptyOverlap, "stream '" + name + "' has fewer than 2 samples");
    }
    start = std::max(start, stream.front().t);
    stop = std::min(stop, stream.back().t);
    for (std::size_t i = 1; i < stream.size(); ++i) {
      const double gap = stream[i].t - stream[i - 1].t;
      if (gap > max_gap_s) {
        raise(ErrorCode::GapTooLong, "stream '" + name + "' has a " +
                                         std::to_string(gap) + " s gap at t=" +
                                         std::to_string(stream[i - 1].t));
      }
    }
  }
  if (stop <= start) raise(ErrorCode::EmptyOverlap, "streams share no time interval");

  const double step = 1.0 / rate_hz;
  const std::size_t frames = static_cast<std::size_t>(std::floor((stop - start) / step)) + 1;

  Trace out;
  out.elements = trace.elements;
  out.rate_hz = rate_hz;
  for (const auto& [name, stream] : trace.streams) {
    std::vector<PoseSample> resampled;
    resampled.reserve(frames);
    std::size_t hi = 1;
    for (std::size_t k = 0; k < frames; ++k) {
      const double t = start + static_cast<double>(k) * step;
      while (hi + 1 < stream.size() && stream[hi].t < t) ++hi;
      const PoseSample& a = stream[hi - 1];
      const PoseSample& b = stream[hi];
      double s = b.t == a.t ? 0.0 : (t - a.t) / (b.t - a.t);
      s = std::clamp(s, 0.0, 1.0);
      resampled.push_back({t, interpolate_pose(a.pose, b.pose, s)});
    }
    out.streams.emplace(name, std::move(resampled));
  }
  return out;
}

void write_csv(const Trace& trace, std::ostream& out) {
  out << "t,name,kind,px,py,pz,qw,qx,qy,qz\n";
  // Row order: frame-major over the normalized grid, element order as declared.
  if (trace.normalized()) {
    const auto& grid = trace.grid();
    char buf[64];
    for (std::size_t k = 0; k < grid.size(); ++k) {
      for (const auto& e : trace.elements) {
        const auto& sample = trace.streams.at(e.name)[k];
        std::snprintf(buf, sizeof(buf), "%.9f", sample.t);
        out << buf << ',' << e.name << ',' << element_kind_name(e.kind);
        const auto& p = sample.pose.translation;
        const auto& q = sample.pose.rotation;
        for (double v : {p.x(), p.y(), p.z(), q.w(), q.x(), q.y(), q.z()}) {
          std::snprintf(buf, sizeof(buf), "%.9f", v);
          out << ',' << buf;
        }
        out << '\n';
      }
    }
    return;
  }
  char buf[64];
  for (const auto& e : trace.elements) {
    for (const auto& sample : trace.streams.at(e.name)) {
      std::snprintf(buf, sizeof(buf), "%.9f", sample.t);
      out << buf << ',' << e.name << ',' << element_kind_name(e.kind);
      const auto& p = sample.pose.translation;
      const auto& q = sample.pose.rotation;
      for (double v : {p.x(), p.y(), p.z(), q.w(), q.x(), q.y(), q.z()}) {
        std::snprintf(buf, sizeof(buf), "%.9f", v);
        out << ',' << buf;
      }
      out << '\n';
    }
  }
}

}  // namespace bimoplan
