#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bimoplan/geometry.hpp"

namespace bimoplan {

enum class ElementKind { HandRight, HandLeft, Object };

const char* element_kind_name(ElementKind kind);
std::optional<ElementKind> element_kind_from_name(const std::string& name);

struct ElementId {
  std::string name;
  ElementKind kind = ElementKind::Object;
};

struct PoseSample {
  double t = 0.0;
  RigidTransform pose;
};

/// A recorded demonstration: one time-stamped pose stream per scene element.
/// After normalize() all streams share one uniform timestamp grid and the
/// trace is immutable by convention (safe to share across readers).
struct Trace {
  std::vector<ElementId> elements;
  std::map<std::string, std::vector<PoseSample>> streams;
  double rate_hz = 0.0;  // > 0 once normalized

  const ElementId* find(const std::string& name) const;
  std::optional<std::string> hand(ElementKind kind) const;
  std::vector<std::string> object_names() const;
  bool normalized() const { return rate_hz > 0.0; }

  /// Shared timestamp grid; valid only after normalization.
  const std::vector<double>& grid() const;
  std::size_t frame_count() const { return grid().size(); }

  const RigidTransform& pose_at(const std::string& name, std::size_t frame) const;
  Eigen::Vector3d position_at(const std::string& name, std::size_t frame) const;

 private:
  mutable std::vector<double> grid_cache_;
};

enum class TraceFormat { Csv, Jsonl };

/// Reads a recording. CSV columns: t,name,kind,px,py,pz,qw,qx,qy,qz (header
/// mandatory). JSONL: one object per line, identical field names. Streams are
/// sorted by time; duplicate timestamps collapse to the last record.
Trace ingest(const std::string& path, TraceFormat format);
Trace ingest_stream(std::istream& in, TraceFormat format, const std::string& origin);

/// Resamples every stream to a uniform grid at rate_hz spanning the
/// intersection of the stream time ranges. Positions interpolate linearly,
/// orientations along the shortest arc. Raw gaps longer than max_gap_s are an
/// ingestion error.
Trace normalize(const Trace& trace, double rate_hz, double max_gap_s = 0.5);

void write_csv(const Trace& trace, std::ostream& out);

}  // namespace bimoplan
