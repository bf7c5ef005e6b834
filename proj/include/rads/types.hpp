#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace rads {

/// Data-graph vertex id, globally unique across the whole graph.
using VertexId = std::uint64_t;

/// Worker / machine index.
using MachineId = std::uint32_t;

/// Query-pattern vertex index (dense, 0..|V_P|-1).
using QueryVertex = std::uint32_t;

/// Border-distance sentinel for partitions without border vertices.
inline constexpr std::uint32_t kInfDistance = std::numeric_limits<std::uint32_t>::max();

/// "No data vertex" sentinel for partial mappings.
inline constexpr std::uint64_t kNoVertex = std::numeric_limits<std::uint64_t>::max();

/// Bytes charged per embedding-trie node when estimating region-group memory:
/// one vertex id, one parent handle, one child counter.
inline constexpr std::size_t kTrieNodeBytes = 8 + 8 + 4;

/// Fallback bytes-per-candidate when SM-E produced no statistics.
inline constexpr std::size_t kDefaultCandidateBytes = 64;

enum class Errc {
  UnknownVertex,
  Disconnected,
  SelfLoop,
  DuplicateEdge,
  PatternTooLarge,
  NotAPlan,
  StaleId,
  MissingAdjacency,
  MissingVerdict,
  ZeroDegree,
  TransportFailure,
  OwnerUnknown,
  NotOwner,
  ParseError,
  LengthMismatch,
  BadPartId,
  IoError,
  Usage,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::UnknownVertex: return "UnknownVertex";
    case Errc::Disconnected: return "Disconnected";
    case Errc::SelfLoop: return "SelfLoop";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::PatternTooLarge: return "PatternTooLarge";
    case Errc::NotAPlan: return "NotAPlan";
    case Errc::StaleId: return "StaleId";
    case Errc::MissingAdjacency: return "MissingAdjacency";
    case Errc::MissingVerdict: return "MissingVerdict";
    case Errc::ZeroDegree: return "ZeroDegree";
    case Errc::TransportFailure: return "TransportFailure";
    case Errc::OwnerUnknown: return "OwnerUnknown";
    case Errc::NotOwner: return "NotOwner";
    case Errc::ParseError: return "ParseError";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::BadPartId: return "BadPartId";
    case Errc::IoError: return "IoError";
    case Errc::Usage: return "Usage";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

/// Unordered data-graph edge, stored with the smaller endpoint first.
struct EdgeKey {
  VertexId a;
  VertexId b;

  EdgeKey() : a(0), b(0) {}
  EdgeKey(VertexId x, VertexId y) : a(x < y ? x : y), b(x < y ? y : x) {}

  friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& e) const {
    std::uint64_t h = e.a * 0x9e3779b97f4a7c15ULL;
    h ^= e.b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

}  // namespace rads
