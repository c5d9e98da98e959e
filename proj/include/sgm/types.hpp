#pragma once

#include <cstdint>
#include <limits>

namespace sgm {

using VertexId = uint32_t;
using EdgeId = uint32_t;
using Label = uint32_t;
using Timestamp = uint64_t;

inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();
inline constexpr EdgeId kNoEdge = std::numeric_limits<EdgeId>::max();
inline constexpr Label kWildcardLabel = std::numeric_limits<Label>::max();
inline constexpr Timestamp kNoTimestamp = std::numeric_limits<Timestamp>::max();

enum class Semantics { Iso, Homo, DualSim, TcIso };

enum class Direction { Out, In };

} // namespace sgm
