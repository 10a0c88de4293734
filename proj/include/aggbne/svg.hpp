#pragma once

#include <string>
#include <vector>

#include "aggbne/solver.hpp"

namespace aggbne {

// Standalone SVG with one polyline per probe and a `player<i>/type<k>` legend.
// Deterministic for a given trace. Throws std::invalid_argument on an empty
// trace and surfaces I/O failures as NumericError.
void emit_probe_svg(const std::vector<TraceRow>& rows,
                    const std::vector<Probe>& probes, const std::string& path);

// Consensus residual against t on a log10 vertical scale.
void emit_consensus_svg(const std::vector<TraceRow>& rows, const std::string& path);

}  // namespace aggbne
