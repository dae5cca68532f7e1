#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tap/graph.hpp"

namespace tap {

struct LoadedGraph {
    DirectedGraph graph;
    // Dense id -> original file id, ascending.
    std::vector<std::uint64_t> original_ids;
};

// SNAP-style whitespace-separated edge list with '#' comment lines.
// Node ids are remapped to dense [0, n), duplicate edges collapsed,
// self-loops dropped. `symmetrize` adds the reverse of every edge (for
// datasets shipped undirected, e.g. Facebook).
LoadedGraph load_snap_edgelist(const std::filesystem::path &path, bool symmetrize = false);

// Binary cache: magic "TAPG", version u32, n u64, m u64, then m (u32, u32)
// little-endian pairs sorted by source.
void save_graph_cache(const DirectedGraph &g, const std::filesystem::path &path);
DirectedGraph load_graph_cache(const std::filesystem::path &path);

// Content hash over (n, sorted edge list); pairs oracles with the graph
// they were built from.
std::uint64_t graph_content_hash(const DirectedGraph &g);

// Power-law exponent of the out-degree distribution, fitted by log-log
// regression of the CCDF over the upper decade of observed degrees.
// Returns the pdf exponent (so ~-3 for preferential attachment).
double estimate_power_law_exponent(const DirectedGraph &g);

} // namespace tap
