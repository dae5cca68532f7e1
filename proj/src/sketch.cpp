#include "tap/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include "tap/parallel.hpp"

namespace tap {

ThresholdRank threshold_rank(const Sketch &x, std::uint32_t k) {
    if (k != 0 && x.entries.size() >= k)
        return {x.entries.back().rank, true};
    return {1.0, false};
}

SketchOracle::SketchOracle(NodeId n, std::uint32_t k, std::uint32_t ell, double offset,
                           std::uint64_t rank_seed, std::vector<Sketch> per_node)
    : n_(n), k_(k), ell_(ell), offset_(offset), rank_seed_(rank_seed),
      per_node_(std::move(per_node)) {
    if (per_node_.size() != n_)
        throw InputError("oracle: per-node sketch count does not match n");
}

const Sketch &SketchOracle::sketch(NodeId u) const {
    if (u >= n_)
        throw InputError("oracle: node id out of range");
    return per_node_[u];
}

namespace {

std::vector<SketchEntry> world_pairs(const SampledWorld &world, std::uint64_t rank_seed) {
    std::vector<SketchEntry> pairs;
    pairs.reserve(world.residual.alive_count());
    for (NodeId v = 0; v < world.residual.node_count(); ++v)
        if (world.residual.is_alive(v))
            pairs.push_back({pair_rank(rank_seed, v, world.world_index), v, world.world_index});
    return pairs;
}

// Reusable buffers for the per-world scans.
struct AbsorbScratch {
    std::vector<std::vector<SketchEntry>> instance; // per-node bottom-k within one world
    std::vector<NodeId> touched;
    BfsScratch bfs;
    std::vector<SketchEntry> merge_buf;
};

// Merge `local` (sorted, pairs disjoint from acc's other worlds) into the
// accumulated bottom-k for one node.
void merge_into(std::vector<SketchEntry> &acc, std::vector<SketchEntry> &local,
                std::uint32_t k, std::vector<SketchEntry> &buf) {
    if (acc.empty()) {
        acc.swap(local);
        if (acc.size() > k)
            acc.resize(k);
        return;
    }
    buf.clear();
    std::size_t ia = 0, ib = 0;
    while (buf.size() < k && (ia < acc.size() || ib < local.size())) {
        if (ib == local.size())
            buf.push_back(acc[ia++]);
        else if (ia == acc.size() || entry_less(local[ib], acc[ia]))
            buf.push_back(local[ib++]);
        else
            buf.push_back(acc[ia++]);
    }
    acc.assign(buf.begin(), buf.end());
}

// One world's contribution: the classic single-instance pruned scan. Pairs
// go in ascending rank order; a reverse BFS from each pair's node inserts
// the rank into every visited node with spare capacity and prunes where
// the instance sketch is already full. Pruning is sound within one world:
// a full sketch there holds k smaller ranks that every predecessor also
// reaches. (It would be unsound against the combined sketch, whose entries
// may come from worlds the predecessor cannot reach.) The per-world
// bottom-k sets then merge exactly into the accumulated sketches.
void absorb_world(std::vector<std::vector<SketchEntry>> &acc, std::uint32_t k,
                  const SampledWorld &world, std::uint64_t rank_seed, AbsorbScratch &s) {
    const DirectedGraph &h = world.residual;
    const NodeId n = h.node_count();
    if (s.instance.size() < n)
        s.instance.resize(n);

    std::vector<SketchEntry> pairs = world_pairs(world, rank_seed);
    std::sort(pairs.begin(), pairs.end(), entry_less);

    auto &stamp = s.bfs.stamp;
    if (stamp.size() < n)
        stamp.assign(n, 0);
    for (const SketchEntry &pair : pairs) {
        if (++s.bfs.epoch == 0) {
            std::fill(stamp.begin(), stamp.end(), 0);
            s.bfs.epoch = 1;
        }
        auto &queue = s.bfs.queue;
        queue.clear();
        queue.push_back(pair.node);
        stamp[pair.node] = s.bfs.epoch;
        while (!queue.empty()) {
            const NodeId u = queue.back();
            queue.pop_back();
            auto &sk = s.instance[u];
            if (sk.size() >= k)
                continue; // prune: k smaller ranks of this world already here
            if (sk.empty())
                s.touched.push_back(u);
            sk.push_back(pair); // ascending within the world, so append keeps order
            for (NodeId w : h.in_neighbors(u)) {
                if (stamp[w] != s.bfs.epoch) {
                    stamp[w] = s.bfs.epoch;
                    queue.push_back(w);
                }
            }
        }
    }

    for (NodeId u : s.touched) {
        merge_into(acc[u], s.instance[u], k, s.merge_buf);
        s.instance[u].clear();
    }
    s.touched.clear();
}

std::vector<std::vector<SketchEntry>>
build_partial(std::span<const SampledWorld> worlds, NodeId n, std::uint32_t k,
              std::uint64_t rank_seed) {
    std::vector<std::vector<SketchEntry>> sketches(n);
    AbsorbScratch scratch;
    for (const SampledWorld &w : worlds)
        absorb_world(sketches, k, w, rank_seed, scratch);
    return sketches;
}

SketchOracle assemble(NodeId n, std::uint32_t k, std::uint32_t ell, double offset,
                      std::uint64_t rank_seed,
                      std::vector<std::vector<std::vector<SketchEntry>>> partials) {
    std::vector<Sketch> per_node(n);
    for (NodeId u = 0; u < n; ++u) {
        Sketch acc{std::move(partials[0][u]), k};
        for (std::size_t w = 1; w < partials.size(); ++w)
            acc = merge_sketch(acc, Sketch{std::move(partials[w][u]), k});
        per_node[u] = std::move(acc);
    }
    return SketchOracle(n, k, ell, offset, rank_seed, std::move(per_node));
}

} // namespace

SketchOracle build_oracles(std::span<const SampledWorld> worlds, std::uint32_t k,
                           std::uint64_t rank_seed, unsigned workers) {
    if (worlds.empty())
        throw InputError("build_oracles: empty world list");
    if (k < 1)
        throw InputError("build_oracles: k must be >= 1");
    const NodeId n = worlds.front().residual.node_count();
    for (const SampledWorld &w : worlds)
        if (w.residual.node_count() != n)
            throw InputError("build_oracles: worlds disagree on node count");

    const unsigned w =
        static_cast<unsigned>(std::min<std::size_t>(workers == 0 ? 1 : workers, worlds.size()));
    std::vector<std::vector<std::vector<SketchEntry>>> partials(w);
    parallel_chunks(worlds.size(), w, [&](unsigned chunk, std::size_t begin, std::size_t end) {
        partials[chunk] = build_partial(worlds.subspan(begin, end - begin), n, k, rank_seed);
    });

    std::uint64_t ext_total = 0;
    for (const SampledWorld &world : worlds)
        ext_total += world.external_reach_size;
    const double offset = static_cast<double>(ext_total) / static_cast<double>(worlds.size());
    return assemble(n, k, static_cast<std::uint32_t>(worlds.size()), offset, rank_seed,
                    std::move(partials));
}

SketchOracle build_oracles_streaming(const DirectedGraph &g, const InfluenceSpec &spec,
                                     std::uint32_t ell, std::uint32_t k,
                                     std::uint64_t rank_seed, std::uint64_t world_seed,
                                     unsigned workers) {
    if (ell == 0)
        throw InputError("build_oracles_streaming: ell must be >= 1");
    if (k < 1)
        throw InputError("build_oracles_streaming: k must be >= 1");
    spec.validate(g);
    const NodeId n = g.node_count();

    const unsigned w = static_cast<unsigned>(std::min<std::uint64_t>(workers == 0 ? 1 : workers, ell));
    std::vector<std::vector<std::vector<SketchEntry>>> partials(w);
    std::vector<std::uint64_t> ext_totals(w, 0);
    parallel_chunks(ell, w, [&](unsigned chunk, std::size_t begin, std::size_t end) {
        auto &sketches = partials[chunk];
        sketches.assign(n, {});
        AbsorbScratch scratch;
        for (std::size_t i = begin; i < end; ++i) {
            const SampledWorld world =
                make_world(g, spec, static_cast<std::uint32_t>(i), world_seed);
            ext_totals[chunk] += world.external_reach_size;
            absorb_world(sketches, k, world, rank_seed, scratch);
        }
    });

    std::uint64_t ext_total = 0;
    for (std::uint64_t t : ext_totals)
        ext_total += t;
    const double offset = static_cast<double>(ext_total) / static_cast<double>(ell);
    return assemble(n, k, ell, offset, rank_seed, std::move(partials));
}

Sketch merge_sketch(const Sketch &a, const Sketch &b) {
    if (a.k != b.k)
        throw InputError("merge_sketch: mismatched k");
    Sketch out;
    out.k = a.k;
    out.entries.reserve(std::min<std::size_t>(a.k, a.entries.size() + b.entries.size()));
    std::size_t ia = 0, ib = 0;
    while (out.entries.size() < out.k && (ia < a.entries.size() || ib < b.entries.size())) {
        if (ib == b.entries.size()) {
            out.entries.push_back(a.entries[ia++]);
        } else if (ia == a.entries.size()) {
            out.entries.push_back(b.entries[ib++]);
        } else if (entry_less(a.entries[ia], b.entries[ib])) {
            out.entries.push_back(a.entries[ia++]);
        } else if (entry_less(b.entries[ib], a.entries[ia])) {
            out.entries.push_back(b.entries[ib++]);
        } else { // identical pair in both operands, count once
            out.entries.push_back(a.entries[ia++]);
            ++ib;
        }
    }
    return out;
}

double c1_estimate(const Sketch &x, const SketchOracle &oracle) {
    const double ell = static_cast<double>(oracle.ell());
    const ThresholdRank tr = threshold_rank(x, x.k);
    if (tr.saturated)
        return (static_cast<double>(x.k) - 1.0) / (ell * tr.gamma);
    return static_cast<double>(x.entries.size()) / ell;
}

double c2_estimate(const NodeSet &seeds, const SketchOracle &oracle) {
    std::unordered_map<std::uint64_t, double> best_gamma;
    for (NodeId u : seeds) {
        const Sketch &x = oracle.sketch(u);
        const ThresholdRank tr = threshold_rank(x, x.k);
        const std::size_t limit = tr.saturated ? x.entries.size() - 1 : x.entries.size();
        for (std::size_t j = 0; j < limit; ++j) {
            const SketchEntry &e = x.entries[j];
            const std::uint64_t key = (static_cast<std::uint64_t>(e.node) << 32) | e.world;
            auto [it, inserted] = best_gamma.emplace(key, tr.gamma);
            if (!inserted && tr.gamma > it->second)
                it->second = tr.gamma;
        }
    }
    double sum = 0.0;
    for (const auto &[key, gamma] : best_gamma)
        sum += 1.0 / gamma;
    return sum / static_cast<double>(oracle.ell());
}

double tau_exact(const NodeSet &seeds, std::span<const SampledWorld> worlds) {
    if (worlds.empty())
        return 0.0;
    BfsScratch scratch;
    std::uint64_t total = 0;
    for (const SampledWorld &w : worlds)
        total += reachable_count(w.residual, seeds.ids(), scratch);
    return static_cast<double>(total) / static_cast<double>(worlds.size());
}

namespace {

constexpr char kOracleMagic[4] = {'T', 'A', 'P', 'O'};
constexpr std::uint32_t kOracleVersion = 1;

template <typename T> void write_raw(std::ostream &out, const T &value) {
    out.write(reinterpret_cast<const char *>(&value), sizeof(T));
}

template <typename T> T read_raw(std::istream &in, const char *what) {
    T value;
    in.read(reinterpret_cast<char *>(&value), sizeof(T));
    if (!in)
        throw InputError(std::string("truncated oracle file while reading ") + what);
    return value;
}

} // namespace

void save_oracle(const SketchOracle &oracle, const std::filesystem::path &path) {
    if (oracle.k() > 0xFFFF)
        throw InputError("oracle file format caps k at 65535");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw InputError("cannot write oracle: " + path.string());
    out.write(kOracleMagic, 4);
    write_raw(out, kOracleVersion);
    write_raw(out, static_cast<std::uint64_t>(oracle.node_count()));
    write_raw(out, static_cast<std::uint64_t>(oracle.ell()));
    write_raw(out, oracle.k());
    write_raw(out, oracle.offset());
    write_raw(out, oracle.rank_seed());
    for (NodeId u = 0; u < oracle.node_count(); ++u) {
        const Sketch &x = oracle.sketch(u);
        write_raw(out, static_cast<std::uint16_t>(x.entries.size()));
        for (const SketchEntry &e : x.entries) {
            write_raw(out, e.rank);
            write_raw(out, e.node);
            write_raw(out, e.world);
        }
    }
    if (!out)
        throw InputError("write failed: " + path.string());
}

SketchOracle load_oracle(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open oracle: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kOracleMagic, 4) != 0)
        throw InputError("not a TAPO file: " + path.string());
    if (read_raw<std::uint32_t>(in, "version") != kOracleVersion)
        throw InputError("unsupported TAPO version: " + path.string());
    const auto n = read_raw<std::uint64_t>(in, "node count");
    const auto ell = read_raw<std::uint64_t>(in, "ell");
    const auto k = read_raw<std::uint32_t>(in, "k");
    const auto offset = read_raw<double>(in, "offset");
    const auto rank_seed = read_raw<std::uint64_t>(in, "rank seed");

    std::vector<Sketch> per_node(n);
    for (std::uint64_t u = 0; u < n; ++u) {
        const auto len = read_raw<std::uint16_t>(in, "sketch length");
        Sketch &x = per_node[u];
        x.k = k;
        x.entries.resize(len);
        for (std::uint16_t j = 0; j < len; ++j) {
            x.entries[j].rank = read_raw<double>(in, "rank");
            x.entries[j].node = read_raw<NodeId>(in, "node");
            x.entries[j].world = read_raw<std::uint32_t>(in, "world");
        }
    }
    return SketchOracle(static_cast<NodeId>(n), k, static_cast<std::uint32_t>(ell), offset,
                        rank_seed, std::move(per_node));
}

} // namespace tap
