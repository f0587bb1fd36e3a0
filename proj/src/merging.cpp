#include "uipdg/merging.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace uipdg {

std::array<SmallSet, 2> find_small(const std::vector<CutCellGeometry>& geoms, double delta,
                                   double h) {
    if (!(delta > 0.0 && delta < 0.5)) throw ConfigError("find_small: delta in (0,1/2)");
    std::array<SmallSet, 2> out;
    const double cell_area = h * h;
    for (int i = 0; i < 2; ++i) {
        out[i].subdomain = i;
        out[i].delta = delta;
        for (const auto& geom : geoms) {
            if (geom.tag != CellTag::Interface) continue;
            // cells with vanishing overlap are not part of the subdomain mesh
            if (!geom.in_subdomain(i, h)) continue;
            if (geom.area[i] < delta * cell_area) out[i].cells.push_back(geom.cell);
        }
    }
    return out;
}

namespace {

bool is_large(int cell, int i, const std::vector<CutCellGeometry>& geoms, double delta,
              double h) {
    const auto& geom = geoms[cell];
    if (geom.tag == CellTag::Interface) return geom.area[i] >= delta * h * h;
    return (geom.tag == CellTag::Interior1) == (i == 0);
}

}  // namespace

namespace {

// merge partner candidates in rule order: edges ranked by the length of their
// segment inside Omega_i, exposure ties broken toward the smaller neighbor
// index. Type-1 cuts hug a single edge and admit only that direction; type-2
// corner cuts offer both cut edges. Only large neighbors are returned.
std::vector<int> merge_candidates(int cell, int subdomain,
                                  const std::vector<CutCellGeometry>& geoms, const Grid& g,
                                  double delta) {
    const auto& geom = geoms[cell];
    if (geom.tag != CellTag::Interface)
        throw ConfigError("merge partner requested for a non-interface cell");
    struct Cand {
        double exposure;
        int nbr;
    };
    std::vector<Cand> cands;
    for (int e = 0; e < 4; ++e)
        if (geom.exposure[e][subdomain] > 1e-10 * g.h)
            cands.push_back({geom.exposure[e][subdomain], g.neighbor(cell, e)});
    std::stable_sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
        if (std::abs(a.exposure - b.exposure) > 1e-12 * g.h) return a.exposure > b.exposure;
        return a.nbr < b.nbr;
    });
    if (cands.empty())
        throw NoLargeNeighbor(cell, "cell " + std::to_string(cell) +
                                        " exposes no edge segment in subdomain " +
                                        std::to_string(subdomain + 1));
    if (geom.type == CutType::Type1) cands.resize(1);
    std::vector<int> out;
    for (const auto& c : cands)
        if (c.nbr >= 0 && is_large(c.nbr, subdomain, geoms, delta, g.h)) out.push_back(c.nbr);
    if (out.empty())
        throw NoLargeNeighbor(cell, "no large merge partner for cell " + std::to_string(cell) +
                                        " in subdomain " + std::to_string(subdomain + 1));
    return out;
}

}  // namespace

int select_neighbor(int cell, int subdomain, const std::vector<CutCellGeometry>& geoms,
                    const Grid& g, double delta) {
    return merge_candidates(cell, subdomain, geoms, g, delta).front();
}

MergedMesh run_merge(const Grid& g, const std::vector<CutCellGeometry>& geoms,
                     const std::array<SmallSet, 2>& small_sets) {
    MergedMesh mm;
    mm.grid = g;
    mm.delta = small_sets[0].delta;
    for (int i = 0; i < 2; ++i) mm.macro_of[i].assign(g.num_cells(), -1);

    for (int i = 0; i < 2; ++i) {
        const double delta = small_sets[i].delta;
        const double h2 = g.h * g.h;
        auto domino_large = [&](int a, int b) {
            return geoms[a].area[i] + geoms[b].area[i] >= delta * 2.0 * h2;
        };

        // pass 1: assign every small element to the neighbor set of its
        // partner. The rule-preferred partner is taken unless the resulting
        // pair would itself stay small while another admissible partner
        // avoids that.
        std::map<int, std::vector<int>> assigned;  // K' -> small elements
        std::map<int, std::vector<int>> cands;
        for (int cell : small_sets[i].cells) {
            cands[cell] = merge_candidates(cell, i, geoms, g, delta);
            int partner = cands[cell].front();
            if (!domino_large(cell, partner))
                for (int alt : cands[cell])
                    if (domino_large(cell, alt)) {
                        partner = alt;
                        break;
                    }
            assigned[partner].push_back(cell);
        }

        // pass 1b: when two small elements claim one partner, the enclosing
        // rectangle can pick up cells with little Omega_i content; reroute one
        // claimant to an unclaimed partner if that keeps everything large
        for (int sweep = 0; sweep < 2; ++sweep) {
            for (auto& [partner, smalls] : assigned) {
                if (smalls.size() != 2) continue;
                int i0 = g.cell_i(partner), i1 = i0, j0 = g.cell_j(partner), j1 = j0;
                double measure = geoms[partner].area[i];
                for (int cell : smalls) {
                    i0 = std::min(i0, g.cell_i(cell));
                    i1 = std::max(i1, g.cell_i(cell));
                    j0 = std::min(j0, g.cell_j(cell));
                    j1 = std::max(j1, g.cell_j(cell));
                }
                for (int cj = j0; cj <= j1; ++cj)
                    for (int ci = i0; ci <= i1; ++ci) {
                        const int c = g.cell_id(ci, cj);
                        if (c != partner && std::find(smalls.begin(), smalls.end(), c) ==
                                                smalls.end())
                            measure += geoms[c].area[i];
                    }
                if (measure >= delta * (i1 - i0 + 1) * (j1 - j0 + 1) * h2) continue;
                for (int cell : std::vector<int>(smalls.begin(), smalls.end())) {
                    bool moved = false;
                    for (int alt : cands[cell]) {
                        if (alt == partner || assigned.count(alt)) continue;
                        if (!domino_large(cell, alt)) continue;
                        smalls.erase(std::find(smalls.begin(), smalls.end(), cell));
                        assigned[alt].push_back(cell);
                        moved = true;
                        break;
                    }
                    if (moved) break;
                }
            }
            std::erase_if(assigned, [](const auto& kv) { return kv.second.empty(); });
        }

        // pass 2: build macro elements
        for (const auto& [partner, smalls] : assigned) {
            if (smalls.size() > 2)
                throw CardinalityViolation("more than two small elements require cell " +
                                           std::to_string(partner));
            int i0 = g.cell_i(partner), i1 = i0, j0 = g.cell_j(partner), j1 = j0;
            for (int cell : smalls) {
                i0 = std::min(i0, g.cell_i(cell));
                i1 = std::max(i1, g.cell_i(cell));
                j0 = std::min(j0, g.cell_j(cell));
                j1 = std::max(j1, g.cell_j(cell));
            }
            MacroElement m;
            m.id = int(mm.macros[i].size());
            m.subdomain = i;
            m.i0 = i0;
            m.i1 = i1;
            m.j0 = j0;
            m.j1 = j1;
            m.bbox = {g.domain.x0 + i0 * g.h, g.domain.y0 + j0 * g.h,
                      g.domain.x0 + (i1 + 1) * g.h, g.domain.y0 + (j1 + 1) * g.h};
            for (int cj = j0; cj <= j1; ++cj)
                for (int ci = i0; ci <= i1; ++ci) {
                    const int cell = g.cell_id(ci, cj);
                    if (mm.macro_of[i][cell] >= 0)
                        throw OverlapDetected("cell " + std::to_string(cell) +
                                              " claimed by two macros in subdomain " +
                                              std::to_string(i + 1));
                    mm.macro_of[i][cell] = m.id;
                    m.cells.push_back(cell);
                    m.measure_in += geoms[cell].area[i];
                }
            std::sort(m.cells.begin(), m.cells.end());
            mm.macros[i].push_back(std::move(m));
        }
    }
    return mm;
}

MergeValidation validate_merge(const MergedMesh& merged, const std::vector<CutCellGeometry>& geoms,
                               double delta) {
    MergeValidation v;
    const Grid& g = merged.grid;
    const double h2 = g.h * g.h;
    for (int i = 0; i < 2; ++i) {
        std::vector<int> owner(g.num_cells(), -1);
        for (const auto& m : merged.macros[i]) {
            if (m.cell_count() > 4) {
                v.cardinality_ok = false;
                v.issues.push_back("macro " + std::to_string(m.id) + "/" + std::to_string(i + 1) +
                                   " has " + std::to_string(m.cell_count()) + " cells");
            }
            if (m.diameter() > 2.0 * std::sqrt(2.0) * g.h * (1.0 + 1e-12)) {
                v.diameters_ok = false;
                v.issues.push_back("macro " + std::to_string(m.id) + "/" + std::to_string(i + 1) +
                                   " diameter " + format_full(m.diameter()));
            }
            if (m.measure_in < delta * m.cell_count() * h2 * (1.0 - 1e-12)) {
                v.largeness_ok = false;
                v.issues.push_back("macro " + std::to_string(m.id) + "/" + std::to_string(i + 1) +
                                   " fraction " +
                                   format_full(m.measure_in / (m.cell_count() * h2)));
            }
            for (int cell : m.cells) {
                if (owner[cell] >= 0) {
                    v.disjoint = false;
                    v.issues.push_back("cell " + std::to_string(cell) + " in macros " +
                                       std::to_string(owner[cell]) + " and " +
                                       std::to_string(m.id));
                }
                owner[cell] = m.id;
            }
        }
        // coverage: macro_of agrees with the constituent lists
        for (int cell = 0; cell < g.num_cells(); ++cell) {
            if (merged.macro_of[i][cell] != owner[cell]) {
                v.coverage_ok = false;
                v.issues.push_back("macro map inconsistent at cell " + std::to_string(cell));
            }
        }
        // post-merge smallness never survives
        for (const auto& geom : geoms) {
            if (geom.tag != CellTag::Interface) continue;
            if (merged.macro_of[i][geom.cell] < 0 && geom.area[i] > 1e-12 * h2 &&
                geom.area[i] < delta * h2 * (1.0 - 1e-12)) {
                v.coverage_ok = false;
                v.issues.push_back("small cell " + std::to_string(geom.cell) +
                                   " left unmerged in subdomain " + std::to_string(i + 1));
            }
        }
    }
    return v;
}

std::string MergedMesh::canonical_encoding() const {
    std::ostringstream os;
    os << "n=" << grid.n << ";delta=" << format_full(delta) << "\n";
    for (int i = 0; i < 2; ++i) {
        os << "subdomain " << i + 1 << "\n";
        for (const auto& m : macros[i]) {
            os << m.id << ":";
            for (int cell : m.cells) os << " " << cell;
            os << " | rect " << m.i0 << "," << m.j0 << "," << m.i1 << "," << m.j1 << " | "
               << format_full(m.measure_in) << "\n";
        }
    }
    return os.str();
}

}  // namespace uipdg
