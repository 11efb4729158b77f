#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kpz/direction.hpp"
#include "kpz/field.hpp"
#include "kpz/lpp.hpp"
#include "kpz/polymer.hpp"
#include "kpz/rng.hpp"

namespace kpz {

// A down-right path y_i with steps in {e1, -e2}, cut into K contiguous blocks
// by edge indices c_1 > ... > c_{K-1}, one direction rho_k per block.  Edge i
// joins vertices[i] to vertices[i+1]; block 1 is the rightmost run of edges
// (largest indices), block K the leftmost.
struct DownRightPath {
  std::vector<LatticePoint> vertices;
  std::vector<int> cuts;            // c_1 > ... > c_{K-1}, inside (0, edges())
  std::vector<double> directions;   // rho_1 < ... < rho_K

  int edges() const { return static_cast<int>(vertices.size()) - 1; }
  int block_count() const { return static_cast<int>(directions.size()); }

  // Edge-index range [lo, hi) of block k (1-based).
  std::pair<int, int> block_range(int k) const {
    const int K = block_count();
    const int lo = k == K ? 0 : cuts[k - 1];
    const int hi = k == 1 ? edges() : cuts[k - 2];
    return {lo, hi};
  }
};

// Throws unless steps, cuts, directions and the upper-half-plane constraint
// all hold.
void validate(const DownRightPath& path);

// Builders (vertices only; call assign_directions to attach blocks).
DownRightPath staircase_path(int stairs);                 // (0,stairs) .. (stairs,0)
DownRightPath horizontal_path(int steps, int level = 0);  // (0,level) .. (steps,level)
DownRightPath vertical_path(int steps, int column = 0);   // (column,steps) .. (column,0)

// "staircase:n", "horizontal:n", "vertical:n", or "explicit:e1,e1,-e2,..."
// (steps listed along the path; the start vertex is placed so the path ends
// on the x-axis).
DownRightPath parse_down_right_path(const std::string& spec);

// Splits the path's edges into K near-equal contiguous blocks for the given
// strictly increasing directions.
void assign_directions(DownRightPath& path, const std::vector<double>& rhos);

// One signed increment along a unit edge [[at, at+e1]] or [[at, at+e2]],
// oriented so that the stored value is the increase of the passage value (or
// log partition function) along the coordinate direction.
struct BlockEntry {
  LatticePoint at;
  bool horizontal = true;
  double value = 0.0;
};

struct IncrementBlocks {
  enum class Provenance { coupled_construction, limit_estimate };

  Model model = Model::cgm;
  Provenance provenance = Provenance::coupled_construction;
  std::vector<double> directions;
  std::vector<std::vector<BlockEntry>> blocks;  // blocks[k-1] holds block k
  bool contaminated = false;
};

// The multi-boundary coupled construction: K independent boundary rows, one
// per direction, at levels -1..-K (law Exp(1-rho_k), or inverse-gamma of
// shape 1-rho_k for the polymer twin), one shared bulk field at levels >= 0;
// system k runs the boundary table based at (0, -k) through all rows above,
// and block k collects that system's increments along its edge range.
// window_margin < 0 picks the default truncation margin.
IncrementBlocks coupled_blocks(const DownRightPath& path, const rng::SeedSpec& seed,
                               int window_margin = -1);
IncrementBlocks coupled_blocks_polymer(const DownRightPath& path, const rng::SeedSpec& seed,
                                       int window_margin = -1);

// Busemann limit estimate: the difference of passage values (or log partition
// functions) from x and from y to the moving target v_N, for each N in the
// schedule.  For the CGM the difference is constant in N once the finite
// geodesics from x and y coalesce before v_N; coalesced[] flags that.
struct BusemannEstimate {
  Model model = Model::cgm;
  LatticePoint x, y;
  double rho = 0.5;
  std::vector<int> schedule;
  std::vector<double> values;
  std::vector<double> gaps;       // values[i] - values[i-1]
  std::vector<bool> coalesced;    // CGM only, one per schedule entry

  double value() const { return values.back(); }
};

BusemannEstimate busemann_limit_estimate(const WeightField& field, LatticePoint x,
                                         LatticePoint y, const DirectionParam& d,
                                         const std::vector<int>& schedule);

// Coalescence form of the Busemann value (CGM): the passage-value difference
// evaluated at the first common vertex of the finite geodesics to v_N.
// Unavailable when the geodesics only meet at v_N itself.
struct CoalescenceForm {
  bool available = false;
  double value = 0.0;
  CoalescenceResult geometry;
};

CoalescenceForm busemann_coalescence_form(const WeightField& field, LatticePoint x,
                                          LatticePoint y, const DirectionParam& d, int N);

}  // namespace kpz
