#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fpp/edge_field.hpp"
#include "fpp/path.hpp"
#include "fpp/renormalization.hpp"

namespace fpp {

/// Smallest K with 2M + 1 + r + delta/(24d) < K delta / 2, computed in exact
/// rational arithmetic. Throws InvalidDelta if delta <= 0.
std::int64_t min_K(double M, double r, double delta, int d);

enum class ShortcutCase { kA, kB, kC };  // w inside pi_[u,v], before u, after v

char case_letter(ShortcutCase c);

struct ShortcutProposal {
  StretchRecord stretch;
  int K = 1;
  Vertex z;
  Vertex z_prime;
  Vertex w;
  std::size_t z_index = 0;  // positions on the parent path
  std::size_t w_index = 0;
  PathRecord detour;        // z, z', ..., w
  PathRecord substituted;   // parent path between z and w, in path order
  ShortcutCase case_tag = ShortcutCase::kA;
  std::vector<EdgeId> detour_edges;     // detour order; the first is <z, z'>
  std::vector<EdgeId> perimeter_edges;  // sorted
  int crossing_axis = 0;
  int lane_axis = 1;
  bool mirrored = false;
};

/// Builds the detour for a stretch of `path` crossing a B-box at scale N = 4K.
/// Works in the plane of the crossing axis and the lowest other axis.
/// Throws ConstructionBlocked when the detour or its perimeter would leave
/// the B-box or the field's box.
ShortcutProposal build_shortcut(const EdgeField& field, const PathRecord& path,
                                const StretchRecord& stretch, int K);

/// M + t(detour) < t(substituted), summed exactly.
bool shortcut_is_successful(const EdgeField& field, const ShortcutProposal& proposal, double M);

/// First detour edge in (M, M+1], the other detour edges below r + delta/(24d),
/// every perimeter edge above M.
bool event_F_holds(const EdgeField& field, const ShortcutProposal& proposal, double M, double r,
                   double delta, int d);

/// The parent path with the substituted part replaced by the detour.
/// Throws InvariantViolated if the replaced part does not contain a piece of
/// the stretch with endpoints at l1 distance >= K.
PathRecord apply_shortcut(const PathRecord& path, const ShortcutProposal& proposal);

}  // namespace fpp
