#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "relsim/date.hpp"
#include "relsim/events.hpp"
#include "relsim/sparse_matrix.hpp"

namespace relsim {

/// Weighted bipartite graph between clinicians (rows 0..M-1 of the adjacency
/// matrix) and patients (rows M..M+N-1). Edge weights are raw visit counts.
class BipartiteGraph {
 public:
  struct Edge {
    std::size_t clinician;
    std::size_t patient;
    std::uint64_t weight;

    friend bool operator==(const Edge&, const Edge&) = default;
  };

  BipartiteGraph() = default;

  /// Validates: indices in range, weights >= 1, no duplicate (clinician,
  /// patient) keys, unique ids. Edges are stored sorted by (clinician, patient).
  BipartiteGraph(std::string tag, std::vector<std::string> clinicians,
                 std::vector<std::string> patients, std::vector<Edge> edges);

  const std::string& tag() const { return tag_; }
  const std::vector<std::string>& clinicians() const { return clinicians_; }
  const std::vector<std::string>& patients() const { return patients_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::size_t num_clinicians() const { return clinicians_.size(); }
  std::size_t num_patients() const { return patients_.size(); }
  std::uint64_t total_weight() const;

  friend bool operator==(const BipartiteGraph&, const BipartiteGraph&) = default;

 private:
  std::string tag_;
  std::vector<std::string> clinicians_;
  std::vector<std::string> patients_;
  std::vector<Edge> edges_;
};

std::string_view role_tag(Role role);

/// Aggregates events with the given role, patient in `patient_universe` and
/// date in `window` into visit counts. Clinicians are the ones with at least
/// one matching event, sorted lexicographically; patients are the universe
/// verbatim, so patients without matching visits stay as isolated vertices.
///
/// Throws std::invalid_argument for an empty or duplicated universe, an
/// inverted window, or role NA.
BipartiteGraph build_bipartite_graph(std::span<const VisitEvent> events, Role role,
                                     std::span<const std::string> patient_universe,
                                     Interval window);

/// A = [[0, B], [B^T, 0]] with B[i, j] = w_ij, of dimension M+N.
SparseMatrix adjacency_matrix(const BipartiteGraph& g);

// Edge-list file: header `clinician_id,patient_id,weight`. The patient list
// is stored separately (see save_universe) so isolated patients survive.
inline constexpr std::string_view kGraphHeader = "clinician_id,patient_id,weight";
inline constexpr std::string_view kUniverseHeader = "patient_id";

void save_graph(const std::filesystem::path& path, const BipartiteGraph& g);
BipartiteGraph load_graph(const std::filesystem::path& path, std::string tag,
                          std::vector<std::string> patient_universe);

void save_universe(const std::filesystem::path& path, std::span<const std::string> patients);
std::vector<std::string> load_universe(const std::filesystem::path& path);

}  // namespace relsim
