#include "relsim/bipartite_graph.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "relsim/csv.hpp"
#include "relsim/error.hpp"

namespace relsim {

namespace {

void require_unique(const std::vector<std::string>& ids, const char* what) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(ids.size());
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw std::invalid_argument(std::string("duplicate ") + what + " id '" + id + "'");
    }
  }
}

}  // namespace

BipartiteGraph::BipartiteGraph(std::string tag, std::vector<std::string> clinicians,
                               std::vector<std::string> patients, std::vector<Edge> edges)
    : tag_(std::move(tag)),
      clinicians_(std::move(clinicians)),
      patients_(std::move(patients)),
      edges_(std::move(edges)) {
  require_unique(clinicians_, "clinician");
  require_unique(patients_, "patient");
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.clinician != b.clinician ? a.clinician < b.clinician : a.patient < b.patient;
  });
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.clinician >= clinicians_.size() || e.patient >= patients_.size()) {
      throw std::invalid_argument("BipartiteGraph: edge index out of range");
    }
    if (e.weight < 1) throw std::invalid_argument("BipartiteGraph: edge weight must be >= 1");
    if (i > 0 && edges_[i - 1].clinician == e.clinician && edges_[i - 1].patient == e.patient) {
      throw std::invalid_argument("BipartiteGraph: duplicate edge (" + clinicians_[e.clinician] +
                                  ", " + patients_[e.patient] + ")");
    }
  }
}

std::uint64_t BipartiteGraph::total_weight() const {
  std::uint64_t total = 0;
  for (const auto& e : edges_) total += e.weight;
  return total;
}

std::string_view role_tag(Role role) {
  switch (role) {
    case Role::Diag: return "diag";
    case Role::FollowUp: return "followup";
    case Role::NA: return "na";
  }
  return "?";
}

BipartiteGraph build_bipartite_graph(std::span<const VisitEvent> events, Role role,
                                     std::span<const std::string> patient_universe,
                                     Interval window) {
  if (patient_universe.empty()) {
    throw std::invalid_argument("build_bipartite_graph: patient universe is empty");
  }
  if (window.end < window.start) {
    throw std::invalid_argument("build_bipartite_graph: window start is after its end");
  }
  if (role == Role::NA) {
    throw std::invalid_argument("build_bipartite_graph: role must be DIAG or FOLLOWUP");
  }
  std::unordered_map<std::string_view, std::size_t> patient_index;
  patient_index.reserve(patient_universe.size());
  for (std::size_t j = 0; j < patient_universe.size(); ++j) {
    if (!patient_index.emplace(patient_universe[j], j).second) {
      throw std::invalid_argument("build_bipartite_graph: duplicate patient '" +
                                  patient_universe[j] + "' in universe");
    }
  }

  // Ordered map keeps clinicians lexicographic without a second pass.
  std::map<std::string_view, std::map<std::size_t, std::uint64_t>> counts;
  for (const auto& e : events) {
    if (e.role != role || !window.contains(e.date) || e.clinician_id.empty()) continue;
    const auto it = patient_index.find(e.patient_id);
    if (it == patient_index.end()) continue;
    ++counts[e.clinician_id][it->second];
  }

  std::vector<std::string> clinicians;
  std::vector<BipartiteGraph::Edge> edges;
  clinicians.reserve(counts.size());
  for (const auto& [clinician, row] : counts) {
    const std::size_t i = clinicians.size();
    clinicians.emplace_back(clinician);
    for (const auto& [j, w] : row) edges.push_back({i, j, w});
  }
  return BipartiteGraph(std::string(role_tag(role)), std::move(clinicians),
                        std::vector<std::string>(patient_universe.begin(), patient_universe.end()),
                        std::move(edges));
}

SparseMatrix adjacency_matrix(const BipartiteGraph& g) {
  const std::size_t m = g.num_clinicians();
  const std::size_t dim = m + g.num_patients();
  std::vector<SparseMatrix::Triplet> triplets;
  triplets.reserve(2 * g.edges().size());
  for (const auto& e : g.edges()) {
    const double w = static_cast<double>(e.weight);
    triplets.push_back({e.clinician, m + e.patient, w});
    triplets.push_back({m + e.patient, e.clinician, w});
  }
  return SparseMatrix::from_triplets(dim, std::move(triplets));
}

void save_graph(const std::filesystem::path& path, const BipartiteGraph& g) {
  auto out = csv::open_output(path);
  out << kGraphHeader << '\n';
  for (const auto& e : g.edges()) {
    out << g.clinicians()[e.clinician] << ',' << g.patients()[e.patient] << ',' << e.weight << '\n';
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

BipartiteGraph load_graph(const std::filesystem::path& path, std::string tag,
                          std::vector<std::string> patient_universe) {
  auto in = csv::open_input(path);
  const std::string source = path.string();
  csv::expect_header(in, kGraphHeader, source);
  std::unordered_map<std::string, std::size_t> patient_index;
  for (std::size_t j = 0; j < patient_universe.size(); ++j) patient_index.emplace(patient_universe[j], j);

  std::map<std::string, std::vector<std::pair<std::size_t, std::uint64_t>>> rows;
  csv::LineReader reader(in, 1);
  std::string line;
  while (reader.next(line)) {
    const std::string where = source + ": line " + std::to_string(reader.line_number());
    const auto f = csv::split(line);
    if (f.size() != 3) throw DataError(where + ": expected 3 columns");
    const auto it = patient_index.find(std::string(f[1]));
    if (it == patient_index.end()) {
      throw DataError(where + ": patient '" + std::string(f[1]) + "' not in universe");
    }
    const long long w = csv::parse_int(f[2], where);
    if (w < 1) throw DataError(where + ": weight must be >= 1");
    rows[std::string(f[0])].emplace_back(it->second, static_cast<std::uint64_t>(w));
  }
  std::vector<std::string> clinicians;
  std::vector<BipartiteGraph::Edge> edges;
  for (auto& [clinician, row] : rows) {
    const std::size_t i = clinicians.size();
    clinicians.push_back(clinician);
    for (const auto& [j, w] : row) edges.push_back({i, j, w});
  }
  try {
    return BipartiteGraph(std::move(tag), std::move(clinicians), std::move(patient_universe),
                          std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw DataError(source + ": " + e.what());
  }
}

void save_universe(const std::filesystem::path& path, std::span<const std::string> patients) {
  auto out = csv::open_output(path);
  out << kUniverseHeader << '\n';
  for (const auto& p : patients) out << p << '\n';
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

std::vector<std::string> load_universe(const std::filesystem::path& path) {
  auto in = csv::open_input(path);
  csv::expect_header(in, kUniverseHeader, path.string());
  csv::LineReader reader(in, 1);
  std::vector<std::string> out;
  std::string line;
  while (reader.next(line)) out.push_back(line);
  return out;
}

}  // namespace relsim
