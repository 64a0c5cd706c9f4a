#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "netreg/laplacian.hpp"
#include "netreg/regression.hpp"
#include "netreg/trend.hpp"

namespace netreg {

/// Edge-list network file:
///   # comment lines start with '#'
///   nodes: a,b,c          (header: comma-separated node labels)
///   a b 1.5               (one undirected edge per line)
/// Isolated nodes are representable because the node universe comes from the
/// header. Duplicate edges (in either orientation), unknown labels,
/// self-loops and negative weights are errors reported with line numbers.
WeightedNetwork load_network(const std::filesystem::path& path);

/// Writes the header plus one line per nonzero edge (i < j order), weights
/// formatted with 17 significant digits so load(write(net)) == net exactly.
void write_network(const WeightedNetwork& net, const std::filesystem::path& path);

enum class Normalization { none, trace };

struct ManifestEntry {
  std::string network_path;  // relative paths resolve against the manifest dir
  std::string label;
  Eigen::VectorXd covariate;
};

/// Dataset manifest:
///   # comment
///   normalization: trace          (optional directive; default none)
///   nets/m01.net,1,1              (path,label,x1[,x2,...])
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  Normalization normalization = Normalization::none;
  std::filesystem::path base_dir;
};

DatasetManifest load_manifest(const std::filesystem::path& path);

/// Loads every network, converts to (optionally trace-normalized) Laplacians
/// and orders observations by covariate. All networks must share the node
/// label list.
NetworkDataset load_dataset(const DatasetManifest& manifest);
NetworkDataset load_dataset(const std::filesystem::path& manifest_path);

/// FNV-1a 64-bit digest of a file's bytes, as 16 hex characters.
std::string file_digest(const std::filesystem::path& path);

/// Tab-separated two-column series file with a header row.
void write_series(const std::filesystem::path& path, const std::string& value_name,
                  const DistanceSeries& series);

/// Dense matrix as space-separated text rows.
void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& mat);

/// Tab-separated label + coordinate columns named <prefix>1..<prefix>k.
void write_scores(const std::filesystem::path& path,
                  const std::vector<std::string>& labels,
                  const Eigen::MatrixXd& scores, const std::string& prefix);

}  // namespace netreg
