#include "netreg/dataio.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "netreg/format.hpp"

namespace netreg {

namespace {

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool is_comment_or_blank(const std::string& line) {
  const std::string t = trimmed(line);
  return t.empty() || t.front() == '#';
}

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, delim)) parts.push_back(trimmed(item));
  if (!s.empty() && s.back() == delim) parts.push_back("");
  return parts;
}

double parse_double(const std::string& token, const std::string& context) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &consumed);
  } catch (const std::exception&) {
    throw DataError(context + ": cannot parse number '" + token + "'");
  }
  if (consumed != token.size()) {
    throw DataError(context + ": trailing characters in number '" + token + "'");
  }
  return value;
}

std::string at_line(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + " line " + std::to_string(line_no);
}

}  // namespace

WeightedNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("load_network: cannot open '" + path.string() + "'");
  }

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> labels;
  std::map<std::string, Eigen::Index> index_of;
  bool header_seen = false;

  Eigen::MatrixXd weights;
  std::set<std::pair<Eigen::Index, Eigen::Index>> seen_edges;

  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    const std::string t = trimmed(line);

    if (!header_seen) {
      constexpr const char* kPrefix = "nodes:";
      if (t.rfind(kPrefix, 0) != 0) {
        throw DataError(at_line(path, line_no) +
                        ": expected 'nodes:' header before edges");
      }
      labels = split(t.substr(std::string(kPrefix).size()), ',');
      if (labels.empty() || (labels.size() == 1 && labels[0].empty())) {
        throw DataError(at_line(path, line_no) + ": empty node list");
      }
      for (const std::string& label : labels) {
        if (label.empty()) {
          throw DataError(at_line(path, line_no) + ": empty node label");
        }
        const Eigen::Index next = static_cast<Eigen::Index>(index_of.size());
        if (!index_of.emplace(label, next).second) {
          throw DataError(at_line(path, line_no) + ": duplicate node label '" +
                          label + "'");
        }
      }
      const Eigen::Index m = static_cast<Eigen::Index>(labels.size());
      weights = Eigen::MatrixXd::Zero(m, m);
      header_seen = true;
      continue;
    }

    std::istringstream is(t);
    std::string a, b, w_token, extra;
    if (!(is >> a >> b >> w_token)) {
      throw DataError(at_line(path, line_no) +
                      ": expected '<label> <label> <weight>'");
    }
    if (is >> extra) {
      throw DataError(at_line(path, line_no) + ": unexpected trailing token '" +
                      extra + "'");
    }
    const auto ia = index_of.find(a);
    if (ia == index_of.end()) {
      throw DataError(at_line(path, line_no) + ": unknown node label '" + a + "'");
    }
    const auto ib = index_of.find(b);
    if (ib == index_of.end()) {
      throw DataError(at_line(path, line_no) + ": unknown node label '" + b + "'");
    }
    if (ia->second == ib->second) {
      throw DataError(at_line(path, line_no) + ": self-loop on node '" + a + "'");
    }
    const double w = parse_double(w_token, at_line(path, line_no));
    if (!std::isfinite(w)) {
      throw DataError(at_line(path, line_no) + ": non-finite weight");
    }
    if (w < 0.0) {
      throw DataError(at_line(path, line_no) + ": negative weight " +
                      format_double(w));
    }
    const auto key = std::minmax(ia->second, ib->second);
    if (!seen_edges.insert(key).second) {
      throw DataError(at_line(path, line_no) + ": duplicate edge '" + a + " " +
                      b + "'");
    }
    weights(ia->second, ib->second) = w;
    weights(ib->second, ia->second) = w;
  }
  if (!header_seen) {
    throw DataError("load_network: '" + path.string() + "' has no 'nodes:' header");
  }
  return WeightedNetwork(labels, std::move(weights));
}

void write_network(const WeightedNetwork& net, const std::filesystem::path& path) {
  for (const std::string& label : net.node_labels()) {
    if (label.find_first_of(" \t,#") != std::string::npos) {
      throw DataError("write_network: label '" + label +
                      "' contains whitespace, ',' or '#'");
    }
  }
  std::ofstream out(path);
  if (!out) {
    throw DataError("write_network: cannot open '" + path.string() +
                    "' for writing");
  }
  out << "nodes: ";
  for (std::size_t i = 0; i < net.node_labels().size(); ++i) {
    if (i > 0) out << ",";
    out << net.node_labels()[i];
  }
  out << "\n";
  const Eigen::Index m = net.size();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      if (net.weights()(i, j) != 0.0) {
        out << net.node_labels()[static_cast<std::size_t>(i)] << " "
            << net.node_labels()[static_cast<std::size_t>(j)] << " "
            << format_double(net.weights()(i, j)) << "\n";
      }
    }
  }
  if (!out) {
    throw DataError("write_network: write to '" + path.string() + "' failed");
  }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("load_manifest: cannot open '" + path.string() + "'");
  }
  DatasetManifest manifest;
  manifest.base_dir = path.has_parent_path() ? path.parent_path()
                                             : std::filesystem::path(".");

  std::string line;
  std::size_t line_no = 0;
  bool normalization_seen = false;
  std::set<std::string> labels;
  Eigen::Index covariate_dim = -1;

  while (std::getline(in, line)) {
    ++line_no;
    if (is_comment_or_blank(line)) continue;
    const std::string t = trimmed(line);

    constexpr const char* kNorm = "normalization:";
    if (t.rfind(kNorm, 0) == 0) {
      if (normalization_seen) {
        throw DataError(at_line(path, line_no) +
                        ": repeated 'normalization:' directive");
      }
      if (!manifest.entries.empty()) {
        throw DataError(at_line(path, line_no) +
                        ": 'normalization:' must precede entries");
      }
      const std::string value = trimmed(t.substr(std::string(kNorm).size()));
      if (value == "trace") {
        manifest.normalization = Normalization::trace;
      } else if (value == "none") {
        manifest.normalization = Normalization::none;
      } else {
        throw DataError(at_line(path, line_no) + ": normalization must be "
                        "'trace' or 'none', got '" + value + "'");
      }
      normalization_seen = true;
      continue;
    }

    const std::vector<std::string> fields = split(t, ',');
    if (fields.size() < 3) {
      throw DataError(at_line(path, line_no) +
                      ": expected 'path,label,x1[,x2,...]'");
    }
    ManifestEntry entry;
    entry.network_path = fields[0];
    entry.label = fields[1];
    if (entry.network_path.empty()) {
      throw DataError(at_line(path, line_no) + ": empty network path");
    }
    if (entry.label.empty()) {
      throw DataError(at_line(path, line_no) + ": empty label");
    }
    if (!labels.insert(entry.label).second) {
      throw DataError(at_line(path, line_no) + ": duplicate label '" +
                      entry.label + "'");
    }
    const Eigen::Index dim = static_cast<Eigen::Index>(fields.size()) - 2;
    if (covariate_dim < 0) {
      covariate_dim = dim;
    } else if (dim != covariate_dim) {
      throw DataError(at_line(path, line_no) + ": covariate has " +
                      std::to_string(dim) + " components, expected " +
                      std::to_string(covariate_dim));
    }
    entry.covariate.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      entry.covariate(i) = parse_double(fields[static_cast<std::size_t>(i) + 2],
                                        at_line(path, line_no));
    }
    if (!entry.covariate.allFinite()) {
      throw DataError(at_line(path, line_no) + ": non-finite covariate");
    }
    manifest.entries.push_back(std::move(entry));
  }
  if (manifest.entries.empty()) {
    throw DataError("load_manifest: '" + path.string() + "' has no entries");
  }
  return manifest;
}

NetworkDataset load_dataset(const DatasetManifest& manifest) {
  std::vector<Eigen::VectorXd> covariates;
  std::vector<GraphLaplacian> responses;
  std::vector<std::string> labels;
  std::vector<std::string> reference_nodes;

  for (const ManifestEntry& entry : manifest.entries) {
    const std::filesystem::path net_path =
        std::filesystem::path(entry.network_path).is_absolute()
            ? std::filesystem::path(entry.network_path)
            : manifest.base_dir / entry.network_path;
    WeightedNetwork net = load_network(net_path);
    if (reference_nodes.empty()) {
      reference_nodes = net.node_labels();
    } else if (net.node_labels() != reference_nodes) {
      throw DataError("load_dataset: node labels in '" + net_path.string() +
                      "' do not match the first network in the manifest");
    }
    GraphLaplacian lap = laplacian_from_network(net);
    if (manifest.normalization == Normalization::trace) {
      try {
        lap = trace_normalize(lap);
      } catch (const DataError& err) {
        throw DataError("load_dataset: '" + net_path.string() + "': " +
                        err.what());
      }
    }
    covariates.push_back(entry.covariate);
    responses.push_back(std::move(lap));
    labels.push_back(entry.label);
  }

  // Order observations by covariate (lexicographic), stable on ties.
  std::vector<std::size_t> order(covariates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (Eigen::Index i = 0; i < covariates[a].size(); ++i) {
      if (covariates[a](i) < covariates[b](i)) return true;
      if (covariates[a](i) > covariates[b](i)) return false;
    }
    return false;
  });
  std::vector<Eigen::VectorXd> sorted_x;
  std::vector<GraphLaplacian> sorted_l;
  std::vector<std::string> sorted_labels;
  for (std::size_t idx : order) {
    sorted_x.push_back(std::move(covariates[idx]));
    sorted_l.push_back(std::move(responses[idx]));
    sorted_labels.push_back(std::move(labels[idx]));
  }
  return NetworkDataset(std::move(sorted_x), std::move(sorted_l),
                        std::move(sorted_labels));
}

NetworkDataset load_dataset(const std::filesystem::path& manifest_path) {
  return load_dataset(load_manifest(manifest_path));
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("file_digest: cannot open '" + path.string() + "'");
  }
  std::uint64_t hash = 1469598103934665603ULL;  // FNV-1a offset basis
  char buffer[8192];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 1099511628211ULL;  // FNV prime
    }
    if (got < static_cast<std::streamsize>(sizeof(buffer))) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(hex);
}

void write_series(const std::filesystem::path& path, const std::string& value_name,
                  const DistanceSeries& series) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("write_series: cannot open '" + path.string() +
                    "' for writing");
  }
  out << "label\t" << value_name << "\n";
  for (Eigen::Index i = 0; i < series.values.size(); ++i) {
    out << series.labels[static_cast<std::size_t>(i)] << "\t"
        << format_double(series.values(i)) << "\n";
  }
  if (!out) {
    throw DataError("write_series: write to '" + path.string() + "' failed");
  }
}

void write_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& mat) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("write_matrix: cannot open '" + path.string() +
                    "' for writing");
  }
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j) {
      if (j > 0) out << " ";
      out << format_double(mat(i, j));
    }
    out << "\n";
  }
  if (!out) {
    throw DataError("write_matrix: write to '" + path.string() + "' failed");
  }
}

void write_scores(const std::filesystem::path& path,
                  const std::vector<std::string>& labels,
                  const Eigen::MatrixXd& scores, const std::string& prefix) {
  if (static_cast<Eigen::Index>(labels.size()) != scores.rows()) {
    throw DataError("write_scores: " + std::to_string(labels.size()) +
                    " labels for " + std::to_string(scores.rows()) + " rows");
  }
  std::ofstream out(path);
  if (!out) {
    throw DataError("write_scores: cannot open '" + path.string() +
                    "' for writing");
  }
  out << "label";
  for (Eigen::Index j = 0; j < scores.cols(); ++j) {
    out << "\t" << prefix << (j + 1);
  }
  out << "\n";
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    out << labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      out << "\t" << format_double(scores(i, j));
    }
    out << "\n";
  }
  if (!out) {
    throw DataError("write_scores: write to '" + path.string() + "' failed");
  }
}

}  // namespace netreg
