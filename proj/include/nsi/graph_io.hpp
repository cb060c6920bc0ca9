#pragma once

// Text formats for graphs and matrices.
//
//   edge list    src_user<TAB>dst_user<TAB>tweet_id[<TAB>weight], '#' comments
//   coordinate   "rows cols nnz" header, then "i j value" lines (0-based, %.17g)
//   node list    <matrix path>.nodes, one tweet id per line in index order

#include "nsi/graph_core.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace nsi {

UserGraph read_edge_list(std::istream& in, const std::string& name = "<stream>");
UserGraph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const UserGraph& g);

/// Format a double with %.17g.
std::string format_double(double value);
/// Shortest text that reads back to the same double.
std::string format_shortest(double value);

void write_coordinate(std::ostream& out, const SparseMatrix& m);
/// Dense matrices are written with their exact zeros omitted.
void write_coordinate(std::ostream& out, const Eigen::MatrixXd& m);
SparseMatrix read_coordinate(std::istream& in, const std::string& name = "<stream>");

std::string node_list_path(const std::string& matrix_path);
void write_node_list(const std::string& path, const std::vector<std::string>& nodes);
std::vector<std::string> read_node_list(const std::string& path);

/// Tweet graph file plus its node list sidecar.
void write_tweet_graph(const std::string& path, const TweetGraph& h);
TweetGraph read_tweet_graph(const std::string& path);

/// Dense square matrix (e.g. a Laplacian) with its node list sidecar.
struct LabeledMatrix {
  std::vector<std::string> nodes;
  Eigen::MatrixXd matrix;
};
void write_labeled_matrix(const std::string& path, const std::vector<std::string>& nodes, const Eigen::MatrixXd& m);
LabeledMatrix read_labeled_matrix(const std::string& path);

/// Whole-file helpers that raise IoError.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace nsi
