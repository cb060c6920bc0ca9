#include "nsi/graph_io.hpp"

#include "nsi/error.hpp"
#include "nsi/text.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace nsi {

namespace {

double parse_double(std::string_view field, const std::string& name, std::size_t line) {
  double value = 0.0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) throw parse_error(name, line, "bad number '" + std::string(field) + "'");
  return value;
}

long long parse_index(std::string_view field, const std::string& name, std::size_t line) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || value < 0)
    throw parse_error(name, line, "bad index '" + std::string(field) + "'");
  return value;
}

}  // namespace

UserGraph read_edge_list(std::istream& in, const std::string& name) {
  UserGraph g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, '\t');
    if (fields.size() != 3 && fields.size() != 4)
      throw parse_error(name, lineno, "expected src<TAB>dst<TAB>tweet[<TAB>weight], got " +
                                          std::to_string(fields.size()) + " fields");
    Interaction e{std::string(fields[0]), std::string(fields[1]), std::string(fields[2]), 1.0};
    if (fields.size() == 4) e.weight = parse_double(fields[3], name, lineno);
    if (e.src.empty() || e.dst.empty() || e.tweet.empty()) throw parse_error(name, lineno, "empty field");
    try {
      g.add(std::move(e));
    } catch (const ValidationError& err) {
      throw ValidationError(name + ":" + std::to_string(lineno) + ": " + err.what());
    }
  }
  if (g.empty()) throw IoError(name + ": no interactions found");
  return g;
}

UserGraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_edge_list(in, path);
}

void write_edge_list(std::ostream& out, const UserGraph& g) {
  for (const auto& e : g.edges()) {
    out << e.src << '\t' << e.dst << '\t' << e.tweet;
    if (e.weight != 1.0) out << '\t' << format_double(e.weight);
    out << '\n';
  }
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_shortest(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_coordinate(std::ostream& out, const SparseMatrix& m) {
  // Row-major ordering so output is independent of storage order.
  Eigen::SparseMatrix<double, Eigen::RowMajor> r(m);
  r.prune(0.0);
  out << r.rows() << ' ' << r.cols() << ' ' << r.nonZeros() << '\n';
  for (Eigen::Index i = 0; i < r.outerSize(); ++i) {
    for (decltype(r)::InnerIterator it(r, i); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << format_double(it.value()) << '\n';
    }
  }
}

void write_coordinate(std::ostream& out, const Eigen::MatrixXd& m) {
  const auto nnz = (m.array() != 0.0).count();
  out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) out << i << ' ' << j << ' ' << format_double(m(i, j)) << '\n';
    }
  }
}

SparseMatrix read_coordinate(std::istream& in, const std::string& name) {
  std::string line;
  std::size_t lineno = 0;
  long long rows = -1, cols = -1, nnz = -1;
  std::vector<Eigen::Triplet<double>> triplets;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '%' || line.front() == '#') continue;
    const auto fields = split_whitespace(line);
    if (fields.size() != 3) throw parse_error(name, lineno, "expected three fields");
    if (rows < 0) {
      rows = parse_index(fields[0], name, lineno);
      cols = parse_index(fields[1], name, lineno);
      nnz = parse_index(fields[2], name, lineno);
      triplets.reserve(static_cast<std::size_t>(nnz));
      continue;
    }
    const auto i = parse_index(fields[0], name, lineno);
    const auto j = parse_index(fields[1], name, lineno);
    if (i >= rows || j >= cols) throw parse_error(name, lineno, "entry outside the declared shape");
    const double v = parse_double(fields[2], name, lineno);
    if (!std::isfinite(v)) throw parse_error(name, lineno, "non-finite value");
    triplets.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), v);
  }
  if (rows < 0) throw IoError(name + ": missing coordinate header");
  if (static_cast<long long>(triplets.size()) != nnz)
    throw IoError(name + ": header declares " + std::to_string(nnz) + " entries, found " +
                  std::to_string(triplets.size()));
  SparseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

std::string node_list_path(const std::string& matrix_path) { return matrix_path + ".nodes"; }

void write_node_list(const std::string& path, const std::vector<std::string>& nodes) {
  std::ostringstream out;
  for (const auto& n : nodes) out << n << '\n';
  write_text_file(path, out.str());
}

std::vector<std::string> read_node_list(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::string> nodes;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) nodes.push_back(line);
  }
  return nodes;
}

void write_tweet_graph(const std::string& path, const TweetGraph& h) {
  std::ostringstream out;
  write_coordinate(out, h.adjacency());
  write_text_file(path, out.str());
  write_node_list(node_list_path(path), h.nodes());
}

TweetGraph read_tweet_graph(const std::string& path) {
  std::istringstream in(read_text_file(path));
  SparseMatrix adjacency = read_coordinate(in, path);
  auto nodes = read_node_list(node_list_path(path));
  return TweetGraph(std::move(nodes), std::move(adjacency));
}

void write_labeled_matrix(const std::string& path, const std::vector<std::string>& nodes, const Eigen::MatrixXd& m) {
  std::ostringstream out;
  write_coordinate(out, m);
  write_text_file(path, out.str());
  write_node_list(node_list_path(path), nodes);
}

LabeledMatrix read_labeled_matrix(const std::string& path) {
  std::istringstream in(read_text_file(path));
  const SparseMatrix m = read_coordinate(in, path);
  LabeledMatrix out{read_node_list(node_list_path(path)), Eigen::MatrixXd(m)};
  if (out.matrix.rows() != out.matrix.cols() || static_cast<std::size_t>(out.matrix.rows()) != out.nodes.size())
    throw IoError(path + ": matrix shape does not match its node list");
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << contents;
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace nsi
