#include "flqr/funcdata.hpp"

#include <cmath>
#include <sstream>

#include "flqr/error.hpp"
#include "flqr/io.hpp"

namespace flqr {

Grid::Grid(Vector points) {
  const Index p = points.size();
  if (p < 4) fail(ErrorKind::GridInvalid, "grid needs at least 4 points, got " + std::to_string(p));
  if (!points.allFinite()) fail(ErrorKind::GridInvalid, "grid has non-finite points");
  if (points[0] != 0.0 || points[p - 1] != 1.0) fail(ErrorKind::GridInvalid, "grid must start at 0 and end at 1");
  for (Index j = 1; j < p; ++j) {
    if (!(points[j] > points[j - 1])) {
      fail(ErrorKind::GridInvalid, "grid not strictly increasing at index " + std::to_string(j));
    }
  }
  Vector weights = Vector::Zero(p);
  for (Index j = 0; j + 1 < p; ++j) {
    const double half = 0.5 * (points[j + 1] - points[j]);
    weights[j] += half;
    weights[j + 1] += half;
  }
  data_ = std::make_shared<const Data>(Data{std::move(points), std::move(weights)});
}

Grid Grid::uniform(Index size) {
  if (size < 4) fail(ErrorKind::GridInvalid, "grid needs at least 4 points");
  Vector pts(size);
  for (Index j = 0; j < size; ++j) pts[j] = static_cast<double>(j) / static_cast<double>(size - 1);
  pts[size - 1] = 1.0;
  return Grid(std::move(pts));
}

bool Grid::operator==(const Grid& other) const {
  return data_ == other.data_ || data_->points == other.data_->points;
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) {
    fail(ErrorKind::GridMismatch,
         "grids differ (" + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " points)");
  }
}

GridFunction::GridFunction(Grid g, Vector v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) fail(ErrorKind::DimensionMismatch, "function length does not match grid");
}

FunctionalSample::FunctionalSample(Grid grid, Matrix curves, Vector responses)
    : grid_(std::move(grid)), curves_(std::move(curves)), responses_(std::move(responses)) {
  if (curves_.cols() != grid_.size()) {
    fail(ErrorKind::DimensionMismatch, "curves have " + std::to_string(curves_.cols()) + " columns, grid has " +
                                           std::to_string(grid_.size()) + " points");
  }
  if (curves_.rows() != responses_.size()) {
    fail(ErrorKind::DimensionMismatch, std::to_string(curves_.rows()) + " curves but " +
                                           std::to_string(responses_.size()) + " responses");
  }
  if (responses_.size() < 2) fail(ErrorKind::InvalidInput, "sample needs at least 2 observations");
  if (!curves_.allFinite() || !responses_.allFinite()) fail(ErrorKind::InvalidInput, "sample has non-finite entries");
}

FunctionalSample FunctionalSample::subset(const std::vector<Index>& rows) const {
  Matrix c(static_cast<Index>(rows.size()), curves_.cols());
  Vector y(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    c.row(static_cast<Index>(k)) = curves_.row(rows[k]);
    y[static_cast<Index>(k)] = responses_[rows[k]];
  }
  return {grid_, std::move(c), std::move(y)};
}

double integrate(const Grid& grid, const Eigen::Ref<const Vector>& values) {
  if (values.size() != grid.size()) fail(ErrorKind::DimensionMismatch, "function length does not match grid");
  if (!values.allFinite()) fail(ErrorKind::InvalidInput, "cannot integrate non-finite values");
  return grid.weights().dot(values);
}

double integrate(const GridFunction& f) { return integrate(f.grid, f.values); }

double inner_l2(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f.grid, g.grid);
  return integrate(f.grid, f.values.cwiseProduct(g.values));
}

namespace {

std::vector<std::vector<double>> read_rows(const std::filesystem::path& path) {
  std::istringstream in(io::read_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    for (auto field : io::split_csv(line)) {
      double v = 0.0;
      if (!io::parse_double(field, v)) {
        fail(ErrorKind::ParseError, path.filename().string() + " line " + std::to_string(line_no) +
                                        ": missing or invalid value '" + std::string(field) + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Grid grid_from_row(const std::vector<double>& row) {
  return Grid(Eigen::Map<const Vector>(row.data(), static_cast<Index>(row.size())));
}

}  // namespace

FunctionalSample load_sample(const std::filesystem::path& curves_path, const std::filesystem::path& responses_path) {
  const auto rows = read_rows(curves_path);
  if (rows.size() < 2) fail(ErrorKind::ParseError, curves_path.filename().string() + ": needs grid row and curves");
  Grid grid = grid_from_row(rows[0]);
  const Index n = static_cast<Index>(rows.size() - 1);
  Matrix curves(n, grid.size());
  for (Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i + 1)];
    if (static_cast<Index>(row.size()) != grid.size()) {
      fail(ErrorKind::DimensionMismatch, "curve row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                                             " values, grid has " + std::to_string(grid.size()));
    }
    for (Index j = 0; j < grid.size(); ++j) curves(i, j) = row[static_cast<std::size_t>(j)];
  }

  const auto yrows = read_rows(responses_path);
  Vector y(static_cast<Index>(yrows.size()));
  for (std::size_t i = 0; i < yrows.size(); ++i) {
    if (yrows[i].size() != 1) {
      fail(ErrorKind::ParseError, responses_path.filename().string() + ": expected one value per line");
    }
    y[static_cast<Index>(i)] = yrows[i][0];
  }
  return {std::move(grid), std::move(curves), std::move(y)};
}

void save_sample(const FunctionalSample& sample, const std::filesystem::path& curves_path,
                 const std::filesystem::path& responses_path) {
  std::string out;
  auto append_row = [&out](const auto& values) {
    for (Index j = 0; j < values.size(); ++j) {
      if (j) out += ',';
      out += io::format_double(values[j]);
    }
    out += '\n';
  };
  append_row(sample.grid().points());
  for (Index i = 0; i < sample.size(); ++i) append_row(sample.curves().row(i));
  io::write_file_atomic(curves_path, out);

  std::string yout;
  for (Index i = 0; i < sample.size(); ++i) yout += io::format_double(sample.responses()[i]) + '\n';
  io::write_file_atomic(responses_path, yout);
}

std::vector<GridFunction> load_curves(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  if (rows.size() < 2) fail(ErrorKind::ParseError, path.filename().string() + ": expected grid row and curve rows");
  Grid grid = grid_from_row(rows[0]);
  std::vector<GridFunction> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (static_cast<Index>(rows[r].size()) != grid.size()) {
      fail(ErrorKind::DimensionMismatch, "curve " + std::to_string(r) + " length does not match grid");
    }
    out.emplace_back(grid, Eigen::Map<const Vector>(rows[r].data(), grid.size()));
  }
  return out;
}

GridFunction load_curve(const std::filesystem::path& path) {
  auto curves = load_curves(path);
  if (curves.size() != 1) fail(ErrorKind::ParseError, path.filename().string() + ": expected grid row and one curve");
  return std::move(curves.front());
}

}  // namespace flqr
