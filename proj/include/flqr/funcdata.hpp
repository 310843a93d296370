#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <memory>
#include <vector>

namespace flqr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Ordered abscissae on [0,1] shared by every curve of a sample. Copies are
/// cheap; the points and trapezoid weights live behind a shared pointer.
class Grid {
 public:
  /// Throws GridInvalid unless points are strictly increasing from 0 to 1
  /// with at least four entries.
  explicit Grid(Vector points);

  static Grid uniform(Index size);

  Index size() const { return data_->points.size(); }
  const Vector& points() const { return data_->points; }
  /// Composite trapezoid weights: integrate(f) == weights().dot(f).
  const Vector& weights() const { return data_->weights; }
  double operator[](Index j) const { return data_->points[j]; }

  bool operator==(const Grid& other) const;

 private:
  struct Data {
    Vector points;
    Vector weights;
  };
  std::shared_ptr<const Data> data_;
};

/// A function sampled on a grid.
struct GridFunction {
  GridFunction(Grid grid, Vector values);

  Grid grid;
  Vector values;
};

/// n curves on a shared grid with their scalar responses.
class FunctionalSample {
 public:
  FunctionalSample(Grid grid, Matrix curves, Vector responses);

  const Grid& grid() const { return grid_; }
  /// Row i holds X_i on the grid.
  const Matrix& curves() const { return curves_; }
  const Vector& responses() const { return responses_; }
  Index size() const { return responses_.size(); }

  GridFunction curve(Index i) const { return {grid_, curves_.row(i).transpose()}; }

  /// Subsample keeping the listed rows in order.
  FunctionalSample subset(const std::vector<Index>& rows) const;

 private:
  Grid grid_;
  Matrix curves_;
  Vector responses_;
};

/// Composite trapezoid approximation of the integral over [0,1].
double integrate(const GridFunction& f);
double integrate(const Grid& grid, const Eigen::Ref<const Vector>& values);

/// L2 pairing of two functions on the same grid.
double inner_l2(const GridFunction& f, const GridFunction& g);

/// Throws GridMismatch when the two grids differ.
void require_same_grid(const Grid& a, const Grid& b);

/// Curves file: grid abscissae on the first row, one curve per following row.
/// Responses file: one value per line.
FunctionalSample load_sample(const std::filesystem::path& curves_path, const std::filesystem::path& responses_path);
void save_sample(const FunctionalSample& sample, const std::filesystem::path& curves_path,
                 const std::filesystem::path& responses_path);

/// Reads every curve of a curves file (responses not required).
std::vector<GridFunction> load_curves(const std::filesystem::path& path);
/// Reads a single curve in the curves-file layout (grid row + one value row).
GridFunction load_curve(const std::filesystem::path& path);

}  // namespace flqr
