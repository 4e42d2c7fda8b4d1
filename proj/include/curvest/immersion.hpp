#pragma once

// Induced metric, unit normal, second fundamental form and shape operator of
// a parametric hypersurface patch in a space form of either signature.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "curvest/charts.hpp"
#include "curvest/errors.hpp"
#include "curvest/spaceform.hpp"

namespace curvest {

enum class Orientation { inner, outer, future };

inline std::string_view to_string(Orientation o) {
  switch (o) {
    case Orientation::inner: return "inner";
    case Orientation::outer: return "outer";
    case Orientation::future: return "future";
  }
  return "?";
}

inline Orientation parse_orientation(std::string_view s) {
  if (s == "inner") return Orientation::inner;
  if (s == "outer") return Orientation::outer;
  if (s == "future") return Orientation::future;
  throw ConfigError("unknown orientation '" + std::string(s) + "'");
}

struct HypersurfacePatch {
  Chart chart;
  AmbientModel ambient;
  Orientation orientation = Orientation::inner;
  /// Point the inner normal points toward (required for inner/outer).
  std::optional<Vec> reference;
  JetMode jets = JetMode::analytic;

  HypersurfacePatch(Chart c, AmbientModel m, Orientation o, std::optional<Vec> ref = std::nullopt,
                    JetMode j = JetMode::analytic)
      : chart(std::move(c)), ambient(std::move(m)), orientation(o), reference(std::move(ref)), jets(j) {
    if ((orientation == Orientation::future) != ambient.lorentzian())
      throw ConfigError("orientation 'future' is required for, and only allowed with, Lorentzian ambients");
    if (orientation != Orientation::future && !reference)
      throw ConfigError("inner/outer orientation needs a reference point");
    if (chart.dim() + 1 != ambient.dimension())
      throw ConfigError("chart dimension " + std::to_string(chart.dim()) + " does not match ambient dimension " +
                        std::to_string(ambient.dimension()));
  }

  int n() const { return chart.dim(); }
  JetMode effective_jets() const { return chart.has_analytic_jets() ? jets : JetMode::finite_difference; }
};

struct PointFrame {
  Vec params;
  Vec position;
  Mat tangents;       // m x n, columns d_i f
  Mat metric;         // g_ij
  Vec normal;         // unit, oriented
  Mat second_form;    // h_ij = <d_i d_j f, N>
  Mat shape_operator; // g^{-1} h

  int n() const { return static_cast<int>(metric.rows()); }
};

namespace detail {

/// Vector orthogonal (Euclidean dot) to the m-1 columns of V via cofactors.
inline Vec generalized_cross(const Mat& V) {
  const auto m = V.rows();
  Vec w(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    Mat minor(m - 1, m - 1);
    for (Eigen::Index r = 0, rr = 0; r < m; ++r) {
      if (r == i) continue;
      minor.row(rr++) = V.row(r);
    }
    w(i) = ((i % 2 == 0) ? 1.0 : -1.0) * minor.determinant();
  }
  return w;
}

}  // namespace detail

/// Frame from an already computed jet.
inline PointFrame frame_from_jet(const HypersurfacePatch& patch, const Vec& p, const ChartJet& jet) {
  const AmbientModel& m = patch.ambient;
  const int n = patch.n();
  if (jet.position.size() != m.embedding_dimension())
    throw ConfigError("chart '" + patch.chart.name() + "' maps into dimension " + std::to_string(jet.position.size()) +
                      ", ambient embedding has " + std::to_string(m.embedding_dimension()));
  PointFrame f;
  f.params = p;
  f.position = jet.position;
  f.tangents = jet.first;
  const Eigen::DiagonalMatrix<double, Eigen::Dynamic> eta(m.form_signs());
  f.metric = f.tangents.transpose() * eta * f.tangents;
  f.metric = 0.5 * (f.metric + f.metric.transpose()).eval();

  const double det = f.metric.determinant();
  if (m.lorentzian()) {
    Eigen::SelfAdjointEigenSolver<Mat> es(f.metric, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) {
      if (std::abs(det) <= 1e-12) throw DegeneracyError("induced metric is degenerate");
      throw SignatureError("tangent plane is not spacelike");
    }
  }
  if (!(det > 1e-12)) throw DegeneracyError("induced metric is degenerate (det = " + std::to_string(det) + ")");

  Mat span(m.embedding_dimension(), m.embedded() ? n + 1 : n);
  span.leftCols(n) = f.tangents;
  if (m.embedded()) span.col(n) = f.position;
  Vec normal = m.raise(detail::generalized_cross(span));
  const double nsq = m.norm_sq(normal);
  if (m.lorentzian() ? !(nsq < 0.0) : !(nsq > 0.0)) throw SignatureError("normal has the wrong causal character");
  normal /= std::sqrt(std::abs(nsq));

  double sign = 1.0;
  switch (patch.orientation) {
    case Orientation::future:
      sign = m.future_directed(f.position, normal) ? 1.0 : -1.0;
      break;
    case Orientation::inner:
    case Orientation::outer: {
      const Vec radial = distance_gradient(m, *patch.reference, f.position);
      const double toward = m.inner(normal, radial) < 0.0 ? 1.0 : -1.0;
      sign = patch.orientation == Orientation::inner ? toward : -toward;
      break;
    }
  }
  f.normal = sign * normal;

  f.second_form.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f.second_form(i, j) = m.inner(jet.d2(i, j), f.normal);
  f.second_form = 0.5 * (f.second_form + f.second_form.transpose()).eval();
  f.shape_operator = f.metric.ldlt().solve(f.second_form);
  return f;
}

/// Metric, oriented unit normal, second fundamental form and shape operator at p.
inline PointFrame frame_at(const HypersurfacePatch& patch, const Vec& p) {
  if (!patch.chart.domain().contains(p)) throw DomainError("parameter point outside the chart domain");
  return frame_from_jet(patch, p, patch.chart.jet(p, patch.effective_jets()));
}

/// Lower Cholesky factor L of the metric (g = L L^T).
inline Mat metric_factor(const PointFrame& f) {
  Eigen::LLT<Mat> llt(f.metric);
  if (llt.info() != Eigen::Success) throw NumericalError("metric is not positive definite");
  return llt.matrixL();
}

/// Shape operator in a metric-orthonormal frame: L^{-1} h L^{-T}, symmetric.
inline Mat orthonormal_shape_operator(const PointFrame& f) {
  const Mat L = metric_factor(f);
  const auto tri = L.triangularView<Eigen::Lower>();
  Mat tmp = tri.solve(f.second_form);
  Mat a = tri.solve(tmp.transpose());
  return 0.5 * (a + a.transpose());
}

/// Bilinear form B_ij expressed in the same orthonormal frame.
inline Mat to_orthonormal(const PointFrame& f, const Mat& bilinear) {
  const Mat L = metric_factor(f);
  const auto tri = L.triangularView<Eigen::Lower>();
  Mat tmp = tri.solve(bilinear);
  Mat a = tri.solve(tmp.transpose());
  return 0.5 * (a + a.transpose());
}

/// Principal curvatures in ascending order from the symmetric problem h v = k g v.
inline Vec principal_curvatures(const PointFrame& f) {
  const Mat a = orthonormal_shape_operator(f);
  Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    Eigen::JacobiSVD<Mat> svd(f.metric);
    const double cond = svd.singularValues()(0) / svd.singularValues()(svd.singularValues().size() - 1);
    throw NumericalError("principal_curvatures: eigen-solver failed (metric condition " + std::to_string(cond) + ")");
  }
  return es.eigenvalues();
}

struct GridSkip {
  Vec params;
  std::string reason;
};

struct SampleSet {
  std::vector<PointFrame> frames;
  std::vector<GridSkip> skips;
};

/// Regular grid points over the chart domain, last axis fastest.
inline std::vector<Vec> grid_points(const ParameterBox& box, const std::vector<int>& resolution) {
  const int n = box.dim();
  if (static_cast<int>(resolution.size()) != n) throw ConfigError("resolution needs one entry per parameter axis");
  for (int r : resolution)
    if (r < 2) throw ConfigError("grid resolution must be >= 2 per axis");
  std::vector<Vec> out;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  while (true) {
    Vec p(n);
    for (int i = 0; i < n; ++i)
      p(i) = box.lo(i) + (box.hi(i) - box.lo(i)) * static_cast<double>(idx[i]) / (resolution[i] - 1);
    out.push_back(std::move(p));
    int axis = n - 1;
    while (axis >= 0 && ++idx[axis] == resolution[axis]) idx[axis--] = 0;
    if (axis < 0) break;
  }
  return out;
}

/// Frames on a regular grid; points failing the frame preconditions are
/// recorded as skips.
inline SampleSet sample_grid(const HypersurfacePatch& patch, const std::vector<int>& resolution) {
  SampleSet set;
  for (const Vec& p : grid_points(patch.chart.domain(), resolution)) {
    try {
      set.frames.push_back(frame_at(patch, p));
    } catch (const DegeneracyError& e) {
      set.skips.push_back({p, e.what()});
    } catch (const SignatureError& e) {
      set.skips.push_back({p, e.what()});
    } catch (const DomainError& e) {
      set.skips.push_back({p, e.what()});
    }
  }
  if (set.frames.empty()) throw EmptySampleError("sample_grid: every grid point is degenerate");
  return set;
}

inline SampleSet sample_grid(const HypersurfacePatch& patch, int resolution) {
  return sample_grid(patch, std::vector<int>(static_cast<std::size_t>(patch.n()), resolution));
}

/// Tabulated chart samples read from CSV.
///
/// Header names: p1..pn, x1..xm, and optionally d<i>_x<a> (first jets) and
/// d<i><j>_x<a> with i <= j (second jets), indices 1-based. Rows carrying full
/// jets become frames directly. Without jets the rows must form a rectilinear
/// grid in the parameters; jets are then taken by central differences on the
/// lattice and boundary rows are reported as skips.
struct TabulatedChart {
  int n = 0;
  int m = 0;
  std::vector<Vec> params;
  std::vector<Vec> positions;
  std::vector<std::optional<ChartJet>> jets;
};

inline TabulatedChart read_tabulated_chart(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("tabulated chart: empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell.erase(std::remove_if(cell.begin(), cell.end(), ::isspace), cell.end());
      header.push_back(cell);
    }
  }
  auto column = [&](const std::string& name) -> int {
    auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
  };
  TabulatedChart t;
  while (column("p" + std::to_string(t.n + 1)) >= 0) ++t.n;
  while (column("x" + std::to_string(t.m + 1)) >= 0) ++t.m;
  if (t.n == 0 || t.m == 0) throw ConfigError("tabulated chart: header needs p1.. and x1.. columns");
  const bool has_jets = column("d1_x1") >= 0;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        cells.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("tabulated chart: line " + std::to_string(row_no) + ": bad number '" + cell + "'");
      }
    }
    if (cells.size() != header.size())
      throw ConfigError("tabulated chart: line " + std::to_string(row_no) + " has " + std::to_string(cells.size()) +
                        " fields, header has " + std::to_string(header.size()));
    auto get = [&](const std::string& name) {
      const int c = column(name);
      if (c < 0) throw ConfigError("tabulated chart: missing column " + name);
      return cells[static_cast<std::size_t>(c)];
    };
    Vec p(t.n), x(t.m);
    for (int i = 0; i < t.n; ++i) p(i) = get("p" + std::to_string(i + 1));
    for (int a = 0; a < t.m; ++a) x(a) = get("x" + std::to_string(a + 1));
    std::optional<ChartJet> jet;
    if (has_jets) {
      ChartJet j;
      j.position = x;
      j.first.resize(t.m, t.n);
      j.second.assign(static_cast<std::size_t>(t.n * t.n), Vec(t.m));
      for (int i = 0; i < t.n; ++i)
        for (int a = 0; a < t.m; ++a) j.first(a, i) = get("d" + std::to_string(i + 1) + "_x" + std::to_string(a + 1));
      for (int i = 0; i < t.n; ++i)
        for (int k = i; k < t.n; ++k)
          for (int a = 0; a < t.m; ++a) {
            const double v = get("d" + std::to_string(i + 1) + std::to_string(k + 1) + "_x" + std::to_string(a + 1));
            j.second[i * t.n + k](a) = v;
            j.second[k * t.n + i](a) = v;
          }
      jet = std::move(j);
    }
    t.params.push_back(std::move(p));
    t.positions.push_back(std::move(x));
    t.jets.push_back(std::move(jet));
  }
  if (t.params.empty()) throw ConfigError("tabulated chart: no data rows");
  return t;
}

inline TabulatedChart read_tabulated_chart(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tabulated chart '" + path + "'");
  return read_tabulated_chart(in);
}

namespace detail {

/// Fills missing jets by central differences on a rectilinear parameter lattice.
inline void lattice_jets(TabulatedChart& t, std::vector<GridSkip>& skips, std::vector<bool>& usable) {
  const int n = t.n;
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(n));
  for (const Vec& p : t.params)
    for (int i = 0; i < n; ++i) axes[i].push_back(p(i));
  for (auto& a : axes) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }), a.end());
  }
  auto key = [&](const Vec& p) {
    std::vector<int> k(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      k[i] = static_cast<int>(std::lower_bound(axes[i].begin(), axes[i].end(), p(i) - 1e-12) - axes[i].begin());
    return k;
  };
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t r = 0; r < t.params.size(); ++r) index[key(t.params[r])] = r;
  std::size_t expected = 1;
  for (const auto& a : axes) expected *= a.size();
  if (index.size() != expected || expected != t.params.size())
    throw ConfigError("tabulated chart without jets must be a complete rectilinear grid");
  usable.assign(t.params.size(), false);
  for (std::size_t r = 0; r < t.params.size(); ++r) {
    const std::vector<int> k = key(t.params[r]);
    bool interior = true;
    for (int i = 0; i < n; ++i) interior &= k[i] > 0 && k[i] + 1 < static_cast<int>(axes[i].size());
    if (!interior) {
      skips.push_back({t.params[r], "lattice boundary: no central difference"});
      continue;
    }
    auto at = [&](int i, int si, int j, int sj) -> const Vec& {
      std::vector<int> q = k;
      q[i] += si;
      q[j] += sj;
      return t.positions[index.at(q)];
    };
    ChartJet jet;
    jet.position = t.positions[r];
    jet.first.resize(t.m, n);
    jet.second.assign(static_cast<std::size_t>(n * n), Vec());
    for (int i = 0; i < n; ++i) {
      const double hm = axes[i][k[i]] - axes[i][k[i] - 1], hp = axes[i][k[i] + 1] - axes[i][k[i]];
      if (std::abs(hm - hp) > 1e-9 * std::max(hm, hp))
        throw ConfigError("tabulated chart without jets needs uniform spacing per axis");
      const Vec& plus = at(i, 1, i, 0);
      const Vec& minus = at(i, -1, i, 0);
      jet.first.col(i) = (plus - minus) / (2.0 * hp);
      jet.second[i * n + i] = (plus - 2.0 * jet.position + minus) / (hp * hp);
      for (int j = i + 1; j < n; ++j) {
        const double hj = axes[j][k[j] + 1] - axes[j][k[j]];
        jet.second[i * n + j] = (at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1) + at(i, -1, j, -1)) / (4.0 * hp * hj);
        jet.second[j * n + i] = jet.second[i * n + j];
      }
    }
    t.jets[r] = std::move(jet);
    usable[r] = true;
  }
}

}  // namespace detail

/// Frames for tabulated data, oriented with the same conventions as
/// parametric patches.
inline SampleSet sample_tabulated(TabulatedChart table, const AmbientModel& ambient, Orientation orientation,
                                  std::optional<Vec> reference) {
  SampleSet set;
  std::vector<bool> usable(table.params.size(), true);
  const bool need_lattice =
      std::any_of(table.jets.begin(), table.jets.end(), [](const auto& j) { return !j.has_value(); });
  if (need_lattice) detail::lattice_jets(table, set.skips, usable);
  ParameterBox box{table.params.front(), table.params.front()};
  for (const Vec& p : table.params) {
    box.lo = box.lo.cwiseMin(p);
    box.hi = box.hi.cwiseMax(p);
  }
  // Placeholder chart: only its dimension and domain are used.
  HypersurfacePatch patch(Chart("tabulated", box, [m = table.m](const Vec&) { return Vec(Vec::Zero(m)); }), ambient,
                          orientation, std::move(reference), JetMode::finite_difference);
  for (std::size_t r = 0; r < table.params.size(); ++r) {
    if (!usable[r]) continue;
    try {
      set.frames.push_back(frame_from_jet(patch, table.params[r], *table.jets[r]));
    } catch (const DegeneracyError& e) {
      set.skips.push_back({table.params[r], e.what()});
    } catch (const SignatureError& e) {
      set.skips.push_back({table.params[r], e.what()});
    } catch (const DomainError& e) {
      set.skips.push_back({table.params[r], e.what()});
    }
  }
  if (set.frames.empty()) throw EmptySampleError("tabulated chart: no usable samples");
  return set;
}

}  // namespace curvest
