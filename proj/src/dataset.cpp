#include "marginlab/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace marginlab {

void atomic_write_text(const std::string& path, const std::string& body) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open for writing: " + tmp);
    out << body;
    if (!out) throw io_error("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw io_error("rename failed: " + path + ": " + ec.message());
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

using nlohmann::json;

struct VecLess {
  bool operator()(const Vec& a, const Vec& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  }
};

void check_no_conflicts(const std::vector<LabeledPoint>& pts) {
  std::map<Vec, int, VecLess> seen;
  for (const auto& p : pts) {
    auto [it, inserted] = seen.emplace(p.x, p.label);
    if (!inserted && it->second != p.label)
      throw invalid_input("dataset: identical point carries both labels");
  }
}

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vec vec_from_json(const json& arr, int dim, const char* where) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != dim)
    throw io_error(std::string("json: bad coordinate array in ") + where);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) {
    if (!arr[i].is_number()) throw io_error(std::string("json: non-numeric coordinate in ") + where);
    v[i] = arr[i].get<double>();
  }
  return v;
}

int label_from_json(const json& j, const char* where) {
  if (!j.is_number_integer()) throw io_error(std::string("json: bad label in ") + where);
  const int label = j.get<int>();
  if (label != 1 && label != -1) throw io_error(std::string("json: label must be 1 or -1 in ") + where);
  return label;
}

}  // namespace

void LabeledDataset::validate() const {
  if (dim < 1) throw invalid_input("dataset: dim must be >= 1");
  for (const auto& p : points) {
    if (p.x.size() != dim) throw invalid_input("dataset: point dimension mismatch");
    if (p.label != 1 && p.label != -1) throw invalid_input("dataset: label must be +-1");
    for (Eigen::Index i = 0; i < p.x.size(); ++i)
      if (!std::isfinite(p.x[i])) throw invalid_input("dataset: non-finite coordinate");
  }
  check_no_conflicts(points);
}

std::vector<Vec> LabeledDataset::side(int label) const {
  std::vector<Vec> out;
  for (const auto& p : points)
    if (p.label == label) out.push_back(p.x);
  return out;
}

int LabeledDataset::count(int label) const {
  int n = 0;
  for (const auto& p : points)
    if (p.label == label) ++n;
  return n;
}

void AugmentedDataset::validate() const {
  base.validate();
  for (const auto& a : artificial) {
    if (a.x.size() != base.dim) throw invalid_input("augmented: point dimension mismatch");
    if (a.label != 1 && a.label != -1) throw invalid_input("augmented: label must be +-1");
    if (a.source < -1 || a.source >= static_cast<int>(base.points.size()))
      throw invalid_input("augmented: source index out of range");
    if (a.source >= 0) {
      if (base.points[a.source].label != a.label)
        throw invalid_input("augmented: label differs from source label");
      if (radius > 0.0) {
        const double dist = (a.x - base.points[a.source].x).norm();
        if (std::abs(dist - radius) > 1e-9 * std::max(1.0, radius))
          throw invalid_input("augmented: artificial point off the stated radius");
      }
    }
  }
}

std::vector<Vec> AugmentedDataset::side(int label) const {
  std::vector<Vec> out = base.side(label);
  for (const auto& a : artificial)
    if (a.label == label) out.push_back(a.x);
  return out;
}

std::vector<LabeledPoint> AugmentedDataset::all_points() const {
  std::vector<LabeledPoint> out = base.points;
  for (const auto& a : artificial) out.push_back({a.x, a.label});
  return out;
}

LabeledDataset load_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw io_error(path + ": empty file");
  // header: x0,...,x{d-1},label
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
  }
  if (cols.size() < 2 || cols.back() != "label")
    throw io_error(path + ":1: header must be x0,...,label");
  const int dim = static_cast<int>(cols.size()) - 1;
  for (int i = 0; i < dim; ++i)
    if (cols[i] != "x" + std::to_string(i))
      throw io_error(path + ":1: unexpected column '" + cols[i] + "'");

  LabeledDataset ds;
  ds.dim = dim;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    LabeledPoint p;
    p.x = Vec(dim);
    for (int i = 0; i < dim; ++i) {
      if (!std::getline(ss, cell, ','))
        throw io_error(path + ":" + std::to_string(row) + ": too few columns");
      try {
        std::size_t used = 0;
        p.x[i] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw io_error(path + ":" + std::to_string(row) + ": bad number '" + cell + "'");
      }
    }
    if (!std::getline(ss, cell, ','))
      throw io_error(path + ":" + std::to_string(row) + ": missing label");
    if (cell == "1") p.label = 1;
    else if (cell == "-1") p.label = -1;
    else throw io_error(path + ":" + std::to_string(row) + ": label must be 1 or -1, got '" + cell + "'");
    if (std::getline(ss, cell, ','))
      throw io_error(path + ":" + std::to_string(row) + ": too many columns");
    ds.points.push_back(std::move(p));
  }
  ds.validate();
  return ds;
}

void save_dataset_csv(const LabeledDataset& ds, const std::string& path) {
  ds.validate();
  std::ostringstream out;
  for (int i = 0; i < ds.dim; ++i) out << "x" << i << ",";
  out << "label\n";
  for (const auto& p : ds.points) {
    for (int i = 0; i < ds.dim; ++i) out << format_double(p.x[i]) << ",";
    out << p.label << "\n";
  }
  atomic_write_text(path, out.str());
}

namespace {

LabeledDataset dataset_from_json(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("points"))
    throw io_error(path + ": expected {\"dim\", \"points\"}");
  LabeledDataset ds;
  ds.dim = j.at("dim").get<int>();
  for (const auto& pj : j.at("points")) {
    LabeledPoint p;
    p.x = vec_from_json(pj.at("x"), ds.dim, "points");
    p.label = label_from_json(pj.at("label"), "points");
    ds.points.push_back(std::move(p));
  }
  ds.validate();
  return ds;
}

json dataset_to_json(const LabeledDataset& ds) {
  json j;
  j["dim"] = ds.dim;
  json pts = json::array();
  for (const auto& p : ds.points) pts.push_back({{"x", vec_to_json(p.x)}, {"label", p.label}});
  j["points"] = std::move(pts);
  return j;
}

}  // namespace

LabeledDataset load_dataset_json(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw io_error(path + ": " + e.what());
  }
  return dataset_from_json(j, path);
}

void save_dataset_json(const LabeledDataset& ds, const std::string& path) {
  ds.validate();
  atomic_write_text(path, dataset_to_json(ds).dump(2) + "\n");
}

AugmentedDataset load_augmented_json(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw io_error(path + ": " + e.what());
  }
  AugmentedDataset out;
  out.base = dataset_from_json(j, path);
  if (j.contains("radius")) out.radius = j.at("radius").get<double>();
  if (j.contains("artificial")) {
    for (const auto& aj : j.at("artificial")) {
      ArtificialPoint a;
      a.x = vec_from_json(aj.at("x"), out.base.dim, "artificial");
      a.label = label_from_json(aj.at("label"), "artificial");
      if (aj.contains("source") && !aj.at("source").is_null())
        a.source = aj.at("source").get<int>();
      out.artificial.push_back(std::move(a));
    }
  }
  out.validate();
  return out;
}

void save_augmented_json(const AugmentedDataset& ds, const std::string& path) {
  ds.validate();
  json j = dataset_to_json(ds.base);
  json arts = json::array();
  for (const auto& a : ds.artificial) {
    json aj = {{"x", vec_to_json(a.x)}, {"label", a.label}};
    if (a.source >= 0) aj["source"] = a.source;
    else aj["source"] = nullptr;
    arts.push_back(std::move(aj));
  }
  j["artificial"] = std::move(arts);
  j["radius"] = ds.radius;
  atomic_write_text(path, j.dump(2) + "\n");
}

AugmentedDataset load_any(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".csv") {
    AugmentedDataset out;
    out.base = load_dataset_csv(path);
    return out;
  }
  if (ext == ".json") {
    return load_augmented_json(path);
  }
  throw io_error("unsupported extension (want .csv or .json): " + path);
}

LabeledDataset make_two_point(double gamma, int d) {
  if (!(gamma > 0.0)) throw invalid_input("make_two_point: gamma must be > 0");
  if (d < 1) throw invalid_input("make_two_point: d must be >= 1");
  LabeledDataset ds;
  ds.dim = d;
  LabeledPoint plus{Vec::Zero(d), 1};
  LabeledPoint minus{Vec::Zero(d), -1};
  minus.x[0] = 2.0 * gamma;
  ds.points = {plus, minus};
  return ds;
}

LabeledDataset make_parabola_adversarial(int n, int m, double r) {
  if (n < 1 || n > 40) throw invalid_input("make_parabola_adversarial: n must be in [1, 40]");
  if (m < 1) throw invalid_input("make_parabola_adversarial: m must be >= 1");
  if (!(r > 0.0)) throw invalid_input("make_parabola_adversarial: r must be > 0");

  std::vector<double> s(n);
  s[0] = 3.0;
  for (int i = 1; i < n; ++i) s[i] = 2.0 * s[i - 1] + 4.0;

  LabeledDataset ds;
  ds.dim = 2;
  for (int i = 0; i < n; ++i) {
    Vec x(2);
    x[0] = r * s[i];
    x[1] = r * s[i] * s[i];
    ds.points.push_back({x, 1});
  }

  // Tangent at the scaled point (r s_i, r s_i^2): 2 s_i x - y - r s_i^2 = 0.
  // Distance from (j r, -Y) is (Y + 2 s_i j r - r s_i^2) / sqrt(4 s_i^2 + 1);
  // pick the smallest multiple of r making every such distance exceed r.
  double need = 0.0;
  for (int i = 0; i < n; ++i) {
    const double den = std::sqrt(4.0 * s[i] * s[i] + 1.0);
    for (int j = 0; j < m; ++j)
      need = std::max(need, r * s[i] * s[i] - 2.0 * s[i] * j * r + r * den);
  }
  double Y = r * std::ceil(need / r);
  auto clears = [&](double y) {
    for (int i = 0; i < n; ++i) {
      const double den = std::sqrt(4.0 * s[i] * s[i] + 1.0);
      for (int j = 0; j < m; ++j) {
        const double dist = (y + 2.0 * s[i] * j * r - r * s[i] * s[i]) / den;
        if (!(dist > r)) return false;
      }
    }
    return true;
  };
  while (!clears(Y)) Y += r;

  for (int j = 0; j < m; ++j) {
    Vec x(2);
    x[0] = j * r;
    x[1] = -Y;
    ds.points.push_back({x, -1});
  }

  // construction check: the tangent at s_i clears every other positive point
  for (int i = 0; i < n; ++i) {
    const double den = std::sqrt(4.0 * s[i] * s[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dist = std::abs(2.0 * s[i] * r * s[j] - r * s[j] * s[j] - r * s[i] * s[i]) / den;
      if (!(dist > r))
        throw std::logic_error("make_parabola_adversarial: tangent clearance failed");
    }
  }
  return ds;
}

LabeledDataset make_clusters(int k_per_class, int per, double cluster_radius,
                             double separation, int d, SeededStream& stream) {
  if (k_per_class < 1 || per < 1) throw invalid_input("make_clusters: counts must be >= 1");
  if (d < 2) throw invalid_input("make_clusters: d must be >= 2");
  if (!(separation > 0.0) || cluster_radius < 0.0)
    throw invalid_input("make_clusters: bad geometry");
  LabeledDataset ds;
  ds.dim = d;
  for (int label : {1, -1}) {
    for (int kc = 0; kc < k_per_class; ++kc) {
      Vec center = Vec::Zero(d);
      center[0] = (label == 1 ? -0.5 : 0.5) * separation;
      center[1] = k_per_class == 1 ? 0.0 : -1.0 + 2.0 * kc / (k_per_class - 1.0);
      for (int p = 0; p < per; ++p) {
        Vec x = center;
        if (cluster_radius > 0.0) {
          const Vec dir = stream.sphere(d, 1.0);
          const double rad = cluster_radius * std::pow(stream.uniform(), 1.0 / d);
          x += rad * dir;
        }
        ds.points.push_back({x, label});
      }
    }
  }
  ds.validate();
  return ds;
}

double class_distance(const LabeledDataset& ds) {
  const auto plus = ds.side(1);
  const auto minus = ds.side(-1);
  if (plus.empty() || minus.empty())
    throw invalid_input("class_distance: both classes must be nonempty");
  double best = kInf;
  for (const auto& a : plus)
    for (const auto& b : minus) best = std::min(best, (a - b).norm());
  return best;
}

double diameter(const std::vector<Vec>& pts) {
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      best = std::max(best, (pts[i] - pts[j]).norm());
  return best;
}

}  // namespace marginlab
