#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "pgo/errors.hpp"
#include "pgo/graph.hpp"

namespace pgo {

namespace {

constexpr double kMaxConditionNumber = 1e12;

template <class Mat>
Mat sqrt_info_impl(const Mat& info, int line_no) {
  Eigen::SelfAdjointEigenSolver<Mat> es(info);
  const auto& ev = es.eigenvalues();
  if (ev(0) <= 0.0) throw NonPositiveDefiniteInformation(line_no);
  if (ev(ev.size() - 1) > kMaxConditionNumber * ev(0))
    throw NonPositiveDefiniteInformation(
        line_no, "information matrix condition number exceeds 1e12");
  Eigen::LLT<Mat> llt(info);
  if (llt.info() != Eigen::Success)
    throw NonPositiveDefiniteInformation(line_no);
  return llt.matrixU();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

struct LabelLine {
  int i, j, line_no;
  bool is_true;
};

double num(std::istringstream& ss, int line_no) {
  double v;
  if (!(ss >> v)) throw MalformedLine(line_no, "expected a number");
  return v;
}

int id_num(std::istringstream& ss, int line_no) {
  int v;
  if (!(ss >> v)) throw MalformedLine(line_no, "expected a node id");
  return v;
}

void expect_end(std::istringstream& ss, int line_no) {
  std::string extra;
  if (ss >> extra) throw MalformedLine(line_no, "trailing tokens");
}

template <class PoseT>
PoseGraph<PoseT> assemble(std::map<int, PoseT>& vertices,
                          std::vector<Factor<PoseT>>& factors,
                          const std::vector<LabelLine>& labels) {
  PoseGraph<PoseT> g;
  int expect = 0;
  for (auto& [id, pose] : vertices) {
    if (id != expect++)
      throw IndexOutOfRange("node ids are not contiguous from 0 (missing " +
                            std::to_string(expect - 1) + ")");
    g.poses.push_back(pose);
  }
  g.factors = std::move(factors);
  for (const auto& lab : labels) {
    bool attached = false;
    for (auto& f : g.factors) {
      if (f.kind == FactorKind::kLoop && f.i == lab.i && f.j == lab.j &&
          !f.truth_label) {
        f.truth_label = lab.is_true ? TruthLabel::kTrueLoop
                                    : TruthLabel::kFalseLoop;
        attached = true;
        break;
      }
    }
    if (!attached)
      throw MalformedLine(lab.line_no, "LOOP_LABEL without matching loop edge");
  }
  validate_graph(g);
  return g;
}

}  // namespace

Eigen::Matrix3d sqrt_information_from(const Eigen::Matrix3d& info,
                                      int line_no) {
  return sqrt_info_impl(info, line_no);
}

Matrix6d sqrt_information_from(const Matrix6d& info, int line_no) {
  return sqrt_info_impl(info, line_no);
}

template <class PoseT>
void validate_graph(const PoseGraph<PoseT>& g) {
  const int n = g.num_poses();
  for (const auto& f : g.factors) {
    if (f.i < 0 || f.i >= n)
      throw IndexOutOfRange("factor references node " + std::to_string(f.i) +
                            " of " + std::to_string(n));
    if (f.kind != FactorKind::kPrior && (f.j < 0 || f.j >= n))
      throw IndexOutOfRange("factor references node " + std::to_string(f.j) +
                            " of " + std::to_string(n));
  }
}

template void validate_graph<Pose2>(const PoseGraph<Pose2>&);
template void validate_graph<Pose3>(const PoseGraph<Pose3>&);

AnyGraph parse_g2o(const std::string& text) {
  std::map<int, Pose2> v2;
  std::map<int, Pose3> v3;
  std::vector<Factor<Pose2>> f2;
  std::vector<Factor<Pose3>> f3;
  std::vector<LabelLine> labels;
  bool saw2 = false, saw3 = false;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;

    if (tag == "VERTEX_SE2") {
      saw2 = true;
      const int id = id_num(ss, line_no);
      const double x = num(ss, line_no), y = num(ss, line_no),
                   th = num(ss, line_no);
      expect_end(ss, line_no);
      if (!v2.emplace(id, Pose2{x, y, th}).second)
        throw MalformedLine(line_no, "duplicate vertex id");
    } else if (tag == "VERTEX_SE3:QUAT") {
      saw3 = true;
      const int id = id_num(ss, line_no);
      Eigen::Vector3d t;
      for (int k = 0; k < 3; ++k) t[k] = num(ss, line_no);
      const double qx = num(ss, line_no), qy = num(ss, line_no),
                   qz = num(ss, line_no), qw = num(ss, line_no);
      expect_end(ss, line_no);
      if (!v3.emplace(id, Pose3{t, Eigen::Quaterniond(qw, qx, qy, qz)}).second)
        throw MalformedLine(line_no, "duplicate vertex id");
    } else if (tag == "EDGE_SE2") {
      saw2 = true;
      Factor<Pose2> f;
      f.i = id_num(ss, line_no);
      f.j = id_num(ss, line_no);
      const double dx = num(ss, line_no), dy = num(ss, line_no),
                   dth = num(ss, line_no);
      f.measurement = Pose2{dx, dy, dth};
      Eigen::Matrix3d info;
      for (int r = 0; r < 3; ++r)
        for (int c = r; c < 3; ++c) {
          info(r, c) = num(ss, line_no);
          info(c, r) = info(r, c);
        }
      expect_end(ss, line_no);
      f.sqrt_information = sqrt_information_from(info, line_no);
      f.kind = std::abs(f.i - f.j) == 1 ? FactorKind::kOdometry
                                        : FactorKind::kLoop;
      f2.push_back(std::move(f));
    } else if (tag == "EDGE_SE3:QUAT") {
      saw3 = true;
      Factor<Pose3> f;
      f.i = id_num(ss, line_no);
      f.j = id_num(ss, line_no);
      Eigen::Vector3d t;
      for (int k = 0; k < 3; ++k) t[k] = num(ss, line_no);
      const double qx = num(ss, line_no), qy = num(ss, line_no),
                   qz = num(ss, line_no), qw = num(ss, line_no);
      f.measurement = Pose3{t, Eigen::Quaterniond(qw, qx, qy, qz)};
      Matrix6d info;
      for (int r = 0; r < 6; ++r)
        for (int c = r; c < 6; ++c) {
          info(r, c) = num(ss, line_no);
          info(c, r) = info(r, c);
        }
      expect_end(ss, line_no);
      f.sqrt_information = sqrt_information_from(info, line_no);
      f.kind = std::abs(f.i - f.j) == 1 ? FactorKind::kOdometry
                                        : FactorKind::kLoop;
      f3.push_back(std::move(f));
    } else if (tag == "LOOP_LABEL") {
      LabelLine lab;
      lab.line_no = line_no;
      lab.i = id_num(ss, line_no);
      lab.j = id_num(ss, line_no);
      std::string v;
      if (!(ss >> v) || (v != "true" && v != "false"))
        throw MalformedLine(line_no, "LOOP_LABEL expects true or false");
      lab.is_true = v == "true";
      expect_end(ss, line_no);
      labels.push_back(lab);
    } else {
      throw MalformedLine(line_no, "unknown record '" + tag + "'");
    }
    if (saw2 && saw3) throw MixedDimensions();
  }

  if (saw3) return assemble(v3, f3, labels);
  return assemble(v2, f2, labels);
}

namespace {

template <class PoseT, class VertexFn, class MeasFn>
std::string write_impl(const PoseGraph<PoseT>& g, const char* vtag,
                       const char* etag, VertexFn vertex_fields,
                       MeasFn meas_fields) {
  constexpr int dof = GroupTraits<PoseT>::kDof;
  std::string out;
  out.reserve(128 * (g.poses.size() + g.factors.size()));
  for (int id = 0; id < g.num_poses(); ++id) {
    out += vtag;
    out += ' ' + std::to_string(id);
    out += vertex_fields(g.poses[id]);
    out += '\n';
  }
  for (const auto& f : g.factors) {
    if (f.kind == FactorKind::kPrior) continue;  // not representable in g2o
    out += etag;
    out += ' ' + std::to_string(f.i) + ' ' + std::to_string(f.j);
    out += meas_fields(f.measurement);
    const auto info = f.information();
    for (int r = 0; r < dof; ++r)
      for (int c = r; c < dof; ++c) out += ' ' + fmt(info(r, c));
    out += '\n';
  }
  for (const auto& f : g.factors) {
    if (!f.truth_label) continue;
    out += "LOOP_LABEL " + std::to_string(f.i) + ' ' + std::to_string(f.j) +
           (f.truth_label == TruthLabel::kTrueLoop ? " true\n" : " false\n");
  }
  return out;
}

}  // namespace

std::string write_g2o(const Graph2& g) {
  auto vfields = [](const Pose2& p) {
    return ' ' + fmt(p.x) + ' ' + fmt(p.y) + ' ' + fmt(p.theta);
  };
  return write_impl(g, "VERTEX_SE2", "EDGE_SE2", vfields, vfields);
}

std::string write_g2o(const Graph3& g) {
  auto fields = [](const Pose3& p) {
    std::string s;
    for (int k = 0; k < 3; ++k) s += ' ' + fmt(p.t[k]);
    s += ' ' + fmt(p.q.x()) + ' ' + fmt(p.q.y()) + ' ' + fmt(p.q.z()) + ' ' +
         fmt(p.q.w());
    return s;
  };
  return write_impl(g, "VERTEX_SE3:QUAT", "EDGE_SE3:QUAT", fields, fields);
}

std::string write_g2o(const AnyGraph& g) {
  return std::visit([](const auto& gr) { return write_g2o(gr); }, g);
}

AnyGraph load_g2o_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_g2o(buf.str());
}

void save_g2o_file(const std::string& path, const AnyGraph& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << write_g2o(g);
}

}  // namespace pgo
