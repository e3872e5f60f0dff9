#include "tiltcert/problem.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "tiltcert/random.hpp"

namespace tiltcert {

using nlohmann::json;

const char* form_name(InstanceForm f) {
  switch (f) {
    case InstanceForm::Primal: return "primal";
    case InstanceForm::Lmi: return "lmi";
    case InstanceForm::Composite: return "composite";
  }
  return "?";
}

double phi(const NsdpInstance& inst, const Vec& x) {
  const QuadraticObjective& o = inst.objective;
  return 0.5 * x.dot(o.Q * x) + o.c.dot(x) + o.c0;
}

Vec grad_phi(const NsdpInstance& inst, const Vec& x) {
  return inst.objective.Q * x + inst.objective.c;
}

namespace {

void check_x(const NsdpInstance& inst, const Vec& x, const char* what) {
  if (x.size() != inst.d) {
    std::ostringstream os;
    os << what << ": vector of length " << x.size() << ", expected " << inst.d;
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

}  // namespace

SymMatrix g_value(const NsdpInstance& inst, const Vec& x) {
  check_x(inst, x, "g_value");
  const MatrixMapping& g = inst.g;
  Mat out = g.G0.mat();
  for (int i = 0; i < inst.d; ++i)
    if (x(i) != 0.0) out += x(i) * g.G[i].mat();
  if (!g.affine()) {
    for (int i = 0; i < inst.d; ++i)
      for (int j = 0; j < inst.d; ++j)
        if (x(i) != 0.0 && x(j) != 0.0) out += 0.5 * x(i) * x(j) * g.H[i][j].mat();
  }
  return SymMatrix(out);
}

SymMatrix g_partial(const NsdpInstance& inst, const Vec& x, int i) {
  check_x(inst, x, "g_partial");
  Mat out = inst.g.G[i].mat();
  if (!inst.g.affine()) {
    for (int j = 0; j < inst.d; ++j)
      if (x(j) != 0.0) out += x(j) * inst.g.H[i][j].mat();
  }
  return SymMatrix(out);
}

SymMatrix g_jac_apply(const NsdpInstance& inst, const Vec& x, const Vec& w) {
  check_x(inst, x, "g_jac_apply");
  check_x(inst, w, "g_jac_apply");
  Mat out = Mat::Zero(inst.n(), inst.n());
  for (int i = 0; i < inst.d; ++i)
    if (w(i) != 0.0) out += w(i) * g_partial(inst, x, i).mat();
  return SymMatrix(out);
}

Vec g_adjoint(const NsdpInstance& inst, const Vec& x, const SymMatrix& S) {
  check_x(inst, x, "g_adjoint");
  if (S.dim() != inst.n()) throw Error(ErrorCode::DimensionMismatch, "g_adjoint: matrix order");
  Vec out(inst.d);
  for (int i = 0; i < inst.d; ++i) out(i) = frob_inner(g_partial(inst, x, i), S);
  return out;
}

SymMatrix g_hess_quad(const NsdpInstance& inst, const Vec& x, const Vec& w) {
  check_x(inst, x, "g_hess_quad");
  check_x(inst, w, "g_hess_quad");
  Mat out = Mat::Zero(inst.n(), inst.n());
  if (inst.g.affine()) return SymMatrix(out);
  for (int i = 0; i < inst.d; ++i)
    for (int j = 0; j < inst.d; ++j)
      if (w(i) != 0.0 && w(j) != 0.0) out += w(i) * w(j) * inst.g.H[i][j].mat();
  return SymMatrix(out);
}

Mat g_jacobian(const NsdpInstance& inst, const Vec& x) {
  Mat J(svec_dim(inst.n()), inst.d);
  for (int i = 0; i < inst.d; ++i) J.col(i) = svec(g_partial(inst, x, i));
  return J;
}

PointReport evaluate(const NsdpInstance& inst, const Vec& x) {
  check_x(inst, x, "evaluate");
  PointReport r;
  r.x = x;
  r.Xval = g_value(inst, x);
  r.eq_residual = inst.m() > 0 ? (inst.A * x - inst.b).norm() : 0.0;
  r.psd_residual = inst.n() > 0 ? std::max(0.0, -min_eig(r.Xval)) : 0.0;
  r.grad = grad_phi(inst, x);
  r.vstar = -r.grad;
  r.objective = phi(inst, x);
  return r;
}

bool is_identity_embedding(const NsdpInstance& inst) {
  const int n = inst.n();
  if (!inst.g.affine() || inst.d != svec_dim(n) || inst.g.G0.max_abs() != 0.0) return false;
  for (int k = 0; k < inst.d; ++k)
    if ((inst.g.G[k].mat() - svec_basis(n, k).mat()).cwiseAbs().maxCoeff() > 1e-15) return false;
  return true;
}

ConvexityCheck check_minus_convexity(const NsdpInstance& inst, int num_samples,
                                     std::uint64_t seed, double tol) {
  ConvexityCheck out;
  if (inst.g.affine() || inst.d == 0) return out;
  const Vec x0 = Vec::Zero(inst.d);
  auto probe = [&](const Vec& w) {
    const double e = max_eig(g_hess_quad(inst, x0, w));
    if (e > out.worst_eig || !out.witness) out.worst_eig = std::max(out.worst_eig, e);
    if (e > tol && out.pass) {
      out.pass = false;
      out.witness = w;
    }
  };
  for (int i = 0; i < inst.d && out.pass; ++i) probe(Vec::Unit(inst.d, i));
  Rng rng(seed);
  for (int k = 0; k < num_samples && out.pass; ++k) probe(random_unit(rng, inst.d));
  return out;
}

namespace {

Mat drop_dependent_rows(NsdpInstance& inst) {
  const int m = inst.m();
  if (m == 0) return inst.A;
  Eigen::ColPivHouseholderQR<Mat> qr(inst.A.transpose());
  qr.setThreshold(1e-10);
  const int r = static_cast<int>(qr.rank());
  if (r == m) return inst.A;
  std::vector<int> keep;
  for (int k = 0; k < r; ++k) keep.push_back(qr.colsPermutation().indices()(k));
  std::sort(keep.begin(), keep.end());
  Mat A(r, inst.d);
  Vec b(r);
  for (int k = 0; k < r; ++k) {
    A.row(k) = inst.A.row(keep[k]);
    b(k) = inst.b(keep[k]);
  }
  const Vec x0 = A.completeOrthogonalDecomposition().solve(b);
  if ((inst.A * x0 - inst.b).norm() > 1e-8 * (1.0 + inst.b.norm())) {
    throw Error(ErrorCode::InvalidArgument, "equality constraints are inconsistent");
  }
  std::ostringstream os;
  os << "dropped " << (m - r) << " linearly dependent equality row(s)";
  inst.warnings.push_back(os.str());
  inst.A = A;
  inst.b = b;
  return A;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(ErrorCode::DimensionMismatch, msg);
}

}  // namespace

void validate(NsdpInstance& inst) {
  const int d = inst.d, n = inst.g.n;
  require(d >= 0 && n >= 0, "negative dimension");
  require(inst.objective.c.size() == d, "c must have length d");
  if (inst.objective.Q.size() == 0) inst.objective.Q = Mat::Zero(d, d);
  require(inst.objective.Q.rows() == d && inst.objective.Q.cols() == d, "Q must be d x d");
  if (inst.A.size() == 0) inst.A.resize(0, d);
  require(inst.A.cols() == d, "A must have d columns");
  require(inst.b.size() == inst.A.rows(), "b must have one entry per row of A");
  require(inst.g.G0.dim() == n, "G0 must be n x n");
  require(static_cast<int>(inst.g.G.size()) == d, "G must hold d matrices");
  for (const SymMatrix& G : inst.g.G) require(G.dim() == n, "each G[i] must be n x n");
  const Mat& Q = inst.objective.Q;
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + Q.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::InvalidArgument, "Q is not symmetric");
  }
  if (!inst.g.affine()) {
    require(static_cast<int>(inst.g.H.size()) == d, "H must be d x d");
    for (int i = 0; i < d; ++i) {
      require(static_cast<int>(inst.g.H[i].size()) == d, "H must be d x d");
      for (int j = 0; j < d; ++j) require(inst.g.H[i][j].dim() == n, "each H[i][j] must be n x n");
    }
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < i; ++j)
        if ((inst.g.H[i][j].mat() - inst.g.H[j][i].mat()).cwiseAbs().maxCoeff() > 1e-12) {
          throw Error(ErrorCode::InvalidArgument, "H is not symmetric in (i,j)");
        }
  }
  if (inst.point) require(inst.point->size() == d, "point must have length d");
  drop_dependent_rows(inst);
  const ConvexityCheck cc = check_minus_convexity(inst, 200, 0x5eedULL);
  if (!cc.pass) {
    std::ostringstream os;
    os << "g is not S-minus convex: D2g(w,w) has eigenvalue " << cc.worst_eig;
    throw Error(ErrorCode::InvalidArgument, os.str());
  }
}

Mat raw_to_svec_quadratic(const Mat& Q_raw) {
  const int d = static_cast<int>(Q_raw.rows());
  Vec dinv(d);
  for (int k = 0; k < d; ++k) {
    const auto [i, j] = svec_index(k);
    dinv(k) = i == j ? 1.0 : 1.0 / std::sqrt(2.0);
  }
  return dinv.asDiagonal() * Q_raw * dinv.asDiagonal();
}

Mat svec_to_raw_quadratic(const Mat& Q_svec) {
  const int d = static_cast<int>(Q_svec.rows());
  Vec dg(d);
  for (int k = 0; k < d; ++k) {
    const auto [i, j] = svec_index(k);
    dg(k) = i == j ? 1.0 : std::sqrt(2.0);
  }
  return dg.asDiagonal() * Q_svec * dg.asDiagonal();
}

// ---------------------------------------------------------------------------
// Native format

namespace {

[[noreturn]] void field_error(const std::string& msg) {
  throw Error(ErrorCode::ParseError, "native: " + msg);
}

const json& need(const json& j, const char* key) {
  if (!j.contains(key)) field_error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

double num(const json& j, const std::string& where) {
  if (!j.is_number()) field_error(where + " must be a number");
  return j.get<double>();
}

Vec read_vec(const json& j, const std::string& where) {
  if (!j.is_array()) field_error(where + " must be an array");
  Vec v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v(i) = num(j[i], where);
  return v;
}

Mat read_mat(const json& j, const std::string& where, int cols = -1) {
  if (!j.is_array()) field_error(where + " must be an array of rows");
  const int rows = static_cast<int>(j.size());
  if (rows == 0) return Mat(0, std::max(cols, 0));
  if (!j[0].is_array()) field_error(where + " must be an array of rows");
  const int c = static_cast<int>(j[0].size());
  Mat m(rows, c);
  for (int r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != c) field_error(where + " rows differ in length");
    for (int k = 0; k < c; ++k) m(r, k) = num(j[r][k], where);
  }
  return m;
}

SymMatrix read_sym(const json& j, const std::string& where, int n) {
  const Mat m = read_mat(j, where);
  if (m.rows() != n || m.cols() != n) {
    std::ostringstream os;
    os << where << " must be " << n << " x " << n;
    field_error(os.str());
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff())) {
    field_error(where + " is not symmetric");
  }
  return SymMatrix(m);
}

json mat_json(const Mat& m) {
  json out = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json vec_json(const Vec& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

NsdpInstance from_json(const json& doc) {
  if (!doc.is_object()) field_error("top level must be an object");
  NsdpInstance inst;
  const std::string form = need(doc, "form").get<std::string>();
  if (doc.contains("name")) inst.name = doc["name"].get<std::string>();
  if (form == "primal") {
    inst.form = InstanceForm::Primal;
    const int n = need(doc, "n").get<int>();
    const int d = svec_dim(n);
    if (doc.contains("d") && doc["d"].get<int>() != d) field_error("d must equal n(n+1)/2 for primal form");
    inst.d = d;
    inst.g.n = n;
    inst.g.G0 = SymMatrix::zero(n);
    for (int k = 0; k < d; ++k) inst.g.G.push_back(svec_basis(n, k));
    inst.objective.c = svec(read_sym(need(doc, "c"), "c", n));
    inst.objective.Q = doc.contains("Q") ? raw_to_svec_quadratic(read_mat(doc["Q"], "Q"))
                                         : Mat::Zero(d, d);
    if (inst.objective.Q.rows() != d || inst.objective.Q.cols() != d) field_error("Q must be d x d");
    const json& Aj = doc.contains("A") ? doc["A"] : json::array();
    if (!Aj.is_array()) field_error("A must be a list of matrices");
    inst.A.resize(static_cast<int>(Aj.size()), d);
    for (size_t r = 0; r < Aj.size(); ++r)
      inst.A.row(r) = svec(read_sym(Aj[r], "A[" + std::to_string(r) + "]", n)).transpose();
    inst.b = doc.contains("b") ? read_vec(doc["b"], "b") : Vec(0);
    if (doc.contains("point")) {
      const json& p = doc["point"];
      inst.point = (p.is_array() && !p.empty() && p[0].is_array()) ? svec(read_sym(p, "point", n))
                                                                    : read_vec(p, "point");
    }
  } else if (form == "lmi" || form == "composite") {
    inst.form = form == "lmi" ? InstanceForm::Lmi : InstanceForm::Composite;
    const int d = need(doc, "d").get<int>();
    const int n = need(doc, "n").get<int>();
    inst.d = d;
    inst.g.n = n;
    inst.objective.c = read_vec(need(doc, "c"), "c");
    inst.objective.Q = doc.contains("Q") ? read_mat(doc["Q"], "Q", d) : Mat::Zero(d, d);
    inst.A = doc.contains("A") ? read_mat(doc["A"], "A", d) : Mat(0, d);
    inst.b = doc.contains("b") ? read_vec(doc["b"], "b") : Vec(0);
    inst.g.G0 = doc.contains("G0") ? read_sym(doc["G0"], "G0", n) : SymMatrix::zero(n);
    const json& Gj = need(doc, "G");
    if (!Gj.is_array()) field_error("G must be a list of matrices");
    for (size_t i = 0; i < Gj.size(); ++i) inst.g.G.push_back(read_sym(Gj[i], "G[" + std::to_string(i) + "]", n));
    if (doc.contains("H")) {
      const json& Hj = doc["H"];
      if (!Hj.is_array() || static_cast<int>(Hj.size()) != d) field_error("H must be a d x d array of matrices");
      inst.g.H.resize(d);
      for (int i = 0; i < d; ++i) {
        if (!Hj[i].is_array() || static_cast<int>(Hj[i].size()) != d) field_error("H must be a d x d array of matrices");
        for (int j = 0; j < d; ++j)
          inst.g.H[i].push_back(read_sym(Hj[i][j], "H[" + std::to_string(i) + "][" + std::to_string(j) + "]", n));
      }
    } else if (inst.form == InstanceForm::Composite) {
      inst.g.H.clear();
    }
    if (doc.contains("point")) inst.point = read_vec(doc["point"], "point");
  } else {
    field_error("unknown form \"" + form + "\"");
  }
  if (doc.contains("c0")) inst.objective.c0 = num(doc["c0"], "c0");
  validate(inst);
  return inst;
}

json to_json(const NsdpInstance& inst) {
  json doc;
  doc["form"] = inst.form == InstanceForm::Composite || !inst.g.affine() ? "composite" : "lmi";
  if (!inst.name.empty()) doc["name"] = inst.name;
  doc["d"] = inst.d;
  doc["n"] = inst.n();
  doc["c"] = vec_json(inst.objective.c);
  doc["c0"] = inst.objective.c0;
  doc["Q"] = mat_json(inst.objective.Q);
  doc["A"] = mat_json(inst.A);
  doc["b"] = vec_json(inst.b);
  doc["G0"] = mat_json(inst.g.G0.mat());
  json G = json::array();
  for (const SymMatrix& Gi : inst.g.G) G.push_back(mat_json(Gi.mat()));
  doc["G"] = G;
  if (!inst.g.affine()) {
    json H = json::array();
    for (const auto& row : inst.g.H) {
      json hr = json::array();
      for (const SymMatrix& h : row) hr.push_back(mat_json(h.mat()));
      H.push_back(hr);
    }
    doc["H"] = H;
  }
  if (inst.point) doc["point"] = vec_json(*inst.point);
  return doc;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

NsdpInstance parse_native(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    std::ostringstream os;
    os << "native: line " << line << ", column " << col << ": " << e.what();
    throw Error(ErrorCode::ParseError, os.str());
  }
  NsdpInstance inst;
  try {
    inst = from_json(doc);
  } catch (const json::exception& e) {
    field_error(e.what());
  }
  inst.source_text = text;
  return inst;
}

NsdpInstance load_native(const std::string& path) { return parse_native(read_file(path)); }

std::string write_native(const NsdpInstance& inst) {
  if (!inst.source_text.empty()) return json::parse(inst.source_text).dump(2) + "\n";
  return to_json(inst).dump(2) + "\n";
}

NsdpInstance make_primal(const SymMatrix& C, const std::vector<SymMatrix>& Amats, const Vec& b,
                         const std::optional<Mat>& Q_raw) {
  json doc;
  doc["form"] = "primal";
  doc["n"] = C.dim();
  doc["c"] = mat_json(C.mat());
  json A = json::array();
  for (const SymMatrix& Ai : Amats) A.push_back(mat_json(Ai.mat()));
  doc["A"] = A;
  doc["b"] = vec_json(b);
  if (Q_raw) doc["Q"] = mat_json(*Q_raw);
  return parse_native(doc.dump());
}

Vec parse_point(const NsdpInstance& inst, const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("point: ") + e.what());
  }
  Vec x;
  if (j.is_array() && !j.empty() && j[0].is_array()) {
    if (!is_identity_embedding(inst)) throw Error(ErrorCode::DimensionMismatch, "point: matrix given for a vector instance");
    x = svec(read_sym(j, "point", inst.n()));
  } else {
    x = read_vec(j, "point");
  }
  if (x.size() != inst.d) throw Error(ErrorCode::DimensionMismatch, "point: wrong length");
  return x;
}

// ---------------------------------------------------------------------------
// SDPA sparse format

namespace {

struct Token {
  std::string text;
  int line = 0, col = 0;
};

[[noreturn]] void sdpa_error(const Token& t, const std::string& msg) {
  std::ostringstream os;
  os << "sdpa: line " << t.line << ", column " << t.col << ": " << msg;
  throw Error(ErrorCode::ParseError, os.str());
}

std::vector<Token> tokenize_sdpa(const std::string& text) {
  std::vector<Token> out;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++ln;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (header && (line[first] == '"' || line[first] == '*')) continue;
    header = false;
    std::size_t i = 0;
    while (i < line.size()) {
      const char ch = line[i];
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == ',' || ch == '(' || ch == ')' ||
          ch == '{' || ch == '}') {
        ++i;
        continue;
      }
      if (ch == '"' || ch == '*') break;  // trailing comment
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != ',' &&
             line[i] != '(' && line[i] != ')' && line[i] != '{' && line[i] != '}')
        ++i;
      out.push_back({line.substr(start, i - start), ln, static_cast<int>(start) + 1});
    }
  }
  return out;
}

double to_double(const Token& t) {
  char* end = nullptr;
  const double v = std::strtod(t.text.c_str(), &end);
  if (end == t.text.c_str() || *end != '\0' || !std::isfinite(v)) sdpa_error(t, "expected a number, got \"" + t.text + "\"");
  return v;
}

long to_int(const Token& t) {
  char* end = nullptr;
  const long v = std::strtol(t.text.c_str(), &end, 10);
  if (end == t.text.c_str() || *end != '\0') {
    // integer-valued decimals such as "2.0" are common in generated files
    const double dv = to_double(t);
    if (dv != std::floor(dv)) sdpa_error(t, "expected an integer, got \"" + t.text + "\"");
    return static_cast<long>(dv);
  }
  return v;
}

}  // namespace

NsdpInstance parse_sdpa(const std::string& text) {
  const std::vector<Token> tok = tokenize_sdpa(text);
  std::size_t p = 0;
  const Token eof{"", 0, 0};
  auto next = [&]() -> const Token& {
    if (p >= tok.size()) {
      Token t = tok.empty() ? eof : tok.back();
      throw Error(ErrorCode::ParseError, "sdpa: unexpected end of file after line " + std::to_string(t.line));
    }
    return tok[p++];
  };
  const Token& tm = next();
  const long m = to_int(tm);
  if (m < 0) sdpa_error(tm, "number of constraint matrices must be nonnegative");
  const Token& tb = next();
  const long nblocks = to_int(tb);
  if (nblocks <= 0) sdpa_error(tb, "number of blocks must be positive");
  std::vector<int> size(nblocks), offset(nblocks);
  int n = 0;
  for (long k = 0; k < nblocks; ++k) {
    const Token& t = next();
    const long s = to_int(t);
    if (s == 0) throw Error(ErrorCode::UnsupportedFeature, "sdpa: block of size 0 at line " + std::to_string(t.line));
    size[k] = static_cast<int>(s);
    offset[k] = n;
    n += static_cast<int>(std::labs(s));
  }
  Vec bvec(m);
  for (long i = 0; i < m; ++i) bvec(i) = to_double(next());
  std::vector<Mat> F(m + 1, Mat::Zero(n, n));
  while (p < tok.size()) {
    if (tok.size() - p < 5) sdpa_error(tok[p], "incomplete entry line");
    const Token& t0 = tok[p];
    const long mat = to_int(tok[p]);
    const long blk = to_int(tok[p + 1]);
    long i = to_int(tok[p + 2]);
    long j = to_int(tok[p + 3]);
    const double v = to_double(tok[p + 4]);
    if (mat < 0 || mat > m) sdpa_error(t0, "matrix number out of range");
    if (blk < 1 || blk > nblocks) sdpa_error(tok[p + 1], "block number out of range");
    const int bs = size[blk - 1];
    const long dim = std::labs(bs);
    if (i < 1 || j < 1 || i > dim || j > dim) sdpa_error(tok[p + 2], "entry index out of range");
    if (i > j) std::swap(i, j);
    if (bs < 0 && i != j) sdpa_error(tok[p + 2], "off-diagonal entry in a diagonal block");
    const int r = offset[blk - 1] + static_cast<int>(i) - 1;
    const int c = offset[blk - 1] + static_cast<int>(j) - 1;
    F[mat](r, c) = v;
    F[mat](c, r) = v;
    p += 5;
  }
  NsdpInstance inst;
  inst.form = InstanceForm::Lmi;
  inst.d = static_cast<int>(m);
  inst.g.n = n;
  inst.g.G0 = SymMatrix(Mat(-F[0]));
  for (long k = 1; k <= m; ++k) inst.g.G.push_back(SymMatrix(F[k]));
  inst.objective.c = -bvec;
  inst.objective.Q = Mat::Zero(m, m);
  inst.A = Mat(0, m);
  inst.b = Vec(0);
  if (nblocks > 1) inst.warnings.push_back(std::to_string(nblocks) + " blocks concatenated diagonally");
  validate(inst);
  return inst;
}

NsdpInstance load_sdpa(const std::string& path) {
  NsdpInstance inst = parse_sdpa(read_file(path));
  inst.name = path;
  return inst;
}

NsdpInstance load_instance(const std::string& path) {
  auto ends_with = [&](const std::string& suf) {
    return path.size() >= suf.size() && path.compare(path.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends_with(".dat-s") || ends_with(".sdpa")) return load_sdpa(path);
  return load_native(path);
}

}  // namespace tiltcert
