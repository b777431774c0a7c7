#include "topocheck/render.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "topocheck/directions.hpp"

namespace topocheck {

namespace {

constexpr double kPanel = 260.0;
constexpr double kMargin = 20.0;

std::string num(double v) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(2) << v;
  return o.str();
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

struct Panel {
  double x0, y0;
  double cx() const { return x0 + kPanel / 2; }
  double cy() const { return y0 + kPanel / 2; }
  double scale() const { return kPanel / 2 - kMargin; }
  double px(double u) const { return cx() + scale() * u; }
  double py(double v) const { return cy() - scale() * v; }
};

void frame(std::ostringstream& out, const Panel& p, const std::string& title) {
  out << "<rect x=\"" << num(p.x0) << "\" y=\"" << num(p.y0) << "\" width=\"" << kPanel << "\" height=\"" << kPanel
      << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
  out << "<circle cx=\"" << num(p.cx()) << "\" cy=\"" << num(p.cy()) << "\" r=\"" << num(p.scale())
      << "\" fill=\"none\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  out << "<text x=\"" << num(p.x0 + 6) << "\" y=\"" << num(p.y0 + 14) << "\" font-size=\"11\">" << escape(title)
      << "</text>\n";
}

void planar_panel(std::ostringstream& out, const Panel& p, const ConditionReport& c) {
  const auto& g = c.gauss_image;
  const std::size_t count = g.size();
  const double winding = sampled_winding(g);
  frame(out, p, c.condition + ": winding " + num(winding));
  out << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.2\" points=\"";
  for (std::size_t i = 0; i <= count; ++i) {
    const Vec& q = g[i % count];
    const double rho = 0.45 + 0.55 * static_cast<double>(i) / static_cast<double>(count);
    out << num(p.px(rho * q[0])) << ',' << num(p.py(rho * q[1])) << ' ';
  }
  out << "\"/>\n";
  if (c.condition != "hemisphere") return;
  const Evidence* counts = nullptr;
  for (const Evidence& e : c.evidence)
    if (e.label == "crossings") counts = &e;
  if (counts == nullptr) return;
  // one tick per grid normal, length proportional to its crossing count,
  // plus a dot wherever the curve crosses that normal's hyperplane
  const auto normals = direction_grid(2, static_cast<int>(counts->values.size()));
  for (std::size_t k = 0; k < normals.size(); ++k) {
    const Vec& a = normals[k];
    const double len = 0.04 * counts->values[k];
    out << "<line x1=\"" << num(p.px(1.02 * a[0])) << "\" y1=\"" << num(p.py(1.02 * a[1])) << "\" x2=\""
        << num(p.px((1.02 + len) * a[0])) << "\" y2=\"" << num(p.py((1.02 + len) * a[1]))
        << "\" stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n";
    for (std::size_t i = 0; i < count; ++i) {
      const Vec& q = g[i];
      const Vec& next = g[(i + 1) % count];
      if ((a.dot(q) < 0) == (a.dot(next) < 0)) continue;
      const double rho = 0.45 + 0.55 * static_cast<double>(i) / static_cast<double>(count);
      out << "<circle cx=\"" << num(p.px(rho * q[0])) << "\" cy=\"" << num(p.py(rho * q[1]))
          << "\" r=\"1.5\" fill=\"#c0392b\"/>\n";
    }
  }
}

void spatial_panels(std::ostringstream& out, double y0, const ConditionReport& c) {
  static const int axes[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int k = 0; k < 3; ++k) {
    const Panel p{k * kPanel, y0};
    frame(out, p, c.condition + ": g" + std::to_string(axes[k][0] + 1) + " vs g" + std::to_string(axes[k][1] + 1));
    for (const Vec& q : c.gauss_image)
      out << "<circle cx=\"" << num(p.px(q[axes[k][0]])) << "\" cy=\"" << num(p.py(q[axes[k][1]]))
          << "\" r=\"1\" fill=\"#1f5fa8\" fill-opacity=\"0.5\"/>\n";
  }
}

}  // namespace

double sampled_winding(const std::vector<Vec>& curve) {
  double total = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const Vec& a = curve[i];
    const Vec& b = curve[(i + 1) % curve.size()];
    total += std::atan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1]);
  }
  return total / (2.0 * M_PI);
}

bool has_gauss_images(const RunReport& r) {
  for (const auto& c : r.checks)
    if (!c.gauss_image.empty()) return true;
  return false;
}

std::string render_svg(const RunReport& r, int n) {
  if (n != 2 && n != 3) throw PreconditionError("SVG output needs n = 2 or 3; use csv");
  if (!has_gauss_images(r)) throw PreconditionError("no check in this scenario produced a Gauss image");
  std::vector<const ConditionReport*> shown;
  for (const auto& c : r.checks)
    if (!c.gauss_image.empty()) shown.push_back(&c);
  const double width = n == 2 ? kPanel * static_cast<double>(shown.size()) : 3 * kPanel;
  const double height = 24 + (n == 2 ? kPanel : kPanel * static_cast<double>(shown.size()));
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" font-family=\"sans-serif\">\n";
  out << "<text x=\"6\" y=\"16\" font-size=\"13\">" << escape(r.scenario) << " (" << verdict_name(r.aggregate())
      << ")</text>\n";
  for (std::size_t k = 0; k < shown.size(); ++k) {
    if (n == 2)
      planar_panel(out, Panel{kPanel * static_cast<double>(k), 24}, *shown[k]);
    else
      spatial_panels(out, 24 + kPanel * static_cast<double>(k), *shown[k]);
  }
  out << "</svg>\n";
  return out.str();
}

std::string gauss_image_csv(const RunReport& r) {
  std::ostringstream out;
  out.precision(17);
  int width = 0;
  for (const auto& c : r.checks)
    for (const Vec& q : c.gauss_image) width = std::max(width, static_cast<int>(q.size()));
  out << "scenario,check,condition,sample";
  for (int i = 1; i <= width; ++i) out << ",g" << i;
  out << '\n';
  for (std::size_t k = 0; k < r.checks.size(); ++k)
    for (std::size_t s = 0; s < r.checks[k].gauss_image.size(); ++s) {
      out << r.scenario << ',' << k << ',' << r.checks[k].condition << ',' << s;
      for (Eigen::Index i = 0; i < r.checks[k].gauss_image[s].size(); ++i) out << ',' << r.checks[k].gauss_image[s][i];
      out << '\n';
    }
  return out.str();
}

}  // namespace topocheck
