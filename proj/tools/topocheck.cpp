#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "topocheck/geometry.hpp"
#include "topocheck/homology.hpp"
#include "topocheck/render.hpp"
#include "topocheck/scenario.hpp"

namespace fs = std::filesystem;
using namespace topocheck;

namespace {

constexpr int kExitUsage = 2;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << text;
}

void summarize(const RunReport& r) {
  for (const auto& c : r.checks) {
    std::cerr << "  " << verdict_name(c.verdict) << "  " << c.condition << "  expected " << c.expected
              << (c.relation == Relation::AtLeast ? " (at least)" : "") << ", observed " << c.observed;
    if (!c.note.empty()) std::cerr << "  [" << c.note << "]";
    std::cerr << '\n';
  }
  std::cerr << r.scenario << ": " << verdict_name(r.aggregate()) << '\n';
}

/// Writes the requested format; the JSON report always goes to --out when given.
void emit(const RunReport& r, int n, const std::string& format, const std::string& out_dir) {
  const std::string json = to_json(r).dump(2) + "\n";
  const bool plottable = (n == 2 || n == 3) && has_gauss_images(r);
  if (out_dir.empty()) {
    if (format == "json") {
      std::cout << json;
    } else if (format == "csv") {
      std::cout << checks_csv(r);
    } else if (plottable) {
      std::cout << render_svg(r, n);
    } else {
      std::cerr << "no SVG: " << (has_gauss_images(r) ? "plots need n = 2 or 3" : "no geometric checks")
                << "; writing CSV\n";
      std::cout << checks_csv(r);
    }
    return;
  }
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_file(dir / "report.json", json);
  if (format == "json") return;
  write_file(dir / "checks.csv", checks_csv(r));
  write_file(dir / "evidence.csv", evidence_csv(r));
  if (has_gauss_images(r)) write_file(dir / "gauss_images.csv", gauss_image_csv(r));
  if (format == "svg") {
    if (plottable)
      write_file(dir / "gauss.svg", render_svg(r, n));
    else
      std::cerr << "no SVG: " << (has_gauss_images(r) ? "plots need n = 2 or 3" : "no geometric checks")
                << "; tables written\n";
  }
}

SimplicialMesh named_mesh(const std::string& kind, int n, int refinement, double period) {
  if (kind == "sphere") return build_sphere_mesh(n, Vec::Zero(n), 1.0, refinement);
  if (kind == "klein-bottle") return klein_bottle_mesh(12 << refinement, 8 << refinement);
  if (kind == "projective-plane") return projective_plane_mesh();
  if (kind == "flat-torus") return flat_torus_mesh(period, 6 << refinement);
  throw ValidationError("unknown mesh '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"topocheck: topological checks for vector fields and control systems"};
  app.set_version_flag("--version", std::string(TOPOCHECK_VERSION));
  bool list = false;
  app.add_flag("--list-scenarios", list, "List built-in scenarios and exit");

  auto* analyze = app.add_subcommand("analyze", "Run a built-in scenario or a scenario file");
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format = "json";
  int refinement = 0;
  analyze->add_option("scenario", scenario, "Built-in name or path to a JSON scenario")->required();
  analyze->add_option("--seed", seed, "Override the scenario seed");
  analyze->add_option("--out", out_dir, "Directory for report.json and tables/plots");
  analyze->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv", "svg"}));
  analyze->add_option("--refinement", refinement, "Extra refinement levels for built meshes")
      ->check(CLI::Range(0, 4));

  auto* show = app.add_subcommand("show", "Print a built-in scenario as a scenario file");
  std::string show_name;
  show->add_option("scenario", show_name)->required();

  auto* mesh = app.add_subcommand("mesh", "Write a built-in mesh in the text mesh format");
  std::string mesh_kind;
  int mesh_n = 3, mesh_ref = 0;
  double period = 2.0 * M_PI;
  mesh->add_option("kind", mesh_kind)->required()->check(
      CLI::IsMember({"sphere", "klein-bottle", "projective-plane", "flat-torus"}));
  mesh->add_option("--n", mesh_n, "Ambient dimension for spheres")->check(CLI::Range(2, 8));
  mesh->add_option("--refinement", mesh_ref)->check(CLI::Range(0, 6));
  mesh->add_option("--period", period);

  auto* homology = app.add_subcommand("homology", "Integral homology of a mesh file");
  std::string mesh_path;
  homology->add_option("mesh", mesh_path, "Mesh file ('-' for stdin)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (list) {
      for (const auto& name : builtin_scenario_names()) std::cout << name << '\n';
      return 0;
    }
    if (*analyze) {
      const Scenario s = resolve_scenario(scenario);
      RunOptions opts;
      opts.seed = seed;
      opts.refinement = refinement;
      const RunReport r = run_scenario(s, opts);
      emit(r, s.n, format, out_dir);
      summarize(r);
      return exit_code(r);
    }
    if (*show) {
      std::cout << scenario_to_json(builtin_scenario(show_name)).dump(2) << '\n';
      return 0;
    }
    if (*mesh) {
      write_mesh(std::cout, named_mesh(mesh_kind, mesh_n, mesh_ref, period));
      return 0;
    }
    if (*homology) {
      SimplicialMesh m;
      if (mesh_path == "-") {
        m = read_mesh(std::cin);
      } else {
        std::ifstream in(mesh_path);
        if (!in) throw ValidationError("cannot open mesh '" + mesh_path + "'");
        m = read_mesh(in);
      }
      Json groups = Json::array();
      for (const auto& g : homology_groups(chain_complex_of(m))) groups.push_back(to_json(g));
      std::cout << Json{{"euler_characteristic", euler_characteristic(m)}, {"homology", groups}}.dump(2) << '\n';
      return 0;
    }
    std::cerr << app.help();
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}
