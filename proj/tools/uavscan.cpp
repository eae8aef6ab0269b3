// Command-line front end: one verb per pipeline stage plus `run` for all of them.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "uavscan/error.hpp"
#include "uavscan/io.hpp"
#include "uavscan/pipeline.hpp"
#include "uavscan/scene.hpp"

using namespace uavscan;
namespace fs = std::filesystem;

namespace {

constexpr int kValidation = 2;
constexpr int kStageFailure = 3;

// Raised by a verb to name the stage that failed.
struct StageError {
  std::string stage;
  Error error;
};

template <typename F>
auto in_stage(const char* stage, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    throw StageError{stage, e};
  }
}

template <typename T>
void override_if(const std::optional<T>& flag, T& field) {
  if (flag) field = *flag;
}

SceneSpec resolve_scene(const std::string& name_or_file) {
  if (auto builtin = builtin_scene(name_or_file)) return *builtin;
  if (fs::exists(name_or_file)) return scene_from_json(read_json(name_or_file));
  std::string names;
  for (const auto& n : builtin_scene_names()) names += " " + n;
  throw Error(ErrorKind::InvalidArgument, "unknown scene '" + name_or_file + "'; builtins:" + names);
}

fs::path sibling(const fs::path& p, const std::string& suffix) {
  fs::path out = p;
  out.replace_extension();
  out += suffix;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV laser-scan inspection pipeline"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON pipeline config; flags override it")->check(CLI::ExistingFile);

  PipelineConfig cfg;
  std::function<void()> action;

  // generate
  auto* gen = app.add_subcommand("generate", "sample a synthetic scene into a cloud");
  std::string gen_scene, gen_out, gen_scene_out;
  std::uint64_t gen_seed = 1;
  std::optional<double> gen_density, gen_noise;
  bool gen_lattice = false;
  gen->add_option("scene", gen_scene, "builtin scene name or scene JSON file")->required();
  gen->add_option("-o,--output", gen_out, "output cloud (.xyz)")->required();
  gen->add_option("--seed", gen_seed);
  gen->add_option("--density", gen_density, "points per m^2");
  gen->add_option("--noise", gen_noise, "noise sigma along the surface normal, meters");
  gen->add_flag("--lattice", gen_lattice, "regular lattice instead of random sampling");
  gen->add_option("--scene-out", gen_scene_out, "also write the scene description as JSON");
  gen->callback([&] {
    action = [&] {
      SceneSpec scene = resolve_scene(gen_scene);
      override_if(gen_density, scene.density);
      override_if(gen_noise, scene.noise_sigma);
      if (gen_lattice) scene.sampling = Sampling::Lattice;
      scene.validate();
      const PointCloud cloud = in_stage("generate", [&] { return generate_scene(scene, gen_seed); });
      write_cloud(gen_out, cloud, "generated " + gen_scene + " seed " + std::to_string(gen_seed));
      if (!gen_scene_out.empty()) write_json(gen_scene_out, scene_to_json(scene));
      std::cout << cloud.size() << " points -> " << gen_out << '\n';
    };
  });

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate a 360 degree yaw scan as a scan log");
  std::string sim_scene, sim_out;
  std::uint64_t sim_seed = 1;
  int sim_scans = 360;
  std::vector<double> sim_station{0, 0, 0}, sim_drift{0, 0, 0};
  double sim_yaw0 = 0.0, sim_noise = 0.0;
  sim->add_option("scene", sim_scene, "builtin scene name or scene JSON file")->required();
  sim->add_option("-o,--output", sim_out, "output log; truth poses and scene JSON are written next to it")->required();
  sim->add_option("--seed", sim_seed);
  sim->add_option("--scans", sim_scans, "scans per full turn")->check(CLI::PositiveNumber);
  sim->add_option("--station", sim_station, "station position x y z")->expected(3);
  sim->add_option("--yaw", sim_yaw0, "station heading, radians");
  sim->add_option("--drift", sim_drift, "station-frame translation per scan x y z")->expected(3);
  sim->add_option("--range-noise", sim_noise, "range noise sigma, meters");
  sim->callback([&] {
    action = [&] {
      const SceneSpec scene = resolve_scene(sim_scene);
      YawScanSpec spec;
      spec.scans = sim_scans;
      spec.station.rotation = rotation_about_z(sim_yaw0);
      spec.station.translation = Point3(sim_station[0], sim_station[1], sim_station[2]);
      spec.drift_per_scan = Eigen::Vector3d(sim_drift[0], sim_drift[1], sim_drift[2]);
      spec.device.range_noise = sim_noise;
      spec.vertical_offset = cfg.ingest.vertical_offset;
      spec.horizontal_offset = cfg.ingest.horizontal_offset;
      const SimulatedLog sim_log = in_stage("simulate", [&] { return simulate_yaw_scan(scene, spec, sim_seed); });
      write_scan_log(fs::path(sim_out), sim_log.log);
      write_json(sibling(sim_out, ".truth.json"), {{"version", kSchemaVersion},
                                                    {"station", to_json(sim_log.station)},
                                                    {"track", pose_track_to_json(sim_log.truth)}});
      write_json(sibling(sim_out, ".scene.json"), scene_to_json(scene));
      std::cout << sim_log.log.vertical.size() << " scans -> " << sim_out << '\n';
    };
  });

  // ingest
  auto* ing = app.add_subcommand("ingest", "turn a scan log into a 3D cloud");
  std::string ing_in, ing_out, ing_poses;
  std::optional<double> ing_max_corr;
  ing->add_option("log", ing_in)->required()->check(CLI::ExistingFile);
  ing->add_option("-o,--output", ing_out, "output cloud (.xyz)")->required();
  ing->add_option("--poses", ing_poses, "write the estimated pose track as JSON");
  ing->add_option("--max-correspondence", ing_max_corr, "ICP correspondence gate, meters");
  ing->callback([&] {
    action = [&] {
      override_if(ing_max_corr, cfg.ingest.icp.max_correspondence_dist);
      cfg.validate();
      const ScanLog log = parse_scan_log(fs::path(ing_in), cfg.parse);
      const IngestResult r = in_stage("ingest", [&] { return ingest_log(log, cfg); });
      write_cloud(ing_out, r.cloud, "ingested from " + fs::path(ing_in).filename().string());
      if (!ing_poses.empty()) {
        write_json(ing_poses, {{"version", kSchemaVersion}, {"source", "log"}, {"track", pose_track_to_json(r.track.poses)}});
      }
      std::cout << r.cloud.size() << " points (" << r.dropped << " readings dropped) -> " << ing_out << '\n';
    };
  });

  // register
  auto* reg = app.add_subcommand("register", "align station clouds listed in a manifest");
  std::string reg_in, reg_out, reg_poses;
  std::optional<double> reg_margin;
  reg->add_option("manifest", reg_in)->required()->check(CLI::ExistingFile);
  reg->add_option("-o,--output", reg_out, "merged cloud (.xyz)")->required();
  reg->add_option("--poses", reg_poses, "write refined station poses as JSON");
  reg->add_option("--overlap-margin", reg_margin, "meters");
  reg->callback([&] {
    action = [&] {
      override_if(reg_margin, cfg.registration.overlap_margin);
      cfg.validate();
      const auto stations = load_stations(reg_in, cfg);
      const Registration r = in_stage("register", [&] { return register_clouds(stations, cfg.registration); });
      write_cloud(reg_out, r.merged, "registered, tag = station index");
      if (!reg_poses.empty()) {
        json poses = json::array();
        for (const auto& p : r.poses) poses.push_back(to_json(p));
        write_json(reg_poses, {{"version", kSchemaVersion}, {"source", "stations"}, {"stations", poses}});
      }
      std::cout << r.merged.size() << " points -> " << reg_out << '\n';
    };
  });

  // filter
  auto* flt = app.add_subcommand("filter", "statistical outlier removal then voxel downsampling");
  std::string flt_in, flt_out;
  std::optional<std::size_t> flt_k;
  std::optional<double> flt_dt, flt_leaf;
  flt->add_option("cloud", flt_in)->required()->check(CLI::ExistingFile);
  flt->add_option("-o,--output", flt_out)->required();
  flt->add_option("--k", flt_k, "neighbors per point");
  flt->add_option("--dt", flt_dt, "keep mean distances within mu +- dt*sigma");
  flt->add_option("--leaf", flt_leaf, "voxel leaf size, meters");
  flt->callback([&] {
    action = [&] {
      override_if(flt_k, cfg.outlier.k_neighbors);
      override_if(flt_dt, cfg.outlier.d_t);
      override_if(flt_leaf, cfg.voxel.leaf_size);
      cfg.validate();
      const PointCloud in = read_cloud(fs::path(flt_in));
      const FilterResult r = in_stage("filter", [&] { return filter_cloud(in, cfg); });
      write_cloud(flt_out, r.cloud, "filtered");
      std::cout << r.input_count << " -> " << r.cloud.size() << " points (" << r.outliers_removed
                << " outliers)" << (r.outlier_filter_skipped ? ", outlier filter skipped" : "") << '\n';
    };
  });

  // segment
  auto* seg = app.add_subcommand("segment", "extract planar surfaces");
  std::string seg_in, seg_out, seg_rem;
  std::optional<double> seg_thr, seg_min_area;
  std::optional<int> seg_iter;
  std::optional<std::size_t> seg_min_inliers;
  std::optional<std::uint64_t> seg_seed;
  seg->add_option("cloud", seg_in)->required()->check(CLI::ExistingFile);
  seg->add_option("-o,--output", seg_out, "surfaces JSON")->required();
  seg->add_option("--remainder", seg_rem, "write points outside accepted surfaces (.xyz)");
  seg->add_option("--threshold", seg_thr, "inlier distance, meters");
  seg->add_option("--iterations", seg_iter);
  seg->add_option("--min-inliers", seg_min_inliers);
  seg->add_option("--min-area", seg_min_area, "m^2");
  seg->add_option("--seed", seg_seed);
  seg->callback([&] {
    action = [&] {
      override_if(seg_thr, cfg.ransac.distance_threshold);
      override_if(seg_iter, cfg.ransac.iterations);
      override_if(seg_min_inliers, cfg.ransac.min_inliers);
      override_if(seg_min_area, cfg.ransac.min_area);
      override_if(seg_seed, cfg.ransac.rng_seed);
      cfg.validate();
      const PointCloud in = read_cloud(fs::path(seg_in));
      const SurfaceExtraction ex =
          in_stage("segment", [&] { return extract_surfaces(in, cfg.ransac, cfg.surface_cluster_eps); });
      write_json(seg_out, surfaces_to_json(ex.surfaces));
      if (!seg_rem.empty()) write_cloud(seg_rem, in.subset(ex.remainder), "points outside accepted surfaces");
      std::cout << ex.surfaces.size() << " surfaces, " << ex.remainder.size() << " remaining points\n";
    };
  });

  // cluster
  auto* clu = app.add_subcommand("cluster", "Euclidean clustering of obstacle points");
  std::string clu_in, clu_out, clu_octree;
  std::optional<double> clu_radius;
  std::optional<std::size_t> clu_min;
  clu->add_option("cloud", clu_in)->required()->check(CLI::ExistingFile);
  clu->add_option("-o,--output", clu_out, "clusters JSON")->required();
  clu->add_option("--radius", clu_radius, "neighbor radius, meters");
  clu->add_option("--min-size", clu_min, "smaller clusters become noise");
  clu->add_option("--octree", clu_octree, "write occupied octree leaf centers (.xyz)");
  clu->callback([&] {
    action = [&] {
      override_if(clu_radius, cfg.cluster.radius);
      override_if(clu_min, cfg.cluster.min_cluster_size);
      cfg.validate();
      const PointCloud in = read_cloud(fs::path(clu_in));
      const Clustering c = in_stage("cluster", [&] { return euclidean_cluster(in, cfg.cluster); });
      write_json(clu_out, clustering_to_json(c, in));
      if (!clu_octree.empty()) {
        PointCloud leaves;
        if (!in.empty()) {
          const Octree tree(in.points, cfg.octree_leaf);
          const auto centers = tree.leaf_centers();
          const auto counts = tree.leaf_point_counts();
          for (std::size_t i = 0; i < centers.size(); ++i) leaves.push_back(centers[i], static_cast<std::int32_t>(counts[i]));
        }
        write_cloud(clu_octree, leaves, "occupied octree leaf centers, tag = point count");
      }
      std::cout << c.clusters.size() << " clusters, " << c.noise.size() << " noise points\n";
    };
  });

  // plan
  auto* pln = app.add_subcommand("plan", "coverage stop points and A* waypoints per surface");
  std::string pln_surfaces, pln_cloud, pln_out, pln_csv;
  std::optional<double> pln_edge, pln_inflate, pln_overlap, pln_fw, pln_fh;
  pln->add_option("surfaces", pln_surfaces, "surfaces JSON")->required()->check(CLI::ExistingFile);
  pln->add_option("--cloud", pln_cloud, "obstacle cloud (.xyz)")->required()->check(CLI::ExistingFile);
  pln->add_option("-o,--output", pln_out, "plan JSON")->required();
  pln->add_option("--waypoints", pln_csv, "write all waypoints as CSV");
  pln->add_option("--edge", pln_edge, "planning voxel edge, meters");
  pln->add_option("--inflate", pln_inflate, "obstacle inflation radius, meters");
  pln->add_option("--overlap", pln_overlap, "photo overlap along a row");
  pln->add_option("--footprint-width", pln_fw, "meters");
  pln->add_option("--footprint-height", pln_fh, "meters");
  int plan_exit = 0;
  pln->callback([&] {
    action = [&] {
      override_if(pln_edge, cfg.planning.voxel_edge);
      override_if(pln_inflate, cfg.planning.inflation_radius);
      override_if(pln_overlap, cfg.planning.overlap);
      override_if(pln_fw, cfg.planning.footprint_width);
      override_if(pln_fh, cfg.planning.footprint_height);
      cfg.validate();
      const auto surfaces = surfaces_from_json(read_json(pln_surfaces));
      const PointCloud cloud = read_cloud(fs::path(pln_cloud));
      const PlanningResult r = in_stage("plan", [&] { return plan_surfaces(surfaces, cloud, cfg); });
      write_json(pln_out, plans_to_json(r.plans));
      if (!pln_csv.empty()) {
        std::ofstream csv(pln_csv, std::ios::binary);
        write_waypoints_csv(csv, concatenated_waypoints(r.plans));
      }
      std::size_t failed = 0;
      for (const auto& sp : r.plans) {
        if (sp.ok()) {
          std::cout << "surface " << sp.surface_index << ": " << sp.plan.stops.size() << " stops, "
                    << sp.plan.waypoints.size() << " waypoints\n";
        } else {
          ++failed;
          std::cerr << "surface " << sp.surface_index << ": " << sp.message << '\n';
        }
      }
      if (!r.plans.empty() && failed == r.plans.size()) {
        std::cerr << "stage plan failed: no surface could be planned\n";
        plan_exit = kStageFailure;
      }
    };
  });

  // run
  auto* run = app.add_subcommand("run", "all stages from a log, cloud or station manifest");
  std::string run_in, run_out;
  std::optional<std::uint64_t> run_seed;
  bool run_no_svg = false;
  run->add_option("input", run_in, ".log, .xyz or station manifest .json")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output-dir", run_out)->required();
  run->add_option("--seed", run_seed, "RANSAC seed");
  run->add_flag("--no-svg", run_no_svg);
  int run_exit = 0;
  run->callback([&] {
    action = [&] {
      override_if(run_seed, cfg.ransac.rng_seed);
      if (run_no_svg) cfg.write_svg = false;
      const PipelineResult r = run_pipeline(run_in, cfg, run_out);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      for (const auto& t : r.timings) std::cout << t.stage << ": " << t.seconds << " s\n";
      if (r.exit_code != ExitCode::Success) {
        std::cerr << "stage " << r.failed_stage << " failed: " << r.message << '\n';
      } else {
        std::cout << r.surfaces.size() << " surfaces, " << r.clusters.clusters.size() << " clusters -> " << run_out
                  << '\n';
      }
      run_exit = static_cast<int>(r.exit_code);
    };
  });

  // edit-boundary
  auto* edit = app.add_subcommand("edit-boundary", "export or re-import a surface boundary for manual editing");
  edit->require_subcommand(1);
  auto* exp = edit->add_subcommand("export", "write one surface boundary to a JSON file");
  std::string exp_surfaces, exp_out;
  std::size_t exp_index = 0;
  exp->add_option("surfaces", exp_surfaces)->required()->check(CLI::ExistingFile);
  exp->add_option("--index", exp_index)->required();
  exp->add_option("-o,--output", exp_out)->required();
  exp->callback([&] {
    action = [&] {
      const auto surfaces = surfaces_from_json(read_json(exp_surfaces));
      write_json(exp_out, export_boundary(surfaces, exp_index));
    };
  });
  auto* imp = edit->add_subcommand("import", "replace a surface boundary with an edited polygon");
  std::string imp_surfaces, imp_boundary, imp_out;
  std::optional<std::size_t> imp_index;
  std::optional<double> imp_thr;
  imp->add_option("surfaces", imp_surfaces)->required()->check(CLI::ExistingFile);
  imp->add_option("--boundary", imp_boundary, "edited boundary JSON")->required()->check(CLI::ExistingFile);
  imp->add_option("--index", imp_index, "defaults to the surface_index stored in the boundary file");
  imp->add_option("--threshold", imp_thr, "max vertex distance from the plane; defaults to the RANSAC threshold");
  imp->add_option("-o,--output", imp_out, "updated surfaces JSON")->required();
  imp->callback([&] {
    action = [&] {
      auto surfaces = surfaces_from_json(read_json(imp_surfaces));
      const json edited = read_json(imp_boundary);
      std::size_t index = edited.value("surface_index", std::size_t{0});
      override_if(imp_index, index);
      if (index >= surfaces.size()) throw Error(ErrorKind::InvalidArgument, "surface index out of range", index);
      const double thr = imp_thr.value_or(cfg.ransac.distance_threshold);
      surfaces[index] = import_boundary(surfaces[index], boundary_from_json(edited), thr);
      write_json(imp_out, surfaces_to_json(surfaces));
      std::cout << "surface " << index << ": area " << surfaces[index].area << " m^2\n";
    };
  });

  // config
  auto* conf = app.add_subcommand("config", "print the effective config as JSON");
  conf->callback([&] { action = [&] { std::cout << config_to_json(cfg).dump(2) << '\n'; }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (action) action();
  } catch (const StageError& e) {
    std::cerr << "stage " << e.stage << " failed: " << e.error.what() << '\n';
    return kStageFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kStageFailure;
  }
  if (plan_exit) return plan_exit;
  return run_exit;
}
