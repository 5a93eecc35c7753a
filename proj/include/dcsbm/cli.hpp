#pragma once

// Command-line front end. run() parses argv, calls the library and returns
// the exit code together with the JSON payload destined for stdout:
//   0  success / positive verdict
//   1  negative verdict (NotEquivalent, NonIdentifiable, ...)
//   2  usage, parse or validation error: {"error": ..., "detail": ...}

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dcsbm/counterexamples.hpp"
#include "dcsbm/equivalence.hpp"
#include "dcsbm/error.hpp"
#include "dcsbm/io.hpp"
#include "dcsbm/model.hpp"
#include "dcsbm/partitions.hpp"
#include "dcsbm/recovery.hpp"
#include "dcsbm/sampler.hpp"

namespace dcsbm::cli {

using nlohmann::json;

struct CommandOutcome {
  int exit_code = 0;
  json payload;
};

namespace detail {

inline CommandOutcome error(std::string_view kind, const std::string& detail) {
  return {2, {{"error", std::string(kind)}, {"detail", detail}}};
}

inline std::string kind_name(MatrixKind kind) {
  return kind == MatrixKind::kFull ? "full" : "offdiag";
}

inline Matrix read_symmetric(const std::string& path) {
  Matrix m = io::read_csv(path);
  if (!is_symmetric(m)) throw Error(ErrorCode::kInvalidArgument, path + " is not symmetric");
  return m;
}

inline ExpectedMatrix read_offdiag(const std::string& path) {
  Matrix m = read_symmetric(path);
  if (m.diagonal().cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorCode::kInvalidArgument, path + " has a nonzero diagonal");
  }
  return {std::move(m), MatrixKind::kDiagonalDeleted};
}

inline ParameterSystem read_system(const std::string& path) {
  return io::system_from_json(io::read_json_file(path));
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kParseError, "cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
}

inline std::string sample_filename(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "sample_%06d.csv", index);
  return buf;
}

}  // namespace detail

inline CommandOutcome run(int argc, const char* const* argv) {
  CLI::App app{"Identifiability toolkit for degree-corrected stochastic block models", "dcsbm"};
  app.require_subcommand(1);

  std::string system_path, matrix_path, out_path, a_path, b_path, from, dist = "bernoulli",
                                                                 out_dir, in_dir;
  bool offdiag = false;
  bool construct = false;
  int k = 0;
  int example = 0;
  int community = 0;
  int count = 1;
  int max_iter = kDefaultMaxIter;
  double tol = -1.0;
  double scale = 0.0;
  double conv_tol = kDefaultConvTol;
  std::uint64_t seed = 0;

  auto* build = app.add_subcommand("build", "Expected matrix of a parameter system");
  build->add_option("--system", system_path, "ParameterSystem JSON")->required();
  build->add_option("--out", out_path, "Output CSV")->required();
  build->add_flag("--offdiag", offdiag, "Zero the diagonal");

  auto* project = app.add_subcommand("project", "Zero the diagonal of a matrix");
  project->add_option("--matrix", matrix_path)->required();
  project->add_option("--out", out_path)->required();

  auto* recover = app.add_subcommand("recover", "Recover parameters from an expected matrix");
  recover->add_option("--matrix", matrix_path)->required();
  recover->add_option("--from", from)->required()->check(CLI::IsMember({"full", "offdiag"}));
  recover->add_option("--k", k, "Community count (full matrices)");
  recover->add_option("--tol", tol);

  auto* partition = app.add_subcommand("partition", "Community partition of a diagonal-deleted matrix");
  partition->add_option("--matrix", matrix_path)->required();
  partition->add_option("--tol", tol);

  auto* equiv = app.add_subcommand("equiv", "Gauge equivalence of two systems");
  equiv->add_option("--a", a_path)->required();
  equiv->add_option("--b", b_path)->required();
  equiv->add_option("--tol", tol);

  auto* same = app.add_subcommand("same-offdiag", "Whether two systems share every off-diagonal mean");
  same->add_option("--a", a_path)->required();
  same->add_option("--b", b_path)->required();
  same->add_option("--tol", tol);

  auto* canon = app.add_subcommand("canon", "Canonical gauge representative");
  canon->add_option("--system", system_path)->required();

  auto* counter = app.add_subcommand("counterexample", "Built-in or constructed non-identifiable pairs");
  auto* example_opt = counter->add_option("--example", example)->check(CLI::Range(1, 3));
  auto* construct_opt = counter->add_flag("--construct", construct);
  counter->add_option("--system", system_path);
  counter->add_option("--community", community, "1-based community index");
  counter->add_option("--scale", scale);
  counter->add_option("--out-dir", out_dir, "Write system1.json and system2.json here");
  example_opt->excludes(construct_opt);

  auto* complete = app.add_subcommand("complete", "Rank-K completion of the diagonal");
  complete->add_option("--matrix", matrix_path)->required();
  complete->add_option("--k", k)->required();
  complete->add_option("--max-iter", max_iter);
  complete->add_option("--conv-tol", conv_tol);
  complete->add_option("--out", out_path, "Write the completed matrix as CSV");

  auto* sample = app.add_subcommand("sample", "Draw adjacency matrices");
  sample->add_option("--system", system_path)->required();
  sample->add_option("--dist", dist)->check(CLI::IsMember({"bernoulli", "poisson", "exact"}));
  sample->add_option("--count", count)->required();
  sample->add_option("--seed", seed)->required();
  sample->add_option("--out-dir", out_dir)->required();

  auto* mean = app.add_subcommand("mean", "Empirical mean of sample_*.csv files");
  mean->add_option("--in-dir", in_dir)->required();
  mean->add_option("--out", out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    return {0, {{"help", app.help()}}};
  } catch (const CLI::ParseError& e) {
    return detail::error("UsageError", e.what());
  }

  const auto tol_or = [&](double fallback) { return tol < 0.0 ? fallback : tol; };

  try {
    if (build->parsed()) {
      const auto sys = detail::read_system(system_path);
      auto delta = expected_adjacency(sys);
      if (offdiag) delta = offdiag_project(delta);
      io::write_csv(out_path, delta.m);
      return {0, {{"kind", detail::kind_name(delta.kind)}, {"n", delta.n()}, {"out", out_path}}};
    }

    if (project->parsed()) {
      const auto pd = offdiag_project({detail::read_symmetric(matrix_path), MatrixKind::kFull});
      io::write_csv(out_path, pd.m);
      return {0, {{"kind", detail::kind_name(pd.kind)}, {"n", pd.n()}, {"out", out_path}}};
    }

    if (recover->parsed()) {
      if (from == "full") {
        if (k < 1) return detail::error("UsageError", "--from full requires --k");
        const ExpectedMatrix delta{detail::read_symmetric(matrix_path), MatrixKind::kFull};
        return {0, io::to_json(spectral_recover(delta, k, tol_or(kDefaultPartitionTol)))};
      }
      const auto pd = detail::read_offdiag(matrix_path);
      try {
        return {0, io::to_json(offdiag_recover(pd, tol_or(kDefaultPartitionTol)))};
      } catch (const NonIdentifiableError& e) {
        json z = json::array();
        for (int label : e.assignment().labels) z.push_back(label + 1);
        json undetermined = json::array();
        for (int i : e.undetermined_nodes()) undetermined.push_back(i + 1);
        return {1,
                {{"verdict", "NonIdentifiable"},
                 {"detail", e.detail()},
                 {"z", std::move(z)},
                 {"witness_counts", e.witness_counts()},
                 {"undetermined_nodes", std::move(undetermined)}}};
      }
    }

    if (partition->parsed()) {
      const auto pd = detail::read_offdiag(matrix_path);
      return {0, io::to_json(offdiag_partition(pd, tol_or(kDefaultPartitionTol)))};
    }

    if (equiv->parsed()) {
      const auto result = equivalent(detail::read_system(a_path), detail::read_system(b_path),
                                     tol_or(kDefaultEquivalenceTol));
      if (result.equivalent) {
        return {0, {{"equivalent", true}, {"witness", io::to_json(*result.witness)}}};
      }
      return {1, {{"equivalent", false}, {"reason", std::string(to_string(*result.reason))}}};
    }

    if (same->parsed()) {
      const auto s1 = detail::read_system(a_path);
      const auto s2 = detail::read_system(b_path);
      const bool verdict = same_model_offdiag(s1, s2, tol_or(kDefaultEquivalenceTol));
      return {verdict ? 0 : 1, {{"same_offdiag", verdict}}};
    }

    if (canon->parsed()) {
      const auto form = canonicalize(detail::read_system(system_path));
      return {0, {{"system", io::to_json(form.system)}, {"transform", io::to_json(form.transform)}}};
    }

    if (counter->parsed()) {
      CounterexamplePair pair;
      if (construct) {
        if (system_path.empty() || community < 1 || scale == 0.0) {
          return detail::error("UsageError", "--construct needs --system, --community and --scale");
        }
        pair = construct_size2_counterexample(detail::read_system(system_path), community - 1, scale);
      } else if (example != 0) {
        pair = example_fixture(example);
      } else {
        return detail::error("UsageError", "give --example 1|2|3 or --construct");
      }
      const auto verification = verify_counterexample(pair);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        detail::write_json(std::filesystem::path(out_dir) / "system1.json", io::to_json(pair.sys1));
        detail::write_json(std::filesystem::path(out_dir) / "system2.json", io::to_json(pair.sys2));
      }
      json payload = io::to_json(pair);
      payload["verification"] = io::to_json(verification);
      return {verification.passed() ? 0 : 1, std::move(payload)};
    }

    if (complete->parsed()) {
      const auto pd = detail::read_offdiag(matrix_path);
      const auto result = lowrank_complete(pd, k, max_iter, conv_tol);
      if (!out_path.empty()) io::write_csv(out_path, result.matrix.m);
      json diagonal = json::array();
      for (Eigen::Index i = 0; i < result.matrix.m.rows(); ++i) diagonal.push_back(result.matrix.m(i, i));
      return {0,
              {{"iterations", result.iterations},
               {"converged", result.converged},
               {"diagonal", std::move(diagonal)},
               {"residual", completion_residual(pd, result.matrix.m, k)}}};
    }

    if (sample->parsed()) {
      if (count < 1) return detail::error("UsageError", "--count must be at least 1");
      const auto sys = detail::read_system(system_path);
      const Distribution distribution = dist == "poisson" ? Distribution::kPoisson
                                        : dist == "exact" ? Distribution::kExactWeight
                                                          : Distribution::kBernoulli;
      AdjacencySampler sampler(sys, distribution, seed);
      std::filesystem::create_directories(out_dir);
      for (int t = 0; t < count; ++t) {
        io::write_csv((std::filesystem::path(out_dir) / detail::sample_filename(t)).string(),
                      sampler.next());
      }
      const json config = {{"distribution", dist},
                           {"seed", seed},
                           {"count", count},
                           {"system", system_path},
                           {"generator", "xoshiro256**"}};
      detail::write_json(std::filesystem::path(out_dir) / "config.json", config);
      return {0, config};
    }

    if (mean->parsed()) {
      std::vector<std::filesystem::path> files;
      if (std::filesystem::is_directory(in_dir)) {
        for (const auto& entry : std::filesystem::directory_iterator(in_dir)) {
          const auto name = entry.path().filename().string();
          if (name.rfind("sample_", 0) == 0 && entry.path().extension() == ".csv") {
            files.push_back(entry.path());
          }
        }
      }
      std::sort(files.begin(), files.end());
      std::vector<Matrix> samples;
      samples.reserve(files.size());
      for (const auto& f : files) samples.push_back(io::read_csv(f.string()));
      const auto avg = empirical_mean(samples);
      io::write_csv(out_path, avg.m);
      return {0, {{"kind", detail::kind_name(avg.kind)}, {"count", samples.size()}, {"out", out_path}}};
    }
  } catch (const Error& e) {
    return detail::error(to_string(e.code()), e.detail());
  } catch (const std::filesystem::filesystem_error& e) {
    return detail::error("IoError", e.what());
  }
  return detail::error("UsageError", "no subcommand");
}

inline CommandOutcome run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("dcsbm");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace dcsbm::cli
