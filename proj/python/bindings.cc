// Copyright 2026 The ReviBranch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "revibranch/bench.h"
#include "revibranch/dqn.h"
#include "revibranch/generators.h"
#include "revibranch/instance_io.h"
#include "revibranch/learned_policy.h"
#include "revibranch/metrics.h"
#include "revibranch/policies.h"
#include "revibranch/rewards.h"

namespace py = pybind11;
namespace rb = revibranch;

namespace {

py::dict report_dict(const rb::SolveReport& r) {
  py::dict d;
  d["instance"] = r.instance_name;
  d["policy"] = r.policy_name;
  d["seed"] = r.seed;
  d["status"] = rb::to_string(r.status);
  d["objective"] = r.objective;
  d["bound"] = r.best_bound;
  d["nodes"] = r.node_count;
  d["lp_iterations"] = r.lp_iterations;
  d["decisions"] = r.decisions.size();
  d["solution"] = r.solution;
  d["wall_time"] = r.wall_time_seconds;
  return d;
}

py::dict record_dict(const rb::RunRecord& r) {
  py::dict d;
  d["family"] = r.family;
  d["tier"] = r.tier;
  d["instance"] = r.instance;
  d["instance_seed"] = r.instance_seed;
  d["policy"] = r.policy;
  d["seed"] = r.seed;
  d["status"] = rb::to_string(r.status);
  d["nodes"] = r.nodes;
  d["lp_iterations"] = r.lp_iterations;
  d["objective"] = r.objective;
  d["wall_time"] = r.wall_time;
  return d;
}

rb::TrainConfig config_from(const py::dict& options) {
  rb::TrainConfig config;
  for (const auto& [key, value] : options) {
    rb::set_train_option(config, py::str(key), py::str(value));
  }
  config.validate();
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Branch-and-bound with learned variable selection";

  py::register_exception<rb::MissingCheckpointError>(m, "MissingCheckpointError",
                                                      PyExc_FileNotFoundError);
  py::register_exception<rb::CsvParseError>(m, "CsvParseError", PyExc_ValueError);
  py::register_exception<rb::ParseError>(m, "ParseError", PyExc_ValueError);

  py::class_<rb::MilpInstance>(m, "Instance")
      .def_readonly("name", &rb::MilpInstance::name)
      .def_property_readonly("num_variables",
                             [](const rb::MilpInstance& i) { return i.num_variables(); })
      .def_property_readonly("num_constraints",
                             [](const rb::MilpInstance& i) { return i.num_constraints(); })
      .def_readonly("integer_set", &rb::MilpInstance::integer_set)
      .def("to_text", [](const rb::MilpInstance& i) { return rb::instance_to_string(i); })
      .def_static("from_text", &rb::instance_from_string, py::arg("text"))
      .def("__repr__", [](const rb::MilpInstance& i) {
        return "<Instance " + i.name + " " + std::to_string(i.num_constraints()) + "x" +
               std::to_string(i.num_variables()) + ">";
      });

  m.def(
      "generate",
      [](const std::string& family, int size1, int size2, double density, uint64_t seed) {
        return rb::generate_instance({rb::parse_family(family), size1, size2, density}, seed);
      },
      py::arg("family"), py::arg("size1"), py::arg("size2"), py::arg("density") = 0.05,
      py::arg("seed") = 0, "Generate a setcover, cauction or facility instance.");

  m.def(
      "tier_spec",
      [](const std::string& family, const std::string& tier, bool full_scale, double factor) {
        const rb::InstanceSpec s =
            rb::tier_spec(rb::parse_family(family), rb::parse_tier(tier), full_scale, factor);
        return py::make_tuple(s.size1, s.size2, s.density);
      },
      py::arg("family"), py::arg("tier"), py::arg("full_scale") = false,
      py::arg("factor") = 1.0, "(size1, size2, density) of a tier preset.");

  m.def(
      "solve",
      [](const rb::MilpInstance& instance, const std::string& policy,
         const std::string& checkpoint, uint64_t seed, int64_t node_limit) {
        std::unique_ptr<rb::BranchingPolicy> p;
        if (!checkpoint.empty()) {
          p = rb::learned_policy(policy, std::filesystem::path(checkpoint)).make();
        } else {
          p = rb::make_classic_policy(policy);
        }
        rb::BnbConfig config;
        config.seed = seed;
        config.node_limit = node_limit;
        rb::SolveReport report;
        {
          py::gil_scoped_release release;
          report = rb::solve(instance, *p, config);
        }
        return report_dict(report);
      },
      py::arg("instance"), py::arg("policy") = "pb", py::arg("checkpoint") = "",
      py::arg("seed") = 0, py::arg("node_limit") = 100000,
      "Solve with a classic policy, or with a learned policy file via checkpoint.");

  m.def(
      "iwrr",
      [](const std::vector<double>& base) {
        const rb::RedistributedRewards r = rb::iwrr(base);
        py::dict d;
        d["r_terminal"] = r.r_terminal;
        d["weights"] = r.weights;
        d["dense"] = r.dense;
        d["final"] = r.final_rewards;
        return d;
      },
      py::arg("base_rewards"));

  m.def("geometric_mean", [](const std::vector<double>& v) { return rb::geometric_mean(v); },
        py::arg("values"));
  m.def("wilcoxon_p",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          return rb::wilcoxon_signed_rank_p(a, b);
        },
        py::arg("a"), py::arg("b"));

  m.def(
      "benchmark",
      [](const std::string& family, const std::string& tier, int n,
         const std::vector<std::string>& policies, int seeds, uint64_t suite_seed,
         int64_t node_limit, int threads) {
        rb::BenchmarkSuite suite =
            rb::make_suite(rb::parse_family(family), rb::parse_tier(tier), n, suite_seed);
        suite.seeds.clear();
        for (int k = 0; k < seeds; ++k) suite.seeds.push_back(k);
        suite.node_limit = node_limit;
        std::vector<rb::PolicySpec> specs;
        for (const std::string& p : policies) specs.push_back(rb::parse_policy(p));
        std::vector<rb::RunRecord> records;
        {
          py::gil_scoped_release release;
          records = rb::run_benchmark(suite, specs, {threads});
        }
        py::list rows;
        for (const rb::RunRecord& r : records) rows.append(record_dict(r));
        py::dict summary;
        for (const rb::PolicySummary& s : rb::summarize(records)) {
          py::dict d;
          d["instances"] = s.instances;
          d["runs"] = s.runs;
          d["geomean_nodes"] = s.geomean_nodes;
          d["nodes_std_pct"] = s.nodes_std_pct;
          d["geomean_lp_iterations"] = s.geomean_lp_iterations;
          d["lp_std_pct"] = s.lp_std_pct;
          d["limit_hits"] = s.limit_hits;
          summary[py::str(s.policy)] = d;
        }
        return py::make_tuple(rows, summary);
      },
      py::arg("family") = "setcover", py::arg("tier") = "easy", py::arg("n") = 10,
      py::arg("policies") = std::vector<std::string>{"random", "pb", "sb"},
      py::arg("seeds") = 5, py::arg("suite_seed") = 0, py::arg("node_limit") = 100000,
      py::arg("threads") = 0, "Returns (per-run rows, per-policy summary).");

  m.def("train_option_keys", &rb::train_option_keys);
  m.def(
      "train",
      [](const py::dict& options, const std::filesystem::path& out_dir) {
        const rb::TrainConfig config = config_from(options);
        rb::Trainer trainer(config);
        {
          py::gil_scoped_release release;
          trainer.run();
          trainer.write_outputs(out_dir);
        }
        py::dict d;
        d["epochs"] = trainer.epoch();
        d["train_steps"] = trainer.train_steps();
        d["best_eval_nodes"] = trainer.best_eval_nodes()
                                   ? py::object(py::float_(*trainer.best_eval_nodes()))
                                   : py::object(py::none());
        d["policy"] = (out_dir / "best.policy").string();
        return d;
      },
      py::arg("options"), py::arg("out_dir"),
      "Train with config keys as a dict (values stringified); writes best.policy.");

  m.def("emit_plot_data",
        [](const std::filesystem::path& csv, const std::filesystem::path& out) {
          std::vector<std::string> files;
          for (const auto& f : rb::emit_plot_data(csv, out)) files.push_back(f.string());
          return files;
        },
        py::arg("csv"), py::arg("out_dir"));
}
