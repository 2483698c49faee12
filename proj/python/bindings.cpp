#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "klearn/harness.hpp"

namespace py = pybind11;
using namespace klearn;

namespace {

py::dict row_dict(const LogRow& r) {
  py::dict d;
  d["episode"] = r.episode;
  d["cum_regret"] = r.cum_regret;
  d["cum_bound"] = r.cum_bound ? py::cast(*r.cum_bound) : py::none();
  d["tau"] = r.tau ? py::cast(*r.tau) : py::none();
  d["wall_ms"] = r.wall_ms ? py::cast(*r.wall_ms) : py::none();
  return d;
}

std::vector<RunRecord> run_from_json(const std::string& text) {
  const ExperimentConfig cfg = config_from_json(Json::parse(text));
  py::gil_scoped_release release;
  return run_experiment(cfg);
}

}  // namespace

PYBIND11_MODULE(_klearn, m) {
  m.doc() = "K-learning core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<Layout>(m, "Layout")
      .def(py::init<std::vector<std::size_t>, std::size_t>(), py::arg("layer_sizes"),
           py::arg("actions"))
      .def_property_readonly("horizon", &Layout::horizon)
      .def_property_readonly("actions", &Layout::actions)
      .def_property_readonly("state_count", &Layout::state_count)
      .def_property_readonly("layer_sizes", &Layout::layer_sizes);

  py::class_<LayeredMdp>(m, "LayeredMdp")
      .def_static("from_json", [](const std::string& s) { return mdp_from_json(Json::parse(s)); })
      .def("to_json", [](const LayeredMdp& mdp) { return mdp_to_json(mdp).dump(); })
      .def_property_readonly("layout", &LayeredMdp::layout)
      .def_property_readonly("mean_rewards", &LayeredMdp::mean_rewards)
      .def_property_readonly("transition", &LayeredMdp::transition);

  py::class_<Policy>(m, "Policy")
      .def_readonly("actions", &Policy::actions)
      .def_readonly("probs", &Policy::probs);

  py::class_<ValueTables>(m, "ValueTables")
      .def_readonly("q", &ValueTables::q)
      .def_readonly("v", &ValueTables::v);

  m.def("solve_optimal", &solve_optimal);
  m.def("performance", &performance);
  m.def("build_deepsea", [](std::size_t size, double slip, double penalty, double noise) {
    return build_deepsea({size, slip, penalty, noise});
  }, py::arg("size"), py::arg("slip") = 0.05, py::arg("right_penalty") = 0.01,
        py::arg("noise_std") = 1.0);

  py::class_<BeliefState>(m, "BeliefState")
      .def_static("from_prior_json",
                  [](const std::string& s) { return BeliefState(prior_from_json(Json::parse(s))); })
      .def_static("bandit",
                  [](std::vector<double> mean, std::vector<double> var, double noise) {
                    return BeliefState(MdpPrior::bandit(std::move(mean), std::move(var), noise));
                  })
      .def_static("from_json",
                  [](const std::string& s) { return belief_from_json(Json::parse(s)); })
      .def("to_json", [](const BeliefState& b) { return belief_to_json(b).dump(); })
      .def_property_readonly("episode", &BeliefState::episode)
      .def("advance_episode", &BeliefState::advance_episode)
      .def("update_reward", &BeliefState::update_reward)
      .def("update_transition", &BeliefState::update_transition)
      .def("posterior_mean", &BeliefState::posterior_mean)
      .def("posterior_var", &BeliefState::posterior_var)
      .def("inflated_curvature", &BeliefState::inflated_curvature);

  py::class_<KSolution>(m, "KSolution")
      .def_readonly("k", &KSolution::k)
      .def_property_readonly("tau", [](const KSolution& s) { return s.tau.value(); })
      .def_readonly("policy", &KSolution::policy)
      .def_readonly("objective", &KSolution::objective)
      .def_property_readonly("bound", [](const KSolution& s) { return s.certificate.phi; })
      .def_readonly("boundary_optimum", &KSolution::boundary_optimum);

  m.def("solve_k", [](const BeliefState& b, double tau) {
    return solve_k(PosteriorSummary(b), Temperature(tau));
  });
  m.def("optimize_tau", [](const BeliefState& b) { return optimize_tau(b); });
  m.def("objective", [](const BeliefState& b, double tau) { return objective(b, Temperature(tau)); });
  m.def("schedule_tau", [](std::size_t t, double sigma, std::size_t L, std::size_t A,
                           std::size_t S) { return schedule_tau(t, sigma, L, A, S).value(); });
  m.def("bandit_schedule_tau", [](std::size_t t, double sigma, std::size_t A) {
    return bandit_schedule_tau(t, sigma, A).value();
  });

  m.def("validate_config", [](const std::string& s) {
    config_from_json(Json::parse(s));
  });
  m.def("run_experiment", [](const std::string& config_text) {
    py::list out;
    for (const auto& r : run_from_json(config_text)) {
      py::list rows;
      for (const auto& row : r.rows) rows.append(row_dict(row));
      py::dict d;
      d["agent"] = r.agent;
      d["run"] = r.run;
      d["rows"] = rows;
      out.append(d);
    }
    return out;
  }, py::arg("config_json"));
  m.def("run_experiment_csv", [](const std::string& config_text, const std::string& path) {
    emit_csv(run_from_json(config_text), path);
  });
  m.def("report", [](const std::string& runs_csv, const std::string& summary_csv) {
    const Summary s = aggregate(read_runs_csv(runs_csv));
    emit_summary_csv(s, summary_csv);
    return format_summary_table(s);
  });
}
