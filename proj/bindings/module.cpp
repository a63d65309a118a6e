#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ncbm/behavior.hpp"
#include "ncbm/correlation.hpp"
#include "ncbm/estimation.hpp"
#include "ncbm/scenarios.hpp"
#include "ncbm/smp.hpp"
#include "ncbm/version.hpp"

namespace py = pybind11;
using namespace ncbm;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Correlated node behavior model: semi-Markov survivability toolkit";
  m.attr("__version__") = kVersion;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<DegenerateRowError>(m, "DegenerateRowError", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<InfeasibleSweepError>(m, "InfeasibleSweepError", PyExc_ValueError);
  py::register_exception<ZeroDenominatorError>(m, "ZeroDenominatorError", PyExc_RuntimeError);

  py::enum_<BehaviorState>(m, "BehaviorState")
      .value("W", BehaviorState::Forward)
      .value("D", BehaviorState::Drop)
      .value("I", BehaviorState::Inject)
      .value("L", BehaviorState::Loss);

  py::enum_<ClusterState>(m, "ClusterState")
      .value("S0", ClusterState::S0)
      .value("S1", ClusterState::S1)
      .value("S2", ClusterState::S2)
      .value("S3", ClusterState::S3);

  py::enum_<SojournFamily>(m, "SojournFamily")
      .value("Exponential", SojournFamily::Exponential)
      .value("Deterministic", SojournFamily::Deterministic);

  py::enum_<FoldNormalization>(m, "FoldNormalization")
      .value("PerStep", FoldNormalization::PerStep)
      .value("Deferred", FoldNormalization::Deferred);

  py::enum_<Scenario>(m, "Scenario")
      .value("Forwarding", Scenario::Forwarding)
      .value("Dropping", Scenario::Dropping)
      .value("Injection", Scenario::Injection)
      .value("Loss", Scenario::Loss);

  py::enum_<SurvivabilityMetric>(m, "SurvivabilityMetric")
      .value("ClusterChain", SurvivabilityMetric::ClusterChain)
      .value("IndependenceProduct", SurvivabilityMetric::IndependenceProduct)
      .value("Both", SurvivabilityMetric::Both);

  py::class_<BehaviorParams>(m, "BehaviorParams")
      .def(py::init<double, double, double, double, double, double>(), py::arg("a"), py::arg("b"),
           py::arg("c"), py::arg("d"), py::arg("e"), py::arg("eta") = 10.0)
      .def_readonly("a", &BehaviorParams::a)
      .def_readonly("b", &BehaviorParams::b)
      .def_readonly("c", &BehaviorParams::c)
      .def_readonly("d", &BehaviorParams::d)
      .def_readonly("e", &BehaviorParams::e)
      .def_readonly("eta", &BehaviorParams::eta)
      .def("__repr__", [](const BehaviorParams& p) {
        return "BehaviorParams(a=" + std::to_string(p.a) + ", b=" + std::to_string(p.b) +
               ", c=" + std::to_string(p.c) + ", d=" + std::to_string(p.d) +
               ", e=" + std::to_string(p.e) + ", eta=" + std::to_string(p.eta) + ")";
      });

  py::class_<EmbeddedTpm>(m, "EmbeddedTpm")
      .def_readonly("p", &EmbeddedTpm::p)
      .def("at", &EmbeddedTpm::at, py::arg("from_state"), py::arg("to_state"));

  py::class_<StatusThresholds>(m, "StatusThresholds")
      .def(py::init<double, double, double>(), py::arg("drop") = 0.3, py::arg("forward") = 0.5,
           py::arg("inject") = 0.3)
      .def_readonly("drop", &StatusThresholds::drop)
      .def_readonly("forward", &StatusThresholds::forward)
      .def_readonly("inject", &StatusThresholds::inject);

  py::class_<ObservedLevels>(m, "ObservedLevels")
      .def(py::init<double, double, double, double, double>(), py::arg("a"), py::arg("b"),
           py::arg("c"), py::arg("d"), py::arg("e"))
      .def_readonly("a", &ObservedLevels::a)
      .def_readonly("b", &ObservedLevels::b)
      .def_readonly("c", &ObservedLevels::c)
      .def_readonly("d", &ObservedLevels::d)
      .def_readonly("e", &ObservedLevels::e);

  py::class_<SojournSpec>(m, "SojournSpec")
      .def_static("uniform", &SojournSpec::uniform, py::arg("mean"),
                  py::arg("family") = SojournFamily::Exponential)
      .def_static("per_state", &SojournSpec::per_state, py::arg("state_means"),
                  py::arg("family") = SojournFamily::Exponential)
      .def_readonly("mean", &SojournSpec::mean)
      .def_readonly("family", &SojournSpec::family);

  py::class_<SteadyState>(m, "SteadyState")
      .def_readonly("pi", &SteadyState::pi)
      .def_readonly("mean_sojourn", &SteadyState::mean_sojourn)
      .def_readonly("limiting", &SteadyState::limiting);

  py::class_<Trajectory::Entry>(m, "TrajectoryEntry")
      .def_readonly("state", &Trajectory::Entry::state)
      .def_readonly("entry_time", &Trajectory::Entry::entry_time);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("entries", &Trajectory::entries)
      .def_readonly("horizon", &Trajectory::horizon);

  py::class_<OccupancyStats>(m, "OccupancyStats")
      .def_readonly("occupancy", &OccupancyStats::occupancy)
      .def_readonly("std_error", &OccupancyStats::std_error);

  py::class_<CorrelatedCluster>(m, "CorrelatedCluster")
      .def_readonly("member_params", &CorrelatedCluster::member_params)
      .def_readonly("cluster_tpm", &CorrelatedCluster::cluster_tpm)
      .def_readonly("cluster_sojourn", &CorrelatedCluster::cluster_sojourn);

  py::class_<CorrelatedFunctions>(m, "CorrelatedFunctions")
      .def_readonly("u", &CorrelatedFunctions::u)
      .def_readonly("v", &CorrelatedFunctions::v)
      .def_readonly("w", &CorrelatedFunctions::w)
      .def_readonly("x", &CorrelatedFunctions::x);

  py::class_<CorrelatedFunctionsReport>(m, "CorrelatedFunctionsReport")
      .def_readonly("u", &CorrelatedFunctionsReport::u)
      .def_readonly("v", &CorrelatedFunctionsReport::v)
      .def_readonly("w", &CorrelatedFunctionsReport::w)
      .def_readonly("x", &CorrelatedFunctionsReport::x)
      .def_readonly("errors", &CorrelatedFunctionsReport::errors);

  py::class_<TrafficRecord>(m, "TrafficRecord")
      .def(py::init([](std::string node_id, std::int64_t interval, double pkts_forwarded,
                       double pkts_received, double remaining_power,
                       double power_consumption_rate, double initial_energy,
                       std::vector<double> recovery_durations) {
             TrafficRecord r;
             r.node_id = std::move(node_id);
             r.interval_index = interval;
             r.pkts_forwarded = pkts_forwarded;
             r.pkts_received = pkts_received;
             r.remaining_power = remaining_power;
             r.power_consumption_rate = power_consumption_rate;
             r.initial_energy = initial_energy;
             r.recovery_durations = std::move(recovery_durations);
             return r;
           }),
           py::arg("node_id"), py::arg("interval") = 0, py::arg("pkts_forwarded") = 0.0,
           py::arg("pkts_received") = 0.0, py::arg("remaining_power") = 0.0,
           py::arg("power_consumption_rate") = 1.0, py::arg("initial_energy") = 0.0,
           py::arg("recovery_durations") = std::vector<double>{})
      .def_readonly("node_id", &TrafficRecord::node_id)
      .def_readonly("interval_index", &TrafficRecord::interval_index)
      .def_readonly("pkts_forwarded", &TrafficRecord::pkts_forwarded)
      .def_readonly("pkts_received", &TrafficRecord::pkts_received)
      .def_readonly("remaining_power", &TrafficRecord::remaining_power)
      .def_readonly("power_consumption_rate", &TrafficRecord::power_consumption_rate)
      .def_readonly("initial_energy", &TrafficRecord::initial_energy)
      .def_readonly("recovery_durations", &TrafficRecord::recovery_durations);

  py::class_<LifetimeStats>(m, "LifetimeStats")
      .def_readonly("avg_lifetime", &LifetimeStats::avg_lifetime)
      .def_readonly("t_selfish", &LifetimeStats::t_selfish);

  py::class_<RawEstimate>(m, "RawEstimate")
      .def_readonly("a", &RawEstimate::a)
      .def_readonly("b", &RawEstimate::b)
      .def_readonly("c", &RawEstimate::c)
      .def_readonly("d", &RawEstimate::d)
      .def_readonly("e", &RawEstimate::e)
      .def_readonly("life", &RawEstimate::life)
      .def_readonly("flags", &RawEstimate::flags)
      .def_readonly("division_by_zero", &RawEstimate::division_by_zero)
      .def("ok", &RawEstimate::ok);

  py::class_<Adjustment>(m, "Adjustment")
      .def_readonly("what", &Adjustment::what)
      .def_readonly("before", &Adjustment::before)
      .def_readonly("after", &Adjustment::after);

  py::class_<FeasibleProjection>(m, "FeasibleProjection")
      .def_readonly("params", &FeasibleProjection::params)
      .def_readonly("adjustments", &FeasibleProjection::adjustments);

  py::class_<SweepConfig>(m, "SweepConfig")
      .def(py::init<>())
      .def_readwrite("scenario", &SweepConfig::scenario)
      .def_readwrite("node_counts", &SweepConfig::node_counts)
      .def_readwrite("grid", &SweepConfig::grid)
      .def_readwrite("fixed_params", &SweepConfig::fixed_params)
      .def_readwrite("horizon_steps", &SweepConfig::horizon_steps)
      .def_readwrite("metric", &SweepConfig::metric);

  py::class_<SurvivabilityValue>(m, "SurvivabilityValue")
      .def_readonly("cluster", &SurvivabilityValue::cluster)
      .def_readonly("independent", &SurvivabilityValue::independent);

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("scenario", &SweepRow::scenario)
      .def_readonly("m", &SweepRow::m)
      .def_readonly("param_value", &SweepRow::param_value)
      .def_readonly("surv_cluster", &SweepRow::surv_cluster)
      .def_readonly("surv_independent", &SweepRow::surv_independent)
      .def_readonly("horizon_steps", &SweepRow::horizon_steps);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("param_name", &SweepResult::param_name)
      .def_readonly("lo", &SweepResult::lo)
      .def_readonly("hi", &SweepResult::hi)
      .def_readonly("rows", &SweepResult::rows);

  m.def("validate_params",
        py::overload_cast<double, double, double, double, double, double>(&validate_params),
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("e"),
        py::arg("eta") = 10.0);
  m.def("build_tpm", &build_tpm, py::arg("params"));
  m.def("validate_thresholds", &validate_thresholds, py::arg("drop"), py::arg("forward"),
        py::arg("inject"));
  m.def(
      "classify_status",
      [](const ObservedLevels& obs, const StatusThresholds& thresholds)
          -> std::optional<BehaviorState> { return classify_status(obs, thresholds); },
      py::arg("observed"), py::arg("thresholds") = StatusThresholds{},
      "Returns the classified state or None when no clause matches.");

  m.def("stationary", [](const EmbeddedTpm& tpm) { return stationary(tpm); }, py::arg("tpm"));
  m.def("stationary_matrix", [](const Mat4& p) { return stationary(p); }, py::arg("matrix"));
  m.def("limiting_distribution",
        py::overload_cast<const EmbeddedTpm&, const SojournSpec&>(&limiting_distribution),
        py::arg("tpm"), py::arg("sojourn"));
  m.def(
      "transient_occupancy",
      [](const EmbeddedTpm& tpm, BehaviorState initial, std::uint64_t steps) {
        return transient_occupancy(tpm, initial, steps);
      },
      py::arg("tpm"), py::arg("initial"), py::arg("steps"));
  m.def(
      "transient_occupancy_matrix",
      [](const Mat4& p, int initial, std::uint64_t steps) {
        return transient_occupancy(p, initial, steps);
      },
      py::arg("matrix"), py::arg("initial"), py::arg("steps"));
  m.def("simulate", &simulate, py::arg("tpm"), py::arg("sojourn"), py::arg("initial"),
        py::arg("horizon"), py::arg("seed"));
  m.def("simulate_many", &simulate_many, py::arg("tpm"), py::arg("sojourn"), py::arg("initial"),
        py::arg("horizon"), py::arg("count"), py::arg("seed"), py::arg("threads") = 1);
  m.def(
      "occupancy_estimate",
      [](const std::vector<Trajectory>& trajectories) {
        return occupancy_estimate(std::span<const Trajectory>(trajectories));
      },
      py::arg("trajectories"));

  m.def(
      "compose_pair",
      [](const EmbeddedTpm& p1, const EmbeddedTpm& p2) { return compose_pair(p1, p2); },
      py::arg("p1"), py::arg("p2"));
  m.def(
      "compose_cluster",
      [](const std::vector<BehaviorParams>& members, const SojournSpec& sojourn,
         FoldNormalization normalization) {
        return compose_cluster(std::span<const BehaviorParams>(members), sojourn, normalization);
      },
      py::arg("members"), py::arg("sojourn") = SojournSpec::uniform(1.0),
      py::arg("normalization") = FoldNormalization::PerStep);
  m.def("correlated_functions", &correlated_functions, py::arg("cluster"));
  m.def("correlated_functions_report", &correlated_functions_report, py::arg("cluster"));

  m.def("lifetime", &lifetime, py::arg("record"), py::arg("eta"));
  m.def("estimate_params", &estimate_params, py::arg("record"), py::arg("eta"));
  m.def(
      "aggregate_records",
      [](const std::vector<TrafficRecord>& records) {
        return aggregate_records(std::span<const TrafficRecord>(records));
      },
      py::arg("records"));
  m.def("project_feasible", &project_feasible, py::arg("a"), py::arg("b"), py::arg("c"),
        py::arg("d"), py::arg("e"), py::arg("eta") = 10.0);

  m.def("apply_scenario_constraints", &apply_scenario_constraints, py::arg("scenario"),
        py::arg("params"));
  m.def("survivability", &survivability, py::arg("params"), py::arg("m"),
        py::arg("horizon_steps"), py::arg("metric") = SurvivabilityMetric::Both);
  m.def("run_sweep", &run_sweep, py::arg("config"));
}
