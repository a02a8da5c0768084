#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>
#include <pybind11/pybind11.h>

#include "chronokb/checkpoint.hpp"
#include "chronokb/commands.hpp"
#include "chronokb/errors.hpp"
#include "chronokb/evaluation.hpp"
#include "chronokb/param_count.hpp"
#include "chronokb/regularization.hpp"
#include "chronokb/synthetic.hpp"
#include "chronokb/training.hpp"

namespace py = pybind11;
using namespace chronokb;

namespace {

py::dict report_dict(const RankingReport& r) {
  py::dict d;
  d["mrr"] = r.mrr;
  d["hits@1"] = r.hits1;
  d["hits@3"] = r.hits3;
  d["hits@10"] = r.hits10;
  d["count"] = r.count;
  d["temporal"] = py::make_tuple(r.temporal.mrr, r.temporal.count);
  d["non_temporal"] = py::make_tuple(r.non_temporal.mrr, r.non_temporal.count);
  d["rhs_only"] = r.rhs_only;
  if (r.time_auprc) d["time_auprc"] = *r.time_auprc;
  return d;
}

std::vector<std::vector<std::complex<double>>> table_rows(const ComplexTable& t) {
  std::vector<std::vector<std::complex<double>>> out(t.rows(), std::vector<std::complex<double>>(t.rank()));
  for (std::size_t i = 0; i < t.rows(); ++i) {
    for (std::size_t r = 0; r < t.rank(); ++r) out[i][r] = t.at(i, r);
  }
  return out;
}

void set_rows(ComplexTable& t, const std::vector<std::vector<std::complex<double>>>& rows) {
  if (rows.size() != t.rows()) throw ConfigError("row count mismatch");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != t.rank()) throw ConfigError("rank mismatch in row " + std::to_string(i));
    for (std::size_t r = 0; r < t.rank(); ++r) t.set(i, r, rows[i][r]);
  }
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Time-aware link prediction with complex embeddings";

  static py::exception<Error> error(m, "Error");
  py::register_exception<IndexError>(m, "IndexError", error.ptr());
  py::register_exception<UnsupportedModelError>(m, "UnsupportedModelError", error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<FormatError>(m, "FormatError", error.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", error.ptr());

  py::enum_<ModelKind>(m, "ModelKind")
      .value("ComplEx", ModelKind::ComplEx)
      .value("TComplEx", ModelKind::TComplEx)
      .value("TNTComplEx", ModelKind::TNTComplEx);

  py::class_<ComplexTable>(m, "ComplexTable")
      .def_property_readonly("rows", &ComplexTable::rows)
      .def_property_readonly("rank", &ComplexTable::rank)
      .def("to_list", &table_rows)
      .def("set_rows", &set_rows)
      .def("__getitem__", [](const ComplexTable& t, std::pair<std::size_t, std::size_t> ij) {
        if (ij.first >= t.rows() || ij.second >= t.rank()) throw py::index_error();
        return t.at(ij.first, ij.second);
      })
      .def("__setitem__", [](ComplexTable& t, std::pair<std::size_t, std::size_t> ij, std::complex<double> z) {
        if (ij.first >= t.rows() || ij.second >= t.rank()) throw py::index_error();
        t.set(ij.first, ij.second, z);
      });

  py::class_<ModelParams>(m, "ModelParams")
      .def_static(
          "zeros",
          [](ModelKind kind, std::size_t rank, std::size_t entities, std::size_t predicates, std::size_t timestamps) {
            return ModelParams::zeros({kind, rank, entities, predicates, timestamps});
          },
          py::arg("kind"), py::arg("rank"), py::arg("entities"), py::arg("predicates"), py::arg("timestamps") = 0)
      .def_static(
          "random",
          [](ModelKind kind, std::size_t rank, std::size_t entities, std::size_t predicates, std::size_t timestamps,
             std::uint64_t seed, double init_scale) {
            Rng rng(seed);
            return ModelParams::random({kind, rank, entities, predicates, timestamps}, rng, init_scale);
          },
          py::arg("kind"), py::arg("rank"), py::arg("entities"), py::arg("predicates"), py::arg("timestamps") = 0,
          py::arg("seed") = 0, py::arg("init_scale") = 1e-2)
      .def_readonly("kind", &ModelParams::kind)
      .def_readwrite("entities", &ModelParams::entities)
      .def_readwrite("predicates", &ModelParams::predicates)
      .def_readwrite("temporal_predicates", &ModelParams::temporal_predicates)
      .def_readwrite("timestamps", &ModelParams::timestamps)
      .def_property_readonly("rank", &ModelParams::rank)
      .def("__eq__", [](const ModelParams& a, const ModelParams& b) { return a == b; });

  m.def("score", &score, py::arg("params"), py::arg("s"), py::arg("p"), py::arg("o"), py::arg("t") = 0);
  m.def(
      "score_all_objects",
      [](const ModelParams& params, Index s, Index p, Index t) { return score_all_objects(params, s, p, t); },
      py::arg("params"), py::arg("s"), py::arg("p"), py::arg("t") = 0);
  m.def(
      "score_all_times", [](const ModelParams& params, Index s, Index p, Index o) { return score_all_times(params, s, p, o); },
      py::arg("params"), py::arg("s"), py::arg("p"), py::arg("o"));
  m.def(
      "modulation_check",
      [](const std::vector<std::complex<double>>& u, const std::vector<std::complex<double>>& v,
         const std::vector<std::complex<double>>& w, const std::vector<std::complex<double>>& t) {
        const auto r = modulation_check(u, v, w, t);
        return py::make_tuple(r.subject, r.predicate, r.object);
      });

  m.def("omega3", [](const ModelParams& params, Index s, Index p, Index o, Index t) { return omega3(params, {s, p, o, t}); });
  m.def("delta_p",
        [](const ModelParams& params, Index s, Index p, Index o, Index t, int order) {
          return delta_p(params, {s, p, o, t}, order);
        });
  m.def("lambda_p", [](const ModelParams& params, double order) {
    if (!params.timestamps) throw UnsupportedModelError("model has no timestamp table");
    return lambda_p(*params.timestamps, order);
  });
  m.def("loss_instantaneous", [](const ModelParams& params, Index s, Index p, Index o, Index t) {
    return loss_instantaneous(params, {s, p, o, t});
  });
  m.def("loss_temporal", [](const ModelParams& params, Index s, Index p, Index o, Index t) {
    return loss_temporal(params, {s, p, o, t});
  });

  py::class_<DatasetBundle>(m, "DatasetBundle")
      .def_property_readonly("num_entities", &DatasetBundle::num_entities)
      .def_property_readonly("num_timestamps", &DatasetBundle::num_timestamps)
      .def_property_readonly("base_predicates", &DatasetBundle::base_predicates)
      .def_property_readonly("model_predicates", &DatasetBundle::model_predicates)
      .def_readonly("augmented", &DatasetBundle::augmented)
      .def_property_readonly("train_size", [](const DatasetBundle& b) { return b.train.size(); })
      .def_property_readonly("valid_size", [](const DatasetBundle& b) { return b.valid.size(); })
      .def_property_readonly("test_size", [](const DatasetBundle& b) { return b.test.size(); })
      .def("stats", [](const DatasetBundle& b) { return format_stats(dataset_stats(b)); });

  m.def(
      "load_bundle",
      [](const std::filesystem::path& path, const std::string& format, const std::string& discretization) {
        return load_bundle({path, parse_dataset_format(format), discretization});
      },
      py::arg("path"), py::arg("format") = "quadruples", py::arg("discretization") = "none");
  m.def("save_bundle_cache", &save_bundle_cache);
  m.def("augment_reciprocal", py::overload_cast<const DatasetBundle&>(&augment_reciprocal));

  m.def(
      "synthesize",
      [](std::size_t rank, std::size_t entities, std::size_t predicates, std::size_t timestamps, double noise,
         std::uint64_t seed, double holdout) {
        SyntheticData data = synthesize({rank, entities, predicates, timestamps, noise, seed, holdout});
        return py::make_tuple(std::move(data.bundle), std::move(data.truth));
      },
      py::arg("rank") = 5, py::arg("entities") = 50, py::arg("predicates") = 10, py::arg("timestamps") = 20,
      py::arg("noise") = 0.0, py::arg("seed") = 0, py::arg("holdout") = 0.0);

  m.def(
      "train",
      [](const DatasetBundle& bundle, ModelKind kind, std::size_t rank, std::size_t epochs, std::size_t batch_size,
         double learning_rate, const std::string& regularizer, double lambda, double temporal_strength,
         int temporal_order, bool temporal_loss, std::uint64_t seed, std::size_t valid_every, bool eval_train) {
        TrainConfig c;
        c.kind = kind;
        c.rank = rank;
        c.epochs = epochs;
        c.batch_size = batch_size;
        c.learning_rate = learning_rate;
        parse_embedding_regularizer(regularizer, c.reg);
        c.reg.lambda = lambda;
        c.reg.temporal_strength = temporal_strength;
        c.reg.temporal_order = temporal_order;
        c.use_temporal_loss = temporal_loss;
        c.seed = seed;
        c.valid_every = valid_every;
        c.eval_train = eval_train;
        const DatasetBundle augmented = bundle.augmented ? bundle : augment_reciprocal(bundle);
        TrainResult result;
        {
          py::gil_scoped_release release;
          result = train(augmented, c);
        }
        py::list log;
        for (const auto& r : result.log) log.append(py::module_::import("json").attr("loads")(r.to_json_line()));
        return py::make_tuple(std::move(result.params), log);
      },
      py::arg("bundle"), py::arg("kind") = ModelKind::TNTComplEx, py::arg("rank") = 10, py::arg("epochs") = 10,
      py::arg("batch_size") = 1000, py::arg("learning_rate") = 0.1, py::arg("regularizer") = "none",
      py::arg("lambda_") = 0.0, py::arg("temporal_strength") = 0.0, py::arg("temporal_order") = 4,
      py::arg("temporal_loss") = false, py::arg("seed") = 0, py::arg("valid_every") = 0,
      py::arg("eval_train") = false);

  m.def(
      "evaluate",
      [](const ModelParams& params, const DatasetBundle& bundle, const std::string& split, bool rhs_only,
         bool time_aware_filter, std::uint64_t seed) {
        EvalOptions o;
        o.rhs_only = rhs_only;
        o.time_aware_filter = time_aware_filter;
        o.seed = seed;
        const Split which = split == "train" ? Split::Train : split == "valid" ? Split::Valid : Split::Test;
        if (split != "train" && split != "valid" && split != "test") throw ConfigError("unknown split '" + split + "'");
        return report_dict(evaluate_split(params, bundle, which, o));
      },
      py::arg("params"), py::arg("bundle"), py::arg("split") = "test", py::arg("rhs_only") = false,
      py::arg("time_aware_filter") = true, py::arg("seed") = 0);
  m.def("average_precision", [](const std::vector<double>& scores, const std::vector<bool>& positive) {
    std::vector<std::uint8_t> pos(positive.begin(), positive.end());
    return average_precision(scores, pos);
  });

  m.def("save_model", &save_model);
  m.def("load_model", &load_model);

  m.def(
      "parameter_count",
      [](const std::string& model, std::uint64_t r, std::uint64_t e, std::uint64_t p, std::uint64_t t, double gamma) {
        ParamModel pm;
        if (model == "DE-SimplE") {
          pm = ParamModel::DESimplE;
        } else {
          const ModelKind k = parse_model_kind(model);
          pm = k == ModelKind::ComplEx ? ParamModel::ComplEx : k == ModelKind::TComplEx ? ParamModel::TComplEx
                                                                                      : ParamModel::TNTComplEx;
        }
        return parameter_count(pm, r, {e, p, t}, gamma);
      },
      py::arg("model"), py::arg("r"), py::arg("entities"), py::arg("predicates"), py::arg("timestamps"),
      py::arg("gamma") = 0.5);
  m.def(
      "rank_match",
      [](ModelKind kind, double reference, std::uint64_t e, std::uint64_t p, std::uint64_t t) {
        return rank_match(kind, reference, {e, p, t});
      },
      py::arg("kind"), py::arg("reference"), py::arg("entities"), py::arg("predicates"), py::arg("timestamps"));

  m.def("main", [](std::vector<std::string> args) {
    args.insert(args.begin(), "chronokb");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
