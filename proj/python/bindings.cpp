// Python bindings. JSON crosses the boundary as text; the package wraps it.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "texterial/clock.hpp"
#include "texterial/config.hpp"
#include "texterial/persistence.hpp"
#include "texterial/prompts.hpp"
#include "texterial/replay.hpp"
#include "texterial/session.hpp"
#include "texterial/tags.hpp"

namespace py = pybind11;
using namespace texterial;

namespace {

std::string result_json(const OpResult& r) {
  Json j{{"operation_id", r.operation_id}, {"ok", r.ok}, {"event", r.event}, {"data", r.data}};
  if (r.hash) j["hash"] = *r.hash;
  if (r.error) j["error"] = to_string(*r.error);
  if (!r.message.empty()) j["message"] = r.message;
  return j.dump();
}

/// A session on a scripted clock and the mock provider.
class PySession {
 public:
  PySession(std::optional<std::string> writing_context, std::optional<std::string> config_json)
      : clock_(std::make_shared<ScriptedClock>()) {
    if (config_json) apply_config(config_, Json::parse(*config_json));
    SessionState seed;
    seed.writing_context = std::move(writing_context);
    auto gateway = std::make_shared<Gateway>(std::make_shared<MockProvider>(), config_.gateway);
    session_ = std::make_unique<Session>("py", std::move(seed), gateway, config_, clock_);
  }

  void set_time(std::int64_t ms) { clock_->set(ms); }
  std::int64_t now() const { return clock_->now_ms(); }

  std::string add_block(const std::string& text, std::optional<double> x, std::optional<double> y) {
    std::optional<Point> at;
    if (x && y) at = Point{*x, *y};
    return session_->add_block(text, at).id;
  }

  std::string gesture(const std::string& event_json) {
    return result_json(session_->apply(gesture_from_json(Json::parse(event_json))));
  }

  std::vector<std::string> tick() {
    std::vector<std::string> out;
    for (const auto& r : session_->tick()) out.push_back(result_json(r));
    return out;
  }

  void undo() { session_->undo(); }
  void redo() { session_->redo(); }
  std::string hash() const { return session_->hash(); }
  std::string view() const { return session_->view().dump(); }
  std::string state() const { return to_json(session_->state()).dump(); }
  std::string trace() const { return trace_jsonl(session_->trace()); }

  std::vector<std::pair<std::string, std::string>> prompts() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& p : session_->prompt_log()) out.emplace_back(std::string(to_string(p.tmpl)), p.prompt);
    return out;
  }

  void save(const std::string& path) const { save_session(path, session_->state()); }

 private:
  EngineConfig config_;
  std::shared_ptr<ScriptedClock> clock_;
  std::unique_ptr<Session> session_;
};

std::string build_prompt(const std::string& tmpl, const std::string& slots_json,
                         std::optional<std::string> context) {
  PromptRequest req;
  req.tmpl = prompt_template_from_string(tmpl);
  req.context = std::move(context);
  const Json slots = Json::parse(slots_json);
  for (const auto& [k, v] : slots.items()) {
    if (v.is_number()) {
      req.slots[k] = v.get<double>();
    } else {
      req.slots[k] = v.get<std::string>();
    }
  }
  return build(req);
}

std::string replay_files(const std::string& trace_path, const std::string& seed_path, bool strict) {
  const ReplayReport r =
      replay(read_trace(trace_path), load_session(seed_path), EngineConfig{}, nullptr, ReplayOptions{strict});
  return Json{{"records", r.records}, {"verified", r.verified}, {"seed_hash", r.seed_hash}, {"final_hash", r.final_hash}}
      .dump();
}

}  // namespace

PYBIND11_MODULE(_texterial, m) {
  m.doc() = "texterial engine bindings";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    } catch (const Json::exception& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<PySession>(m, "Session")
      .def(py::init<std::optional<std::string>, std::optional<std::string>>(), py::arg("writing_context") = py::none(),
           py::arg("config_json") = py::none())
      .def("set_time", &PySession::set_time)
      .def("now", &PySession::now)
      .def("add_block", &PySession::add_block, py::arg("text"), py::arg("x") = py::none(), py::arg("y") = py::none())
      .def("gesture", &PySession::gesture)
      .def("tick", &PySession::tick)
      .def("undo", &PySession::undo)
      .def("redo", &PySession::redo)
      .def("hash", &PySession::hash)
      .def("view", &PySession::view)
      .def("state", &PySession::state)
      .def("trace", &PySession::trace)
      .def("prompts", &PySession::prompts)
      .def("save", &PySession::save);

  m.def("build_prompt", &build_prompt, py::arg("template"), py::arg("slots_json"), py::arg("context") = py::none());
  m.def("replay", &replay_files, py::arg("trace_path"), py::arg("seed_path"), py::arg("strict") = false);
  m.def("canonical_hash", [](const std::string& json_text) { return canonical_hash(Json::parse(json_text)); });
  m.def("parse_marked", [](const std::string& marked) { return parse_marked(marked).plain; });
  m.def("mock_response", [](const std::string& tmpl, const std::string& prompt) {
    return mock_response(prompt_template_from_string(tmpl), prompt);
  });
}
