#include "verbatim/service.hpp"

#include <httplib.h>

#include <thread>

#include "verbatim/errors.hpp"
#include "verbatim/log.hpp"
#include "verbatim/metadata.hpp"
#include "verbatim/serialize.hpp"

namespace verbatim::pipeline {

using Json = nlohmann::json;

struct Service::Impl {
  Pipeline& pipeline;
  httplib::Server server;
  std::thread thread;
  std::mutex runs_mutex;
  std::vector<std::thread> runs;

  explicit Impl(Pipeline& p) : pipeline(p) { routes(); }

  static void reply(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  // Runs a handler and maps domain exceptions onto HTTP statuses.
  template <typename F>
  static auto guarded(F handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
      try {
        handler(req, res);
      } catch (const NotFoundError& e) {
        reply(res, 404, {{"error", e.what()}});
      } catch (const ConflictError& e) {
        reply(res, 409, {{"error", e.what()}});
      } catch (const ParseError& e) {
        reply(res, 400, {{"error", e.what()}});
      } catch (const Json::exception& e) {
        reply(res, 400, {{"error", std::string("bad request body: ") + e.what()}});
      } catch (const std::invalid_argument& e) {
        reply(res, 400, {{"error", e.what()}});
      } catch (const std::exception& e) {
        reply(res, 500, {{"error", e.what()}});
      }
    };
  }

  static Language language_param(const std::string& code) {
    const auto lang = parse_language(code);
    if (!lang) throw std::invalid_argument("unknown language '" + code + "'");
    return *lang;
  }

  void require_meeting(const std::string& id) const {
    if (!pipeline.status(id)) throw NotFoundError("unknown meeting " + id);
  }

  void routes() {
    server.Post("/meetings", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const Json body = Json::parse(req.body);
      if (!body.contains("audio_dir")) throw std::invalid_argument("audio_dir is required");
      MeetingJob job;
      if (body.contains("manifest")) {
        job = pipeline.ingest(metadata::parse_manifest(body["manifest"].dump()), body["audio_dir"].get<std::string>());
      } else if (body.contains("manifest_path")) {
        job = pipeline.ingest(std::filesystem::path(body["manifest_path"].get<std::string>()),
                              body["audio_dir"].get<std::string>());
      } else {
        throw std::invalid_argument("manifest or manifest_path is required");
      }
      reply(res, 201, to_json(job));
    }));

    server.Post(R"(/meetings/(.+)/run)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string id = req.matches[1];
      require_meeting(id);
      std::lock_guard lock(runs_mutex);
      runs.emplace_back([this, id] {
        try {
          pipeline.run(id);
        } catch (const std::exception& e) {
          log::error("background run of " + id + " failed: " + e.what());
        }
      });
      reply(res, 202, {{"meeting_id", id}, {"accepted", true}});
    }));

    server.Get("/meetings", guarded([this](const httplib::Request&, httplib::Response& res) {
      Json out = Json::array();
      for (const auto& job : pipeline.list()) out.push_back(to_json(job));
      reply(res, 200, out);
    }));

    server.Get(R"(/meetings/(.+)/status)", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const auto job = pipeline.status(req.matches[1]);
      if (!job) throw NotFoundError("unknown meeting " + std::string(req.matches[1]));
      reply(res, 200, to_json(*job));
    }));

    server.Get(R"(/meetings/(.+)/transcripts/([A-Za-z]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 const std::string which = req.matches[2];
                 require_meeting(id);
                 if (which == "floor") {
                   for (const auto& t : pipeline.transcripts(id)) {
                     if (t.channel.is_floor()) return reply(res, 200, to_json(t));
                   }
                   throw NotFoundError("no floor transcript for " + id);
                 }
                 const Language lang = language_param(which);
                 const auto views = pipeline.views(id);
                 reply(res, 200, routing::to_json(views[static_cast<std::size_t>(lang)]));
               }));

    server.Get(R"(/meetings/(.+)/export/([A-Za-z]+)/([a-z]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 require_meeting(id);
                 const Language lang = language_param(req.matches[2]);
                 const auto format = exporters::parse_format(std::string(req.matches[3]));
                 if (!format) throw std::invalid_argument("unknown export format '" + std::string(req.matches[3]) + "'");
                 const auto bytes = pipeline.export_bytes(id, lang, *format);
                 static const std::map<exporters::ExportFormat, const char*> kTypes{
                     {exporters::ExportFormat::json, "application/json"},
                     {exporters::ExportFormat::html, "text/html; charset=utf-8"},
                     {exporters::ExportFormat::docx,
                      "application/vnd.openxmlformats-officedocument.wordprocessingml.document"}};
                 res.status = 200;
                 res.set_content(std::string(bytes.begin(), bytes.end()), kTypes.at(*format));
                 res.set_header("Content-Disposition",
                                "attachment; filename=\"" + exporters::export_file_name(id, lang, *format) + "\"");
               }));

    server.Get("/search", guarded([this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("q")) throw std::invalid_argument("q is required");
      search::Query q;
      Language tokenizer_lang = Language::EN;
      if (req.has_param("lang")) {
        q.language = language_param(req.get_param_value("lang"));
        tokenizer_lang = *q.language;
      }
      q.terms = search::query_terms(req.get_param_value("q"), tokenizer_lang);
      if (req.has_param("meeting")) q.meeting_id = req.get_param_value("meeting");
      if (req.has_param("speaker")) q.speaker = req.get_param_value("speaker");
      if (req.has_param("agenda")) q.agenda = req.get_param_value("agenda");
      if (req.has_param("channel")) {
        q.channel = parse_channel(req.get_param_value("channel"));
        if (!q.channel) throw std::invalid_argument("unknown channel");
      }
      if (req.has_param("limit")) q.limit = static_cast<std::size_t>(std::stoul(req.get_param_value("limit")));
      Json hits = Json::array();
      for (const auto& h : pipeline.index().search(q)) hits.push_back(search::to_json(h));
      reply(res, 200, {{"terms", q.terms}, {"hits", hits}});
    }));
  }
};

Service::Service(Pipeline& pipeline) : impl_(std::make_unique<Impl>(pipeline)) {}

Service::~Service() {
  stop();
  wait_for_runs();
}

bool Service::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int Service::start(const std::string& host) {
  const int port = impl_->server.bind_to_any_port(host);
  if (port <= 0) throw Error("cannot bind " + host);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void Service::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void Service::wait_for_runs() {
  std::vector<std::thread> runs;
  {
    std::lock_guard lock(impl_->runs_mutex);
    runs.swap(impl_->runs);
  }
  for (auto& t : runs) t.join();
}

}  // namespace verbatim::pipeline
