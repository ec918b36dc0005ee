#pragma once

// HTTP front end over a Pipeline. Responses are JSON except exports, which carry the
// document bytes. Errors come back as {"error": message} with 400, 404, 409 or 500.
//
//   POST /meetings                              {"manifest": {...} | "manifest_path": p, "audio_dir": d}
//   POST /meetings/{id}/run                     starts the run in the background, 202
//   GET  /meetings
//   GET  /meetings/{id}/status
//   GET  /meetings/{id}/transcripts/{lang}      language view; "floor" gives the floor transcript
//   GET  /meetings/{id}/export/{lang}/{format}
//   GET  /search?q=&lang=&meeting=&speaker=&agenda=&channel=&limit=
//
// Meeting ids contain '/', so clients percent-encode them as %2F.

#include <memory>
#include <string>

#include "verbatim/pipeline.hpp"

namespace verbatim::pipeline {

class Service {
 public:
  explicit Service(Pipeline& pipeline);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Blocks until stop().
  bool listen(const std::string& host, int port);
  /// Binds to an ephemeral port and serves from a background thread; returns the port.
  int start(const std::string& host = "127.0.0.1");
  void stop();
  /// Joins background runs started through POST /meetings/{id}/run.
  void wait_for_runs();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace verbatim::pipeline
