#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "verbatim/errors.hpp"
#include "verbatim/evaluation.hpp"
#include "verbatim/fixture.hpp"
#include "verbatim/log.hpp"
#include "verbatim/metadata.hpp"
#include "verbatim/pipeline.hpp"
#include "verbatim/serialize.hpp"
#include "verbatim/service.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;
using namespace verbatim;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Language language_arg(const std::string& code) {
  auto lang = parse_language(code);
  if (!lang) throw Error("unknown language '" + code + "'");
  return *lang;
}

std::vector<ChannelId> channels_in(const fs::path& audio_dir) {
  std::vector<ChannelId> out;
  for (const auto& e : fs::directory_iterator(audio_dir)) {
    if (e.path().extension() != ".wav") continue;
    if (auto ch = parse_channel(e.path().stem().string())) out.push_back(*ch);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void print_counts(const std::string& label, const evaluation::ErrorCounts& c) {
  std::printf("%s\t%.4f\tS=%zu D=%zu I=%zu N=%zu\n", label.c_str(), c.rate(), c.substitutions, c.deletions,
              c.insertions, c.ref_len);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multilingual meeting transcription pipeline"};
  app.require_subcommand(1);
  std::string config_path = "config.json";
  app.add_option("-c,--config", config_path, "Pipeline config (JSON)");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  auto pipeline = [&] { return std::make_unique<pipeline::Pipeline>(pipeline::load_config(config_path)); };

  std::string manifest_path, audio_dir, meeting_id, query, lang, format, out_path;

  auto* ingest = app.add_subcommand("ingest", "Register a meeting from a manifest and an audio directory");
  ingest->add_option("manifest", manifest_path)->required();
  ingest->add_option("audio_dir", audio_dir)->required();
  ingest->callback([&] { std::cout << pipeline::to_json(pipeline()->ingest(manifest_path, audio_dir)).dump(2) << '\n'; });

  auto* run = app.add_subcommand("run", "Run or resume a meeting job");
  run->add_option("meeting_id", meeting_id)->required();
  run->callback([&] {
    const auto result = pipeline()->run(meeting_id);
    std::cout << pipeline::to_json(result.job).dump(2) << '\n';
    std::cerr << result.transcripts.size() << " transcripts, " << result.translations.size() << " translations, "
              << result.failures.size() << " failed jobs, " << result.exports.size() << " exports\n";
  });

  auto* status = app.add_subcommand("status", "Show a meeting job");
  status->add_option("meeting_id", meeting_id)->required();
  status->callback([&] {
    const auto job = pipeline()->status(meeting_id);
    if (!job) throw NotFoundError("unknown meeting " + meeting_id);
    std::cout << pipeline::to_json(*job).dump(2) << '\n';
  });

  std::string speaker, agenda, channel;
  std::size_t limit = 20;
  auto* search_cmd = app.add_subcommand("search", "Full-text search over indexed meetings");
  search_cmd->add_option("query", query)->required();
  search_cmd->add_option("--lang", lang);
  search_cmd->add_option("--meeting", meeting_id);
  search_cmd->add_option("--speaker", speaker);
  search_cmd->add_option("--agenda", agenda);
  search_cmd->add_option("--channel", channel);
  search_cmd->add_option("--limit", limit);
  search_cmd->callback([&] {
    auto p = pipeline();
    search::Query q;
    q.limit = limit;
    if (!lang.empty()) q.language = language_arg(lang);
    q.terms = search::query_terms(query, q.language.value_or(Language::EN));
    if (!meeting_id.empty()) q.meeting_id = meeting_id;
    if (!speaker.empty()) q.speaker = speaker;
    if (!agenda.empty()) q.agenda = agenda;
    if (!channel.empty()) {
      q.channel = parse_channel(channel);
      if (!q.channel) throw Error("unknown channel '" + channel + "'");
    }
    for (const auto& hit : p->index().search(q)) std::cout << search::to_json(hit).dump() << '\n';
  });

  auto* export_cmd = app.add_subcommand("export", "Write one language export of a meeting");
  export_cmd->add_option("meeting_id", meeting_id)->required();
  export_cmd->add_option("lang", lang)->required();
  export_cmd->add_option("format", format)->required()->check(CLI::IsMember({"json", "html", "docx"}));
  export_cmd->add_option("-o,--output", out_path, "Output file (default: standard naming in the current directory)");
  export_cmd->callback([&] {
    const auto fmt = *exporters::parse_format(format);
    const Language l = language_arg(lang);
    const auto bytes = pipeline()->export_bytes(meeting_id, l, fmt);
    const fs::path target = out_path.empty() ? fs::path(exporters::export_file_name(meeting_id, l, fmt)) : fs::path(out_path);
    std::ofstream(target, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                                  static_cast<std::streamsize>(bytes.size()));
    std::cout << target.string() << '\n';
  });

  auto* plan = app.add_subcommand("plan", "Print the translation jobs for a channel set");
  std::vector<std::string> channel_names;
  plan->add_option("manifest", manifest_path, "Manifest; checked for validity only");
  plan->add_option("--audio", audio_dir, "Derive channels from the WAV files in this directory");
  plan->add_option("--channels", channel_names, "Channels, e.g. floor booth-EN booth-FR")->delimiter(',');
  plan->callback([&] {
    if (!manifest_path.empty()) metadata::parse_manifest(slurp(manifest_path));
    std::vector<ChannelId> channels;
    if (!audio_dir.empty()) channels = channels_in(audio_dir);
    for (const auto& name : channel_names) {
      auto ch = parse_channel(name);
      if (!ch) throw Error("unknown channel '" + name + "'");
      channels.push_back(*ch);
    }
    if (channels.empty()) throw Error("no channels: pass --audio or --channels");
    std::cout << routing::to_json(routing::plan_translation_jobs(channels)).dump(2) << '\n';
  });

  auto* eval = app.add_subcommand("eval", "Error rates and benchmark reports");
  eval->require_subcommand(1);
  std::string tsv, terms_path;
  auto* wer = eval->add_subcommand("wer", "Corpus WER over segment_id<TAB>ref<TAB>hyp lines");
  wer->add_option("tsv", tsv)->required();
  bool per_item = false;
  wer->add_flag("--items", per_item, "Also print per-segment rates");
  auto* cer = eval->add_subcommand("cer", "Corpus CER over segment_id<TAB>ref<TAB>hyp lines");
  cer->add_option("tsv", tsv)->required();
  cer->add_flag("--items", per_item);
  auto corpus = [&](bool chars) {
    const auto items = evaluation::parse_eval_tsv(slurp(tsv));
    const auto result = evaluation::evaluate_corpus(items, chars);
    if (per_item) {
      for (const auto& [id, counts] : result.items) print_counts(id, counts);
    }
    print_counts(chars ? "CER" : "WER", result.total);
  };
  wer->callback([&] { corpus(false); });
  cer->callback([&] { corpus(true); });

  auto* terms = eval->add_subcommand("terms", "Terminology error rate over segment_id<TAB>ref<TAB>hyp lines");
  terms->add_option("tsv", tsv)->required();
  terms->add_option("terms", terms_path, "One term per line")->required();
  terms->callback([&] {
    const auto term_list = evaluation::parse_term_list(slurp(terms_path));
    evaluation::ErrorCounts total;
    bool any_terms = false;
    for (const auto& item : evaluation::parse_eval_tsv(slurp(tsv))) {
      const auto ref = evaluation::split_words(item.ref);
      const auto hyp = evaluation::split_words(item.hyp);
      const auto r = evaluation::terminology_error_rate(ref, hyp, term_list);
      if (!r.no_terms) any_terms = true;
      total += r.counts;
    }
    if (!any_terms) {
      std::cout << "TERM\t-\tno term occurrences in the references\n";
    } else {
      print_counts("TERM", total);
    }
  });

  auto* report = eval->add_subcommand("report", "Render a benchmark table from TSV");
  report->add_option("tsv", tsv)->required();
  report->callback([&] {
    const auto rows = evaluation::parse_benchmark_tsv(slurp(tsv));
    std::cout << evaluation::render_benchmark_report(rows);
  });

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->callback([&] {
    auto p = pipeline();
    pipeline::Service service(*p);
    std::cerr << "listening on " << host << ":" << port << '\n';
    if (!service.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
  });

  std::string source_url;
  bool once = false;
  auto* poll = app.add_subcommand("poll", "Follow a metadata source and apply manifest updates");
  poll->add_option("meeting_id", meeting_id)->required();
  poll->add_option("--source", source_url, "Base URL of the metadata source")->required();
  poll->add_flag("--once", once, "Poll a single time");
  poll->callback([&] {
    auto p = pipeline();
    auto store = std::make_shared<metadata::ManifestStore>(p->manifest(meeting_id));
    metadata::MetadataPoller poller(std::make_shared<metadata::HttpManifestSource>(source_url), store, meeting_id,
                                    p->config().poll_interval);
    poller.on_result([&](const metadata::PollResult& r) {
      std::cout << Json{{"status", metadata::to_string(r.status)},
                        {"remote_version", r.remote_version},
                        {"message", r.message}}
                       .dump()
                << std::endl;
      if (r.status == metadata::PollStatus::applied) p->update_manifest(*store->current());
    });
    if (once) {
      poller.poll_once();
    } else {
      std::stop_source stop;
      poller.run(stop.get_token());
    }
  });

  std::string fixture_dir;
  std::vector<std::string> fail_pairs;
  bool silent_floor = false;
  auto* fixture = app.add_subcommand("make-fixture", "Write the synthetic three-channel demo meeting");
  fixture->add_option("dir", fixture_dir)->required();
  fixture->add_option("--fail", fail_pairs, "MT pairs to fail, e.g. EN->RU");
  fixture->add_flag("--silent-floor", silent_floor);
  fixture->callback([&] {
    pipeline::FixtureOptions opts;
    opts.fail_pairs = fail_pairs;
    opts.silent_floor = silent_floor;
    const auto paths = pipeline::make_fixture(fixture_dir, opts);
    std::cout << Json{{"meeting_id", paths.meeting_id},
                      {"manifest", paths.manifest.string()},
                      {"audio_dir", paths.audio_dir.string()},
                      {"config", paths.config.string()}}
                     .dump(2)
              << '\n';
  });

  app.parse_complete_callback([&] {
    if (verbose) log::set_level(log::Level::debug);
  });
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const NotFoundError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
