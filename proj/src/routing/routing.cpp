#include "verbatim/routing.hpp"

#include <algorithm>
#include <array>

#include "verbatim/errors.hpp"
#include "verbatim/log.hpp"

namespace verbatim::routing {

std::string_view to_string(JobMode mode) { return mode == JobMode::full ? "full" : "per_sentence"; }
std::string_view to_string(DocumentKind kind) { return kind == DocumentKind::native ? "native" : "translation"; }

std::string job_key(const TranslationJob& job) {
  return to_string(job.source_channel) + ">" + std::string(to_string(job.tgt));
}

std::vector<TranslationJob> plan_translation_jobs(std::span<const ChannelId> channels) {
  const auto report = validate_channels({channels.begin(), channels.end()});
  if (!report.ok()) throw Error("invalid channel set: " + report.summary());

  std::vector<TranslationJob> jobs;
  for (const auto& ch : channels) {
    if (ch.is_floor()) {
      jobs.push_back({ch, SourceLanguage::multilingual(), Language::EN, JobMode::per_sentence});
    } else if (*ch.language == Language::EN) {
      for (Language tgt : kAllLanguages) {
        if (tgt != Language::EN) jobs.push_back({ch, Language::EN, tgt, JobMode::full});
      }
    } else {
      jobs.push_back({ch, *ch.language, Language::EN, JobMode::full});
    }
  }
  std::sort(jobs.begin(), jobs.end(), [](const TranslationJob& a, const TranslationJob& b) {
    return std::tie(a.source_channel, a.tgt) < std::tie(b.source_channel, b.tgt);
  });
  return jobs;
}

nlohmann::json to_json(const std::vector<TranslationJob>& jobs) {
  auto out = nlohmann::json::array();
  for (const auto& j : jobs) {
    out.push_back({{"source_channel", to_string(j.source_channel)},
                   {"src_lang", to_string(j.src)},
                   {"tgt_lang", to_string(j.tgt)},
                   {"mode", to_string(j.mode)}});
  }
  return out;
}

Language floor_majority_language(std::span<const std::optional<Language>> detected) {
  std::array<std::size_t, kAllLanguages.size()> counts{};
  for (const auto& d : detected) {
    if (d) ++counts[static_cast<std::size_t>(*d)];
  }
  const auto best = std::max_element(counts.begin(), counts.end());  // first maximum wins ties
  if (*best == 0) return Language::EN;
  return kAllLanguages[static_cast<std::size_t>(best - counts.begin())];
}

namespace {

std::string call_mt(const engines::Translator& mt, std::size_t index, const std::string& text, Language src,
                    Language tgt) {
  try {
    return mt.translate(text, src, tgt);
  } catch (const std::exception& e) {
    throw TranslationError(index, e.what());
  }
}

std::pair<double, double> utterance_span(const Utterance& u) {
  if (u.timed && !u.words.empty()) return {u.words.front().start_s, u.words.back().end_s};
  return {u.segment_start_s, u.segment_end_s};
}

}  // namespace

TranslationArtifact resolve_floor_sentences(const Transcript& floor, const engines::LanguageIdentifier& lid,
                                            const engines::Translator& mt) {
  TranslationArtifact out;
  out.source_channel = floor.channel;
  out.source_lang = floor.language;
  out.target_lang = Language::EN;
  out.engine_id = mt.id();

  std::vector<std::string> texts;
  std::vector<std::optional<Language>> detected;
  for (const auto& u : floor.utterances) {
    texts.push_back(u.text());
    detected.push_back(texts.back().empty() ? std::nullopt : lid.identify(texts.back()));
  }
  const Language fallback = floor_majority_language(detected);

  for (std::size_t i = 0; i < texts.size(); ++i) {
    TranslatedSentence s;
    s.source_index = i;
    std::tie(s.start_s, s.end_s) = utterance_span(floor.utterances[i]);
    s.source_language = detected[i];
    if (detected[i] == Language::EN) {
      s.mode = TranslationMode::copied;
      s.text = texts[i];
    } else {
      s.mode = TranslationMode::translated;
      if (!texts[i].empty()) {
        if (!detected[i]) log::info("floor sentence " + std::to_string(i) + " undetermined; translating from " +
                                    std::string(to_string(fallback)));
        s.text = call_mt(mt, i, texts[i], detected[i].value_or(fallback), Language::EN);
      }
    }
    out.sentences.push_back(std::move(s));
  }
  return out;
}

TranslationArtifact translate_transcript(const Transcript& booth, Language target, const engines::Translator& mt) {
  if (booth.language.is_multilingual()) throw Error("translate_transcript needs a monolingual transcript");
  const Language src = *booth.language.language();
  TranslationArtifact out;
  out.source_channel = booth.channel;
  out.source_lang = booth.language;
  out.target_lang = target;
  out.engine_id = mt.id();
  for (std::size_t i = 0; i < booth.utterances.size(); ++i) {
    TranslatedSentence s;
    s.source_index = i;
    std::tie(s.start_s, s.end_s) = utterance_span(booth.utterances[i]);
    const std::string text = booth.utterances[i].text();
    if (!text.empty()) s.text = call_mt(mt, i, text, src, target);
    out.sentences.push_back(std::move(s));
  }
  return out;
}

TranslationArtifact run_job(const TranslationJob& job, const Transcript& source, const engines::LanguageIdentifier& lid,
                            const engines::Translator& mt) {
  if (job.mode == JobMode::per_sentence) return resolve_floor_sentences(source, lid, mt);
  return translate_transcript(source, job.tgt, mt);
}

ViewDocument document_from(const Transcript& transcript) {
  ViewDocument doc;
  doc.language = transcript.language.language().value_or(Language::EN);
  doc.provenance = {DocumentKind::native, transcript.channel, transcript.language, transcript.engine_id};
  for (const auto& u : transcript.utterances) {
    auto [start, end] = utterance_span(u);
    doc.entries.push_back({round_ms(start), round_ms(end), u.text(), std::nullopt, std::nullopt});
  }
  return doc;
}

ViewDocument document_from(const TranslationArtifact& artifact) {
  ViewDocument doc;
  doc.language = artifact.target_lang;
  doc.provenance = {DocumentKind::translation, artifact.source_channel, artifact.source_lang, artifact.engine_id};
  for (const auto& s : artifact.sentences) {
    doc.entries.push_back({round_ms(s.start_s), round_ms(s.end_s), s.text, s.mode, s.source_language});
  }
  return doc;
}

std::vector<LanguageView> assemble_language_views(std::span<const Transcript> transcripts,
                                                  std::span<const TranslationArtifact> artifacts,
                                                  std::span<const JobFailure> failures) {
  std::vector<LanguageView> views;
  for (Language lang : kAllLanguages) {
    LanguageView view;
    view.language = lang;

    std::vector<const Transcript*> natives;
    for (const auto& t : transcripts) {
      if (!t.language.is_multilingual() && *t.language.language() == lang) natives.push_back(&t);
    }
    std::sort(natives.begin(), natives.end(), [](auto* a, auto* b) { return a->channel < b->channel; });
    for (const auto* t : natives) view.documents.push_back(document_from(*t));

    std::vector<const TranslationArtifact*> translated;
    for (const auto& a : artifacts) {
      if (a.target_lang == lang) translated.push_back(&a);
    }
    std::sort(translated.begin(), translated.end(),
              [](auto* a, auto* b) { return a->source_channel < b->source_channel; });
    for (const auto* a : translated) view.documents.push_back(document_from(*a));

    for (const auto& f : failures) {
      if (f.job.tgt == lang) view.gaps.push_back({f.job, f.error});
    }
    views.push_back(std::move(view));
  }
  return views;
}

const ViewDocument* primary_document(const LanguageView& view) {
  if (view.documents.empty()) return nullptr;
  auto find = [&](auto pred) -> const ViewDocument* {
    for (const auto& d : view.documents) {
      if (pred(d)) return &d;
    }
    return nullptr;
  };
  if (auto* d = find([](const ViewDocument& d) { return d.provenance.kind == DocumentKind::native; })) return d;
  if (auto* d = find([](const ViewDocument& d) { return d.provenance.channel == ChannelId::booth(Language::EN); }))
    return d;
  if (auto* d = find([](const ViewDocument& d) { return d.provenance.channel.is_floor(); })) return d;
  return &view.documents.front();
}

nlohmann::json to_json(const ViewDocument& document) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : document.entries) {
    nlohmann::json j{{"start_s", e.start_s}, {"end_s", e.end_s}, {"text", e.text}};
    if (e.mode) j["mode"] = to_string(*e.mode);
    if (e.source_language) j["source_language"] = to_string(*e.source_language);
    entries.push_back(std::move(j));
  }
  return {{"language", to_string(document.language)},
          {"provenance",
           {{"kind", to_string(document.provenance.kind)},
            {"channel", to_string(document.provenance.channel)},
            {"source_lang", to_string(document.provenance.source_lang)},
            {"engine_id", document.provenance.engine_id}}},
          {"entries", entries}};
}

nlohmann::json to_json(const LanguageView& view) {
  nlohmann::json docs = nlohmann::json::array();
  for (const auto& d : view.documents) docs.push_back(to_json(d));
  nlohmann::json gaps = nlohmann::json::array();
  for (const auto& g : view.gaps) gaps.push_back({{"job", job_key(g.job)}, {"error", g.error}});
  return {{"language", to_string(view.language)}, {"documents", docs}, {"gaps", gaps}};
}

}  // namespace verbatim::routing
