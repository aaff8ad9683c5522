#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "raredis/corpus.hpp"
#include "raredis/error_analysis.hpp"
#include "raredis/evaluation.hpp"
#include "raredis/grounding.hpp"
#include "raredis/output_parse.hpp"
#include "raredis/prompting.hpp"
#include "raredis/selection.hpp"
#include "raredis/text.hpp"

namespace py = pybind11;
using namespace raredis;

namespace {

EntityType etype_arg(const std::string& name) {
  auto t = entity_type_from_string(name);
  if (!t) throw py::value_error("unknown entity type: " + name);
  return *t;
}

py::dict entity_to_dict(const GoldEntity& e) {
  py::dict d;
  d["id"] = e.id;
  d["etype"] = std::string(to_string(e.etype));
  py::list frags;
  for (const Span& f : e.fragments) frags.append(py::make_tuple(f.start, f.end));
  d["fragments"] = frags;
  d["surface"] = e.surface;
  return d;
}

Document doc_from_dict(const py::dict& d) {
  Document doc;
  doc.doc_id = d["doc_id"].cast<std::string>();
  doc.text = d["text"].cast<std::string>();
  if (d.contains("entities")) {
    for (auto item : d["entities"].cast<py::list>()) {
      py::dict ed = item.cast<py::dict>();
      GoldEntity e;
      e.id = ed.contains("id") ? ed["id"].cast<std::string>() : "";
      e.etype = etype_arg(ed["etype"].cast<std::string>());
      for (auto frag : ed["fragments"].cast<py::list>()) {
        auto t = frag.cast<py::tuple>();
        e.fragments.push_back({t[0].cast<std::size_t>(), t[1].cast<std::size_t>()});
      }
      if (ed.contains("surface")) {
        e.surface = ed["surface"].cast<std::string>();
      } else {
        std::u32string text32 = utf8_decode(doc.text);
        std::u32string s;
        for (std::size_t i = 0; i < e.fragments.size(); ++i) {
          if (i > 0) s.push_back(U' ');
          s.append(text32.begin() + static_cast<std::ptrdiff_t>(e.fragments[i].start),
                   text32.begin() + static_cast<std::ptrdiff_t>(e.fragments[i].end));
        }
        e.surface = utf8_encode(s);
      }
      doc.entities.push_back(std::move(e));
    }
  }
  return doc;
}

Prediction pred_from_dict(const py::dict& d) {
  Prediction p;
  p.doc_id = d["doc_id"].cast<std::string>();
  p.etype = etype_arg(d["etype"].cast<std::string>());
  p.extracted = d["extracted"].cast<std::string>();
  if (d.contains("start") && !d["start"].is_none()) {
    p.span = Span{d["start"].cast<std::size_t>(), d["end"].cast<std::size_t>()};
  }
  return p;
}

py::dict counts_to_dict(const Counts& c) {
  Metrics m = metrics_from(c);
  py::dict d;
  d["tp"] = c.tp;
  d["fp"] = c.fp;
  d["fn"] = c.fn;
  d["precision"] = m.precision;
  d["recall"] = m.recall;
  d["f1"] = m.f1;
  return d;
}

py::dict regime_to_dict(const RegimeScores& s) {
  py::dict d;
  for (EntityType t : kAllEntityTypes) {
    d[to_string(t)] = counts_to_dict(s.per_type[static_cast<std::size_t>(t)]);
  }
  d["Overall"] = counts_to_dict(s.overall);
  return d;
}

}  // namespace

PYBIND11_MODULE(_raredis, m) {
  m.doc() = "Rare-disease NER prompting benchmark core";

  m.def(
      "parse_brat_document",
      [](const std::string& doc_id, const std::string& text, const std::string& ann) {
        BratParseResult r = parse_brat_document(doc_id, text, ann);
        py::dict d;
        d["doc_id"] = r.doc.doc_id;
        d["text"] = r.doc.text;
        py::list entities;
        for (const GoldEntity& e : r.doc.entities) entities.append(entity_to_dict(e));
        d["entities"] = entities;
        d["skipped_non_entity_lines"] = r.skipped.non_entity_lines;
        d["skipped_unmapped_labels"] = r.skipped.unmapped_labels;
        return d;
      },
      py::arg("doc_id"), py::arg("text"), py::arg("ann"));

  m.def(
      "corpus_stats",
      [](const std::vector<py::dict>& docs) {
        std::vector<Document> corpus;
        for (const py::dict& d : docs) corpus.push_back(doc_from_dict(d));
        CorpusStats stats = corpus_stats(corpus);
        py::dict out;
        out["n_docs"] = stats.n_docs;
        out["n_sentences"] = stats.n_sentences;
        py::dict per_type;
        for (EntityType t : kAllEntityTypes) {
          per_type[to_string(t)] = stats.per_type[static_cast<std::size_t>(t)];
        }
        out["entities"] = per_type;
        return out;
      },
      py::arg("documents"));

  m.def(
      "split_corpus",
      [](const std::vector<std::string>& doc_ids, std::uint64_t seed) {
        std::vector<Document> corpus;
        for (const std::string& id : doc_ids) corpus.push_back({id, "", {}});
        SplitAssignment s = split_corpus(corpus, seed);
        return py::make_tuple(s.train, s.validation, s.test);
      },
      py::arg("doc_ids"), py::arg("seed"));

  m.def("default_definition",
        [](const std::string& etype) { return default_definition(etype_arg(etype)); },
        py::arg("etype"));

  m.def(
      "render_prompt",
      [](const std::string& setting, const std::string& format,
         const std::string& etype, const std::string& input_text,
         std::optional<std::string> definition,
         std::optional<std::string> example_text,
         std::optional<std::vector<std::string>> example_labels) {
        PromptSpec spec;
        auto s = prompt_setting_from_string(setting);
        auto f = prompt_format_from_string(format);
        if (!s) throw py::value_error("unknown setting: " + setting);
        if (!f) throw py::value_error("unknown format: " + format);
        spec.setting = *s;
        spec.format = *f;
        spec.etype = etype_arg(etype);
        spec.definition = definition ? *definition : default_definition(spec.etype);
        spec.input_text = input_text;
        if (example_text) {
          FewShotExample ex;
          ex.text = *example_text;
          if (example_labels) ex.gold_surfaces = *example_labels;
          spec.example = std::move(ex);
        }
        return render_prompt(spec).text;
      },
      py::arg("setting"), py::arg("format"), py::arg("etype"),
      py::arg("input_text"), py::arg("definition") = std::nullopt,
      py::arg("example_text") = std::nullopt,
      py::arg("example_labels") = std::nullopt);

  m.def(
      "parse_llm_output",
      [](const std::string& raw) {
        ParsedOutput out = parse_llm_output(raw);
        return py::make_tuple(out.items, out.unstructured);
      },
      py::arg("raw_text"));

  m.def(
      "ground",
      [](const std::vector<std::string>& strings, const py::dict& doc,
         const std::string& etype) {
        Document d = doc_from_dict(doc);
        py::list out;
        for (const Prediction& p : ground(strings, d, etype_arg(etype))) {
          py::dict pd;
          pd["doc_id"] = p.doc_id;
          pd["etype"] = std::string(to_string(p.etype));
          pd["extracted"] = p.extracted;
          if (p.span) {
            pd["start"] = p.span->start;
            pd["end"] = p.span->end;
          }
          out.append(pd);
        }
        return out;
      },
      py::arg("extracted_strings"), py::arg("document"), py::arg("etype"));

  m.def(
      "score",
      [](const std::vector<py::dict>& predictions,
         const std::vector<py::dict>& documents) {
        std::vector<Document> docs;
        for (const py::dict& d : documents) docs.push_back(doc_from_dict(d));
        std::vector<Prediction> preds;
        for (const py::dict& d : predictions) preds.push_back(pred_from_dict(d));
        StopWords stopwords;
        MatchReport report = score_all(preds, index_documents(docs), stopwords);
        py::dict out;
        out["exact"] = regime_to_dict(report.exact);
        out["relaxed"] = regime_to_dict(report.relaxed);
        return out;
      },
      py::arg("predictions"), py::arg("documents"));

  m.def(
      "classify_errors",
      [](const std::vector<py::dict>& predictions,
         const std::vector<py::dict>& documents) {
        std::vector<Document> docs;
        for (const py::dict& d : documents) docs.push_back(doc_from_dict(d));
        std::vector<Prediction> preds;
        for (const py::dict& d : predictions) preds.push_back(pred_from_dict(d));
        StopWords stopwords;
        py::list out;
        for (const ErrorRecord& rec :
             classify_errors(preds, index_documents(docs), stopwords)) {
          py::dict rd;
          rd["category"] = std::string(to_string(rec.category));
          rd["doc_id"] = rec.doc_id;
          rd["attributed_type"] = std::string(to_string(rec.attributed_type));
          out.append(rd);
        }
        return out;
      },
      py::arg("predictions"), py::arg("documents"));

  m.def(
      "select_similar",
      [](const std::vector<py::dict>& train, const py::dict& test_doc) {
        std::vector<Document> train_docs;
        for (const py::dict& d : train) train_docs.push_back(doc_from_dict(d));
        Document test = doc_from_dict(test_doc);
        std::vector<Document> pool = train_docs;
        pool.push_back(test);
        VectorMap vectors = vectorize(pool);
        return select_similar(train_docs, test, vectors).doc_id;
      },
      py::arg("train"), py::arg("test_doc"));

  m.def("f1_score", &f1_score, py::arg("precision"), py::arg("recall"));
}
