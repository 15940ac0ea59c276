#include "tkg/pipeline.hpp"

#include "tkg/errors.hpp"
#include "tkg/util.hpp"

#include <json.hpp>

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <set>

namespace tkg {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path PipelineConfig::resolved_out_dir() const {
    if (!out_dir.empty()) return out_dir;
    fs::path parent = graph_path.parent_path();
    return parent.empty() ? fs::path(".") : parent;
}

fs::path PipelineConfig::scores_csv_path() const { return resolved_out_dir() / "scores.csv"; }
fs::path PipelineConfig::distributions_path() const {
    return resolved_out_dir() / "distributions.json";
}
fs::path PipelineConfig::classification_path(const std::string& object_id) const {
    return resolved_out_dir() / "classification" / (object_id + ".json");
}
fs::path PipelineConfig::prompt_text_path(const std::string& object_id) const {
    return resolved_out_dir() / "prompts" / (object_id + ".txt");
}
fs::path PipelineConfig::prompt_plan_path(const std::string& object_id) const {
    return resolved_out_dir() / "prompts" / (object_id + ".plan.json");
}
fs::path PipelineConfig::density_csv_path() const { return resolved_out_dir() / "density.csv"; }
fs::path PipelineConfig::annotation_report_path() const {
    return resolved_out_dir() / "annotation_report.json";
}
fs::path PipelineConfig::failed_pairs_path() const {
    return resolved_out_dir() / "failed_pairs.jsonl";
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    if (path.is_absolute() || base.empty()) return path;
    return base / path;
}

} // namespace

PipelineConfig load_pipeline_config(const fs::path& path) {
    json doc;
    try {
        doc = json::parse(util::read_file(path));
    } catch (const json::parse_error& e) {
        raise(Errc::invalid_config, "config file: " + std::string(e.what()));
    }
    PipelineConfig cfg;
    fs::path base = path.parent_path();
    try {
        if (doc.contains("corpus_dir")) cfg.corpus_dir = resolve(base, doc["corpus_dir"]);
        if (doc.contains("ontology_path")) cfg.ontology_path = resolve(base, doc["ontology_path"]);
        if (doc.contains("objects_dir")) cfg.objects_dir = resolve(base, doc["objects_dir"]);
        if (doc.contains("graph_path")) cfg.graph_path = resolve(base, doc["graph_path"]);
        if (doc.contains("out_dir")) cfg.out_dir = resolve(base, doc["out_dir"]);
        if (doc.contains("template_path")) cfg.template_path = resolve(base, doc["template_path"]);
        if (doc.contains("gold_path")) cfg.gold_path = resolve(base, doc["gold_path"]);
        if (doc.contains("replay_path")) cfg.replay_path = resolve(base, doc["replay_path"]);
        if (doc.contains("record_path")) cfg.record_path = resolve(base, doc["record_path"]);
        if (doc.contains("alpha")) cfg.thresholds.alpha = doc["alpha"].get<double>();
        if (doc.contains("beta")) cfg.thresholds.beta = doc["beta"].get<double>();
        if (doc.contains("backend")) cfg.backend = doc["backend"].get<std::string>();
        if (doc.contains("propagate_beta")) cfg.propagate_beta = doc["propagate_beta"].get<bool>();
        if (doc.contains("chunking") && doc["chunking"].contains("max_chunk_chars")) {
            cfg.chunking.max_chunk_chars = doc["chunking"]["max_chunk_chars"].get<std::size_t>();
        }
        if (doc.contains("naive_minima")) {
            cfg.naive_minima = doc["naive_minima"].get<std::vector<double>>();
        }
        if (doc.contains("llm")) {
            const json& l = doc["llm"];
            if (l.contains("base_url")) cfg.llm.base_url = l["base_url"].get<std::string>();
            if (l.contains("model_chat")) cfg.llm.model_chat = l["model_chat"].get<std::string>();
            if (l.contains("model_embed")) cfg.llm.model_embed = l["model_embed"].get<std::string>();
            if (l.contains("timeout_s")) cfg.llm.timeout_s = l["timeout_s"].get<double>();
            if (l.contains("max_retries")) cfg.llm.max_retries = l["max_retries"].get<int>();
            if (l.contains("max_in_flight")) cfg.llm.max_in_flight = l["max_in_flight"].get<int>();
            if (l.contains("backoff_base_ms")) cfg.llm.backoff_base_ms = l["backoff_base_ms"].get<int>();
        }
        if (doc.contains("annotation_template")) {
            const json& t = doc["annotation_template"];
            if (t.contains("version")) cfg.annotation_template.version = t["version"].get<std::string>();
            if (t.contains("system")) cfg.annotation_template.system_text = t["system"].get<std::string>();
            if (t.contains("user")) cfg.annotation_template.user_pattern = t["user"].get<std::string>();
        }
    } catch (const json::exception& e) {
        raise(Errc::invalid_config, "config file: " + std::string(e.what()));
    }
    cfg.llm = llm::apply_env_overrides(cfg.llm);
    return cfg;
}

void validate_pipeline_config(const PipelineConfig& config) {
    auto in_unit = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!in_unit(config.thresholds.alpha) || !in_unit(config.thresholds.beta)) {
        raise(Errc::invalid_config, "alpha and beta must lie in (0, 1]");
    }
    if (config.backend != "mock" && config.backend != "replay" && config.backend != "http") {
        raise(Errc::invalid_config, "backend must be mock, replay or http");
    }
    if (config.backend == "replay" && config.replay_path.empty()) {
        raise(Errc::invalid_config, "replay backend requires replay_path");
    }
}

void Backends::flush() {
    if (replay) replay->flush();
}

Backends make_backends(const PipelineConfig& config) {
    Backends b;
    if (config.backend == "mock") {
        b.annotator = std::make_unique<MockKeywordAnnotator>();
        b.embedder = std::make_unique<HashingEmbedder>();
        return b;
    }
    if (config.backend == "replay") {
        b.replay = std::make_shared<llm::ReplayStore>(config.replay_path);
        b.replay->load();
        b.chat = llm::make_replay_chat_client(b.replay, config.llm.model_chat);
        b.embedding = llm::make_replay_embedding_client(b.replay, config.llm.model_embed);
    } else { // http
        b.chat = llm::make_http_chat_client(config.llm);
        b.embedding = llm::make_http_embedding_client(config.llm);
        if (!config.record_path.empty()) {
            b.replay = std::make_shared<llm::ReplayStore>(config.record_path);
            b.replay->load();
            b.chat = llm::make_recording_chat_client(std::move(b.chat), b.replay,
                                                     config.llm.model_chat);
            b.embedding = llm::make_recording_embedding_client(std::move(b.embedding), b.replay,
                                                               config.llm.model_embed);
        }
    }
    b.annotator = std::make_unique<LlmAnnotator>(*b.chat, config.annotation_template);
    b.embedder = std::make_unique<ClientEmbedder>(*b.embedding);
    return b;
}

GraphLock::GraphLock(const fs::path& graph_path) {
    lock_path_ = graph_path;
    lock_path_ += ".lock";
    fs::path dir = lock_path_.parent_path();
    if (!dir.empty()) {
        std::error_code ec;
        fs::create_directories(dir, ec);
    }
    int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        raise(Errc::lock_held, "another writer holds " + lock_path_.string() +
                                   " (remove the file if that writer crashed)");
    }
    ::close(fd);
}

GraphLock::~GraphLock() {
    std::error_code ec;
    fs::remove(lock_path_, ec);
}

namespace {

TripartiteGraph load_graph_artifact(const PipelineConfig& config) {
    if (!fs::exists(config.graph_path)) {
        raise(Errc::missing_artifact,
              "graph missing at " + config.graph_path.string() + " - run ingest first");
    }
    return load_graph(config.graph_path);
}

Ontology load_ontology_artifact(const PipelineConfig& config) {
    if (config.ontology_path.empty() || !fs::exists(config.ontology_path)) {
        raise(Errc::missing_artifact, "ontology file missing - set ontology_path");
    }
    return parse_ontology(util::read_file(config.ontology_path));
}

} // namespace

ObjectNode load_object_file(const fs::path& path) {
    std::string raw = util::read_file(path);
    ObjectNode obj;
    obj.object_id = path.stem().string();
    obj.title = obj.object_id;
    std::string body = raw;
    if (raw.rfind("# ", 0) == 0) {
        std::size_t eol = raw.find('\n');
        std::string heading = util::trim(raw.substr(2, eol == std::string::npos ? std::string::npos
                                                                                : eol - 2));
        if (!heading.empty()) obj.title = heading;
        body = eol == std::string::npos ? "" : raw.substr(eol + 1);
    }
    obj.text = util::trim(body);
    if (obj.text.empty()) raise(Errc::empty_source, "object file " + path.string() + " is empty");
    return obj;
}

QueryTemplate load_query_template(const PipelineConfig& config) {
    QueryTemplate tmpl;
    if (!config.template_path.empty()) {
        tmpl.text = util::trim(util::read_file(config.template_path));
    }
    return tmpl;
}

IngestSummary step_ingest(const PipelineConfig& config) {
    GraphLock lock(config.graph_path);
    TripartiteGraph g;
    if (fs::exists(config.graph_path)) g = load_graph(config.graph_path);

    IngestSummary summary;
    if (!config.corpus_dir.empty()) {
        for (const auto& file : util::list_files(config.corpus_dir, ".txt")) {
            std::string doc_id = file.stem().string();
            IngestStats stats = ingest_document(g, doc_id, doc_id, file.string(),
                                                util::read_file(file), config.chunking);
            ++summary.documents;
            summary.sections += stats.sections;
            summary.chunks += stats.chunks;
        }
    }
    if (!config.objects_dir.empty()) {
        for (const auto& file : util::list_files(config.objects_dir, ".txt")) {
            g.upsert(load_object_file(file));
            ++summary.objects;
        }
    }
    save_graph(g, config.graph_path);
    return summary;
}

PlugOntologySummary step_plug_ontology(const PipelineConfig& config) {
    Ontology ontology = load_ontology_artifact(config);
    GraphLock lock(config.graph_path);
    TripartiteGraph g = load_graph_artifact(config);

    PlugOntologySummary summary;
    int class_ordinal = 0;
    for (const auto& cls : ontology.classes) {
        ConceptClassNode cn;
        cn.class_id = cls.class_id;
        cn.name = cls.name;
        cn.ordinal = class_ordinal++;
        for (const auto& c : cls.concepts) cn.concept_ids.push_back(c.concept_id);
        g.upsert(std::move(cn));
        ++summary.classes;

        int concept_ordinal = 0;
        for (const auto& c : cls.concepts) {
            ConceptNode node;
            node.concept_id = c.concept_id;
            node.class_id = c.class_id;
            node.name = c.name;
            node.ordinal = concept_ordinal++;
            node.description = c.description;
            g.upsert(std::move(node));
            g.insert_edge(EdgeKind::class_concept, c.class_id, c.concept_id);
            ++summary.concepts;
        }
    }
    save_graph(g, config.graph_path);
    return summary;
}

AnnotationReport step_annotate(const PipelineConfig& config) {
    Ontology ontology = load_ontology_artifact(config);
    Backends backends = make_backends(config);
    GraphLock lock(config.graph_path);
    TripartiteGraph g = load_graph_artifact(config);
    if (g.concepts().empty()) {
        raise(Errc::missing_artifact, "graph has no concepts - run plug-ontology first");
    }

    AnnotationOptions options;
    options.max_in_flight = config.llm.max_in_flight;
    AnnotationReport report = run_annotation(g, ontology, *backends.annotator, options);

    save_graph(g, config.graph_path);
    util::write_file_atomic(config.annotation_report_path(), report.to_json());
    if (!report.failures.empty()) {
        write_failed_pairs(config.failed_pairs_path(), report.failures);
    }
    backends.flush();
    return report;
}

EmbedSummary step_embed(const PipelineConfig& config, bool force) {
    Backends backends = make_backends(config);
    GraphLock lock(config.graph_path);
    TripartiteGraph g = load_graph_artifact(config);

    EmbedSummary summary;
    summary.edges_embedded = embed_edges(g, *backends.embedder, force, config.llm.max_in_flight);
    summary.chunks_embedded = embed_chunks(g, *backends.embedder, force, config.llm.max_in_flight);
    summary.dimension = g.embedding_dim();
    save_graph(g, config.graph_path);
    backends.flush();
    return summary;
}

ScoreSummary step_score(const PipelineConfig& config) {
    TripartiteGraph g = load_graph_artifact(config);
    std::vector<ScoreRecord> records = score_all(g);
    auto distributions = build_distributions(records);

    write_scores_csv(config.scores_csv_path(), records, distributions);
    write_distributions_json(config.distributions_path(), distributions);

    ScoreSummary summary;
    summary.records = records.size();
    summary.concepts = distributions.size();
    return summary;
}

ClassifySummary step_classify(const PipelineConfig& config, const std::string& object_id) {
    TripartiteGraph g = load_graph_artifact(config);
    if (!fs::exists(config.distributions_path())) {
        raise(Errc::missing_artifact, "scores missing - run score first");
    }
    auto distributions = load_distributions_json(config.distributions_path());

    ClassificationGraph cg = build_classification_graph(g, distributions, object_id);
    ClassifyOptions options;
    options.propagate_beta = config.propagate_beta;
    classify(cg, config.thresholds, options);
    write_classification_json(config.classification_path(object_id), cg, config.thresholds);

    ClassifySummary summary;
    summary.object_id = object_id;
    summary.nodes = cg.nodes.size();
    for (const auto& n : cg.nodes) {
        if (n.activated_by == Activation::alpha) ++summary.alpha_selected;
        if (n.activated_by == Activation::beta) ++summary.beta_selected;
    }
    if (auto warn = config.thresholds.warning()) summary.warning = *warn;
    return summary;
}

PromptSummary step_prompt(const PipelineConfig& config, const std::string& object_id) {
    TripartiteGraph g = load_graph_artifact(config);
    Ontology ontology = load_ontology_artifact(config);
    fs::path cls_path = config.classification_path(object_id);
    if (!fs::exists(cls_path)) {
        raise(Errc::missing_artifact,
              "classification missing for " + object_id + " - run classify first");
    }
    StoredClassification stored = load_classification_json(cls_path);

    QueryTemplate tmpl = load_query_template(config);
    HeuristicTokenCounter counter;
    PromptPlan plan = assemble_prompt(object_id, g, stored.graph, tmpl, ontology, counter);

    util::write_file_atomic(config.prompt_text_path(object_id), render(plan));
    write_plan_json(config.prompt_plan_path(object_id), plan);

    PromptSummary summary;
    summary.object_id = object_id;
    summary.blocks = plan.blocks.size();
    summary.token_count = plan.token_count;
    summary.alpha = stored.thresholds.alpha;
    summary.beta = stored.thresholds.beta;
    return summary;
}

CompareSummary step_compare(const PipelineConfig& config, bool also_tsv) {
    TripartiteGraph g = load_graph_artifact(config);
    Ontology ontology = load_ontology_artifact(config);
    if (config.gold_path.empty() || !fs::exists(config.gold_path)) {
        raise(Errc::missing_artifact, "gold file missing - set gold_path");
    }
    GoldData gold = load_gold_json(config.gold_path);
    Backends backends = make_backends(config);

    ComparisonConfig cc;
    cc.thresholds = config.thresholds;
    cc.naive_minima = config.naive_minima;
    cc.query_template = load_query_template(config);
    HeuristicTokenCounter counter;

    std::vector<DensityReport> reports =
        run_comparison(g, ontology, gold, cc, *backends.embedder, counter);
    write_density_csv(config.density_csv_path(), reports);
    if (also_tsv) {
        fs::path tsv = config.density_csv_path();
        tsv.replace_extension(".tsv");
        util::write_file_atomic(tsv, density_to_tsv(reports));
    }

    CompareSummary summary;
    summary.reports = reports.size();
    summary.csv_path = config.density_csv_path();
    return summary;
}

StatsSummary step_stats(const PipelineConfig& config) {
    TripartiteGraph g = load_graph_artifact(config);
    StatsSummary s;
    s.documents = g.documents().size();
    s.sections = g.sections().size();
    s.chunks = g.chunks().size();
    s.concept_classes = g.concept_classes().size();
    s.concepts = g.concepts().size();
    s.objects = g.objects().size();
    for (const auto& [id, e] : g.edges()) {
        if (e.kind == EdgeKind::object_concept) ++s.object_concept_edges;
        else if (e.kind == EdgeKind::concept_chunk) ++s.concept_chunk_edges;
        else ++s.structure_edges;
        if (edge_kind_annotated(e.kind) && e.embedding) ++s.embedded_edges;
    }
    for (const auto& [id, c] : g.chunks()) {
        if (c.embedding) ++s.embedded_chunks;
    }
    s.embedding_dim = g.embedding_dim();
    return s;
}

} // namespace tkg
