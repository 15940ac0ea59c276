// tkg — build a tripartite knowledge graph from documents, classify
// concept evidence per object and assemble dense prompts.
//
// Exit codes: 0 success, 1 user error, 2 backend failure.

#include "tkg/errors.hpp"
#include "tkg/pipeline.hpp"
#include "tkg/syngen.hpp"
#include "tkg/util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CommonFlags {
    std::string config_path;
    bool json_output = false;

    // Overrides (flags > env > file).
    std::string graph_path, corpus_dir, objects_dir, ontology_path, gold_path, out_dir;
    std::string backend, template_path, replay_path, record_path;
    double alpha = -1.0, beta = -1.0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file");
    cmd->add_flag("--json", flags.json_output, "machine-readable JSON on stdout");
    cmd->add_option("--graph", flags.graph_path, "graph file (JSON lines)");
    cmd->add_option("--corpus", flags.corpus_dir, "corpus directory (*.txt)");
    cmd->add_option("--objects", flags.objects_dir, "objects directory (*.txt)");
    cmd->add_option("--ontology", flags.ontology_path, "ontology JSON file");
    cmd->add_option("--gold", flags.gold_path, "gold JSON file (compare)");
    cmd->add_option("--out", flags.out_dir, "artifact output directory");
    cmd->add_option("--backend", flags.backend, "annotator/embedder backend: mock|replay|http");
    cmd->add_option("--template", flags.template_path, "query template file");
    cmd->add_option("--replay", flags.replay_path, "replay fixture (JSON lines)");
    cmd->add_option("--record", flags.record_path, "record http traffic to fixture");
    cmd->add_option("--alpha", flags.alpha, "alpha threshold on P_c");
    cmd->add_option("--beta", flags.beta, "beta interaction threshold");
}

tkg::PipelineConfig make_config(const CommonFlags& flags) {
    tkg::PipelineConfig cfg;
    if (!flags.config_path.empty()) cfg = tkg::load_pipeline_config(flags.config_path);
    if (!flags.graph_path.empty()) cfg.graph_path = flags.graph_path;
    if (!flags.corpus_dir.empty()) cfg.corpus_dir = flags.corpus_dir;
    if (!flags.objects_dir.empty()) cfg.objects_dir = flags.objects_dir;
    if (!flags.ontology_path.empty()) cfg.ontology_path = flags.ontology_path;
    if (!flags.gold_path.empty()) cfg.gold_path = flags.gold_path;
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (!flags.backend.empty()) cfg.backend = flags.backend;
    if (!flags.template_path.empty()) cfg.template_path = flags.template_path;
    if (!flags.replay_path.empty()) cfg.replay_path = flags.replay_path;
    if (!flags.record_path.empty()) cfg.record_path = flags.record_path;
    if (flags.alpha >= 0.0) cfg.thresholds.alpha = flags.alpha;
    if (flags.beta >= 0.0) cfg.thresholds.beta = flags.beta;
    tkg::validate_pipeline_config(cfg);
    return cfg;
}

void emit(const CommonFlags& flags, const json& payload, const std::string& human) {
    if (flags.json_output) {
        std::cout << payload.dump() << "\n";
    } else {
        std::cout << human << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tripartite knowledge-graph prompt pipeline"};
    app.require_subcommand(1);

    CommonFlags flags;
    int exit_code = 0;

    // generate ---------------------------------------------------------
    auto* cmd_generate = app.add_subcommand("generate", "write a synthetic corpus with gold data");
    std::uint64_t seed = 42;
    std::string gen_out = "synthetic";
    int gen_docs = 6, gen_objects = 3;
    cmd_generate->add_option("--seed", seed, "generator seed");
    cmd_generate->add_option("--dest", gen_out, "output directory");
    cmd_generate->add_option("--docs", gen_docs, "number of documents");
    cmd_generate->add_option("--num-objects", gen_objects, "number of objects");
    add_common(cmd_generate, flags);
    cmd_generate->callback([&] {
        auto cfg = make_config(flags);
        tkg::Ontology ontology =
            tkg::parse_ontology(tkg::util::read_file(cfg.ontology_path));
        tkg::syngen::PlantPlan plan;
        plan.seed = seed;
        plan.docs = gen_docs;
        plan.objects = gen_objects;
        plan.ontology = &ontology;
        auto paths = tkg::syngen::generate(plan, gen_out);
        emit(flags,
             json{{"corpus_dir", paths.corpus_dir.string()},
                  {"objects_dir", paths.objects_dir.string()},
                  {"gold_path", paths.gold_path.string()},
                  {"seed", seed}},
             "generated corpus at " + paths.corpus_dir.string() + ", objects at " +
                 paths.objects_dir.string() + ", gold at " + paths.gold_path.string());
    });

    // ingest -----------------------------------------------------------
    auto* cmd_ingest = app.add_subcommand("ingest", "ingest corpus and object files into the graph");
    add_common(cmd_ingest, flags);
    cmd_ingest->callback([&] {
        auto cfg = make_config(flags);
        auto s = tkg::step_ingest(cfg);
        emit(flags,
             json{{"documents", s.documents}, {"sections", s.sections}, {"chunks", s.chunks},
                  {"objects", s.objects}},
             "ingested " + std::to_string(s.documents) + " documents (" +
                 std::to_string(s.sections) + " sections, " + std::to_string(s.chunks) +
                 " chunks) and " + std::to_string(s.objects) + " objects");
    });

    // plug-ontology ------------------------------------------------------
    auto* cmd_plug = app.add_subcommand("plug-ontology", "attach ontology concepts to the graph");
    add_common(cmd_plug, flags);
    cmd_plug->callback([&] {
        auto cfg = make_config(flags);
        auto s = tkg::step_plug_ontology(cfg);
        emit(flags, json{{"classes", s.classes}, {"concepts", s.concepts}},
             "plugged " + std::to_string(s.classes) + " classes with " +
                 std::to_string(s.concepts) + " concepts");
    });

    // annotate -----------------------------------------------------------
    auto* cmd_annotate = app.add_subcommand("annotate", "concept-anchored pre-analysis of chunks and objects");
    add_common(cmd_annotate, flags);
    cmd_annotate->callback([&] {
        auto cfg = make_config(flags);
        auto report = tkg::step_annotate(cfg);
        emit(flags,
             json{{"edges_created", report.edges_created},
                  {"pairs_skipped", report.pairs_skipped},
                  {"pairs_failed", report.pairs_failed}},
             "created " + std::to_string(report.edges_created) + " edges, skipped " +
                 std::to_string(report.pairs_skipped) + ", failed " +
                 std::to_string(report.pairs_failed));
        if (report.pairs_failed > 0) exit_code = 2;
    });

    // embed --------------------------------------------------------------
    auto* cmd_embed = app.add_subcommand("embed", "embed annotated-edge summaries and raw chunks");
    bool force = false;
    cmd_embed->add_flag("--force", force, "re-embed even if vectors exist");
    add_common(cmd_embed, flags);
    cmd_embed->callback([&] {
        auto cfg = make_config(flags);
        auto s = tkg::step_embed(cfg, force);
        emit(flags,
             json{{"edges_embedded", s.edges_embedded}, {"chunks_embedded", s.chunks_embedded},
                  {"dimension", s.dimension}},
             "embedded " + std::to_string(s.edges_embedded) + " edges and " +
                 std::to_string(s.chunks_embedded) + " chunks (d=" +
                 std::to_string(s.dimension) + ")");
    });

    // score ---------------------------------------------------------------
    auto* cmd_score = app.add_subcommand("score", "compute w scores and per-concept distributions");
    add_common(cmd_score, flags);
    cmd_score->callback([&] {
        auto cfg = make_config(flags);
        auto s = tkg::step_score(cfg);
        emit(flags, json{{"records", s.records}, {"concepts", s.concepts}},
             "scored " + std::to_string(s.records) + " (object, concept, chunk) triples over " +
                 std::to_string(s.concepts) + " concepts");
    });

    // classify --------------------------------------------------------------
    auto* cmd_classify = app.add_subcommand("classify", "select concept-chunk pairs for one object");
    std::string object_id;
    cmd_classify->add_option("object", object_id, "object id")->required();
    add_common(cmd_classify, flags);
    cmd_classify->callback([&] {
        auto cfg = make_config(flags);
        auto s = tkg::step_classify(cfg, object_id);
        json j{{"object_id", s.object_id},
               {"nodes", s.nodes},
               {"alpha_selected", s.alpha_selected},
               {"beta_selected", s.beta_selected},
               {"alpha", cfg.thresholds.alpha},
               {"beta", cfg.thresholds.beta}};
        if (!s.warning.empty()) j["warning"] = s.warning;
        emit(flags, j,
             "classified " + std::to_string(s.nodes) + " candidate pairs for " + s.object_id +
                 ": " + std::to_string(s.alpha_selected) + " alpha, " +
                 std::to_string(s.beta_selected) + " beta" +
                 (s.warning.empty() ? "" : "\nwarning: " + s.warning));
    });

    // prompt ------------------------------------------------------------------
    auto* cmd_prompt = app.add_subcommand("prompt", "assemble the prompt for one object");
    std::string prompt_object;
    cmd_prompt->add_option("object", prompt_object, "object id")->required();
    add_common(cmd_prompt, flags);
    cmd_prompt->callback([&] {
        auto cfg = make_config(flags);
        auto s = tkg::step_prompt(cfg, prompt_object);
        emit(flags,
             json{{"object_id", s.object_id},
                  {"blocks", s.blocks},
                  {"token_count", s.token_count},
                  {"alpha", s.alpha},
                  {"beta", s.beta},
                  {"prompt_path", cfg.prompt_text_path(prompt_object).string()}},
             "assembled " + std::to_string(s.blocks) + " blocks (" +
                 std::to_string(s.token_count) + " tokens, alpha=" +
                 tkg::util::format_double(s.alpha) + " beta=" + tkg::util::format_double(s.beta) +
                 ") -> " + cfg.prompt_text_path(prompt_object).string());
    });

    // compare --------------------------------------------------------------
    auto* cmd_compare = app.add_subcommand("compare", "density comparison against the naive baseline");
    bool tsv = false;
    cmd_compare->add_flag("--tsv", tsv, "also write a tab-separated table");
    add_common(cmd_compare, flags);
    cmd_compare->callback([&] {
        auto cfg = make_config(flags);
        auto s = tkg::step_compare(cfg, tsv);
        emit(flags, json{{"reports", s.reports}, {"csv_path", s.csv_path.string()}},
             "wrote " + std::to_string(s.reports) + " density reports to " +
                 s.csv_path.string());
    });

    // stats -------------------------------------------------------------------
    auto* cmd_stats = app.add_subcommand("stats", "graph statistics");
    add_common(cmd_stats, flags);
    cmd_stats->callback([&] {
        auto cfg = make_config(flags);
        auto s = tkg::step_stats(cfg);
        json j{{"documents", s.documents},
               {"sections", s.sections},
               {"chunks", s.chunks},
               {"concept_classes", s.concept_classes},
               {"concepts", s.concepts},
               {"objects", s.objects},
               {"object_concept_edges", s.object_concept_edges},
               {"concept_chunk_edges", s.concept_chunk_edges},
               {"structure_edges", s.structure_edges},
               {"embedded_edges", s.embedded_edges},
               {"embedded_chunks", s.embedded_chunks},
               {"embedding_dim", s.embedding_dim}};
        emit(flags, j, j.dump(2));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const tkg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return tkg::is_backend_error(e.code()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
