// sememe-kb: build an unsupervised sememe knowledge base from a text corpus.
//
//   sememe-kb prepare  --config cfg.json
//   sememe-kb align    --config cfg.json --source fr --target en [--mode orthogonal]
//   sememe-kb pretrain --config cfg.json
//   sememe-kb finetune --config cfg.json
//   sememe-kb predict  --config cfg.json WORD [--top 6] [--languages en,fr] [--format text|json|both]

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sememe/sememe.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> workdir;
  std::optional<std::string> profile;
  std::optional<double> lambda;
  std::optional<std::size_t> clusters;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> finetune_epochs;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "Pipeline config (JSON)")->required();
  cmd->add_option("--seed", f.seed, "Override the random seed");
  cmd->add_option("--workdir", f.workdir, "Override the artifact directory");
  cmd->add_option("--profile", f.profile, "Hyperparameter profile")->check(CLI::IsMember({"desk", "full"}));
  cmd->add_option("--lambda", f.lambda, "Clustering-loss weight for fine-tuning");
  cmd->add_option("--clusters", f.clusters, "Number of sememes K");
  cmd->add_option("--epochs", f.epochs, "Autoencoder pre-training epochs");
  cmd->add_option("--finetune-epochs", f.finetune_epochs, "Fine-tuning epochs");
}

sememe::PipelineConfig resolve(const CommonFlags& f) {
  sememe::PipelineConfig c = sememe::load_config(f.config);
  if (f.profile) sememe::apply_profile(c, *f.profile);
  if (f.seed) c.seed = *f.seed;
  if (f.workdir) c.paths.workdir = sememe::fs::absolute(*f.workdir).lexically_normal();
  if (f.lambda) c.dcn.lambda = *f.lambda;
  if (f.clusters) c.dcn.clusters = *f.clusters;
  if (f.epochs) c.dcn.epochs = *f.epochs;
  if (f.finetune_epochs) c.dcn.finetune_epochs = *f.finetune_epochs;
  return c;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised sememe knowledge-base builder"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* prepare = app.add_subcommand("prepare", "Split, tokenize, filter and index the corpus");
  auto* align = app.add_subcommand("align", "Fit a linear map between two embedding spaces");
  auto* pretrain = app.add_subcommand("pretrain", "Train the autoencoder and initialise the sememe space");
  auto* finetune = app.add_subcommand("finetune", "Jointly refine the autoencoder and the sememe space");
  auto* predict = app.add_subcommand("predict", "Report a word's sememe distribution");
  for (auto* cmd : {prepare, align, pretrain, finetune, predict}) add_common(cmd, flags);

  sememe::AlignOptions align_opt;
  std::string mode = "orthogonal";
  align->add_option("--source", align_opt.source, "Source language (mapped into the target space)")->required();
  align->add_option("--target", align_opt.target, "Target language")->required();
  align->add_option("--mode", mode, "orthogonal or least-squares")->check(CLI::IsMember({"orthogonal", "least-squares"}));
  align->add_flag("--identical-pairs", align_opt.identical_pairs, "Use identically spelled tokens as the dictionary");

  sememe::PredictOptions predict_opt;
  std::optional<std::size_t> top;
  std::string languages, format = "text", output;
  predict->add_option("word", predict_opt.word, "Word to analyse")->required();
  predict->add_option("--top", top, "Number of sememes to list");
  predict->add_option("--languages", languages, "Comma-separated description languages");
  predict->add_option("--format", format, "text, json or both")->check(CLI::IsMember({"text", "json", "both"}));
  predict->add_option("--output", output, "Write the report here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    const sememe::PipelineConfig cfg = resolve(flags);
    if (prepare->parsed()) {
      sememe::cmd_prepare(cfg, std::cerr);
    } else if (align->parsed()) {
      align_opt.mode = sememe::parse_align_mode(mode);
      const auto map = sememe::cmd_align(cfg, align_opt, std::cerr);
      std::cout << "residual " << map.residual << '\n';
    } else if (pretrain->parsed()) {
      sememe::cmd_pretrain(cfg, std::cerr);
    } else if (finetune->parsed()) {
      sememe::cmd_finetune(cfg, std::cerr);
    } else if (predict->parsed()) {
      predict_opt.top_n = top.value_or(cfg.report.top_n);
      predict_opt.languages = split_list(languages);
      const auto rep = sememe::cmd_predict(cfg, predict_opt, std::cerr);
      std::string text;
      if (format == "text" || format == "both") text += sememe::render_text(rep, predict_opt.top_n);
      if (format == "both") text += "\n";
      if (format == "json" || format == "both") text += sememe::render_json(rep, predict_opt.top_n);
      if (output.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(output, std::ios::binary);
        if (!out) throw sememe::Error(sememe::ErrorKind::kIo, "cannot write '" + output + "'");
        out << text;
      }
    }
  } catch (const sememe::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sememe::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
