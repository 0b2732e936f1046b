// specid: command-line front end over the core library.
#include <iostream>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "specid/error.hpp"

namespace cli = specid::cli;

int main(int argc, char** argv) {
  CLI::App app{"specid: spectra preprocessing, library search and evaluation"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  app.add_option("--config", config_path,
                 std::string("JSON config file (default: $") + cli::kConfigEnv + ")");
  app.add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--seed", seed, "overrides the config seed");

  cli::ConvertArgs convert;
  auto* c_convert = app.add_subcommand("convert", "convert between .msp and .jsonl");
  c_convert->add_option("input", convert.input)->required();
  c_convert->add_option("output", convert.output)->required();

  cli::PrepareArgs prepare;
  auto* c_prepare = app.add_subcommand("prepare", "normalize, round, filter; log rejections");
  c_prepare->add_option("input", prepare.input)->required();
  c_prepare->add_option("output", prepare.output)->required();
  c_prepare->add_option("--rejects", prepare.rejects, "rejection log CSV");
  c_prepare->add_option("--encoded", prepare.encoded, "JSONL of m/z ids and intensity bins");
  c_prepare->add_option("--tokenizer", prepare.tokenizer, "also encode SMILES with this tokenizer");
  c_prepare->add_option("--default-source", prepare.default_source, "source token for unlabeled records")
      ->capture_default_str();

  cli::FitBinsArgs fit;
  auto* c_fit = app.add_subcommand("fit-bins", "fit the log base for a bin count");
  c_fit->add_option("input", fit.input)->required();
  c_fit->add_option("--bins", fit.num_bins)->capture_default_str();
  c_fit->add_option("--histogram", fit.histogram, "bin histogram CSV");

  cli::TokenizeArgs tokenize;
  auto* c_tok = app.add_subcommand("tokenize", "train a byte-level BPE tokenizer");
  c_tok->add_option("corpus", tokenize.corpus, "records file or one SMILES per line")->required();
  c_tok->add_option("output", tokenize.output)->required();
  c_tok->add_option("--min-frequency", tokenize.min_frequency)->capture_default_str();
  c_tok->add_option("--max-merges", tokenize.max_merges, "0 = unlimited")->capture_default_str();

  cli::SplitArgs split;
  std::string ratios = "0.8,0.1,0.1";
  auto* c_split = app.add_subcommand("split", "grouped train/validation/test split");
  c_split->add_option("input", split.input)->required();
  c_split->add_option("out_dir", split.out_dir)->required();
  c_split->add_option("--ratios", ratios, "train,validation,test")->capture_default_str();

  cli::IndexArgs index;
  auto* c_index = app.add_subcommand("index", "build a search index from records");
  c_index->add_option("input", index.input)->required();
  c_index->add_option("output", index.output)->required();

  cli::SearchArgs search;
  std::optional<std::string> weights;
  auto* c_search = app.add_subcommand("search", "query a library index");
  c_search->add_option("--queries", search.queries)->required();
  c_search->add_option("--library", search.library)->required();
  c_search->add_option("--method", search.method)->check(CLI::IsMember({"sss", "hss", "bdc"}))
      ->capture_default_str();
  c_search->add_option("--k", search.k)->capture_default_str();
  c_search->add_option("--weights", weights, "a,c; default: the weights stored in the index");
  c_search->add_option("--output", search.output, "CSV path, default stdout");
  c_search->add_flag("--leave-one-out", search.leave_one_out, "skip entries of the query's compound");

  cli::EvaluateArgs evaluate;
  std::optional<std::string> ks;
  auto* c_eval = app.add_subcommand("evaluate", "Acc/Sim/Win/ALAG report");
  c_eval->add_option("predictions", evaluate.predictions, "[name=]path.csv, one per method")->required();
  c_eval->add_option("--truth", evaluate.truth, "records file with ground-truth SMILES")->required();
  c_eval->add_option("--csv", evaluate.csv);
  c_eval->add_option("--k", ks, "comma-separated k list");
  c_eval->add_flag("--strict", evaluate.strict, "unparseable candidates are errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  cli::Context ctx;
  ctx.threads = threads;
  ctx.out = &std::cout;
  ctx.err = &std::cerr;

  auto parse_list = [](const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        v.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw specid::ConfigError("bad number '" + item + "' in list '" + text + "'");
      }
    }
    return v;
  };

  return cli::run(ctx, [&] {
    ctx.config = cli::resolve_config(config_path ? std::optional<std::filesystem::path>(*config_path)
                                                 : std::nullopt);
    if (seed) ctx.config.seed = *seed;
    if (weights) {
      const auto w = parse_list(*weights);
      if (w.size() != 2) throw specid::ConfigError("--weights expects a,c");
      search.weights = specid::search::SimilarityWeights{w[0], w[1]};
      search.weights->validate();
    }
    if (ks) {
      ctx.config.ks.clear();
      for (double k : parse_list(*ks)) {
        if (k < 1 || k != static_cast<double>(static_cast<std::size_t>(k)))
          throw specid::ConfigError("k values must be positive integers");
        ctx.config.ks.push_back(static_cast<std::size_t>(k));
      }
    }
    ctx.config.validate();

    if (*c_convert) return cli::cmd_convert(convert, ctx);
    if (*c_prepare) return cli::cmd_prepare(prepare, ctx);
    if (*c_fit) return cli::cmd_fit_bins(fit, ctx);
    if (*c_tok) return cli::cmd_tokenize(tokenize, ctx);
    if (*c_split) {
      const auto r = parse_list(ratios);
      if (r.size() != 3) throw specid::ConfigError("--ratios expects train,validation,test");
      split.train = r[0];
      split.validation = r[1];
      split.test = r[2];
      return cli::cmd_split(split, ctx);
    }
    if (*c_index) return cli::cmd_index(index, ctx);
    if (*c_search) return cli::cmd_search(search, ctx);
    return cli::cmd_evaluate(evaluate, ctx);
  });
}
