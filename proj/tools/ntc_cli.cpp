// Command line front end: corpus generation, transform bank training,
// dataset collection, network training, encode, decode, and batch evaluation.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ntc/codec.hpp"
#include "ntc/corpus.hpp"
#include "ntc/dataset.hpp"
#include "ntc/gemm.hpp"
#include "ntc/image_io.hpp"
#include "ntc/klt.hpp"
#include "ntc/metrics.hpp"
#include "ntc/training.hpp"

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(std::stoi(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

std::vector<std::pair<int, int>> parse_sizes(const std::string& s) {
  if (s == "all") return {ntc::trained_sizes().begin(), ntc::trained_sizes().end()};
  std::vector<std::pair<int, int>> out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    const std::string item = s.substr(pos, comma - pos);
    const size_t x = item.find('x');
    if (x == std::string::npos) throw ntc::error("bad size (want HxW): " + item);
    out.emplace_back(std::stoi(item.substr(0, x)), std::stoi(item.substr(x + 1)));
    pos = comma + 1;
  }
  return out;
}

std::vector<ntc::Scheme> parse_schemes(const std::string& s) {
  if (s == "all")
    return {ntc::Scheme::default_pair, ntc::Scheme::fully_explicit, ntc::Scheme::inference,
            ntc::Scheme::prediction};
  std::vector<ntc::Scheme> out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t comma = s.find(',', pos);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(ntc::scheme_from_string(s.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

std::string basename_of(const std::string& path) {
  const size_t slash = path.find_last_of('/');
  std::string b = slash == std::string::npos ? path : path.substr(slash + 1);
  const size_t dot = b.find_last_of('.');
  return dot == std::string::npos ? b : b.substr(0, dot);
}

void write_bytes(const std::string& path, const std::vector<uint8_t>& bytes) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw ntc::error("cannot open for writing: " + path);
  std::fwrite(bytes.data(), 1, bytes.size(), f);
  std::fclose(f);
}

std::vector<uint8_t> read_bytes(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw ntc::error("cannot open: " + path);
  std::fseek(f, 0, SEEK_END);
  const long n = std::ftell(f);
  std::fseek(f, 0, SEEK_SET);
  std::vector<uint8_t> out(size_t(n), 0);
  if (std::fread(out.data(), 1, out.size(), f) != out.size()) {
    std::fclose(f);
    throw ntc::error("short read: " + path);
  }
  std::fclose(f);
  return out;
}

int cmd_make_corpus(const std::string& out_dir, int count, int width, int height,
                    const std::string& prefix) {
  std::filesystem::create_directories(out_dir);
  for (int i = 0; i < count; ++i) {
    ntc::Plane p = ntc::synthetic_image(i, width, height);
    const std::string path = out_dir + "/" + prefix + std::to_string(i) + ".pgm";
    ntc::write_pgm(p, path);
    std::printf("%s %dx%d\n", path.c_str(), p.width, p.height);
  }
  return 0;
}

int cmd_init_models(const std::string& out_dir, uint64_t seed) {
  std::filesystem::create_directories(out_dir);
  ntc::ModelSet ms = ntc::make_seeded_models(seed);
  ntc::save_models(ms, out_dir);
  std::printf("wrote 8 models to %s (hash %016" PRIx64 ")\n", out_dir.c_str(),
              ntc::models_hash(out_dir));
  return 0;
}

int cmd_train_bank(const std::vector<std::string>& images, const std::string& out_path, int qp,
                   size_t cap, const std::string& rect) {
  ntc::Collector col;
  col.want_bank = true;
  col.bank_cap = cap;
  ntc::TransformBank boot = ntc::make_random_bank(0x6ba27bull);
  ntc::CodecConfig cfg;
  cfg.qp = qp;
  cfg.scheme = ntc::Scheme::default_pair;
  cfg.rect = ntc::rect_mode_from_string(rect);
  cfg.nn = false;
  for (const auto& path : images) {
    ntc::Plane img = ntc::read_pgm(path);
    ntc::encode_image(img, cfg, nullptr, boot, 0, 0, &col);
    std::printf("%s collected\n", path.c_str());
    std::fflush(stdout);
  }
  ntc::TransformBank bank = ntc::train_bank(col.bank);
  ntc::save_bank(bank, out_path);
  std::printf("bank written to %s (hash %016" PRIx64 ")\n", out_path.c_str(),
              ntc::file_hash(out_path));
  return 0;
}

int cmd_collect(const std::vector<std::string>& images, const std::string& out_dir,
                const std::string& models_dir, const std::string& bank_path,
                const std::string& qps_str, uint64_t seed, const std::string& rect) {
  const std::vector<int> qps = parse_int_list(qps_str);
  if (qps.empty()) throw ntc::error("no qps given");
  std::filesystem::create_directories(out_dir);
  ntc::ModelSet models = ntc::load_models(models_dir);
  ntc::TransformBank bank = ntc::load_bank(bank_path);
  std::map<std::pair<int, int>, std::unique_ptr<ntc::DatasetWriter>> writers;
  for (auto [h, w] : ntc::trained_sizes())
    writers[{h, w}] = std::make_unique<ntc::DatasetWriter>(
        out_dir + "/" + ntc::dataset_file_name(h, w), h, w);

  ntc::Rng rng(seed);
  ntc::Collector col;
  col.want_obs = true;
  for (const auto& path : images) {
    ntc::Plane img = ntc::read_pgm(path);
    ntc::CodecConfig cfg;
    cfg.qp = qps[size_t(rng.below(qps.size()))];
    cfg.scheme = ntc::Scheme::fully_explicit;
    cfg.rect = ntc::rect_mode_from_string(rect);
    cfg.nn = true;
    ntc::encode_image(img, cfg, &models, bank, 0, 0, &col);
    for (const auto& o : col.obs) writers.at({o.net_h, o.net_w})->append(o);
    std::printf("%s qp=%d obs=%zu\n", path.c_str(), cfg.qp, col.obs.size());
    std::fflush(stdout);
    col.obs.clear();
  }
  for (auto& [size, w] : writers)
    std::printf("d_%dx%d.ntd records=%" PRIu64 "\n", size.first, size.second, w->count());
  return 0;
}

int cmd_train_nn(const std::string& data_dir, const std::string& models_dir,
                 const std::string& sizes_str, int iters, uint64_t seed, uint64_t max_records,
                 int eval_every, const std::string& log_path) {
  ntc::ModelSet models = ntc::load_models(models_dir);
  FILE* log = nullptr;
  if (!log_path.empty()) {
    log = std::fopen(log_path.c_str(), "w");
    if (!log) throw ntc::error("cannot open log file: " + log_path);
    std::fprintf(log, "size,iteration,loss\n");
  }
  for (auto [h, w] : parse_sizes(sizes_str)) {
    const std::string path = data_dir + "/" + ntc::dataset_file_name(h, w);
    if (!std::filesystem::exists(path)) {
      std::printf("%dx%d: no dataset, skipped\n", h, w);
      continue;
    }
    ntc::Dataset ds = ntc::load_dataset(path, max_records);
    if (ds.count == 0) {
      std::printf("%dx%d: dataset empty, skipped\n", h, w);
      continue;
    }
    ntc::TrainConfig tc;
    tc.iterations = iters;
    tc.seed = seed + uint64_t(ntc::ModelSet::index_of(h, w));
    tc.eval_every = eval_every;
    ntc::TrainResult r = ntc::train(models.at(h, w), ds, tc);
    std::printf("%dx%d: records=%" PRIu64 " train=%" PRIu64 " holdout=%" PRIu64
                " loss %.4f -> %.4f acc1=%.4f acc2=%.4f\n",
                h, w, ds.count, r.train_count, r.holdout_count,
                r.loss_curve.empty() ? 0.0 : r.loss_curve.front(),
                r.loss_curve.empty() ? 0.0 : r.loss_curve.back(), r.final_acc1, r.final_acc2);
    std::fflush(stdout);
    if (log)
      for (size_t i = 0; i < r.loss_curve.size(); ++i)
        std::fprintf(log, "%dx%d,%zu,%.6f\n", h, w, i + 1, r.loss_curve[i]);
  }
  if (log) std::fclose(log);
  ntc::save_models(models, models_dir);
  std::printf("models updated in %s (hash %016" PRIx64 ")\n", models_dir.c_str(),
              ntc::models_hash(models_dir));
  return 0;
}

int cmd_encode(const std::string& in_path, const std::string& out_path,
               const std::string& models_dir, const std::string& bank_path, int qp,
               const std::string& scheme, const std::string& rect, bool no_nn,
               bool full_search) {
  ntc::Plane img = ntc::read_pgm(in_path);
  ntc::CodecConfig cfg;
  cfg.qp = qp;
  cfg.scheme = ntc::scheme_from_string(scheme);
  cfg.rect = ntc::rect_mode_from_string(rect);
  cfg.nn = !no_nn;
  cfg.full_mode_search = full_search;
  std::unique_ptr<ntc::ModelSet> models;
  uint64_t mhash = 0;
  if (cfg.nn) {
    if (models_dir.empty()) throw ntc::error("encode with networks needs --models");
    models = std::make_unique<ntc::ModelSet>(ntc::load_models(models_dir));
    mhash = ntc::models_hash(models_dir);
  }
  ntc::TransformBank bank = ntc::load_bank(bank_path);
  const uint64_t bhash = ntc::file_hash(bank_path);
  ntc::EncodeResult r = ntc::encode_image(img, cfg, models.get(), bank, mhash, bhash);
  write_bytes(out_path, r.bytes);
  const double bpp = double(r.counts.total()) / (double(img.width) * double(img.height));
  std::printf("%s: %zu bytes, %.4f bpp, psnr %.4f dB\n", out_path.c_str(), r.bytes.size(), bpp,
              ntc::psnr(img, r.recon));
  for (size_t i = 0; i < ntc::kSyntaxCatCount; ++i)
    std::printf("  %-15s %10" PRIu64 " bits\n", ntc::syntax_cat_name(ntc::SyntaxCat(i)),
                r.counts.bits[i]);
  std::printf("  blocks: %" PRIu64 " leaves, %" PRIu64 " network, %" PRIu64
              " secondary, %" PRIu64 " network+secondary\n",
              r.stats.leaf_blocks, r.stats.nn_blocks, r.stats.lfnst_blocks,
              r.stats.nn_lfnst_blocks);
  return 0;
}

int cmd_decode(const std::string& in_path, const std::string& out_path,
               const std::string& models_dir, const std::string& bank_path) {
  std::unique_ptr<ntc::ModelSet> models;
  uint64_t mhash = 0;
  if (!models_dir.empty()) {
    models = std::make_unique<ntc::ModelSet>(ntc::load_models(models_dir));
    mhash = ntc::models_hash(models_dir);
  }
  ntc::TransformBank bank = ntc::load_bank(bank_path);
  const uint64_t bhash = ntc::file_hash(bank_path);
  ntc::DecodeResult r = ntc::decode_image(read_bytes(in_path), models.get(), bank, mhash, bhash);
  ntc::write_pgm(r.recon, out_path);
  std::printf("%s: %dx%d qp=%d scheme=%s rect=%s\n", out_path.c_str(), r.recon.width,
              r.recon.height, r.header.qp, ntc::scheme_name(r.header.scheme),
              ntc::rect_mode_name(r.header.rect));
  return 0;
}

int cmd_eval(const std::vector<std::string>& images, const std::string& models_dir,
             const std::string& bank_path, const std::string& qps_str,
             const std::string& schemes_str, const std::string& rect,
             const std::string& out_csv) {
  const std::vector<int> qps = parse_int_list(qps_str);
  const std::vector<ntc::Scheme> schemes = parse_schemes(schemes_str);
  ntc::ModelSet models = ntc::load_models(models_dir);
  const uint64_t mhash = ntc::models_hash(models_dir);
  ntc::TransformBank bank = ntc::load_bank(bank_path);
  const uint64_t bhash = ntc::file_hash(bank_path);
  FILE* csv = std::fopen(out_csv.c_str(), "w");
  if (!csv) throw ntc::error("cannot open csv: " + out_csv);
  std::fprintf(csv, "%s\n", ntc::csv_header().c_str());
  for (const auto& path : images) {
    const ntc::Plane img = ntc::read_pgm(path);
    for (ntc::Scheme scheme : schemes)
      for (int qp : qps) {
        ntc::CodecConfig cfg;
        cfg.qp = qp;
        cfg.scheme = scheme;
        cfg.rect = ntc::rect_mode_from_string(rect);
        ntc::EncodeResult enc = ntc::encode_image(img, cfg, &models, bank, mhash, bhash);
        ntc::DecodeResult dec = ntc::decode_image(enc.bytes, &models, bank, mhash, bhash);
        if (!(dec.recon == enc.recon))
          throw ntc::error("decoder reconstruction mismatch on " + path);
        ntc::EvalRow row;
        row.image = basename_of(path);
        row.scheme = scheme;
        row.qp = qp;
        row.bits = enc.counts.total();
        row.bpp = double(row.bits) / (double(img.width) * double(img.height));
        row.psnr_db = ntc::psnr(img, enc.recon);
        row.counts = enc.counts;
        row.stats = enc.stats;
        std::fprintf(csv, "%s\n", ntc::csv_row(row).c_str());
        std::fflush(csv);
        std::printf("%s %s qp=%d bits=%" PRIu64 " psnr=%.4f\n", row.image.c_str(),
                    ntc::scheme_name(scheme), qp, row.bits, row.psnr_db);
        std::fflush(stdout);
      }
  }
  std::fclose(csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  ntc::ensure_single_thread_blas();
  CLI::App app{"block intra codec with learned prediction and secondary transforms"};
  app.require_subcommand(1);

  // make-corpus
  auto* mc = app.add_subcommand("make-corpus", "write deterministic synthetic test images");
  std::string mc_out = ".";
  int mc_count = 12, mc_w = 512, mc_h = 512;
  std::string mc_prefix = "syn";
  mc->add_option("--out", mc_out, "output directory");
  mc->add_option("--count", mc_count);
  mc->add_option("--width", mc_w);
  mc->add_option("--height", mc_h);
  mc->add_option("--prefix", mc_prefix);

  // init-models
  auto* im = app.add_subcommand("init-models", "write freshly initialized networks");
  std::string im_out;
  uint64_t im_seed = 7;
  im->add_option("--out", im_out)->required();
  im->add_option("--seed", im_seed);

  // train-bank
  auto* tb = app.add_subcommand("train-bank", "collect residual statistics and fit the bank");
  std::vector<std::string> tb_images;
  std::string tb_out = "bank.lfb", tb_rect = "optional";
  int tb_qp = 32;
  size_t tb_cap = 60000;
  tb->add_option("images", tb_images)->required();
  tb->add_option("--out", tb_out);
  tb->add_option("--qp", tb_qp);
  tb->add_option("--cap", tb_cap, "reservoir size per transform group");
  tb->add_option("--rect", tb_rect);

  // collect
  auto* co =
      app.add_subcommand("collect-dataset", "encode images and record training observations");
  co->alias("collect");
  std::vector<std::string> co_images;
  std::string co_out = ".", co_models, co_bank, co_qps = "22,27,32,37", co_rect = "optional";
  uint64_t co_seed = 11;
  co->add_option("images", co_images)->required();
  co->add_option("--out", co_out);
  co->add_option("--models", co_models)->required();
  co->add_option("--bank", co_bank)->required();
  co->add_option("--qps", co_qps);
  co->add_option("--seed", co_seed);
  co->add_option("--rect", co_rect);

  // train-nn
  auto* tn = app.add_subcommand("train-nn", "train networks on collected observations");
  std::string tn_data, tn_models, tn_sizes = "all", tn_log;
  int tn_iters = 20000, tn_eval = 1000;
  uint64_t tn_seed = 1, tn_max = 0;
  tn->add_option("--data", tn_data)->required();
  tn->add_option("--models", tn_models)->required();
  tn->add_option("--sizes", tn_sizes, "HxW list or all");
  tn->add_option("--iters", tn_iters);
  tn->add_option("--seed", tn_seed);
  tn->add_option("--max-records", tn_max);
  tn->add_option("--eval-every", tn_eval);
  tn->add_option("--log", tn_log, "loss curve csv");

  // encode
  auto* en = app.add_subcommand("encode", "compress a pgm image");
  std::string en_in, en_out, en_models, en_bank, en_scheme = "default", en_rect = "optional";
  int en_qp = 32;
  bool en_no_nn = false, en_full = false;
  en->add_option("--in", en_in)->required();
  en->add_option("--out", en_out)->required();
  en->add_option("--models", en_models);
  en->add_option("--bank", en_bank)->required();
  en->add_option("--qp", en_qp);
  en->add_option("--scheme", en_scheme);
  en->add_option("--rect", en_rect);
  en->add_flag("--no-nn", en_no_nn, "classic prediction only");
  en->add_flag("--full-search", en_full, "search all 67 classic modes");

  // decode
  auto* de = app.add_subcommand("decode", "decompress to a pgm image");
  std::string de_in, de_out, de_models, de_bank;
  de->add_option("--in", de_in)->required();
  de->add_option("--out", de_out)->required();
  de->add_option("--models", de_models);
  de->add_option("--bank", de_bank)->required();

  // eval
  auto* ev = app.add_subcommand("eval", "encode and decode a grid of settings, write csv");
  std::vector<std::string> ev_images;
  std::string ev_models, ev_bank, ev_qps = "22,27,32,37", ev_schemes = "all",
              ev_rect = "optional", ev_out = "report.csv";
  ev->add_option("images", ev_images)->required();
  ev->add_option("--models", ev_models)->required();
  ev->add_option("--bank", ev_bank)->required();
  ev->add_option("--qps", ev_qps);
  ev->add_option("--schemes", ev_schemes);
  ev->add_option("--rect", ev_rect);
  ev->add_option("--out", ev_out);

  CLI11_PARSE(app, argc, argv);
  try {
    if (mc->parsed()) return cmd_make_corpus(mc_out, mc_count, mc_w, mc_h, mc_prefix);
    if (im->parsed()) return cmd_init_models(im_out, im_seed);
    if (tb->parsed()) return cmd_train_bank(tb_images, tb_out, tb_qp, tb_cap, tb_rect);
    if (co->parsed())
      return cmd_collect(co_images, co_out, co_models, co_bank, co_qps, co_seed, co_rect);
    if (tn->parsed())
      return cmd_train_nn(tn_data, tn_models, tn_sizes, tn_iters, tn_seed, tn_max, tn_eval,
                          tn_log);
    if (en->parsed())
      return cmd_encode(en_in, en_out, en_models, en_bank, en_qp, en_scheme, en_rect, en_no_nn,
                        en_full);
    if (de->parsed()) return cmd_decode(de_in, de_out, de_models, de_bank);
    if (ev->parsed())
      return cmd_eval(ev_images, ev_models, ev_bank, ev_qps, ev_schemes, ev_rect, ev_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
