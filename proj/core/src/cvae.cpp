#include "segblend/cvae.hpp"

#include "segblend/errors.hpp"
#include "segblend/tensor_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace segblend {

std::vector<std::uint8_t> ConditionLabel::bits() const {
  auto d = directional.bits();
  std::vector<std::uint8_t> out(d.begin(), d.end());
  out.insert(out.end(), game_bits.begin(), game_bits.end());
  return out;
}

std::string bits_to_string(std::span<const std::uint8_t> bits) {
  std::string out;
  for (auto b : bits) {
    if (!out.empty()) out.push_back(',');
    out.push_back(b ? '1' : '0');
  }
  return out;
}

std::string ConditionLabel::to_string() const {
  const auto b = bits();
  return bits_to_string(b);
}

ConditionLabel ConditionLabel::parse(std::string_view text) {
  std::vector<int> bits;
  for (char c : text) {
    if (c == '0' || c == '1') {
      bits.push_back(c - '0');
    } else if (c != ',' && c != ' ' && c != '(' && c != ')' && c != '\t') {
      throw AnnotationError("bad character '" + std::string(1, c) + "' in label '" + std::string(text) + "'");
    }
  }
  if (bits.size() < 4) throw AnnotationError("label '" + std::string(text) + "' has fewer than 4 bits");
  ConditionLabel label;
  label.directional = DirectionalLabel::from_bits(std::span<const int>(bits.data(), 4));
  for (std::size_t i = 4; i < bits.size(); ++i) label.game_bits.push_back(static_cast<std::uint8_t>(bits[i]));
  return label;
}

std::vector<std::vector<std::uint8_t>> all_game_bit_combinations(std::size_t n) {
  std::vector<std::vector<std::uint8_t>> out;
  for (std::size_t v = 0; v < (std::size_t{1} << n); ++v) {
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) bits[i] = static_cast<std::uint8_t>((v >> (n - 1 - i)) & 1u);
    out.push_back(std::move(bits));
  }
  return out;
}

Vector label_vector(const ConditionLabel& label) {
  const auto b = label.bits();
  Vector v(static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i) v(static_cast<Eigen::Index>(i)) = b[i];
  return v;
}

std::vector<std::size_t> CvaeArchitecture::encoder_widths() const {
  std::vector<std::size_t> w{encoder_input()};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(2 * latent_dim);
  return w;
}

std::vector<std::size_t> CvaeArchitecture::decoder_widths() const {
  std::vector<std::size_t> w{decoder_input()};
  w.insert(w.end(), hidden.rbegin(), hidden.rend());
  w.push_back(tile_units());
  return w;
}

namespace {

void validate_architecture(const CvaeArchitecture& arch) {
  if (arch.rows == 0 || arch.cols == 0) throw ShapeError("model segment shape must be non-empty");
  if (arch.vocabulary.empty()) throw ShapeError("model vocabulary is empty");
  if (arch.latent_dim == 0) throw ShapeError("latent dimension must be positive");
  if (arch.games.empty()) throw ShapeError("model must be bound to at least one game");
  const std::size_t expected_width = arch.games.size() > 1 ? 4 + arch.games.size() : 4;
  if (arch.label_width != expected_width) {
    throw ShapeError("label width " + std::to_string(arch.label_width) + " does not match " +
                     std::to_string(arch.games.size()) + " game(s)");
  }
  std::string sorted = arch.vocabulary;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ShapeError("model vocabulary has repeated tiles");
  }
}

}  // namespace

CvaeModel CvaeModel::initialize(CvaeArchitecture arch, std::uint64_t seed) {
  validate_architecture(arch);
  Rng rng = make_rng(seed, "init");
  const auto enc_widths = arch.encoder_widths();
  const auto dec_widths = arch.decoder_widths();
  Net encoder = Net::initialize(enc_widths, rng);
  Net decoder = Net::initialize(dec_widths, rng);
  return CvaeModel(std::move(arch), std::move(encoder), std::move(decoder), seed);
}

CvaeModel::CvaeModel(CvaeArchitecture arch, Net encoder, Net decoder, std::uint64_t seed)
    : arch_(std::move(arch)), encoder_(std::move(encoder)), decoder_(std::move(decoder)), seed_(seed) {
  validate_architecture(arch_);
  if (encoder_.in_dim() != arch_.encoder_input() || encoder_.out_dim() != 2 * arch_.latent_dim) {
    throw ShapeError("encoder dimensions do not match the model architecture");
  }
  if (decoder_.in_dim() != arch_.decoder_input() || decoder_.out_dim() != arch_.tile_units()) {
    throw ShapeError("decoder dimensions do not match the model architecture");
  }
  tile_index_.fill(-1);
  for (std::size_t i = 0; i < arch_.vocabulary.size(); ++i) {
    tile_index_[static_cast<unsigned char>(arch_.vocabulary[i])] = static_cast<int>(i);
  }
}

void CvaeModel::check_label(const ConditionLabel& label) const {
  if (label.width() != arch_.label_width) {
    throw ShapeError("label width " + std::to_string(label.width()) + " does not match model width " +
                     std::to_string(arch_.label_width));
  }
}

std::vector<std::uint32_t> CvaeModel::tile_indices(const TileGrid& grid) const {
  if (grid.rows() != arch_.rows || grid.cols() != arch_.cols) {
    throw ShapeError("segment is " + std::to_string(grid.rows()) + "x" + std::to_string(grid.cols()) +
                     ", model expects " + std::to_string(arch_.rows) + "x" + std::to_string(arch_.cols));
  }
  std::vector<std::uint32_t> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const int idx = tile_index_[static_cast<unsigned char>(grid.tiles()[i])];
    if (idx < 0) {
      throw VocabularyError("tile '" + std::string(1, grid.tiles()[i]) + "' is not in the model vocabulary");
    }
    out[i] = static_cast<std::uint32_t>(idx);
  }
  return out;
}

std::vector<std::uint32_t> CvaeModel::encoder_active(const TileGrid& grid, const ConditionLabel& label) const {
  check_label(label);
  const auto tiles = tile_indices(grid);
  const auto vocab = static_cast<std::uint32_t>(arch_.vocabulary.size());
  std::vector<std::uint32_t> active;
  active.reserve(tiles.size() + label.width());
  for (std::size_t c = 0; c < tiles.size(); ++c) active.push_back(static_cast<std::uint32_t>(c) * vocab + tiles[c]);
  const auto bits = label.bits();
  const auto offset = static_cast<std::uint32_t>(arch_.tile_units());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) active.push_back(offset + static_cast<std::uint32_t>(i));
  }
  return active;
}

GaussianParams CvaeModel::encode(const TileGrid& grid, const ConditionLabel& label) const {
  BinaryBatch batch{arch_.encoder_input(), {encoder_active(grid, label)}};
  const Matrix h = forward(encoder_, batch).cast<double>();
  const auto lat = static_cast<Eigen::Index>(arch_.latent_dim);
  return {h.col(0).head(lat), h.col(0).tail(lat)};
}

Matrix CvaeModel::decode_logits(const Matrix& z, const Matrix& labels) const {
  const auto lat = static_cast<Eigen::Index>(arch_.latent_dim);
  if (z.rows() != lat) {
    throw ShapeError("latent vector has length " + std::to_string(z.rows()) + ", model expects " +
                     std::to_string(arch_.latent_dim));
  }
  if (labels.rows() != static_cast<Eigen::Index>(arch_.label_width) || labels.cols() != z.cols()) {
    throw ShapeError("label matrix does not match model label width");
  }
  MatrixT<float> input(z.rows() + labels.rows(), z.cols());
  input.topRows(lat) = z.cast<float>();
  input.bottomRows(labels.rows()) = labels.cast<float>();
  return forward(decoder_, input).cast<double>();
}

TileDistribution CvaeModel::decode(const Vector& z, const ConditionLabel& label) const {
  check_label(label);
  const Matrix logits = decode_logits(Matrix(z), Matrix(label_vector(label)));
  const auto vocab = static_cast<Eigen::Index>(arch_.vocabulary.size());
  const auto cells = static_cast<Eigen::Index>(arch_.cells());
  TileDistribution probs(vocab, cells);
  Eigen::Map<const Matrix> per_cell(logits.data(), vocab, cells);
  for (Eigen::Index c = 0; c < cells; ++c) probs.col(c) = softmax(per_cell.col(c));
  return probs;
}

TileGrid CvaeModel::argmax_grid(const Eigen::Ref<const Vector>& scores) const {
  const auto vocab = static_cast<Eigen::Index>(arch_.vocabulary.size());
  const std::size_t cells = arch_.cells();
  if (scores.size() != vocab * static_cast<Eigen::Index>(cells)) throw ShapeError("argmax: wrong score length");
  std::string tiles(cells, ' ');
  for (std::size_t c = 0; c < cells; ++c) {
    const double* cell = scores.data() + static_cast<Eigen::Index>(c) * vocab;
    Eigen::Index best = 0;
    for (Eigen::Index v = 1; v < vocab; ++v) {
      if (cell[v] > cell[best]) best = v;
    }
    tiles[c] = arch_.vocabulary[static_cast<std::size_t>(best)];
  }
  return TileGrid(arch_.rows, arch_.cols, std::move(tiles));
}

std::vector<TileGrid> CvaeModel::decode_argmax(const Matrix& z, const Matrix& labels) const {
  const Matrix logits = decode_logits(z, labels);
  std::vector<TileGrid> out;
  out.reserve(static_cast<std::size_t>(logits.cols()));
  for (Eigen::Index b = 0; b < logits.cols(); ++b) out.push_back(argmax_grid(logits.col(b)));
  return out;
}

Vector CvaeModel::sample_latent(Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(static_cast<Eigen::Index>(arch_.latent_dim));
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return z;
}

GameId CvaeModel::game_for(const ConditionLabel& label) const {
  for (std::size_t i = 0; i < label.game_bits.size() && i < arch_.games.size(); ++i) {
    if (label.game_bits[i]) return arch_.games[i];
  }
  return arch_.games.front();
}

AnnotatedSegment CvaeModel::generate_from_latent(const Vector& z, const ConditionLabel& label) const {
  check_label(label);
  // Softmax is monotone, so the argmax of the logits is the argmax of the distribution.
  const Matrix logits = decode_logits(Matrix(z), Matrix(label_vector(label)));
  return {argmax_grid(logits.col(0)), label.directional, game_for(label), "generated"};
}

AnnotatedSegment CvaeModel::generate(const ConditionLabel& label, Rng& rng) const {
  check_label(label);
  return generate_from_latent(sample_latent(rng), label);
}

TileGrid CvaeModel::reconstruct(const TileGrid& grid, const ConditionLabel& label) const {
  const GaussianParams g = encode(grid, label);
  return generate_from_latent(g.mu, label).grid;
}

bool CvaeModel::operator==(const CvaeModel& other) const {
  return arch_ == other.arch_ && seed_ == other.seed_ && encoder_ == other.encoder_ &&
         decoder_ == other.decoder_;
}

void CvaeModel::save(const std::filesystem::path& path) const {
  nlohmann::json meta;
  meta["format"] = "segblend-cvae";
  meta["version"] = 1;
  meta["rows"] = arch_.rows;
  meta["cols"] = arch_.cols;
  meta["vocabulary"] = arch_.vocabulary;
  meta["latent_dim"] = arch_.latent_dim;
  meta["label_width"] = arch_.label_width;
  meta["hidden"] = arch_.hidden;
  std::vector<std::string> games;
  for (GameId g : arch_.games) games.emplace_back(to_string(g));
  meta["games"] = games;
  meta["seed"] = seed_;
  meta["encoder_layers"] = encoder_.layers.size();
  meta["decoder_layers"] = decoder_.layers.size();
  TensorContainer container;
  container.metadata_json = meta.dump();
  append_net(container, "encoder", encoder_.cast<double>());
  append_net(container, "decoder", decoder_.cast<double>());
  write_tensor_container(path, container);
}

CvaeModel CvaeModel::load(const std::filesystem::path& path) {
  const TensorContainer container = read_tensor_container(path);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(container.metadata_json);
    if (meta.at("format") != "segblend-cvae") throw FormatError(path.string() + " is not a CVAE checkpoint");
    CvaeArchitecture arch;
    arch.rows = meta.at("rows").get<std::size_t>();
    arch.cols = meta.at("cols").get<std::size_t>();
    arch.vocabulary = meta.at("vocabulary").get<std::string>();
    arch.latent_dim = meta.at("latent_dim").get<std::size_t>();
    arch.label_width = meta.at("label_width").get<std::size_t>();
    arch.hidden = meta.at("hidden").get<std::vector<std::size_t>>();
    for (const auto& g : meta.at("games")) arch.games.push_back(parse_game(g.get<std::string>()));
    const auto seed = meta.at("seed").get<std::uint64_t>();
    Net encoder = extract_net(container, "encoder", meta.at("encoder_layers").get<std::size_t>()).cast<float>();
    Net decoder = extract_net(container, "decoder", meta.at("decoder_layers").get<std::size_t>()).cast<float>();
    return CvaeModel(std::move(arch), std::move(encoder), std::move(decoder), seed);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": bad checkpoint metadata: " + e.what());
  }
}

template <typename T>
BatchStep<T> cvae_batch_step(const BasicDenseNet<T>& encoder, const BasicDenseNet<T>& decoder,
                             const BinaryBatch& x, const MatrixT<T>& labels,
                             std::span<const std::vector<std::uint32_t>* const> targets,
                             std::size_t vocab, const MatrixT<T>& eps, double kl_weight) {
  using M = MatrixT<T>;
  const auto B = static_cast<Eigen::Index>(x.batch());
  const Eigen::Index lat = eps.rows();
  const Eigen::Index width = labels.rows();
  if (B == 0 || eps.cols() != B || labels.cols() != B || targets.size() != x.batch()) {
    throw ShapeError("batch step: inputs disagree on batch size");
  }
  if (encoder.out_dim() != static_cast<std::size_t>(2 * lat) ||
      decoder.in_dim() != static_cast<std::size_t>(lat + width)) {
    throw ShapeError("batch step: latent size does not match the nets");
  }
  const std::size_t cells = vocab == 0 ? 0 : decoder.out_dim() / vocab;

  BasicForwardCache<T> enc_cache;
  BasicForwardCache<T> dec_cache;
  const M h = forward(encoder, x, &enc_cache);
  const M mu = h.topRows(lat);
  const M logvar = h.bottomRows(lat);
  const M stddev = (T(0.5) * logvar.array()).exp().matrix();
  M dec_in(lat + width, B);
  dec_in.topRows(lat) = mu + stddev.cwiseProduct(eps);
  dec_in.bottomRows(width) = labels;
  const M logits = forward(decoder, dec_in, &dec_cache);

  BatchStep<T> out;
  M dlogits(logits.rows(), B);
  const T inv_b = T(1) / static_cast<T>(B);
  double recon = 0.0;
  for (Eigen::Index b = 0; b < B; ++b) {
    const auto& target = *targets[static_cast<std::size_t>(b)];
    if (target.size() != cells) throw ShapeError("batch step: target length does not match the decoder");
    for (std::size_t c = 0; c < cells; ++c) {
      const T* in = logits.data() + b * logits.rows() + static_cast<Eigen::Index>(c * vocab);
      T* g = dlogits.data() + b * logits.rows() + static_cast<Eigen::Index>(c * vocab);
      T shift = in[0];
      for (std::size_t v = 1; v < vocab; ++v) shift = std::max(shift, in[v]);
      T total = 0;
      for (std::size_t v = 0; v < vocab; ++v) {
        g[v] = std::exp(in[v] - shift);
        total += g[v];
      }
      recon += static_cast<double>(std::log(total) - (in[target[c]] - shift));
      const T scale = inv_b / total;
      for (std::size_t v = 0; v < vocab; ++v) g[v] *= scale;
      g[target[c]] -= inv_b;
    }
  }
  const M var = logvar.array().exp().matrix();
  out.reconstruction = recon;
  out.kl = 0.5 * static_cast<double>((var.array() + mu.array().square() - T(1) - logvar.array()).sum());

  M ddec_in;
  out.decoder = backward(decoder, dec_cache, dlogits, &ddec_in);
  const M dz = ddec_in.topRows(lat);
  const T kw = static_cast<T>(kl_weight) * inv_b;
  M dh(2 * lat, B);
  dh.topRows(lat) = dz + kw * mu;
  dh.bottomRows(lat) =
      (T(0.5) * dz.cwiseProduct(eps).cwiseProduct(stddev)) + (kw * T(0.5) * (var.array() - T(1))).matrix();
  out.encoder = backward(encoder, enc_cache, dh);
  return out;
}

template BatchStep<float> cvae_batch_step(const BasicDenseNet<float>&, const BasicDenseNet<float>&,
                                          const BinaryBatch&, const MatrixT<float>&,
                                          std::span<const std::vector<std::uint32_t>* const>, std::size_t,
                                          const MatrixT<float>&, double);
template BatchStep<double> cvae_batch_step(const BasicDenseNet<double>&, const BasicDenseNet<double>&,
                                           const BinaryBatch&, const MatrixT<double>&,
                                           std::span<const std::vector<std::uint32_t>* const>, std::size_t,
                                           const MatrixT<double>&, double);

TrainResult train_model(const CvaeArchitecture& arch, const TrainingSet& data, const TrainConfig& config) {
  if (data.grids.empty()) throw PreconditionError("cannot train on an empty corpus");
  if (data.grids.size() != data.labels.size()) throw ShapeError("training grids and labels differ in count");
  if (config.batch_size == 0) throw PreconditionError("batch size must be positive");

#if defined(__GLIBC__)
  // Every minibatch allocates megabyte-sized temporaries. Keeping them on the
  // heap instead of fresh mmaps avoids a page-fault storm.
  static const bool tuned = [] {
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, 512 << 20);
    return true;
  }();
  (void)tuned;
#endif

  TrainResult result{CvaeModel::initialize(arch, config.seed), {}};
  CvaeModel& model = result.model;
  const std::size_t n = data.grids.size();
  const auto lat = static_cast<Eigen::Index>(arch.latent_dim);
  const auto width = static_cast<Eigen::Index>(arch.label_width);

  std::vector<std::vector<std::uint32_t>> active(n);
  std::vector<std::vector<std::uint32_t>> targets(n);
  MatrixT<float> labels(width, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    active[i] = model.encoder_active(data.grids[i], data.labels[i]);
    targets[i] = model.tile_indices(data.grids[i]);
    labels.col(static_cast<Eigen::Index>(i)) = label_vector(data.labels[i]).cast<float>();
  }

  std::vector<std::size_t> sizes;
  for (auto block : parameter_blocks(model.encoder())) sizes.push_back(block.size());
  for (auto block : parameter_blocks(model.decoder())) sizes.push_back(block.size());
  BasicAdamState<float> adam(sizes);

  Rng rng = make_rng(config.seed, "train");
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch_size = std::min(config.batch_size, n);

  result.history.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const double lr = config.schedule.rate_at(epoch);
    double recon_sum = 0.0;
    double kl_sum = 0.0;
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t count = std::min(batch_size, n - start);
      const auto B = static_cast<Eigen::Index>(count);
      BinaryBatch x{arch.encoder_input(), {}};
      x.active.reserve(count);
      MatrixT<float> batch_labels(width, B);
      std::vector<const std::vector<std::uint32_t>*> batch_targets;
      for (std::size_t j = 0; j < count; ++j) {
        const std::size_t i = order[start + j];
        x.active.push_back(active[i]);
        batch_labels.col(static_cast<Eigen::Index>(j)) = labels.col(static_cast<Eigen::Index>(i));
        batch_targets.push_back(&targets[i]);
      }
      MatrixT<float> eps(lat, B);
      for (Eigen::Index i = 0; i < eps.size(); ++i) eps.data()[i] = static_cast<float>(normal(rng));

      const BatchStep<float> step = cvae_batch_step(model.encoder(), model.decoder(), x, batch_labels,
                                                    batch_targets, arch.vocabulary.size(), eps, config.kl_weight);
      if (!std::isfinite(step.reconstruction) || !std::isfinite(step.kl)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + " (reconstruction " +
                            std::to_string(step.reconstruction) + ", KL " + std::to_string(step.kl) + ")");
      }
      recon_sum += step.reconstruction;
      kl_sum += step.kl;

      auto params = parameter_blocks(model.encoder());
      auto dec_params = parameter_blocks(model.decoder());
      params.insert(params.end(), dec_params.begin(), dec_params.end());
      auto grads = gradient_blocks(step.encoder);
      auto dec_grads = gradient_blocks(step.decoder);
      grads.insert(grads.end(), dec_grads.begin(), dec_grads.end());
      adam.update(params, grads, lr);
    }
    EpochStats stats{epoch, recon_sum / static_cast<double>(n), kl_sum / static_cast<double>(n), lr};
    result.history.push_back(stats);
    if (config.on_epoch) config.on_epoch(epoch, stats.reconstruction, stats.kl);
  }
  return result;
}

TrainResult train(const Corpus& corpus, const TrainConfig& config) {
  if (corpus.empty()) throw PreconditionError("cannot train on an empty corpus");
  if (corpus.games.size() != 1) throw PreconditionError("train expects a single-game corpus; use blend_train");
  CvaeArchitecture arch;
  arch.rows = corpus.segment_rows();
  arch.cols = corpus.segment_cols();
  arch.vocabulary = corpus.vocabulary;
  arch.latent_dim = config.latent_dim;
  arch.label_width = 4;
  arch.games = corpus.games;
  arch.hidden = config.hidden;
  TrainingSet data;
  for (const AnnotatedSegment& seg : corpus.segments) {
    if (seg.grid.rows() != arch.rows || seg.grid.cols() != arch.cols) {
      throw ShapeError("corpus mixes segment shapes (" + seg.provenance + ")");
    }
    data.grids.push_back(seg.grid);
    data.labels.push_back({seg.label, {}});
  }
  return train_model(arch, data, config);
}

TrainResult blend_train(std::span<const Corpus> corpora, const TrainConfig& config) {
  if (corpora.size() < 2) throw PreconditionError("a blend needs at least two corpora");
  CvaeArchitecture arch;
  std::vector<AnnotatedSegment> all;
  for (std::size_t g = 0; g < corpora.size(); ++g) {
    const Corpus& c = corpora[g];
    if (c.empty()) throw PreconditionError("blend corpus " + std::to_string(g) + " is empty");
    if (c.games.size() != 1) throw PreconditionError("each blend corpus must hold a single game");
    if (std::find(arch.games.begin(), arch.games.end(), c.games[0]) != arch.games.end()) {
      throw PreconditionError("game listed twice in blend");
    }
    arch.games.push_back(c.games[0]);
    if (g > 0 && (c.segment_rows() != arch.rows || c.segment_cols() != arch.cols)) {
      throw ShapeError("cannot blend " + std::to_string(arch.rows) + "x" + std::to_string(arch.cols) +
                       " with " + std::to_string(c.segment_rows()) + "x" + std::to_string(c.segment_cols()) +
                       " segments (" + std::string(to_string(c.games[0])) + "); pad Zelda rooms first");
    }
    arch.rows = c.segment_rows();
    arch.cols = c.segment_cols();
    all.insert(all.end(), c.segments.begin(), c.segments.end());
  }
  arch.vocabulary = vocabulary_of(all);
  arch.latent_dim = config.latent_dim;
  arch.label_width = 4 + corpora.size();
  arch.hidden = config.hidden;

  TrainingSet data;
  for (std::size_t g = 0; g < corpora.size(); ++g) {
    std::vector<std::uint8_t> bits(corpora.size(), 0);
    bits[g] = 1;
    for (const AnnotatedSegment& seg : corpora[g].segments) {
      if (seg.grid.rows() != arch.rows || seg.grid.cols() != arch.cols) {
        throw ShapeError("corpus mixes segment shapes (" + seg.provenance + ")");
      }
      data.grids.push_back(seg.grid);
      data.labels.push_back({seg.label, bits});
    }
  }
  return train_model(arch, data, config);
}

void write_training_log(std::ostream& out, std::span<const EpochStats> history) {
  out << "epoch\treconstruction\tkl\tlr\n";
  out.precision(10);
  for (const EpochStats& s : history) {
    out << s.epoch << '\t' << s.reconstruction << '\t' << s.kl << '\t' << s.learning_rate << '\n';
  }
}

}  // namespace segblend
