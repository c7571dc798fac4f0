#include "rqa/batching.hpp"

#include <algorithm>
#include <numeric>

#include "rqa/errors.hpp"

namespace rqa {

std::vector<Instance> to_instances(const std::vector<TFExample>& examples) {
  std::vector<Instance> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    Instance inst;
    inst.group = ex.id;
    inst.question = ex.question;
    inst.answer = ex.answer;
    inst.label = ex.label;
    out.push_back(std::move(inst));
  }
  return out;
}

Instance to_instance(const OptionSubtask& s) {
  Instance inst;
  inst.group = s.id;
  inst.option_index = s.option_index;
  inst.num_options = s.num_options;
  inst.question = s.question;
  inst.answer = s.answer;
  inst.option = s.option;
  inst.label = s.label;
  return inst;
}

std::vector<Instance> to_instances(const std::vector<MCExample>& examples) {
  std::vector<Instance> out;
  for (const auto& ex : examples)
    for (const auto& s : transform(ex)) out.push_back(to_instance(s));
  return out;
}

PaddedSequence pad_sequences(const std::vector<const Tokens*>& seqs, const Vocabulary& vocab) {
  PaddedSequence p;
  for (const auto* s : seqs) p.length = std::max(p.length, s->size());
  const std::size_t B = seqs.size();
  p.tokens.resize(B);
  p.ids.assign(p.length, std::vector<std::size_t>(B, Vocabulary::kPad));
  p.mask.assign(p.length, Mask(B, false));
  for (std::size_t b = 0; b < B; ++b) {
    const Tokens& s = *seqs[b];
    p.tokens[b] = s;
    p.tokens[b].resize(p.length, std::string(Vocabulary::kPadToken));
    for (std::size_t t = 0; t < s.size(); ++t) {
      p.ids[t][b] = vocab.index(s[t]);
      p.mask[t][b] = true;
    }
  }
  return p;
}

Batch make_batch(const std::vector<Instance>& instances, const std::vector<std::size_t>& indices,
                 const Vocabulary& vocab) {
  Batch batch;
  batch.indices = indices;
  std::vector<const Tokens*> qs, as, js;
  std::vector<Tokens> joined(indices.size());
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const Instance& inst = instances.at(indices[b]);
    qs.push_back(&inst.question);
    as.push_back(&inst.answer);
    joined[b] = inst.question;
    joined[b].insert(joined[b].end(), inst.answer.begin(), inst.answer.end());
    batch.options.push_back(inst.option);
    batch.labels.push_back(static_cast<std::size_t>(inst.label));
  }
  for (const auto& j : joined) js.push_back(&j);
  batch.question = pad_sequences(qs, vocab);
  batch.answer = pad_sequences(as, vocab);
  batch.joined = pad_sequences(js, vocab);
  return batch;
}

std::vector<std::vector<std::size_t>> batch_indices(std::size_t n, std::size_t batch_size, Rng* rng) {
  if (batch_size == 0) throw ValidationError("batch size must be >= 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (rng) rng->shuffle(order);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t end = std::min(n, start + batch_size);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

std::vector<Batch> make_batches(const std::vector<Instance>& instances, std::size_t batch_size,
                                const Vocabulary& vocab, Rng* rng) {
  std::vector<Batch> out;
  for (auto& idx : batch_indices(instances.size(), batch_size, rng)) {
    out.push_back(make_batch(instances, idx, vocab));
  }
  return out;
}

}  // namespace rqa
