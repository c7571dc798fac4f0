#include "rqa/synthetic.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "rqa/errors.hpp"
#include "rqa/random.hpp"

namespace rqa {

namespace {

struct Styled {
  const char* text;
  Label label;
};

// T/F answer templates.
const std::vector<Styled>& tf_answers(Label label) {
  static const std::vector<Styled> yes = {
      {"yes", Label::True},          {"yes of course", Label::True},   {"yes , of course", Label::True},
      {"sure", Label::True},         {"a little", Label::True},        {"yeah , i do", Label::True},
      {"of course", Label::True},    {"definitely", Label::True},      {"absolutely", Label::True},
      {"i think so", Label::True},   {"certainly", Label::True},       {"yes i do", Label::True},
      {"that is right", Label::True}, {"ok", Label::True},             {"yes , i love it", Label::True},
      {"yep", Label::True},          {"i really do", Label::True},     {"exactly", Label::True},
      {"sure , why not", Label::True}, {"very much", Label::True},
  };
  static const std::vector<Styled> no = {
      {"no", Label::False},            {"not at all", Label::False},    {"nope", Label::False},
      {"no , i do not", Label::False}, {"never", Label::False},         {"i do not", Label::False},
      {"not really", Label::False},    {"no way", Label::False},        {"absolutely not", Label::False},
      {"of course not", Label::False}, {"i hate it", Label::False},     {"no , never", Label::False},
      {"definitely not", Label::False}, {"nah", Label::False},          {"not ok", Label::False},
      {"not anymore", Label::False},
  };
  static const std::vector<Styled> unsure = {
      {"you guess", Label::Uncertain},        {"it all depends", Label::Uncertain},
      {"maybe", Label::Uncertain},            {"i am not sure", Label::Uncertain},
      {"sometimes", Label::Uncertain},        {"who knows", Label::Uncertain},
      {"hard to say", Label::Uncertain},      {"let me think", Label::Uncertain},
      {"what time is it", Label::Uncertain},  {"the weather is nice today", Label::Uncertain},
      {"i was busy last year", Label::Uncertain}, {"perhaps", Label::Uncertain},
      {"i have no idea", Label::Uncertain},   {"why do you ask", Label::Uncertain},
  };
  switch (label) {
    case Label::True:
      return yes;
    case Label::False:
      return no;
    default:
      return unsure;
  }
}

const std::vector<std::string> kTfQuestions = {
    "do you like {}",      "have you ever tried {}", "would you like some {}", "do you often eat {}",
    "is {} your favorite", "did you buy {} today",   "do you want more {}",    "are you fond of {}",
};
const std::vector<std::string> kTfSubjects = {
    "tea",  "coffee", "running", "pizza",   "music", "football", "rice", "movies",
    "cats", "dogs",   "books",   "cycling", "milk",  "swimming", "fish", "chocolate",
};
const std::vector<std::string> kTfRoleQuestions = {
    "are you a {}", "were you a {} before", "is your father a {}", "do you work as a {}",
};
const std::vector<std::string> kRoles = {"teacher", "doctor", "student", "driver", "nurse", "farmer", "engineer"};

const std::vector<std::string> kPrefixes = {"well ,", "um ,", "hmm ,", "honestly ,", "oh ,"};
const std::vector<std::string> kSuffixes = {".", "!", ", thanks", ", haha"};

std::string fill(const std::string& tmpl, const std::vector<std::string>& slots) {
  std::string out;
  std::size_t slot = 0;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{' && i + 1 < tmpl.size() && tmpl[i + 1] == '}') {
      out += slots.at(slot++);
      ++i;
    } else {
      out.push_back(tmpl[i]);
    }
  }
  return out;
}

std::string add_noise(std::string answer, Rng& rng) {
  if (rng.bernoulli(0.25)) answer = rng.pick(kPrefixes) + " " + answer;
  if (rng.bernoulli(0.25)) answer += " " + rng.pick(kSuffixes);
  return answer;
}

Label sample_tf_label(Rng& rng) {
  // Class balance roughly matching a 0.43 / 0.45 / 0.12 False/True/Uncertain split.
  const double u = rng.uniform();
  if (u < 0.43) return Label::False;
  if (u < 0.88) return Label::True;
  return Label::Uncertain;
}

std::string make_id(const std::string& prefix, std::size_t i) {
  std::ostringstream os;
  os << prefix << '-' << std::setw(5) << std::setfill('0') << i;
  return os.str();
}

// ---- multiple choice ------------------------------------------------------

const std::vector<std::vector<std::string>> kOptionPools = {
    {"coffee", "tea", "juice", "milk", "water", "cola", "soda"},
    {"rice", "noodles", "bread", "pizza", "salad", "soup", "dumplings"},
    {"running", "swimming", "tennis", "football", "basketball", "yoga"},
    {"walking", "cycling", "driving"},
    {"red", "blue", "green", "white", "black", "yellow"},
    {"apples", "bananas", "oranges", "grapes", "mangoes"},
};
const std::vector<std::string> kMc2Questions = {
    "would you like {} or {}", "do you prefer {} or {}", "which one do you want , {} or {}",
    "shall we get {} or {}",
};
const std::vector<std::string> kMc3Questions = {
    "do you want {} , {} or {}", "are you usually {} , {} , or {} these days",
    "which do you like best , {} , {} or {}", "would you choose {} , {} or {}",
};

const std::vector<std::string> kPickOne = {
    "{} please",   "i want {}",     "i would like {}", "{} , thank you", "i prefer {}",
    "{} for me",   "i will take {}", "give me {}",     "{} is my favorite", "i like {} more",
};
const std::vector<std::string> kPickTwo = {"{} and {}", "both {} and {}", "{} and also {}"};
const std::vector<std::string> kExcept = {"except {}", "anything except {}", "all but {}", "everything except {}"};
const std::vector<std::string> kAll = {"either is ok", "both are fine", "any of them", "all of them",
                                       "i like them all", "whatever you have is fine"};
const std::vector<std::string> kNone = {"no , thanks", "none of them", "neither", "i do not want any",
                                        "nothing for me", "no thanks"};
const std::vector<std::string> kDodge = {"it all depends", "you guess", "i lost my job", "hard to say",
                                         "let me think about it", "maybe later", "who knows",
                                         "the weather is nice today"};

struct McDraw {
  std::string question;
  std::vector<std::string> options;
  std::string answer;
  std::vector<int> labels;
};

McDraw draw_mc(Rng& rng) {
  McDraw d;
  const auto& pool = rng.pick(kOptionPools);
  const std::size_t n = pool.size() >= 3 && rng.bernoulli(0.5) ? 3 : 2;
  std::vector<std::string> shuffled = pool;
  rng.shuffle(shuffled);
  d.options.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n));
  d.question = fill(rng.pick(n == 3 ? kMc3Questions : kMc2Questions), d.options);

  const double u = rng.uniform();
  if (u < 0.03) {
    // Bare option word: indistinguishable across options for answer-only features.
    const std::size_t x = rng.below(n);
    d.answer = d.options[x];
    d.labels.assign(n, 0);
    d.labels[x] = 1;
  } else if (u < 0.40) {
    const std::size_t x = rng.below(n);
    d.answer = fill(rng.pick(kPickOne), {d.options[x]});
    d.labels.assign(n, 0);
    d.labels[x] = 1;
  } else if (u < 0.50 && n == 3) {
    std::size_t x = rng.below(n), y = rng.below(n - 1);
    if (y >= x) ++y;
    d.answer = fill(rng.pick(kPickTwo), {d.options[x], d.options[y]});
    d.labels.assign(n, 0);
    d.labels[x] = d.labels[y] = 1;
  } else if (u < 0.60) {
    const std::size_t x = rng.below(n);
    d.answer = fill(rng.pick(kExcept), {d.options[x]});
    d.labels.assign(n, 1);
    d.labels[x] = 0;
  } else if (u < 0.73) {
    d.answer = rng.pick(kAll);
    d.labels.assign(n, 1);
  } else if (u < 0.88) {
    d.answer = rng.pick(kNone);
    d.labels.assign(n, 0);
  } else {
    d.answer = rng.pick(kDodge);
    d.labels.assign(n, 2);
  }
  d.answer = add_noise(d.answer, rng);
  return d;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& l : lines) out << l << '\n';
}

}  // namespace

std::vector<std::string> synthetic_tf_lines(std::size_t n, Rng& rng, const std::string& id_prefix) {
  std::vector<std::string> lines;
  lines.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string question;
    if (rng.bernoulli(0.3)) {
      question = fill(rng.pick(kTfRoleQuestions), {rng.pick(kRoles)});
    } else {
      question = fill(rng.pick(kTfQuestions), {rng.pick(kTfSubjects)});
    }
    const Label label = sample_tf_label(rng);
    const auto& styled = rng.pick(tf_answers(label));
    nlohmann::ordered_json row;
    row["id"] = make_id(id_prefix, i);
    row["question"] = question;
    row["answer"] = add_noise(styled.text, rng);
    row["label"] = static_cast<int>(styled.label);
    lines.push_back(row.dump());
  }
  return lines;
}

std::vector<std::string> synthetic_mc_lines(std::size_t n, Rng& rng, const std::string& id_prefix) {
  std::vector<std::string> lines;
  lines.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    McDraw d = draw_mc(rng);
    nlohmann::ordered_json row;
    row["id"] = make_id(id_prefix, i);
    row["question"] = d.question;
    row["options"] = d.options;
    row["answer"] = d.answer;
    row["labels"] = d.labels;
    lines.push_back(row.dump());
  }
  return lines;
}

SyntheticPaths generate_synthetic(Task task, std::size_t n_train, std::size_t n_test, std::uint64_t seed,
                                  const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory " + out_dir + ": " + ec.message());
  Rng rng(seed);
  const std::string t(task_name(task));
  SyntheticPaths paths{(std::filesystem::path(out_dir) / (t + "_train.jsonl")).string(),
                       (std::filesystem::path(out_dir) / (t + "_test.jsonl")).string()};
  auto gen = [task](std::size_t n, Rng& r, const std::string& prefix) {
    return task == Task::TF ? synthetic_tf_lines(n, r, prefix) : synthetic_mc_lines(n, r, prefix);
  };
  write_lines(paths.train, gen(n_train, rng, t + "-train"));
  write_lines(paths.test, gen(n_test, rng, t + "-test"));
  return paths;
}

}  // namespace rqa
