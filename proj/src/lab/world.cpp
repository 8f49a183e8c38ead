#include "cocte/lab/world.hpp"

#include <sstream>

#include "cocte/errors.hpp"

namespace cocte::lab {

namespace {

const std::array<std::string, 4> kRegions = {"north", "south", "east", "west"};
const std::array<std::string, 3> kCategories = {"snack", "drink", "tool"};
const std::array<std::string, 3> kAggs = {"SUM(qty)", "COUNT(*)", "AVG(qty)"};
const std::array<std::string, 3> kAggWords = {"total", "number", "average"};

// Deterministic content. Bucket b = region*3 + category holds (b+2) sales
// rows with qty = 2k + (b%3) for k = 1..(b+2), which keeps the per-bucket
// SUM/COUNT/AVG values pairwise distinct within a bucket and the SUMs and
// COUNTs distinct across buckets.
std::string world_seed_sql() {
  std::ostringstream out;
  out << "CREATE TABLE stores (id INTEGER PRIMARY KEY, name TEXT, region TEXT);\n";
  out << "CREATE TABLE products (id INTEGER PRIMARY KEY, name TEXT, category TEXT, "
         "price REAL);\n";
  out << "CREATE TABLE sales (id INTEGER PRIMARY KEY, store_id INTEGER, product_id "
         "INTEGER, qty INTEGER, sold_on TEXT);\n";
  for (size_t r = 0; r < kRegions.size(); ++r)
    out << "INSERT INTO stores VALUES (" << r + 1 << ",'store_" << kRegions[r] << "','"
        << kRegions[r] << "');\n";
  const char* product_names[6] = {"cocoa", "chips", "cola", "juice", "hammer", "wrench"};
  for (size_t p = 0; p < 6; ++p)
    out << "INSERT INTO products VALUES (" << p + 1 << ",'" << product_names[p] << "','"
        << kCategories[p / 2] << "'," << 1.25 * static_cast<double>(p + 1) << ");\n";
  int sale_id = 1;
  for (size_t r = 0; r < kRegions.size(); ++r) {
    for (size_t c = 0; c < kCategories.size(); ++c) {
      size_t b = r * 3 + c;
      size_t count = b + 2;
      for (size_t k = 1; k <= count; ++k) {
        size_t product = 2 * c + 1 + (k % 2);
        size_t qty = 2 * k + (b % 3);
        out << "INSERT INTO sales VALUES (" << sale_id++ << "," << r + 1 << ","
            << product << "," << qty << ",'2024-02-" << (k < 10 ? "0" : "") << k
            << "');\n";
      }
    }
  }
  return out.str();
}

std::string region_filter_step(const std::string& region) {
  std::string body =
      "SELECT sa.qty AS qty, sa.product_id AS product_id FROM sales AS sa "
      "JOIN stores AS st ON sa.store_id = st.id";
  if (!region.empty()) body += " WHERE st.region = '" + region + "'";
  return body;
}

std::string category_filter_step(const std::string& category, bool wrong_join) {
  if (wrong_join)
    return "SELECT s1.qty AS qty FROM s1 JOIN products AS p ON s1.product_id = p.id "
           "AND p.price > 999";
  std::string body =
      "SELECT s1.qty AS qty FROM s1 JOIN products AS p ON s1.product_id = p.id";
  if (!category.empty()) body += " WHERE p.category = '" + category + "'";
  return body;
}

std::string agg_step(const std::string& agg) {
  return "SELECT " + agg + " AS val FROM s2";
}

const std::array<std::string, 5> kExtraSteps = {
    "SELECT val AS val FROM s3",  // identity: stays correct
    "SELECT val + 1 AS val FROM s3",
    "SELECT val * 2 AS val FROM s3",
    "SELECT val - 1 AS val FROM s3",
    "SELECT CASE WHEN val > 0 THEN 0 ELSE 1 END AS val FROM s3",
};

}  // namespace

ToyWorld::ToyWorld(const std::filesystem::path& dir, size_t max_steps)
    : max_steps_(max_steps) {
  if (max_steps_ < 3 || max_steps_ > 4)
    throw Error("WorldError", "max_steps must be 3 or 4");
  std::filesystem::create_directories(dir);
  auto db_file = dir / (std::string(db_id()) + ".sqlite");
  if (!std::filesystem::exists(db_file)) exec::materialize(db_file, world_seed_sql());
  registry_ = std::make_unique<exec::Registry>(dir);
  conn_ = std::make_unique<exec::Connection>(registry_->resolve(db_id()));
  build_questions();
}

void ToyWorld::build_questions() {
  for (size_t b = 0; b < 12; ++b) {
    size_t r = b / 3, c = b % 3;
    size_t agg = c;
    Question q;
    q.id = "lab-q" + std::to_string(b);
    q.text = kAggWords[agg] + " quantity of " + kCategories[c] +
             " products sold in the " + kRegions[r] + " region";
    size_t gold_idx = (5 - b % 5) % 5;  // option layouts rotate by question
    q.gold_actions = {gold_idx, gold_idx, gold_idx, kStopAction};
    questions_.push_back(std::move(q));
  }
  for (size_t b = 0; b < questions_.size(); ++b) {
    sql::CocteChain gold = build_chain(b, questions_[b].gold_actions);
    questions_[b].gt_sql = sql::serialize(gold);
  }
  train_ = {0, 1, 2, 3, 4, 5, 6, 7};
  holdout_ = {8, 9, 10, 11};
}

exec::QuestionInstance ToyWorld::instance(size_t q) const {
  const Question& question = questions_.at(q);
  return {question.id, question.text, db_id(), question.gt_sql};
}

std::string ToyWorld::step_body(size_t q, size_t position, size_t action) const {
  size_t b = q;
  size_t r = b / 3, c = b % 3;
  if (action == kStopAction) {
    if (position == 1) return "SELECT 0 AS qty, 0 AS product_id";  // trivial step
    return "";
  }
  // options are rotated by question so the gold action id varies
  size_t opt = (action + b) % 5;
  switch (position) {
    case 1: {
      std::array<std::string, 5> pool = {kRegions[r], kRegions[(r + 1) % 4],
                                         kRegions[(r + 2) % 4], kRegions[(r + 3) % 4],
                                         ""};
      return region_filter_step(pool[opt]);
    }
    case 2: {
      std::array<std::string, 5> pool = {kCategories[c], kCategories[(c + 1) % 3],
                                         kCategories[(c + 2) % 3], "", "!join"};
      if (pool[opt] == "!join") return category_filter_step("", true);
      return category_filter_step(pool[opt], false);
    }
    case 3: {
      size_t agg = c;
      std::array<std::string, 5> pool = {kAggs[agg], kAggs[(agg + 1) % 3],
                                         kAggs[(agg + 2) % 3], "MAX(qty)", "MIN(qty)"};
      return agg_step(pool[opt]);
    }
    case 4:
      return kExtraSteps[opt];
    default:
      throw Error("WorldError", "position out of range");
  }
}

sql::CocteChain ToyWorld::build_chain(size_t q, const std::vector<size_t>& actions) const {
  std::ostringstream text;
  text << "WITH ";
  size_t k = 0;
  for (size_t p = 1; p <= max_steps_ && p <= actions.size(); ++p) {
    size_t a = actions[p - 1];
    std::string body = step_body(q, p, a);
    if (body.empty()) break;  // stop action past position 1
    if (k) text << ", ";
    text << "s" << p << " AS (" << body << ")";
    ++k;
  }
  if (k == 0) throw Error("WorldError", "empty action sequence");
  text << " SELECT * FROM s" << k;
  return sql::parse_cocte(text.str());
}

const exec::ExecOutcome& ToyWorld::run_cached(const std::string& sql) const {
  auto it = exec_cache_.find(sql);
  if (it != exec_cache_.end()) return it->second;
  exec::ExecOutcome out;
  try {
    out = conn_->run(sql, std::chrono::milliseconds(30000));
  } catch (const WriteRejected& e) {
    out.status = exec::ExecStatus::DbError;
    out.error_text = e.what();
  }
  return exec_cache_.emplace(sql, std::move(out)).first->second;
}

int ToyWorld::outcome(size_t q, const sql::CocteChain& chain) const {
  const Question& question = questions_.at(q);
  auto git = gold_cache_.find(question.id);
  if (git == gold_cache_.end()) {
    const exec::ExecOutcome& gold = run_cached(question.gt_sql);
    if (!gold.ok()) throw GoldExecutionFailed("lab gold failed for " + question.id);
    git = gold_cache_.emplace(question.id, gold.table).first;
  }
  const exec::ExecOutcome& cand = run_cached(sql::serialize(chain));
  if (!cand.ok()) return 0;
  return exec::results_match(cand.table, git->second) ? 1 : 0;
}

std::vector<exec::ExecOutcome> ToyWorld::step_outcomes(
    const sql::CocteChain& chain) const {
  std::vector<exec::ExecOutcome> out;
  for (size_t i = 1; i <= chain.size(); ++i)
    out.push_back(run_cached(sql::prefix_query(chain, i)));
  return out;
}

bool ToyWorld::sequence_succeeds(size_t q, const std::vector<size_t>& actions) const {
  return outcome(q, build_chain(q, actions)) == 1;
}

double ToyWorld::hint_overlap(size_t q, size_t position, size_t action) const {
  std::string body = step_body(q, position, action);
  if (body.empty()) return 0.0;
  for (char& c : body) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const std::string& text = questions_.at(q).text;
  std::vector<std::string> words;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      if (cur.size() >= 4) words.push_back(cur);
      cur.clear();
    }
  }
  if (cur.size() >= 4) words.push_back(cur);
  if (words.empty()) return 0.0;
  size_t hits = 0;
  for (const auto& w : words)
    if (body.find(w) != std::string::npos) ++hits;
  return static_cast<double>(hits) / static_cast<double>(words.size());
}

}  // namespace cocte::lab
