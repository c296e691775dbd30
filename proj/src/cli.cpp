#include "derham/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "derham/convex_decomposition.hpp"
#include "derham/factorizer.hpp"
#include "derham/generator.hpp"
#include "derham/json_io.hpp"
#include "derham/loewner.hpp"
#include "derham/metric_space.hpp"
#include "derham/normed_space.hpp"
#include "derham/rigidity.hpp"

namespace derham {

namespace {

constexpr int kPass = 0;
constexpr int kStructural = 1;
constexpr int kNegative = 2;

Json config_to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["input"] = c.input;
  j["norm"] = c.norm_input;
  j["tol_metric"] = c.tol_metric;
  j["tol_sq"] = c.tol_sq;
  j["seed"] = c.seed;
  j["budget"] = c.budget;
  j["output"] = c.output;
  j["format"] = c.format;
  if (c.command == "generate") {
    j["kind"] = c.kind;
    j["sizes"] = c.sizes;
    j["dim"] = c.dim;
    j["vertices"] = c.vertices;
    j["components"] = c.components;
    j["distort"] = c.distort;
  }
  return j;
}

std::string norm_path(const RunConfig& c) {
  if (!c.norm_input.empty()) return c.norm_input;
  if (!c.input.empty()) return c.input;
  throw std::runtime_error("missing field '--norm' (or '--input') with the instance file");
}

std::string metric_path(const RunConfig& c) {
  if (!c.input.empty()) return c.input;
  throw std::runtime_error("missing field '--input' with the instance file");
}

Tolerance tolerance_for(const FiniteMetricSpace& s, const RunConfig& c) {
  Tolerance t = s.default_tolerance();
  if (c.tol_metric >= 0) t.metric = c.tol_metric;
  if (c.tol_sq >= 0) t.sq = c.tol_sq;
  return t;
}

SearchBudget search_budget(const RunConfig& c) {
  SearchBudget b;
  if (c.budget > 0) {
    b.max_nodes = c.budget;
    b.max_group = c.budget;
  }
  return b;
}

std::string defect_kind_name(MetricDefect k) {
  switch (k) {
    case MetricDefect::asymmetry: return "asymmetry";
    case MetricDefect::nonzero_diagonal: return "nonzero_diagonal";
    case MetricDefect::nonpositive: return "nonpositive";
    case MetricDefect::triangle: return "triangle";
  }
  return "unknown";
}

struct NormWithPairs {
  NormedSpace space;
  std::vector<ProjectionPair> pairs;
};

NormWithPairs load_pairs_file(const std::string& path) {
  Json j = load_json_file(path);
  NormWithPairs out{norm_from_json(j), {}};
  const Json* arr = nullptr;
  if (j.contains("pairs")) {
    arr = &j.at("pairs");
  } else if (j.contains("ground_truth") && j.at("ground_truth").contains("pairs")) {
    arr = &j.at("ground_truth").at("pairs");
  }
  if (arr != nullptr) {
    for (const auto& el : *arr) out.pairs.push_back(pair_from_json(el, out.space));
  }
  if (out.pairs.empty()) {
    throw std::runtime_error("field 'pairs': the input carries no projection pairs");
  }
  return out;
}

int cmd_validate(const RunConfig& cfg, Json& result) {
  FiniteMetricSpace s = load_metric_file(metric_path(cfg));
  ValidationReport rep = validate(s, tolerance_for(s, cfg));
  result["ok"] = rep.ok;
  result["points"] = s.size();
  result["total_violations"] = rep.total_violations;
  Json viol = Json::array();
  for (const auto& v : rep.violations) {
    Json e;
    e["kind"] = defect_kind_name(v.kind);
    e["i"] = v.i;
    e["j"] = v.j;
    e["k"] = v.k;
    e["amount"] = v.amount;
    Json labels = Json::array();
    if (v.i >= 0) labels.push_back(s.label(v.i));
    if (v.j >= 0) labels.push_back(s.label(v.j));
    if (v.k >= 0) labels.push_back(s.label(v.k));
    e["labels"] = std::move(labels);
    viol.push_back(std::move(e));
  }
  result["violations"] = std::move(viol);
  return rep.ok ? kPass : kNegative;
}

int cmd_factor(const RunConfig& cfg, Json& result) {
  FiniteMetricSpace s = load_metric_file(metric_path(cfg));
  FactorizationReport rep = factorize(s, tolerance_for(s, cfg), search_budget(cfg));
  result["factor_count"] = rep.factors.size();
  Json factors = Json::array();
  for (const auto& f : rep.factors) factors.push_back(metric_to_json(f));
  result["factors"] = std::move(factors);
  result["coordinates"] = rep.coordinates;
  result["irreducible"] = rep.irreducible_flags;
  result["unique"] = rep.unique;
  result["complete"] = rep.complete;
  result["alternative_count"] = rep.alternatives.size();
  result["note"] = rep.note;
  if (!rep.complete) return kStructural;
  return rep.factors.size() >= 2 ? kPass : kNegative;
}

int cmd_witnesses(const RunConfig& cfg, Json& result) {
  FiniteMetricSpace s = load_metric_file(metric_path(cfg));
  WitnessList wl = enumerate_witnesses(s, tolerance_for(s, cfg), search_budget(cfg));
  result["count"] = wl.witnesses.size();
  result["complete"] = wl.complete;
  result["note"] = wl.note;
  Json arr = Json::array();
  for (const auto& w : wl.witnesses) {
    Json e = witness_to_json(w);
    e["canonical_key"] = witness_canonical_key(w);
    arr.push_back(std::move(e));
  }
  result["witnesses"] = std::move(arr);
  if (!wl.complete) return kStructural;
  return wl.witnesses.empty() ? kNegative : kPass;
}

int cmd_isometries(const RunConfig& cfg, Json& result) {
  FiniteMetricSpace s = load_metric_file(metric_path(cfg));
  IsometryList il = isometry_group(s, tolerance_for(s, cfg), search_budget(cfg));
  result["order"] = il.perms.size();
  result["complete"] = il.complete;
  const std::size_t emit = std::min<std::size_t>(il.perms.size(), 120);
  Json arr = Json::array();
  for (std::size_t i = 0; i < emit; ++i) arr.push_back(il.perms[i]);
  result["perms"] = std::move(arr);
  result["perms_emitted"] = emit;
  return il.complete ? kPass : kStructural;
}

int cmd_exact_sequence(const RunConfig& cfg, Json& result) {
  FiniteMetricSpace s = load_metric_file(metric_path(cfg));
  const Tolerance tol = tolerance_for(s, cfg);
  const SearchBudget budget = search_budget(cfg);
  FactorizationReport fact = factorize(s, tol, budget);
  IsometryGroupReport rep = verify_exact_sequence(s, fact, tol, budget);
  Json sizes = Json::array();
  for (const auto& f : fact.factors) sizes.push_back(f.size());
  result["factor_sizes"] = std::move(sizes);
  result["ok"] = rep.ok;
  result["reason"] = rep.reason;
  result["order"] = rep.order;
  result["factor_group_order"] = rep.factor_group_order;
  result["permutation_group_order"] = rep.permutation_group_order;
  result["exact"] = rep.exact;
  result["kernel_trivial"] = rep.kernel_trivial;
  result["kernel_counterexample"] = rep.kernel_counterexample;
  if (!rep.exact || !fact.complete) return kStructural;
  return rep.ok && rep.kernel_trivial ? kPass : kNegative;
}

int cmd_norm_decompose(const RunConfig& cfg, Json& result) {
  NormedSpace s = load_norm_file(norm_path(cfg));
  const int samples = cfg.budget > 0 ? static_cast<int>(std::min<long>(cfg.budget, 100000)) : 256;
  NormValidation nv = validate(s, 256, cfg.seed);
  result["norm_ok"] = nv.ok;
  result["dim"] = s.dim;
  result["form"] = form_name(s.form);
  auto cands = decomposition_candidates(s, samples, cfg.seed);
  Json arr = Json::array();
  for (const auto& [s1, s2] : cands) {
    Json e;
    e["s1"] = subspace_to_json(s1);
    e["s2"] = subspace_to_json(s2);
    ProductCheck pc = is_product_decomposition(s, s1, s2, samples, cfg.seed);
    e["ok"] = pc.ok;
    e["worst_residual"] = pc.worst;
    e["pairs_tested"] = pc.pairs_tested;
    arr.push_back(std::move(e));
  }
  result["candidates"] = std::move(arr);
  result["count"] = cands.size();
  return cands.empty() ? kNegative : kPass;
}

int cmd_loewner(const RunConfig& cfg, Json& result) {
  NormedSpace s = load_norm_file(norm_path(cfg));
  LoewnerResult r = max_inscribed_ellipsoid(s);
  result = ellipsoid_result_to_json(r);
  if (r.converged) {
    result["boundary_deviation"] = boundary_deviation(s, r.ellipsoid.shape, 4096, cfg.seed);
  }
  return r.converged ? kPass : kStructural;
}

int cmd_gruber(const RunConfig& cfg, Json& result) {
  const std::string path = norm_path(cfg);
  Json j = load_json_file(path);
  NormedSpace s = norm_from_json(j);
  if (s.form != NormForm::polyhedral_vertices) {
    throw std::runtime_error("field 'form': gruber expects a polyhedral_vertices instance");
  }
  Matrix lineality;
  if (j.contains("lineality")) lineality = matrix_cols_from_json(j.at("lineality"), "lineality");
  std::optional<Matrix> gram;
  if (j.contains("gram")) gram = matrix_rows_from_json(j.at("gram"), "gram");
  ConvexBody body = make_body(s.vertices, lineality, gram);
  const int cap = cfg.budget > 0 ? static_cast<int>(std::min<long>(cfg.budget, 16)) : 6;
  DirectSumDecomposition dec = gruber_decompose(body, cap);
  Json parts = Json::array();
  for (const auto& p : dec.parts) {
    Json e;
    e["dim"] = p.sub.dim();
    e["subspace"] = subspace_to_json(p.sub);
    e["vertices"] = matrix_cols_to_json(p.body.vertices);
    e["lineality"] = matrix_cols_to_json(p.body.lineality);
    parts.push_back(std::move(e));
  }
  result["parts"] = std::move(parts);
  result["part_count"] = dec.parts.size();
  result["orthogonal"] = dec.orthogonal;
  result["partial"] = dec.partial;
  result["note"] = dec.note;
  if (dec.partial) return kStructural;
  return dec.parts.size() >= 2 ? kPass : kNegative;
}

int cmd_defect(const RunConfig& cfg, Json& result) {
  NormedSpace s = load_norm_file(norm_path(cfg));
  const int starts = cfg.budget > 0 ? static_cast<int>(std::min<long>(cfg.budget, 100000)) : 512;
  DefectReport rep = defect(s, starts, cfg.seed);
  result["m_value"] = rep.m_value;
  result["extremal_pair"] = Json{{"x", vector_to_json(rep.x)}, {"y", vector_to_json(rep.y)}};
  result["certified_lower"] = rep.certified_lower;
  result["certified_global"] = rep.certified_global;
  result["log"] = rep.log;
  const double check = defect_ratio(s, rep.x, rep.y);
  result["ratio_at_pair"] = check;
  const bool consistent =
      rep.m_value <= std::sqrt(2.0) + 1e-12 && std::abs(check - rep.m_value) <= 1e-9;
  result["consistent"] = consistent;
  return consistent ? kPass : kStructural;
}

int cmd_eigen(const RunConfig& cfg, Json& result) {
  NormWithPairs in = load_pairs_file(norm_path(cfg));
  EigenReport rep = composed_projection_eigen(in.pairs.front());
  result["refused"] = rep.refused;
  result["reason"] = rep.reason;
  result["lambda"] = rep.lambda;
  result["lambda_algebraic"] = rep.lambda_algebraic;
  result["vector"] = vector_to_json(rep.vector);
  result["residual"] = rep.residual;
  result["ok"] = rep.ok;
  if (rep.refused) return kNegative;
  return rep.ok ? kPass : kStructural;
}

int cmd_strike(const RunConfig& cfg, Json& result) {
  NormWithPairs in = load_pairs_file(norm_path(cfg));
  const int starts = cfg.budget > 0 ? static_cast<int>(std::min<long>(cfg.budget, 100000)) : 512;
  Json arr = Json::array();
  bool all_confirmed = true, any_inconsistent = false;
  for (std::size_t i = 0; i < in.pairs.size(); ++i) {
    StrikeReport rep = check_strike(in.pairs[i], starts, cfg.seed);
    Json e;
    e["pair"] = i;
    e["refused"] = rep.refused;
    e["reason"] = rep.reason;
    e["m_value"] = rep.m_value;
    e["boundary_deviation"] = rep.boundary_dev;
    e["euclidean_confirmed"] = rep.euclidean_confirmed;
    e["inconsistency"] = rep.inconsistency;
    e["chain"] = rep.chain;
    arr.push_back(std::move(e));
    all_confirmed = all_confirmed && rep.euclidean_confirmed;
    any_inconsistent = any_inconsistent || rep.inconsistency;
  }
  result["pairs"] = std::move(arr);
  result["all_confirmed"] = all_confirmed;
  if (any_inconsistent) return kStructural;
  return all_confirmed ? kPass : kNegative;
}

int cmd_generate(const RunConfig& cfg, Json& artifact) {
  std::vector<int> sizes = cfg.sizes;
  if (cfg.kind == "random-product-metric" || cfg.kind == "shuffled-product") {
    if (sizes.empty()) sizes = {2, 3};
    MetricInstance inst = cfg.kind == "random-product-metric"
                              ? generate_random_product_metric(sizes, cfg.seed)
                              : generate_shuffled_product(sizes, cfg.seed);
    if (cfg.format == "csv") {
      artifact = Json();  // csv artifacts bypass the json envelope
      artifact["csv"] = metric_to_csv(inst.space);
      return kPass;
    }
    artifact = metric_instance_to_json(inst);
    return kPass;
  }
  if (cfg.format == "csv") {
    throw std::runtime_error("field '--format': csv output applies to distance matrices only");
  }
  if (cfg.kind == "random-polytope-norm") {
    if (sizes.empty()) sizes = {2, 2};
    NormInstance inst = generate_random_polytope_norm(sizes, cfg.vertices, cfg.seed, cfg.distort);
    artifact = norm_instance_to_json(inst);
    return kPass;
  }
  if (cfg.kind == "product-norm") {
    std::vector<std::string> comps = cfg.components;
    if (comps.empty()) comps = {"linf:2", "l1:2"};
    NormInstance inst = generate_product_norm(comps, cfg.seed, cfg.distort);
    artifact = norm_instance_to_json(inst);
    return kPass;
  }
  if (cfg.kind == "rotated-euclidean-pair") {
    NormInstance inst = generate_rotated_euclidean_pair(cfg.dim, cfg.seed);
    artifact = norm_instance_to_json(inst);
    return kPass;
  }
  throw std::runtime_error("field 'kind': unknown generator '" + cfg.kind + "'");
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (!cfg.output.empty()) {
    write_text_file(cfg.output, text);
  } else {
    std::fwrite(text.data(), 1, text.size(), stdout);
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"decomposition toolkit: direct products of finite metric spaces and normed spaces"};
  app.require_subcommand(1);

  RunConfig cfg;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"validate", "check the metric axioms on a distance matrix"},
      {"factor", "maximal direct-product factorization of a finite metric space"},
      {"witnesses", "enumerate product decompositions (grid witnesses)"},
      {"isometries", "enumerate the isometry group"},
      {"exact-sequence", "verify the isometry group order against the factor groups"},
      {"norm-decompose", "verified product decompositions of a normed space"},
      {"loewner", "maximal inscribed ellipsoid of the unit ball"},
      {"gruber", "direct-sum decomposition of a symmetric polytope"},
      {"defect", "parallelogram defect of a normed space"},
      {"eigen", "eigen data of the composed projection of a decomposition pair"},
      {"strike", "two transversal decompositions force a Euclidean space"},
      {"generate", "emit a seeded test instance with embedded ground truth"},
  };

  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, desc] : commands) {
    CLI::App* c = app.add_subcommand(name, desc);
    c->add_option("--input", cfg.input, "instance file (json; csv for distance matrices)");
    c->add_option("--norm", cfg.norm_input, "normed-space instance file (json)");
    c->add_option("--tol-metric", cfg.tol_metric, "override the distance tolerance");
    c->add_option("--tol-sq", cfg.tol_sq, "override the squared-distance tolerance");
    c->add_option("--seed", cfg.seed, "seed for all stochastic sampling");
    c->add_option("--budget", cfg.budget, "search/sampling cap (command specific)");
    c->add_option("--output", cfg.output, "report path (stdout when omitted)");
    c->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    subs[name] = c;
  }
  CLI::App* gen = subs["generate"];
  gen->add_option("kind", cfg.kind,
                  "one of random-product-metric, shuffled-product, random-polytope-norm, "
                  "product-norm, rotated-euclidean-pair")
      ->required();
  gen->add_option("--sizes", cfg.sizes, "factor sizes / part dimensions")->delimiter(',');
  gen->add_option("--dim", cfg.dim, "ambient dimension (rotated-euclidean-pair)");
  gen->add_option("--vertices", cfg.vertices, "vertex pairs per part (random-polytope-norm)");
  gen->add_option("--components", cfg.components,
                  "component descriptors like linf:2,l1:2,gram:3 (product-norm)")
      ->delimiter(',');
  gen->add_flag("--distort", cfg.distort, "apply a random invertible distortion");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  static const char* prog = "derham";
  argv.push_back(prog);
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kStructural;
  }
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) cfg.command = name;
  }

  Json result;
  int code = kStructural;
  std::string error;
  try {
    if (cfg.command == "validate") {
      code = cmd_validate(cfg, result);
    } else if (cfg.command == "factor") {
      code = cmd_factor(cfg, result);
    } else if (cfg.command == "witnesses") {
      code = cmd_witnesses(cfg, result);
    } else if (cfg.command == "isometries") {
      code = cmd_isometries(cfg, result);
    } else if (cfg.command == "exact-sequence") {
      code = cmd_exact_sequence(cfg, result);
    } else if (cfg.command == "norm-decompose") {
      code = cmd_norm_decompose(cfg, result);
    } else if (cfg.command == "loewner") {
      code = cmd_loewner(cfg, result);
    } else if (cfg.command == "gruber") {
      code = cmd_gruber(cfg, result);
    } else if (cfg.command == "defect") {
      code = cmd_defect(cfg, result);
    } else if (cfg.command == "eigen") {
      code = cmd_eigen(cfg, result);
    } else if (cfg.command == "strike") {
      code = cmd_strike(cfg, result);
    } else if (cfg.command == "generate") {
      code = cmd_generate(cfg, result);
    }
  } catch (const std::exception& e) {
    error = e.what();
    code = kStructural;
  }

  try {
    if (cfg.command == "generate" && code == kPass) {
      // the artifact itself is the output; instances embed their ground truth
      if (result.contains("csv")) {
        emit(cfg, result.at("csv").get<std::string>());
      } else {
        result["config"] = config_to_json(cfg);
        emit(cfg, result.dump(2) + "\n");
      }
    } else {
      Json report;
      report["schema"] = kSchemaTag;
      report["command"] = cfg.command;
      report["config"] = config_to_json(cfg);
      if (!error.empty()) report["error"] = error;
      report["result"] = std::move(result);
      emit(cfg, report.dump(2) + "\n");
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kStructural;
  }
  if (!error.empty()) std::fprintf(stderr, "error: %s\n", error.c_str());
  return code;
}

}  // namespace derham
