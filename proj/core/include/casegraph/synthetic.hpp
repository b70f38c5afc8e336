#pragma once

#include <cstdint>
#include <vector>

#include "casegraph/case_base.hpp"
#include "casegraph/features.hpp"
#include "casegraph/rng.hpp"

namespace casegraph {

/// Random attributed graph drawn from a small concept/relation/attribute
/// vocabulary; node ids are n0..n{k-1}.
AttributedGraph random_graph(Rng& rng, std::size_t n_nodes,
                             std::size_t n_edges,
                             std::size_t concept_vocab = 8,
                             std::size_t relation_vocab = 4);

/// Deduplicated, conflict-free classification base: every answer graph
/// carries a case-unique discriminator concept, so each stored
/// characterization has a unique exact match.
CaseBase make_classification_base(std::size_t n_questions,
                                  std::size_t candidates_per_question,
                                  std::uint64_t seed);

/// Clustered corpus for the growth simulation: questions within a cluster
/// share a question prototype, true candidates orbit the cluster's true
/// answer prototype and false candidates the false one. Nearest-neighbor
/// classification of an unseen question succeeds once its cluster has other
/// questions in the base, so accuracy climbs with coverage.
CaseBase make_cluster_corpus(std::size_t n_questions,
                             std::size_t candidates_per_question,
                             std::size_t n_clusters, std::uint64_t seed);

/// Small random base (graphs from a shared vocabulary, random lessons) for
/// exercising the hill-climbing contract.
CaseBase make_random_base(std::size_t n_questions,
                          std::size_t max_candidates_per_question,
                          std::uint64_t seed);

/// Ranking dataset with a planted signal: the CBR features carry most of
/// the label information, the retrieval score "I" carries less, plus pure
/// noise features. Feature names: f1..f7 and "I".
std::vector<RankItem> make_ranking_dataset(std::size_t n_questions,
                                           std::size_t candidates_per_question,
                                           std::uint64_t seed);

/// Dataset whose feature "f1" separates positives from negatives exactly.
std::vector<RankItem> make_separable_dataset(std::size_t n_questions,
                                             std::size_t candidates_per_question,
                                             std::uint64_t seed);

}  // namespace casegraph
