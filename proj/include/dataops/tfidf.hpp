#pragma once

#include <map>
#include <string>
#include <vector>

#include "dataops/config.hpp"
#include "dataops/findings.hpp"
#include "dataops/project.hpp"

namespace dataops {

struct TermVector {
    std::map<std::string, double> weights;  // nonzero entries only
    double norm = 0.0;
};

// Lexical terms for duplicate detection: keywords and identifier parts,
// lowercased, split on '_' and non-alphanumerics; comments, string
// contents and pure numbers are dropped; macro argument words are kept.
// Unlexable input yields an empty list.
std::vector<std::string> tokenize_for_similarity(const std::string& sql);

// tf(t,d) = count/|d|; idf(t) = ln((1+N)/(1+df)) + 1; weight = tf*idf.
std::map<std::string, TermVector> build_tfidf(
    const std::map<std::string, std::vector<std::string>>& corpus);

// dot/(|a||b|); 0 when either norm is zero.
double cosine(const TermVector& a, const TermVector& b);

// Compares every changed model against every other model over the full
// snapshot corpus; pairs at or above the threshold are reported once,
// smaller name first.
std::vector<Finding> check_vector_similarity(const std::set<std::string>& changed,
                                             const ProjectSnapshot& snapshot,
                                             const PipelineConfig& cfg);

}  // namespace dataops
