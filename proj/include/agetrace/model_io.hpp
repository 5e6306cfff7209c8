#pragma once

#include <string>

#include "agetrace/knn_pixelwise.hpp"
#include "agetrace/ml_age.hpp"
#include "agetrace/naive_bayes.hpp"

namespace agetrace {

inline constexpr int kModelSchemaVersion = 1;

// Versioned JSON model files. Each file carries {"schema_version", "kind"}
// and loading rejects mismatched kinds or unknown versions. Serialization is
// byte-deterministic for a given model.
void save_model(const LikelihoodAgeModel& model, const std::string& path);
void save_model(const NBModel& model, const std::string& path);
void save_model(const PixelwiseKnnModel& model, const std::string& path);

LikelihoodAgeModel load_ml_model(const std::string& path);
NBModel load_nb_model(const std::string& path);
PixelwiseKnnModel load_knn_model(const std::string& path);

// Kind tag of a model file without fully parsing it ("ml-age", "naive-bayes",
// "pixelwise-knn").
std::string model_kind(const std::string& path);

} // namespace agetrace
