// Small end-to-end run: synthetic features through windowing, balancing,
// splitting, and two classifier families, printing one metrics block each.

#include <cstdio>
#include <memory>

#include "vigil/vigil.hpp"

int main() {
  vigil::SyntheticSpec spec;
  spec.epochs_per_class = 400;
  spec.seed = 12;
  spec.separability = 0.8;

  const auto rows = vigil::generate_features(spec);
  const auto windowed = vigil::window(rows);
  const auto balanced = vigil::balance(windowed);
  const auto data = vigil::split(balanced, 12, 0.2, 0.2);

  std::vector<vigil::WindowedSample> train = data.train;
  train.insert(train.end(), data.validation.begin(), data.validation.end());

  vigil::ForestParams forest_params;
  forest_params.n_trees = 30;
  forest_params.seed = 12;
  std::vector<std::unique_ptr<vigil::Classifier>> models;
  models.push_back(std::make_unique<vigil::RandomForestClassifier>(forest_params));
  models.push_back(std::make_unique<vigil::NaiveBayesClassifier>());

  for (auto& model : models) {
    model->fit(train);
    std::vector<vigil::VigilanceState> truth(data.test.size()), predicted(data.test.size());
    std::vector<vigil::ClassProbabilities> probabilities(data.test.size());
    for (std::size_t i = 0; i < data.test.size(); ++i) {
      truth[i] = data.test[i].label;
      probabilities[i] = model->predict_proba(data.test[i].features);
      predicted[i] = vigil::predicted_class(probabilities[i]);
    }
    vigil::ConfusionMatrix cm;
    const auto report = vigil::evaluate_predictions(truth, predicted, probabilities, &cm);
    std::printf("%s", vigil::format_metrics_text(model->kind(), cm, report).c_str());
    std::printf("\n");
  }
  return 0;
}
