#ifndef CLOUDKSVD_MNIST_HPP
#define CLOUDKSVD_MNIST_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "cloudksvd/dictionary.hpp"

namespace cksvd {

struct MnistSet {
  std::size_t rows = 0, cols = 0;
  std::vector<Vec> images;  // rows*cols gray values in [0, 1]
  std::vector<int> labels;
  std::string images_path, labels_path;
};

// IDX pair loader: big-endian magic 2051/2049, dimension counts, raw bytes
// scaled to [0,1]. Wrong magic -> format error; image/label count mismatch ->
// consistency error; short file -> io error.
MnistSet load_mnist_idx(const std::string& images_path, const std::string& labels_path);

// IDX writers (fixtures and dataset tooling).
void write_idx_images(const std::string& path,
                      const std::vector<std::vector<unsigned char>>& images, std::size_t rows,
                      std::size_t cols);
void write_idx_labels(const std::string& path, const std::vector<unsigned char>& labels);

// Bilinear 28x28 -> 16x16, then l2 normalization (a zero image stays zero).
Vec downsample_28_to_16(const Vec& image);

// Codes y against the concatenated dictionary, partitions the coefficients
// per class, and returns the argmin-residue class (ties -> lowest index).
std::size_t classify_min_residue(const Vec& y, const std::vector<Dictionary>& class_dicts,
                                 std::size_t T0);

struct MnistPipelineConfig {
  std::string images_path, labels_path;
  std::vector<int> digits = {0, 3, 5, 8, 9};
  std::size_t train_per_class = 500;
  std::size_t test_per_class = 100;
  std::size_t sites = 2;
  double p = 0.5;
  std::size_t K = 100;
  std::size_t T0 = 10;
  std::size_t T_d = 10;
  std::size_t T_p = 15;
  std::size_t T_c = 15;
  std::size_t splits = 1;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string data_note;  // provenance note copied into the report
};

struct MnistClassRates {
  std::vector<double> centralized;  // per class
  std::vector<double> cloud;
  std::vector<double> local_min;
  std::vector<double> local_max;
  std::vector<std::vector<double>> local_per_site;  // [site][class]
};

struct MnistReport {
  std::vector<int> digits;
  std::vector<MnistClassRates> per_split;
};

MnistReport run_mnist_pipeline(const MnistPipelineConfig& cfg);

}  // namespace cksvd

#endif
