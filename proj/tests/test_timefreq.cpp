#include <doctest.h>

#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "sikam/error.hpp"
#include "sikam/eval.hpp"
#include "sikam/timefreq.hpp"

using namespace sikam;
using testing::argmax;
using testing::rms;

namespace {

int peak_bin(const std::vector<double>& signal, const TransformParams& p) {
  const auto mag = magnitude(forward_logfreq(signal, p));
  return argmax(mag.data.col(mag.num_frames() / 2));
}

double relative_interior_error(const std::vector<double>& x, const std::vector<double>& y, size_t edge) {
  std::vector<double> diff(x.size());
  for (size_t i = 0; i < x.size(); ++i) diff[i] = y[i] - x[i];
  return rms(diff, edge, x.size() - edge) / rms(x, edge, x.size() - edge);
}

}  // namespace

TEST_CASE("default parameters give the 24 bins per octave grid") {
  TransformParams p;
  CHECK(p.num_bins() == 232);
  CHECK(p.num_linear_bins() == 2049);
  CHECK(p.bin_frequency(0) == doctest::Approx(27.5));
  CHECK(p.bin_frequency(24) == doctest::Approx(55.0));
  CHECK(p.bin_frequency(96) == doctest::Approx(440.0));
  CHECK(p.num_frames(44100) == 87);
}

TEST_CASE("invalid parameters are rejected") {
  TransformParams p;
  p.f_min = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.f_max = 30000.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.bins_per_octave = 0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.hop = 2048;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  CHECK_THROWS_AS(forward_logfreq(std::vector<double>(1000, 0.0), p), InvalidArgument);
}

TEST_CASE("pure tones land on their geometric bin") {
  TransformParams p;
  CHECK(std::abs(peak_bin(testing::sine(27.5, 1.0), p) - 0) <= 1);
  CHECK(std::abs(peak_bin(testing::sine(55.0, 1.0), p) - 24) <= 1);
  CHECK(std::abs(peak_bin(testing::sine(440.0, 1.0), p) - 96) <= 1);
  for (int k : {30, 77, 150, 200}) {
    CAPTURE(k);
    CHECK(std::abs(peak_bin(testing::sine(p.bin_frequency(k), 1.0), p) - k) <= 1);
  }
}

TEST_CASE("zero signal maps to zero and back") {
  TransformParams p;
  const std::vector<double> zeros(44100, 0.0);
  const auto spect = forward_logfreq(zeros, p);
  CHECK(spect.data.cwiseAbs().maxCoeff() == 0.0);
  const auto back = inverse_logfreq(spect);
  CHECK(back.size() == zeros.size());
  for (double v : back) REQUIRE(v == 0.0);
}

TEST_CASE("frame times follow the hop") {
  TransformParams p;
  const auto spect = forward_logfreq(testing::sine(440.0, 1.0), p);
  REQUIRE(spect.frame_times.size() == static_cast<size_t>(spect.num_frames()));
  CHECK(spect.frame_times[0] == 0.0);
  CHECK(spect.frame_times[10] == doctest::Approx(10 * 512 / 44100.0));
}

TEST_CASE("round trip of random signals stays below 1e-2 over the interior") {
  TransformParams p;
  for (int seconds = 1; seconds <= 5; ++seconds) {
    const auto x = testing::white_noise(static_cast<size_t>(seconds * 44100 + 123 * seconds), 40 + seconds);
    const auto y = inverse_logfreq(forward_logfreq(x, p));
    REQUIRE(y.size() == x.size());
    const double err = relative_interior_error(x, y, static_cast<size_t>(p.window_length));
    CAPTURE(seconds);
    CHECK(err < 1e-2);
  }
}

TEST_CASE("round trip keeps the spectral peak of a 440 Hz tone") {
  TransformParams p;
  const auto x = testing::sine(440.0, 1.0);
  const auto y = inverse_logfreq(forward_logfreq(x, p));
  CHECK(peak_bin(y, p) == peak_bin(x, p));
}

TEST_CASE("an octave is bins_per_octave bins") {
  TransformParams p;
  for (double f : {4 * 27.5 * 1.1, 200.0, 523.25, 1234.0, 4000.0}) {
    CAPTURE(f);
    const int a = peak_bin(testing::sine(f, 1.0), p);
    const int b = peak_bin(testing::sine(2.0 * f, 1.0), p);
    CHECK(std::abs(b - a - 24) <= 1);
  }
}

TEST_CASE("the forward transform is linear") {
  TransformParams p;
  const auto x = testing::white_noise(50000, 1);
  const auto y = testing::sine(300.0, 50000.0 / 44100.0);
  const double a = 0.7, b = -2.3;
  std::vector<double> z(x.size());
  for (size_t i = 0; i < z.size(); ++i) z[i] = a * x[i] + b * y[i];
  const auto fx = forward_logfreq(x, p), fy = forward_logfreq(y, p), fz = forward_logfreq(z, p);
  const Eigen::MatrixXcd expect = a * fx.data + b * fy.data;
  CHECK((fz.data - expect).norm() / expect.norm() < 1e-6);
  const Eigen::MatrixXcd expect_res = a * fx.residual + b * fy.residual;
  CHECK((fz.residual - expect_res).norm() / expect_res.norm() < 1e-6);
}

TEST_CASE("transposing a harmonic tone translates its magnitude frame") {
  TransformParams p;
  NoteOptions opt;
  opt.n_partials = 8;
  for (int d : {3, 7, 12, 19}) {
    CAPTURE(d);
    const double f0 = 196.0;
    const auto lo = magnitude(forward_logfreq(synthesize_note(f0, 1.0, opt), p));
    const auto hi = magnitude(forward_logfreq(synthesize_note(f0 * std::pow(2.0, d / 24.0), 1.0, opt), p));
    const int t = lo.num_frames() / 2;
    const int n = p.num_bins() - d;
    const Eigen::VectorXd a = lo.data.col(t).head(n);
    const Eigen::VectorXd b = hi.data.col(t).segment(d, n);
    const Eigen::VectorXd ac = a.array() - a.mean();
    const Eigen::VectorXd bc = b.array() - b.mean();
    const double ncc = ac.dot(bc) / (ac.norm() * bc.norm());
    CHECK(ncc > 0.9);
  }
}

TEST_CASE("magnitude is the elementwise modulus") {
  ComplexSpectrogram s;
  s.data.resize(2, 2);
  s.data << cdouble(3, 4), cdouble(0, 0), cdouble(-1, 0), cdouble(0, -2);
  const auto m = magnitude(s);
  CHECK(m.data(0, 0) == 5.0);
  CHECK(m.data(0, 1) == 0.0);
  CHECK(m.data(1, 0) == 1.0);
  CHECK(m.data(1, 1) == 2.0);

  TransformParams p;
  auto spect = forward_logfreq(testing::white_noise(20000, 3), p);
  const auto before = magnitude(spect).data;
  spect.data *= std::polar(1.0, 0.83);
  CHECK((magnitude(spect).data - before).cwiseAbs().maxCoeff() < 1e-12 * before.maxCoeff());
}

TEST_CASE("masking and resynthesis") {
  TransformParams p;
  const auto x = testing::white_noise(44100, 9);
  const auto spect = forward_logfreq(x, p);
  const Eigen::Index f = spect.data.rows(), t = spect.data.cols();

  SUBCASE("ones reproduce the plain inverse exactly") {
    const auto a = apply_mask_and_resynthesize(spect, Eigen::MatrixXd::Ones(f, t));
    const auto b = inverse_logfreq(spect);
    CHECK(a == b);
  }
  SUBCASE("zeros give silence") {
    const auto a = apply_mask_and_resynthesize(spect, Eigen::MatrixXd::Zero(f, t));
    for (double v : a) REQUIRE(v == 0.0);
  }
  SUBCASE("a half mask halves the RMS") {
    const auto a = apply_mask_and_resynthesize(spect, Eigen::MatrixXd::Constant(f, t, 0.5));
    CHECK(rms(a) / rms(x) == doctest::Approx(0.5).epsilon(1e-2));
  }
  SUBCASE("out of range and mismatched masks are rejected") {
    CHECK_THROWS_AS(apply_mask(spect, Eigen::MatrixXd::Constant(f, t, 1.5)), InvalidArgument);
    CHECK_THROWS_AS(apply_mask(spect, Eigen::MatrixXd::Constant(f, t, -0.1)), InvalidArgument);
    CHECK_THROWS_AS(apply_mask(spect, Eigen::MatrixXd::Ones(f - 1, t)), InvalidArgument);
  }
  SUBCASE("inverse rejects inconsistent dimensions") {
    auto bad = spect;
    bad.residual.resize(10, t);
    CHECK_THROWS_AS(inverse_logfreq(bad), InvalidArgument);
  }
}

TEST_CASE("back-mapped masks are weighted averages") {
  TransformParams p;
  const auto map = LogFrequencyMap::get(p);
  const Eigen::Index f = map->num_log_bins();
  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(f, 3);
  CHECK(map->back_map_mask(ones).isApprox(Eigen::MatrixXd::Ones(map->num_linear_bins(), 3), 0.0));
  const Eigen::MatrixXd half = Eigen::MatrixXd::Constant(f, 1, 0.25);
  const auto back = map->back_map_mask(half);
  CHECK(back.minCoeff() >= 0.25 - 1e-15);
  CHECK(back.maxCoeff() <= 0.25 + 1e-15);
}

TEST_CASE("per-bin window policy keeps exact reconstruction and the bin axis") {
  TransformParams p;
  p.window_policy = WindowPolicy::PerBin;
  CHECK(std::abs(peak_bin(testing::sine(440.0, 1.0), p) - 96) <= 1);
  const auto x = testing::white_noise(44100, 5);
  const auto y = inverse_logfreq(forward_logfreq(x, p));
  CHECK(relative_interior_error(x, y, 4096) < 1e-2);
}

TEST_CASE("frames overlapping a sample range") {
  TransformParams p;
  const int frames = p.num_frames(44100);
  const auto hit = frames_overlapping(p, frames, 10000, 10001);
  REQUIRE(!hit.empty());
  CHECK(hit.front() == 16);
  CHECK(hit.back() == 23);
  CHECK(hit.size() == 8);
  CHECK(frames_overlapping(p, frames, 0, 1).front() == 0);
  CHECK(frames_overlapping(p, frames, 44099, 44100).back() == frames - 1);
  CHECK(frames_overlapping_seconds(p, frames, 0.5, 0.5) == frames_overlapping(p, frames, 22050, 22051));
  CHECK_THROWS_AS(frames_overlapping_seconds(p, frames, 0.5, 0.2), InvalidArgument);
}
