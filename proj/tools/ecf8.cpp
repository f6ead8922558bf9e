// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0
//
// ecf8: lossless FP8 (E4M3) tensor compression.
//
// Exit codes: 0 success, 1 verification mismatch, 2 malformed input or
// bad invocation, 3 filesystem trouble.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecf8/container.hpp"

namespace {

int run_compress(const std::string& in_path, const std::string& out_path,
                 std::uint32_t threads_per_block) {
  const ecf8::RawTensorFile raw = ecf8::load_raw_file(in_path);
  const ecf8::Ecf8File comp = ecf8::compress_tensors(raw, threads_per_block);
  const auto bytes = ecf8::serialize(comp);
  ecf8::write_file(out_path, bytes);

  std::uint64_t original = 0;
  for (std::size_t i = 0; i < raw.tensors.size(); ++i) {
    const std::uint64_t o = raw.tensors[i].data.size();
    const std::uint64_t c = ecf8::tensor_section_bytes(comp.tensors[i]);
    original += o;
    std::printf("%s: %llu -> %llu bytes\n", raw.tensors[i].shape.name.c_str(),
                static_cast<unsigned long long>(o), static_cast<unsigned long long>(c));
  }
  const double savings =
      original == 0 ? 0.0
                    : 1.0 - static_cast<double>(bytes.size()) / static_cast<double>(original);
  std::printf("total: %llu -> %llu bytes (%.1f%% saved)\n",
              static_cast<unsigned long long>(original),
              static_cast<unsigned long long>(bytes.size()), 100.0 * savings);
  return 0;
}

int run_decompress(const std::string& in_path, const std::string& out_path) {
  const ecf8::Ecf8File comp = ecf8::load_container_file(in_path);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw ecf8::IoError("cannot open " + out_path + " for writing");
  const ecf8::DecompressStats st = ecf8::decompress_streaming(comp, out);
  out.close();
  if (!out) throw ecf8::IoError("short write to " + out_path);
  std::printf("%zu tensors, %llu buffer bytes, %llu allocation(s)\n", comp.tensors.size(),
              static_cast<unsigned long long>(st.buffer_capacity_bytes),
              static_cast<unsigned long long>(st.buffer_allocations));
  return 0;
}

int run_verify(const std::string& in_path, const std::vector<std::uint32_t>& thread_counts) {
  const ecf8::RawTensorFile raw = ecf8::load_raw_file(in_path);
  const ecf8::VerifyReport rep = ecf8::verify_tensors(raw, thread_counts);
  for (const auto& issue : rep.issues) {
    std::fprintf(stderr, "MISMATCH %s decoder, tensor '%s', T=%u, first at element %llu\n",
                 issue.decoder.c_str(), issue.tensor.c_str(), issue.threads_per_block,
                 static_cast<unsigned long long>(issue.first_mismatch));
  }
  if (!rep.ok()) return 1;
  std::printf("%llu round-trip checks passed\n", static_cast<unsigned long long>(rep.checks));
  return 0;
}

int run_stats(const std::string& in_path, const std::string& format) {
  const ecf8::RawTensorFile raw = ecf8::load_raw_file(in_path);
  const auto reports = ecf8::make_stats(raw);
  if (format == "json") {
    ecf8::stats_to_json(reports, std::cout);
  } else {
    ecf8::stats_to_csv(reports, std::cout);
    std::fprintf(stderr, "# theoretical floor for Gaussian weights: %.3f bits/weight\n",
                 ecf8::compression_floor_bits());
  }
  return 0;
}

int run_synth(double alpha, double gamma, std::uint64_t n, std::uint64_t seed,
              const std::string& out_path) {
  const ecf8::RawTensorFile raw = ecf8::synth_raw(alpha, gamma, n, seed);
  ecf8::write_file(out_path, ecf8::serialize(raw));
  std::printf("%s: %llu elements -> %s\n", raw.tensors[0].shape.name.c_str(),
              static_cast<unsigned long long>(n), out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lossless FP8 (E4M3) tensor compressor"};
  app.require_subcommand(1);

  std::string in_path, out_path;
  std::uint32_t threads_per_block = 256;
  std::vector<std::uint32_t> thread_counts = {1, 2, 32, 256};
  std::string format = "csv";
  double alpha = 2.0, gamma = 1.0;
  std::uint64_t n = 0, seed = 0;

  auto* compress = app.add_subcommand("compress", "Compress a raw tensor file");
  compress->add_option("input", in_path)->required();
  compress->add_option("output", out_path)->required();
  compress->add_option("--threads-per-block", threads_per_block,
                       "Decode threads per block (power of two, <= 1024)");

  auto* decompress = app.add_subcommand("decompress", "Expand a compressed container");
  decompress->add_option("input", in_path)->required();
  decompress->add_option("output", out_path)->required();

  auto* verify = app.add_subcommand("verify", "Round-trip a raw file in memory");
  verify->add_option("input", in_path)->required();
  verify->add_option("--threads-per-block-list", thread_counts, "Block widths to exercise")
      ->delimiter(',');

  auto* stats = app.add_subcommand("stats", "Per-tensor entropy and savings report");
  stats->add_option("input", in_path)->required();
  stats->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  auto* synth = app.add_subcommand("synth", "Generate an alpha-stable FP8 tensor file");
  synth->add_option("--alpha", alpha, "Stability index in (0, 2]")->required();
  synth->add_option("--gamma", gamma, "Scale")->required();
  synth->add_option("--n", n, "Element count")->required();
  synth->add_option("--seed", seed, "RNG seed")->required();
  synth->add_option("output", out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(compress)) return run_compress(in_path, out_path, threads_per_block);
    if (app.got_subcommand(decompress)) return run_decompress(in_path, out_path);
    if (app.got_subcommand(verify)) return run_verify(in_path, thread_counts);
    if (app.got_subcommand(stats)) return run_stats(in_path, format);
    if (app.got_subcommand(synth)) return run_synth(alpha, gamma, n, seed, out_path);
  } catch (const ecf8::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const ecf8::FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
