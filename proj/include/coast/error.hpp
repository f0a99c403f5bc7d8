#pragma once

#include <stdexcept>
#include <string>

namespace coast {

enum class errc {
  // shared
  empty_matrix,
  dim_mismatch,
  // conceptor
  non_positive_aperture,
  composed_conceptor,
  // steering
  beta_out_of_range,
  missing_denoise_step,
  insufficient_class,
  empty_step_bucket,
  degenerate_direction,
  // diagnostics / stats
  zero_conceptor,
  zero_source,
  too_few_samples,
  zero_variance,
  degenerate_pool,
  constant_sequence,
  // hyperselect
  empty_input,
  missing_configs,
  // dataset
  unknown_task,
  unknown_layer,
  empty_token_axis,
  bad_magic,
  bad_header,
  truncated_file,
  dtype_unsupported,
  dim_overflow,
  // simulator
  dim_budget,
  too_few_tasks,
  invalid_config,
  io_error,
};

const char* errc_name(errc c);

// Every contract violation in the library throws one of these; the CLI maps
// the code onto its exit-code scheme (2 input, 3 eligibility, 4 internal).
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool ok, errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::empty_matrix: return "EmptyMatrix";
    case errc::dim_mismatch: return "DimMismatch";
    case errc::non_positive_aperture: return "NonPositiveAperture";
    case errc::composed_conceptor: return "ComposedConceptor";
    case errc::beta_out_of_range: return "BetaOutOfRange";
    case errc::missing_denoise_step: return "MissingDenoiseStep";
    case errc::insufficient_class: return "InsufficientClass";
    case errc::empty_step_bucket: return "EmptyStepBucket";
    case errc::degenerate_direction: return "DegenerateDirection";
    case errc::zero_conceptor: return "ZeroConceptor";
    case errc::zero_source: return "ZeroSource";
    case errc::too_few_samples: return "TooFewSamples";
    case errc::zero_variance: return "ZeroVariance";
    case errc::degenerate_pool: return "DegeneratePool";
    case errc::constant_sequence: return "ConstantSequence";
    case errc::empty_input: return "EmptyInput";
    case errc::missing_configs: return "MissingConfigs";
    case errc::unknown_task: return "UnknownTask";
    case errc::unknown_layer: return "UnknownLayer";
    case errc::empty_token_axis: return "EmptyTokenAxis";
    case errc::bad_magic: return "BadMagic";
    case errc::bad_header: return "BadHeader";
    case errc::truncated_file: return "TruncatedFile";
    case errc::dtype_unsupported: return "DtypeUnsupported";
    case errc::dim_overflow: return "DimOverflow";
    case errc::dim_budget: return "DimBudget";
    case errc::too_few_tasks: return "TooFewTasks";
    case errc::invalid_config: return "InvalidConfig";
    case errc::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace coast
