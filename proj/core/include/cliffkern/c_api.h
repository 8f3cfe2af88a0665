/* C ABI over raw single-precision buffers in the protocol layouts:
 *   conv        input (B, C_in, d_image^k, N_B), output (B, C_out, d_out^k, N_B),
 *               filters (N_B, C_in, C_out, d_filter^k), bias (N_B, C_out)
 *   linear      input (B, C_in, N_B), output (B, C_out, N_B),
 *               weight (N_B, C_out, C_in), bias (N_B, C_out)
 *   activation  input and output (B, C, N_B), weight (C, K), bias (C)
 *
 * Every call returns CK_OK or a negative status; ck_last_error() gives the
 * message of the most recent failure on the calling thread. Handles copy
 * their parameters at creation. A handle must not be used concurrently. */
#ifndef CLIFFKERN_C_API_H
#define CLIFFKERN_C_API_H

#include <stddef.h>

#if defined(_WIN32)
#define CK_API __declspec(dllexport)
#else
#define CK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum ck_status {
  CK_OK = 0,
  CK_ERR_INVALID_SIGNATURE = -1,
  CK_ERR_INVALID_METRIC_VALUE = -2,
  CK_ERR_DIMENSION_MISMATCH = -3,
  CK_ERR_SHAPE_MISMATCH = -4,
  CK_ERR_BATCH_NOT_DIVISIBLE = -5,
  CK_ERR_INDEX_OUT_OF_RANGE = -6,
  CK_ERR_MODE_CONFIG_MISMATCH = -7,
  CK_ERR_SPECIALIZATION_PRECONDITION = -8,
  CK_ERR_CONFIG_INVALID = -9,
  CK_ERR_VERIFICATION_FAILED = -10,
  CK_ERR_AXIS_MISMATCH = -11,
  CK_ERR_IO = -12,
  CK_ERR_NULL_ARGUMENT = -20,
  CK_ERR_INTERNAL = -99
};

/* Matches cliffkern::AggMode. */
enum ck_agg_mode { CK_AGG_LINEAR = 0, CK_AGG_SUM = 1, CK_AGG_MEAN = 2 };

enum ck_conv_impl { CK_CONV_REFERENCE = 0, CK_CONV_KERNELIZED = 1, CK_CONV_PACKED = 2 };

typedef struct ck_conv ck_conv;
typedef struct ck_linear ck_linear;
typedef struct ck_activation ck_activation;

CK_API const char* ck_last_error(void);
CK_API const char* ck_version(void);

/* signature: k entries of -1, 0 or +1. W = 0 selects the build default. B must be a multiple of W * U. */
CK_API int ck_conv_create(ck_conv** out, size_t k, const int* signature, size_t B, size_t C_in, size_t C_out,
                          size_t d_image, size_t d_filter, const float* filters, size_t filters_len,
                          const float* bias, size_t bias_len, size_t W, size_t U);
CK_API int ck_conv_forward(const ck_conv* h, int impl, const float* input, size_t input_len, float* output,
                           size_t output_len);
CK_API int ck_conv_output_len(const ck_conv* h, size_t* len);
CK_API void ck_conv_destroy(ck_conv* h);

CK_API int ck_linear_create(ck_linear** out, size_t k, const int* signature, size_t C_in, size_t C_out,
                            const float* weight, size_t weight_len, const float* bias, size_t bias_len);
/* impl: 0 reference, 1 blade GEMM. */
CK_API int ck_linear_forward(const ck_linear* h, int impl, size_t B, const float* input, size_t input_len,
                             float* output, size_t output_len);
CK_API void ck_linear_destroy(ck_linear* h);

/* weight and bias must be NULL unless mode is CK_AGG_LINEAR. */
CK_API int ck_activation_create(ck_activation** out, size_t k, const int* signature, int mode,
                                const size_t* kernel_indices, size_t K, size_t C, const float* weight,
                                size_t weight_len, const float* bias, size_t bias_len);
/* Uses the specialized kernel when its preconditions hold, the packed kernel otherwise. */
CK_API int ck_activation_forward(const ck_activation* h, size_t B, const float* input, size_t input_len,
                                 float* output, size_t output_len);
CK_API void ck_activation_destroy(ck_activation* h);

#ifdef __cplusplus
}
#endif

#endif
