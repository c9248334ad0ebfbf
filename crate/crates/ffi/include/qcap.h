#ifndef QCAP_H
#define QCAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum QcapStatus {
  QCAP_STATUS_OK = 0,
  QCAP_STATUS_NULL_POINTER = 1,
  QCAP_STATUS_INVALID_ARGUMENT = 2,
  // Input failed a CPTP, Hermiticity or positivity check.
  QCAP_STATUS_VALIDATION = 3,
  QCAP_STATUS_PARSE = 4,
  QCAP_STATUS_DIMENSION = 5,
  QCAP_STATUS_NUMERICAL = 6,
  QCAP_STATUS_PANIC = 7,
} QcapStatus;

// Opaque channel handle.
typedef struct QcapChannel QcapChannel;

// Opaque density-matrix handle.
typedef struct QcapState QcapState;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the
// next call on the same thread.
const char *qcap_last_error(void);

// Library version as a static string.
const char *qcap_version(void);

// Builds a zoo channel from a spec such as `dep:q=0.1` or `erasure50`.
enum QcapStatus qcap_channel_from_spec(const char *spec, struct QcapChannel **out);

// Parses a channel from its JSON encoding.
enum QcapStatus qcap_channel_from_json(const char *json, struct QcapChannel **out);

// Builds a channel from Kraus operators stored back to back, each row-major
// `dim_out x dim_in`, with separate real and imaginary arrays.
enum QcapStatus qcap_channel_from_kraus(size_t dim_in,
                                        size_t dim_out,
                                        size_t count,
                                        const double *re,
                                        const double *im,
                                        struct QcapChannel **out);

void qcap_channel_free(struct QcapChannel *ch);

enum QcapStatus qcap_channel_dims(const struct QcapChannel *ch,
                                  size_t *dim_in,
                                  size_t *dim_out,
                                  size_t *kraus_count);

// JSON encoding of the channel; release with [`qcap_string_free`].
enum QcapStatus qcap_channel_to_json(const struct QcapChannel *ch, char **out);

void qcap_string_free(char *s);

// `outer ∘ inner`: `inner` acts first.
enum QcapStatus qcap_channel_compose(const struct QcapChannel *outer,
                                     const struct QcapChannel *inner,
                                     struct QcapChannel **out);

enum QcapStatus qcap_channel_tensor(const struct QcapChannel *a,
                                    const struct QcapChannel *b,
                                    struct QcapChannel **out);

enum QcapStatus qcap_channel_complementary(const struct QcapChannel *ch, struct QcapChannel **out);

// PPT test of the Choi state; also reports the smallest partial-transpose eigenvalue.
enum QcapStatus qcap_channel_is_ppt(const struct QcapChannel *ch,
                                    bool *ppt,
                                    double *min_eigenvalue);

// Density matrix from row-major real and imaginary parts of length `dim * dim`.
enum QcapStatus qcap_state_new(size_t dim,
                               const double *re,
                               const double *im,
                               struct QcapState **out);

enum QcapStatus qcap_state_maximally_mixed(size_t dim, struct QcapState **out);

void qcap_state_free(struct QcapState *s);

enum QcapStatus qcap_state_dim(const struct QcapState *s, size_t *dim);

// Copies the entries into caller buffers of length `dim * dim`.
enum QcapStatus qcap_state_entries(const struct QcapState *s, double *re, double *im, size_t len);

enum QcapStatus qcap_apply(const struct QcapChannel *ch,
                           const struct QcapState *s,
                           struct QcapState **out);

// Von Neumann entropy in bits.
enum QcapStatus qcap_entropy(const struct QcapState *s, double *out);

enum QcapStatus qcap_coherent_information(const struct QcapState *s,
                                          const struct QcapChannel *ch,
                                          double *out);

// Optimized coherent information (a lower bound); `argmax` may be null.
enum QcapStatus qcap_maximize_coherent_information(const struct QcapChannel *ch,
                                                   size_t restarts,
                                                   uint64_t seed,
                                                   double *value,
                                                   struct QcapState **argmax);

// Optimized Holevo quantity over ensembles of `members` pure states; zero
// members selects the default size.
enum QcapStatus qcap_maximize_holevo(const struct QcapChannel *ch,
                                     size_t members,
                                     size_t restarts,
                                     uint64_t seed,
                                     double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCAP_H */
