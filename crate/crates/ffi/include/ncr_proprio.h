#ifndef NCR_PROPRIO_H
#define NCR_PROPRIO_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define NCR_FLAG_LOW_CONFIDENCE 1

#define NCR_FLAG_MULTI_CONTACT 2

#define NCR_FLAG_RECALIBRATED 4

// Result of every fallible call.
typedef enum NcrStatus {
  NCR_STATUS_OK = 0,
  NCR_STATUS_NULL_POINTER = 1,
  NCR_STATUS_INVALID_ARGUMENT = 2,
  NCR_STATUS_PARSE = 3,
  NCR_STATUS_INFEASIBLE = 4,
  NCR_STATUS_NOT_CONVERGED = 5,
  NCR_STATUS_ESTIMATION_FAILED = 6,
  NCR_STATUS_PANIC = 7,
} NcrStatus;

// Contact mode codes used in [`NcrEstimate::mode`].
typedef enum NcrMode {
  NCR_MODE_NONE = 0,
  NCR_MODE_ACTIVE = 1,
  NCR_MODE_PASSIVE = 2,
  NCR_MODE_TIP = 3,
} NcrMode;

// How [`ncr_estimator_process`] locates the contact.
typedef enum NcrEstimateMode {
  NCR_ESTIMATE_MODE_AUTO = 0,
  NCR_ESTIMATE_MODE_TIP = 1,
  NCR_ESTIMATE_MODE_BODY = 2,
} NcrEstimateMode;

// Streaming estimator with its friction and contact history.
typedef struct NcrEstimator NcrEstimator;

// Robot description plus the estimator tuning derived from it.
typedef struct NcrRobot NcrRobot;

// One sample of proximal sensing. Forces in N, torques in N·mm, lengths in mm.
typedef struct NcrFrame {
  double timestamp;
  double force[3];
  double torque[3];
  double tensions[2];
  double set_lengths[2];
} NcrFrame;

// Estimate for one frame. Quantities that do not exist without a contact are NaN.
typedef struct NcrEstimate {
  double timestamp;
  enum NcrMode mode;
  // Contact force in the base frame, N.
  double force[3];
  double arc_length;
  double contact_point[3];
  double tip_position[3];
  double residual;
  double torque_residual;
  // Bitwise OR of the `NCR_FLAG_*` constants.
  uint32_t flags;
} NcrEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if none. The
// pointer stays valid until the next failing call on the same thread.
const char *ncr_last_error(void);

// Library version as a static nul-terminated string.
const char *ncr_version(void);

// The bundled reference robot with default estimator tuning.
struct NcrRobot *ncr_robot_default(void);

// Parses a robot configuration document. On success `*out` owns a new handle.
//
// # Safety
// `text` must be a nul-terminated string and `out` a valid pointer.
enum NcrStatus ncr_robot_from_toml(const char *text, struct NcrRobot **out);

// Number of joints of the robot, or 0 for a null handle.
//
// # Safety
// `robot` must be null or a live handle.
size_t ncr_robot_joint_count(const struct NcrRobot *robot);

// Releases a robot handle. Null is ignored.
//
// # Safety
// `robot` must be null or a handle not yet freed.
void ncr_robot_free(struct NcrRobot *robot);

// Creates an estimator for `robot`. The robot handle may be freed afterwards.
//
// # Safety
// `robot` must be a live handle and `out` a valid pointer.
enum NcrStatus ncr_estimator_new(const struct NcrRobot *robot, struct NcrEstimator **out);

// Feeds one frame and estimates contact and shape for it. `mode` is one of
// the `NcrEstimateMode` values; anything else is an invalid argument.
//
// # Safety
// `estimator` must be a live handle; `frame` and `out` valid pointers.
enum NcrStatus ncr_estimator_process(struct NcrEstimator *estimator,
                                     const struct NcrFrame *frame,
                                     uint32_t mode,
                                     struct NcrEstimate *out);

// Backbone of the last estimate as `x, y, z` triples, base first then every
// joint tip. Writes at most `capacity` points and stores the number available
// in `*count`; call with `capacity = 0` to size the buffer.
//
// # Safety
// `estimator` must be a live handle, `count` valid, and `points` valid for
// `3 * capacity` doubles when `capacity > 0`.
enum NcrStatus ncr_estimator_shape(const struct NcrEstimator *estimator,
                                   double *points,
                                   size_t capacity,
                                   size_t *count);

// Forgets all history: friction state, contact onset and warm starts.
//
// # Safety
// `estimator` must be null or a live handle.
enum NcrStatus ncr_estimator_reset(struct NcrEstimator *estimator);

// Releases an estimator handle. Null is ignored.
//
// # Safety
// `estimator` must be null or a handle not yet freed.
void ncr_estimator_free(struct NcrEstimator *estimator);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NCR_PROPRIO_H */
