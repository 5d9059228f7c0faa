/* Copyright 2026 The djf Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the djf joint image filtering library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return DJF_OK (0) on success or a nonzero status code; the
 * message for the calling thread's last failure is available through
 * djf_last_error(). Tensors are dense float arrays in channel-major,
 * row-major order with samples normalized to [0,1] for images.
 */

#ifndef DJF_DJF_H
#define DJF_DJF_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DJF_API __declspec(dllexport)
#else
#define DJF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct djf_tensor djf_tensor;
typedef struct djf_model djf_model;

typedef enum djf_status {
    DJF_OK = 0,
    DJF_ERR_INVALID_ARGUMENT = 1,
    DJF_ERR_SHAPE_MISMATCH = 2,
    DJF_ERR_IO = 3,
    DJF_ERR_FORMAT = 4,
    DJF_ERR_NUMERIC = 5,
    DJF_ERR_INTERNAL = 6
} djf_status;

DJF_API const char* djf_version(void);

/* Message describing the calling thread's most recent failure ("" if none).
 * The pointer stays valid until the thread's next failing djf call. */
DJF_API const char* djf_last_error(void);

/* ---- tensors ---- */

/* data may be NULL for a zero-filled tensor; otherwise it must hold
 * channels*height*width floats in channel-major, row-major order. */
DJF_API djf_status djf_tensor_create(size_t channels, size_t height, size_t width,
                                     const float* data, djf_tensor** out);
DJF_API void djf_tensor_destroy(djf_tensor* t);
DJF_API size_t djf_tensor_channels(const djf_tensor* t);
DJF_API size_t djf_tensor_height(const djf_tensor* t);
DJF_API size_t djf_tensor_width(const djf_tensor* t);
DJF_API const float* djf_tensor_data(const djf_tensor* t);

/* ---- image files (binary PGM/PPM, 8- or 16-bit) ---- */

DJF_API djf_status djf_read_image(const char* path, djf_tensor** out, int* maxval);
DJF_API djf_status djf_write_image(const char* path, const djf_tensor* img, int maxval);

/* ---- models ---- */

/* config_json: full or partial NetworkConfig object; absent keys take the
 * library defaults. Weights are freshly initialized from the config seed. */
DJF_API djf_status djf_model_create(const char* config_json, djf_model** out);
DJF_API djf_status djf_model_load(const char* path, djf_model** out);
DJF_API djf_status djf_model_save(const djf_model* model, const char* path);
DJF_API void djf_model_destroy(djf_model* model);
DJF_API size_t djf_model_param_count(const djf_model* model);
/* Returns a malloc'd JSON string describing the model's config; free with
 * djf_string_free. NULL on failure. */
DJF_API char* djf_model_config_json(const djf_model* model);
/* Checkpoint metadata without instantiating the model: JSON with config,
 * param_count, payload_bytes, file_bytes. Free with djf_string_free. */
DJF_API char* djf_checkpoint_info_json(const char* path);
DJF_API void djf_string_free(char* s);

/* ---- filtering (threads: 0 = hardware default) ---- */

DJF_API djf_status djf_joint_filter(const djf_model* model, const djf_tensor* target,
                                    const djf_tensor* guidance, int threads, djf_tensor** out);
DJF_API djf_status djf_upsample(const djf_model* model, const djf_tensor* low_target,
                                const djf_tensor* guidance, int scale, int threads,
                                djf_tensor** out);
DJF_API djf_status djf_denoise(const djf_model* model, const djf_tensor* noisy,
                               const djf_tensor* guidance, int threads, djf_tensor** out);
/* rolling_guidance: 0 keeps the original image's luma as guidance, 1 uses the
 * previous iteration's output. */
DJF_API djf_status djf_texture_separate(const djf_model* model, const djf_tensor* image,
                                        int iterations, int rolling_guidance, int threads,
                                        djf_tensor** out);
/* subnet: "target", "guidance", or "fusion"; layer is 1-based. On success
 * *maps receives a malloc'd array of *count tensors; release with
 * djf_tensor_list_destroy. */
DJF_API djf_status djf_dump_features(const djf_model* model, const djf_tensor* target,
                                     const djf_tensor* guidance, const char* subnet, int layer,
                                     int threads, djf_tensor*** maps, size_t* count);
DJF_API void djf_tensor_list_destroy(djf_tensor** maps, size_t count);

/* ---- classical baselines ---- */

DJF_API djf_status djf_nearest_downsample(const djf_tensor* img, int scale, djf_tensor** out);
DJF_API djf_status djf_bicubic_resize(const djf_tensor* img, size_t out_h, size_t out_w,
                                      djf_tensor** out);
DJF_API djf_status djf_joint_bilateral_upsample(const djf_tensor* low,
                                                const djf_tensor* guidance,
                                                double sigma_spatial, double sigma_range,
                                                int window_radius, djf_tensor** out);
DJF_API djf_status djf_guided_filter(const djf_tensor* target, const djf_tensor* guidance,
                                     int radius, double epsilon, djf_tensor** out);

/* ---- training, evaluation, benchmarking ----
 *
 * task_json:   {"kind":"upsample","scale":8,"seed":0} or
 *              {"kind":"denoise","noise_variance":1e-3,"seed":0}
 * train_json:  partial TrainConfig overrides (patch_size, patches_total,
 *              batch_size, learning_rate, momentum, weight_decay, epochs,
 *              lr_decay_factor, lr_decay_point, seed)
 * filter_json: {"kind":"model","path":...} | {"kind":"bicubic"} |
 *              {"kind":"jbu","sigma_spatial":...,"sigma_range":...,
 *               "window_radius":...} | {"kind":"gf","radius":...,"epsilon":...}
 *              JBU/GF parameters default from the task scale when absent.
 */

/* Called after every optimizer step when non-NULL. */
typedef void (*djf_train_progress)(long iteration, double loss, double seconds, void* user);

DJF_API djf_status djf_train(const char* manifest_path, const char* task_json,
                             const char* net_config_json, const char* train_json, int threads,
                             djf_train_progress progress, void* user,
                             const char* checkpoint_out, const char* loss_csv_out);

/* unit_scale/mask_missing set the reporting convention. Either report path
 * may be NULL. mean/stddev outputs may be NULL. */
DJF_API djf_status djf_eval(const char* manifest_path, const char* filter_json,
                            const char* task_json, double unit_scale, int mask_missing,
                            int threads, const char* report_json_out,
                            const char* report_csv_out, double* mean_out, double* stddev_out);

DJF_API djf_status djf_benchmark(const char* filter_json, const char* task_json, size_t height,
                                 size_t width, int threads, int repetitions,
                                 double* seconds_out);

/* Writes a synthetic piecewise-constant depth/RGB dataset plus manifest under
 * dir; manifest_path_out (when non-NULL) receives the malloc'd manifest path. */
DJF_API djf_status djf_make_synthetic_dataset(const char* dir, size_t count, size_t height,
                                              size_t width, uint64_t seed,
                                              char** manifest_path_out);

#ifdef __cplusplus
}
#endif

#endif /* DJF_DJF_H */
