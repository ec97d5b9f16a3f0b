#ifndef CURLFEM_H
#define CURLFEM_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CurlfemStatus {
  CURLFEM_STATUS_OK = 0,
  CURLFEM_STATUS_NULL_POINTER = 1,
  CURLFEM_STATUS_INVALID_ARGUMENT = 2,
  CURLFEM_STATUS_UNSUPPORTED = 3,
  CURLFEM_STATUS_MESH = 4,
  CURLFEM_STATUS_SOLVER = 5,
  CURLFEM_STATUS_IO = 6,
  CURLFEM_STATUS_NOT_AVAILABLE = 7,
  CURLFEM_STATUS_INTERNAL = 8,
  CURLFEM_STATUS_PANIC = 9,
} CurlfemStatus;

// Columns of a convergence report.
typedef enum CurlfemColumn {
  CURLFEM_COLUMN_L2_ERROR = 0,
  CURLFEM_COLUMN_HCURL_ERROR = 1,
  CURLFEM_COLUMN_PULLBACK_ERROR = 2,
  CURLFEM_COLUMN_D0 = 3,
  CURLFEM_COLUMN_D1 = 4,
  CURLFEM_COLUMN_HAUSDORFF = 5,
} CurlfemColumn;

// A tetrahedral mesh.
typedef struct CurlfemMesh CurlfemMesh;

// Result of a refinement study.
typedef struct CurlfemReport CurlfemReport;

typedef struct CurlfemMeshInfo {
  size_t order;
  size_t cells;
  size_t nodes;
  size_t edges;
  size_t faces;
  size_t boundary_faces;
  // Largest vertex-skeleton edge length.
  double h;
} CurlfemMeshInfo;

// One report row; absent values are NaN.
typedef struct CurlfemRow {
  size_t level;
  double h;
  size_t ndof;
  double l2_error;
  double hcurl_error;
  double pullback_error;
  double d0;
  double d1;
  double hausdorff;
} CurlfemRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call into this library from the same thread.
const char *curlfem_last_error(void);

// Library version as a static string.
const char *curlfem_version(void);

// Built-in ball mesh at `level` with geometric order 1 or 2.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum CurlfemStatus curlfem_mesh_ball(size_t level, size_t order, struct CurlfemMesh **out);

// Built-in unit-cube mesh at `level` (order 1).
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum CurlfemStatus curlfem_mesh_cube(size_t level, struct CurlfemMesh **out);

// Reads a Gmsh 2.2 or 4.1 ASCII mesh.
//
// # Safety
// `path` must be a NUL-terminated string and `out` a valid pointer.
enum CurlfemStatus curlfem_mesh_read_gmsh(const char *path, struct CurlfemMesh **out);

// Sizes and mesh width of `mesh`.
//
// # Safety
// `mesh` must be a live handle and `info` a valid pointer.
enum CurlfemStatus curlfem_mesh_info(const struct CurlfemMesh *mesh, struct CurlfemMeshInfo *info);

// # Safety
// `mesh` must be null or a handle not yet freed.
void curlfem_mesh_free(struct CurlfemMesh *mesh);

// Runs a study described by a JSON configuration, for example
// `{"study": "ball-convergence", "k": 1, "geo_order": 1, "levels": 3}`.
//
// # Safety
// `config_json` must be a NUL-terminated string and `out` a valid pointer.
enum CurlfemStatus curlfem_study_run(const char *config_json, struct CurlfemReport **out);

// # Safety
// `report` must be a live handle and `rows` a valid pointer.
enum CurlfemStatus curlfem_report_num_rows(const struct CurlfemReport *report, size_t *rows);

// Row `index`, ordered by decreasing mesh width.
//
// # Safety
// `report` must be a live handle and `row` a valid pointer.
enum CurlfemStatus curlfem_report_row(const struct CurlfemReport *report,
                                      size_t index,
                                      struct CurlfemRow *row);

// Convergence order of `column`, a [`CurlfemColumn`] value, over the last
// rows. Returns `CURLFEM_STATUS_NOT_AVAILABLE` when the column is empty.
//
// # Safety
// `report` must be a live handle and `slope` a valid pointer.
enum CurlfemStatus curlfem_report_slope(const struct CurlfemReport *report,
                                        uint32_t column,
                                        double *slope);

// Report as CSV text; release with [`curlfem_string_free`].
//
// # Safety
// `report` must be a live handle and `csv` a valid pointer.
enum CurlfemStatus curlfem_report_csv(const struct CurlfemReport *report, char **csv);

// # Safety
// `report` must be null or a handle not yet freed.
void curlfem_report_free(struct CurlfemReport *report);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void curlfem_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CURLFEM_H */
