#ifndef PSFLOW_PSFLOW_H
#define PSFLOW_PSFLOW_H

/* C interface to the psflow Stokes solver. Every call returns a psf_status;
 * on failure psf_last_error() holds a message for the calling thread.
 * Objects are opaque and released with their matching *_free function. */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(PSFLOW_BUILDING_LIBRARY)
#define PSF_API __attribute__((visibility("default")))
#else
#define PSF_API
#endif

typedef enum psf_status {
  PSF_OK = 0,
  PSF_INVALID_ARGUMENT = 1,
  PSF_IO = 2,
  PSF_PARSE = 3,
  PSF_NON_CONFORMING = 4,
  PSF_DEGENERATE = 5,
  PSF_GEOMETRY = 6,
  PSF_SINGULAR_SYSTEM = 7,
  PSF_SOLVER_FAILURE = 8,
  PSF_INCOMPATIBLE_DATA = 9,
  PSF_DISCONNECTED_GRAPH = 10,
  PSF_BUFFER_TOO_SMALL = 11,
  PSF_INTERNAL = 12
} psf_status;

typedef enum psf_formulation { PSF_SOLENOIDAL = 0, PSF_SADDLE_POINT = 1 } psf_formulation;

typedef enum psf_fault { PSF_FAULT_NONE = 0, PSF_FAULT_SKIP_EXCLUSION = 1, PSF_FAULT_FLIP_MOMENT_SIGN = 2 } psf_fault;

typedef struct psf_mesh psf_mesh;
typedef struct psf_result psf_result;
typedef struct psf_convergence psf_convergence;
typedef struct psf_check_report psf_check_report;
typedef struct psf_bench psf_bench;

PSF_API const char* psf_version(void);
PSF_API const char* psf_status_string(psf_status status);
/* Message of the last failed call on this thread, "" if none. */
PSF_API const char* psf_last_error(void);

/* Meshes */

typedef struct psf_mesh_info {
  int vertices;
  int interior_vertices;
  int edges;
  int interior_edges;
  int triangles;
  int split_vertices;
  int subtriangles;
  int velocity_dofs;      /* |B| */
  int interior_velocity_dofs; /* |B0| */
  int pressure_dofs;      /* |S| */
  int z0;
  double h_macro;
  double h_split;
} psf_mesh_info;

PSF_API psf_status psf_mesh_structured(int n, psf_mesh** out);
PSF_API psf_status psf_mesh_load(const char* path, psf_mesh** out);
/* xy holds 2 * num_vertices coordinates, triangles 3 * num_triangles 0-based indices. */
PSF_API psf_status psf_mesh_from_arrays(const double* xy, int num_vertices, const int* triangles, int num_triangles,
                                        psf_mesh** out);
PSF_API psf_status psf_mesh_info_get(const psf_mesh* mesh, psf_mesh_info* out);
PSF_API psf_status psf_mesh_save(const psf_mesh* mesh, const char* path);
PSF_API void psf_mesh_free(psf_mesh* mesh);

/* Single solve of the manufactured problem */

typedef struct psf_result_info {
  int dof_v;
  int dof_p; /* 0 when no pressure was computed */
  double err_u_l2;
  double err_u_h1;
  double err_p_l2; /* NaN when no pressure was computed */
  double div_audit;
  double grad_max;
  double t_assemble;
  double t_solve;
  int split_vertices;
  int subtriangles;
} psf_result_info;

PSF_API psf_status psf_solve(const psf_mesh* mesh, psf_formulation formulation, double nu, int with_pressure,
                             psf_result** out);
PSF_API psf_status psf_result_info_get(const psf_result* result, psf_result_info* out);
/* Nodal velocity (x0, y0, x1, y1, ...) at every split vertex; capacity counts doubles. */
PSF_API psf_status psf_result_velocity(const psf_result* result, double* out, int capacity);
/* One pressure value per subtriangle. */
PSF_API psf_status psf_result_pressure(const psf_result* result, double* out, int capacity);
PSF_API void psf_result_free(psf_result* result);

/* Convergence study */

typedef struct psf_convergence_config {
  const int* sizes; /* structured meshes; when empty, mesh_files are used */
  int num_sizes;
  const char* const* mesh_files;
  int num_mesh_files;
  double nu;
  int with_pressure;
  int with_condition;
  psf_formulation formulation;
} psf_convergence_config;

/* Missing values (rates on the first row, pressure columns without pressure) are NaN. */
typedef struct psf_convergence_row {
  int mesh_n;
  double h_macro;
  double h_split;
  int dof_v;
  int dof_p;
  double err_u_l2;
  double err_u_h1;
  double rate_u_h1;
  double err_p_l2;
  double rate_p_l2;
  double div_audit;
  double grad_max;
  double t_assemble;
  double t_solve;
  double condition;
} psf_convergence_row;

PSF_API psf_status psf_convergence_run(const psf_convergence_config* config, psf_convergence** out);
PSF_API int psf_convergence_size(const psf_convergence* study);
PSF_API psf_status psf_convergence_row_get(const psf_convergence* study, int i, psf_convergence_row* out);
PSF_API psf_status psf_convergence_write_csv(const psf_convergence* study, const char* path);
PSF_API void psf_convergence_free(psf_convergence* study);

/* Invariant checks */

typedef struct psf_check_family {
  const char* name;          /* valid while the report lives */
  int checks;
  int failures;
  double worst;
  const char* first_failure; /* "" when the family passed */
} psf_check_family;

PSF_API psf_status psf_check_run(const psf_mesh* mesh, psf_fault fault, psf_check_report** out);
PSF_API int psf_check_passed(const psf_check_report* report);
PSF_API int psf_check_size(const psf_check_report* report);
PSF_API psf_status psf_check_family_get(const psf_check_report* report, int i, psf_check_family* out);
PSF_API void psf_check_free(psf_check_report* report);

/* Timing */

typedef struct psf_timing {
  double mean;
  double stddev;
} psf_timing;

typedef struct psf_phase_times {
  psf_timing assemble;
  psf_timing solve;
  psf_timing total;
} psf_phase_times;

typedef struct psf_bench_row {
  int mesh_n;
  int split_vertices;
  int dof_sol_v;
  int dof_sol_p;
  int dof_sp;
  psf_phase_times sol_velocity;
  psf_phase_times sol_pressure;
  psf_phase_times saddle_point;
} psf_bench_row;

PSF_API psf_status psf_bench_run(const int* sizes, int num_sizes, int repeats, double nu, psf_bench** out);
PSF_API int psf_bench_size(const psf_bench* bench);
PSF_API psf_status psf_bench_row_get(const psf_bench* bench, int i, psf_bench_row* out);
PSF_API psf_status psf_bench_write_csv(const psf_bench* bench, const char* path);
PSF_API void psf_bench_free(psf_bench* bench);

/* Dumps */

/* Nodal tables of every velocity basis function. */
PSF_API psf_status psf_dump_basis(const psf_mesh* mesh, const char* path);
/* Pressure spanning tree in rooted order. */
PSF_API psf_status psf_dump_tree(const psf_mesh* mesh, const char* path);

/* "4,8,16" or "1..4". Writes up to capacity sizes and the full count. */
PSF_API psf_status psf_parse_sizes(const char* text, int* out, int capacity, int* count);

#ifdef __cplusplus
}
#endif

#endif
