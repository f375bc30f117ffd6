macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(fields_and_transforms, "fields_and_transforms.rs");
example!(dyadic_decomposition, "dyadic_decomposition.rs");
example!(function_space_norms, "function_space_norms.rs");
example!(inequality_checks, "inequality_checks.rs");
example!(taylor_green_solver, "taylor_green_solver.rs");
example!(forced_flow_diagnostics, "forced_flow_diagnostics.rs");
example!(energy_spectrum, "energy_spectrum.rs");
example!(field_files_and_reports, "field_files_and_reports.rs");
example!(cli_pipeline, "cli_pipeline.rs");

#[test]
fn examples_run() {
    fields_and_transforms::run_example().unwrap();
    dyadic_decomposition::run_example().unwrap();
    function_space_norms::run_example().unwrap();
    inequality_checks::run_example().unwrap();
    taylor_green_solver::run_example().unwrap();
    forced_flow_diagnostics::run_example().unwrap();
    energy_spectrum::run_example().unwrap();
    field_files_and_reports::run_example().unwrap();
    cli_pipeline::run_example().unwrap();
}
