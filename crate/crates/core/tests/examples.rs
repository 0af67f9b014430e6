mod scattering_map {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scattering_map.rs"));
}

#[test]
fn scattering_map_runs() {
    scattering_map::run_example().expect("scattering_map example should run");
}

mod branch_decomposition {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/branch_decomposition.rs"));
}

#[test]
fn branch_decomposition_runs() {
    branch_decomposition::run_example().expect("branch_decomposition example should run");
}

mod cross_section {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cross_section.rs"));
}

#[test]
fn cross_section_runs() {
    cross_section::run_example().expect("cross_section example should run");
}

mod scattering_oracle {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/scattering_oracle.rs"));
}

#[test]
fn scattering_oracle_runs() {
    scattering_oracle::run_example().expect("scattering_oracle example should run");
}

mod trap_curve {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/trap_curve.rs"));
}

#[test]
fn trap_curve_runs() {
    trap_curve::run_example().expect("trap_curve example should run");
}

mod newton_flow {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/newton_flow.rs"));
}

#[test]
fn newton_flow_runs() {
    newton_flow::run_example().expect("newton_flow example should run");
}

mod tree_enumeration {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/tree_enumeration.rs"));
}

#[test]
fn tree_enumeration_runs() {
    tree_enumeration::run_example().expect("tree_enumeration example should run");
}

mod backward_flows {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/backward_flows.rs"));
}

#[test]
fn backward_flows_runs() {
    backward_flows::run_example().expect("backward_flows example should run");
}

mod overlap_detection {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/overlap_detection.rs"));
}

#[test]
fn overlap_detection_runs() {
    overlap_detection::run_example().expect("overlap_detection example should run");
}

mod mc_term {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/mc_term.rs"));
}

#[test]
fn mc_term_runs() {
    mc_term::run_example().expect("mc_term example should run");
}

mod series {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/series.rs"));
}

#[test]
fn series_runs() {
    series::run_example().expect("series example should run");
}

mod excluded_volume {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/excluded_volume.rs"));
}

#[test]
fn excluded_volume_runs() {
    excluded_volume::run_example().expect("excluded_volume example should run");
}

mod convergence {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/convergence.rs"));
}

#[test]
fn convergence_runs() {
    convergence::run_example().expect("convergence example should run");
}
